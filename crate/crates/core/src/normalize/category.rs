use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuthenticityCategory {
    Authentic,
    Forgery,
    Suspicious,
}

impl AuthenticityCategory {
    pub const ALL: [AuthenticityCategory; 3] = [
        AuthenticityCategory::Authentic,
        AuthenticityCategory::Forgery,
        AuthenticityCategory::Suspicious,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AuthenticityCategory::Authentic => "Authentic",
            AuthenticityCategory::Forgery => "Forgery",
            AuthenticityCategory::Suspicious => "Suspicious",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AuthenticityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized category label {raw:?}")]
pub struct CategoryError {
    pub raw: String,
}

const SYNONYMS: &[(&str, AuthenticityCategory)] = {
    use AuthenticityCategory::*;
    &[
        ("authentic", Authentic),
        ("genuine", Authentic),
        ("real", Authentic),
        ("legitimate", Authentic),
        ("original", Authentic),
        ("forgery", Forgery),
        ("forged", Forgery),
        ("fake", Forgery),
        ("spurious", Forgery),
        ("counterfeit", Forgery),
        ("fabricated", Forgery),
        ("fabrication", Forgery),
        ("false", Forgery),
        ("falsified", Forgery),
        ("falsification", Forgery),
        ("fraud", Forgery),
        ("fraudulent", Forgery),
        ("suspicious", Suspicious),
        ("suspect", Suspicious),
        ("suspected", Suspicious),
        ("doubtful", Suspicious),
        ("dubious", Suspicious),
        ("questionable", Suspicious),
        ("uncertain", Suspicious),
        ("disputed", Suspicious),
        ("interpolated", Suspicious),
        ("suspicious forgery", Suspicious),
        ("suspected forgery", Suspicious),
        ("possible forgery", Suspicious),
        ("possibly forged", Suspicious),
        ("partially forged", Suspicious),
    ]
};

/// Case-insensitive match against the three category names and their synonyms.
pub fn normalize_category(raw: &str) -> Result<AuthenticityCategory, CategoryError> {
    let key = normalize_label(raw);
    SYNONYMS
        .iter()
        .find(|(label, _)| *label == key)
        .map(|(_, c)| *c)
        .ok_or_else(|| CategoryError {
            raw: raw.to_string(),
        })
}

impl FromStr for AuthenticityCategory {
    type Err = CategoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_category(s)
    }
}
