//! Cleaning and type validation of raw extraction output.

mod category;
mod date;

use serde::{Deserialize, Serialize};

use crate::extract::{ExtractionResult, Mention};
use crate::Warning;

pub use category::{normalize_category, AuthenticityCategory, CategoryError};
pub use date::{
    century_interval, century_of_interval, century_of_year, parse_historical_date, DateError,
    YearInterval, CIRCA_WINDOW,
};

pub const STAGE: &str = "normalize";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedMetadata {
    pub title: Option<String>,
    pub doc_type: Option<String>,
    pub alleged_date: Option<YearInterval>,
    pub alleged_date_raw: Option<String>,
    pub alleged_place_raw: Option<String>,
    pub alleged_author_raw: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedClaim {
    pub claimant_raw: String,
    pub category: AuthenticityCategory,
    pub opinion_text: String,
    pub source_raw: Option<String>,
    #[serde(default)]
    pub features_observed: Vec<String>,
    #[serde(default)]
    pub evidence: Vec<String>,
}

impl NormalizedClaim {
    pub fn new(
        claimant: impl Into<String>,
        category: AuthenticityCategory,
        opinion: impl Into<String>,
    ) -> Self {
        Self {
            claimant_raw: claimant.into(),
            category,
            opinion_text: opinion.into(),
            source_raw: None,
            features_observed: Vec::new(),
            evidence: Vec::new(),
        }
    }
}

/// Normalized output for one corpus entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedEntry {
    pub entry_id: String,
    pub metadata: NormalizedMetadata,
    pub claims: Vec<NormalizedClaim>,
}

fn claimant_key(claimant: &str) -> String {
    claimant
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn merge_text(into: &mut String, extra: &str) {
    if !into.split('\n').any(|line| line == extra) {
        into.push('\n');
        into.push_str(extra);
    }
}

/// Turns one extraction result into validated metadata and claims.
///
/// Never fails: unparseable dates keep their raw text, claims without a
/// recognizable category are dropped, and duplicate claims are merged, each
/// with a warning.
pub fn normalize_extraction(result: &ExtractionResult) -> (NormalizedEntry, Vec<Warning>) {
    let id = result.entry_id.as_str();
    let mut warnings = Vec::new();
    let raw = &result.metadata;
    let stated = |m: &Mention| m.as_stated().map(str::to_string);

    let alleged_date_raw = stated(&raw.alleged_date);
    let alleged_date = alleged_date_raw.as_deref().and_then(|d| match parse_historical_date(d) {
        Ok(interval) => Some(interval),
        Err(e) => {
            warnings.push(Warning::new(id, STAGE, e.to_string()).with_raw(d));
            None
        }
    });
    let metadata = NormalizedMetadata {
        title: stated(&raw.title),
        doc_type: stated(&raw.doc_type),
        alleged_date,
        alleged_date_raw,
        alleged_place_raw: stated(&raw.alleged_place),
        alleged_author_raw: stated(&raw.alleged_author),
    };

    let mut claims: Vec<NormalizedClaim> = Vec::new();
    for claim in &result.claims {
        let Some(label) = claim.category_label.as_deref() else {
            warnings.push(
                Warning::new(id, STAGE, format!("claim by {:?} has no category", claim.claimant))
                    .with_raw(&claim.opinion_text),
            );
            continue;
        };
        let category = match normalize_category(label) {
            Ok(c) => c,
            Err(e) => {
                warnings.push(
                    Warning::new(id, STAGE, format!("claim by {:?}: {e}", claim.claimant))
                        .with_raw(label),
                );
                continue;
            }
        };
        let key = claimant_key(&claim.claimant);
        if let Some(existing) = claims
            .iter_mut()
            .find(|c| c.category == category && claimant_key(&c.claimant_raw) == key)
        {
            merge_text(&mut existing.opinion_text, claim.opinion_text.trim());
            if let Some(src) = claim.source.as_deref() {
                match &mut existing.source_raw {
                    Some(s) if s.split("; ").any(|x| x == src) => {}
                    Some(s) => {
                        s.push_str("; ");
                        s.push_str(src);
                    }
                    None => existing.source_raw = Some(src.to_string()),
                }
            }
            warnings.push(
                Warning::new(
                    id,
                    STAGE,
                    format!("merged duplicate {category} claim by {:?}", claim.claimant),
                )
                .with_raw(&claim.opinion_text),
            );
            continue;
        }
        claims.push(NormalizedClaim {
            claimant_raw: claim.claimant.trim().to_string(),
            category,
            opinion_text: claim.opinion_text.trim().to_string(),
            source_raw: claim.source.clone(),
            features_observed: Vec::new(),
            evidence: Vec::new(),
        });
    }

    (
        NormalizedEntry {
            entry_id: result.entry_id.clone(),
            metadata,
            claims,
        },
        warnings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{RawClaim, RawMetadata};

    fn result(metadata: RawMetadata, claims: Vec<RawClaim>) -> ExtractionResult {
        ExtractionResult {
            entry_id: "doc-01".into(),
            model_id: "m".into(),
            template_version: "t".into(),
            metadata,
            claims,
            failures: vec![],
            transcript: vec![],
        }
    }

    #[test]
    fn metadata_markers_and_dates() {
        let meta = RawMetadata {
            title: "Donation of Constantine".into(),
            doc_type: "charter".into(),
            alleged_date: "4th century".into(),
            alleged_place: Mention::NotMentioned,
            alleged_author: "Constantine".into(),
        };
        let (entry, warnings) = normalize_extraction(&result(meta, vec![]));
        assert!(warnings.is_empty());
        assert_eq!(entry.metadata.alleged_date, YearInterval::new(300, 399));
        assert_eq!(entry.metadata.alleged_date_raw.as_deref(), Some("4th century"));
        assert_eq!(entry.metadata.alleged_place_raw, None);
        assert_eq!(entry.metadata.doc_type.as_deref(), Some("charter"));
    }

    #[test]
    fn unparseable_date_keeps_raw_with_warning() {
        let meta = RawMetadata {
            alleged_date: "allegedly ancient".into(),
            ..Default::default()
        };
        let (entry, warnings) = normalize_extraction(&result(meta, vec![]));
        assert_eq!(entry.metadata.alleged_date, None);
        assert_eq!(entry.metadata.alleged_date_raw.as_deref(), Some("allegedly ancient"));
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].raw.as_deref(), Some("allegedly ancient"));
    }

    #[test]
    fn unclassified_claim_excluded_with_warning() {
        let claims = vec![
            RawClaim::new("Lorenzo Valla", "a forgery"),
            RawClaim::new("Nicholas of Cusa", "doubted").classified("Suspicious"),
        ];
        let (entry, warnings) = normalize_extraction(&result(RawMetadata::default(), claims));
        assert_eq!(entry.claims.len(), 1);
        assert_eq!(entry.claims[0].claimant_raw, "Nicholas of Cusa");
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn unrecognized_label_excluded() {
        let claims = vec![RawClaim::new("X", "y").classified("probably real-ish")];
        let (entry, warnings) = normalize_extraction(&result(RawMetadata::default(), claims));
        assert!(entry.claims.is_empty());
        assert_eq!(warnings[0].raw.as_deref(), Some("probably real-ish"));
    }

    #[test]
    fn duplicates_merge() {
        let mut second = RawClaim::new("valla", "its Latin is anachronistic").classified("forged");
        second.source = Some("De falso credita".into());
        let claims = vec![
            RawClaim::new("Valla", "declared it a forgery").classified("Forgery"),
            second,
            RawClaim::new("Valla", "but also doubted it").classified("Suspicious"),
        ];
        let (entry, warnings) = normalize_extraction(&result(RawMetadata::default(), claims));
        assert_eq!(entry.claims.len(), 2);
        let merged = &entry.claims[0];
        assert_eq!(merged.opinion_text, "declared it a forgery\nits Latin is anachronistic");
        assert_eq!(merged.source_raw.as_deref(), Some("De falso credita"));
        assert_eq!(warnings.len(), 1);
    }
}
