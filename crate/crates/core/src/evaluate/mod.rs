//! Scoring extraction runs against a gold standard.

mod metrics;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{ExtractionResult, Mention, RawMetadata};
use crate::normalize::{normalize_category, parse_historical_date, AuthenticityCategory};
use crate::text::normalize_label;

pub use metrics::{
    claim_identification_rate, confusion_matrix, f1_score, metrics_from_outcomes,
    per_class_metrics, round_half_up, ConfusionMatrix3, FieldOutcome, MetricsTriple,
    OutcomeCounts,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldClaim {
    pub claimant: String,
    pub category: AuthenticityCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldEntry {
    pub entry_id: String,
    pub gold_metadata: RawMetadata,
    pub gold_claims: Vec<GoldClaim>,
    /// Variant spelling → canonical spelling, applied to both sides before comparing.
    #[serde(default, skip_serializing_if = "HashMap::is_empty")]
    pub aliases: HashMap<String, String>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no gold entry for result `{0}`")]
    MissingGold(String),
    #[error("gold entry `{0}` appears more than once")]
    DuplicateGold(String),
    #[error("cannot read gold file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed gold file {path}: {source}")]
    Malformed {
        path: PathBuf,
        source: serde_json::Error,
    },
}

pub fn load_gold(path: &Path) -> Result<Vec<GoldEntry>, EvalError> {
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let gold: Vec<GoldEntry> = serde_json::from_str(&text).map_err(|source| EvalError::Malformed {
        path: path.to_path_buf(),
        source,
    })?;
    let mut seen = HashSet::new();
    for g in &gold {
        if !seen.insert(g.entry_id.as_str()) {
            return Err(EvalError::DuplicateGold(g.entry_id.clone()));
        }
    }
    Ok(gold)
}

/// Normalized comparison key with the alias map applied.
#[derive(Debug, Clone, Default)]
pub struct Aliases(HashMap<String, String>);

impl Aliases {
    pub fn new(map: &HashMap<String, String>) -> Self {
        Self(
            map.iter()
                .map(|(k, v)| (normalize_label(k), normalize_label(v)))
                .collect(),
        )
    }

    pub fn canonical(&self, s: &str) -> String {
        let key = normalize_label(s);
        self.0.get(&key).cloned().unwrap_or(key)
    }

    pub fn same(&self, a: &str, b: &str) -> bool {
        self.canonical(a) == self.canonical(b)
    }
}

/// Four-way outcome; a present value extracted wrongly counts as a false negative.
pub fn judge_field(gold: &Mention, predicted: &Mention, aliases: &Aliases) -> FieldOutcome {
    judge_with(gold, predicted, |g, p| aliases.same(g, p))
}

fn judge_with(gold: &Mention, predicted: &Mention, same: impl Fn(&str, &str) -> bool) -> FieldOutcome {
    match (gold.as_stated(), predicted.as_stated()) {
        (None, None) => FieldOutcome::TrueNegative,
        (None, Some(_)) => FieldOutcome::FalsePositive,
        (Some(_), None) => FieldOutcome::FalseNegative,
        (Some(g), Some(p)) if same(g, p) => FieldOutcome::TruePositive,
        (Some(_), Some(_)) => FieldOutcome::FalseNegative,
    }
}

/// Dates also match when both parse to the same year interval.
fn same_date(aliases: &Aliases, g: &str, p: &str) -> bool {
    aliases.same(g, p)
        || matches!(
            (parse_historical_date(g), parse_historical_date(p)),
            (Ok(a), Ok(b)) if a == b
        )
}

pub const FIELD_LABELS: [(&str, &str); 5] = [
    ("title", "Title"),
    ("doc_type", "Type"),
    ("alleged_date", "Date"),
    ("alleged_place", "Place"),
    ("alleged_author", "Author"),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClaimIdentification {
    pub correct: u64,
    pub faulty: u64,
    pub faulty_pct: f64,
    /// Predicted claims whose claimant matches no gold claimant.
    pub spurious: u64,
    /// Correctly identified claims without a usable category; kept out of the matrix.
    pub unclassified: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_id: String,
    pub entries: usize,
    pub per_field: IndexMap<String, MetricsTriple>,
    pub field_counts: IndexMap<String, OutcomeCounts>,
    pub claim_id: ClaimIdentification,
    pub confusion: ConfusionMatrix3,
    pub per_class: IndexMap<AuthenticityCategory, MetricsTriple>,
}

/// Pairs gold claims with predicted claims one-to-one by claimant, in gold order.
/// Returns `(gold index, predicted index)` pairs.
pub fn match_claimants(gold: &[GoldClaim], predicted: &[&str], aliases: &Aliases) -> Vec<(usize, usize)> {
    let mut used = vec![false; predicted.len()];
    let mut out = Vec::new();
    for (gi, g) in gold.iter().enumerate() {
        let key = aliases.canonical(&g.claimant);
        if let Some(pi) = (0..predicted.len()).find(|&pi| !used[pi] && aliases.canonical(predicted[pi]) == key) {
            used[pi] = true;
            out.push((gi, pi));
        }
    }
    out
}

pub fn evaluate_run(
    model_id: &str,
    results: &[ExtractionResult],
    gold: &[GoldEntry],
) -> Result<EvalReport, EvalError> {
    let by_id: HashMap<&str, &GoldEntry> = gold.iter().map(|g| (g.entry_id.as_str(), g)).collect();
    let mut field_counts: IndexMap<String, OutcomeCounts> = FIELD_LABELS
        .iter()
        .map(|(f, _)| (f.to_string(), OutcomeCounts::default()))
        .collect();
    let mut correct = 0;
    let mut total_gold = 0;
    let mut spurious = 0;
    let mut unclassified = 0;
    let mut pairs = Vec::new();
    for result in results {
        let g = by_id
            .get(result.entry_id.as_str())
            .ok_or_else(|| EvalError::MissingGold(result.entry_id.clone()))?;
        let aliases = Aliases::new(&g.aliases);
        for (field, counts) in field_counts.iter_mut() {
            let gold_value = g.gold_metadata.field(field).expect("known field");
            let predicted = result.metadata.field(field).expect("known field");
            let outcome = if field == "alleged_date" {
                judge_with(gold_value, predicted, |a, b| same_date(&aliases, a, b))
            } else {
                judge_field(gold_value, predicted, &aliases)
            };
            counts.add(outcome);
        }
        let predicted: Vec<&str> = result.claims.iter().map(|c| c.claimant.as_str()).collect();
        let matched = match_claimants(&g.gold_claims, &predicted, &aliases);
        total_gold += g.gold_claims.len() as u64;
        correct += matched.len() as u64;
        spurious += (predicted.len() - matched.len()) as u64;
        for (gi, pi) in matched {
            let category = result.claims[pi]
                .category_label
                .as_deref()
                .and_then(|l| normalize_category(l).ok());
            match category {
                Some(p) => pairs.push((g.gold_claims[gi].category, p)),
                None => unclassified += 1,
            }
        }
    }
    let faulty = total_gold - correct;
    let confusion = confusion_matrix(&pairs);
    Ok(EvalReport {
        model_id: model_id.to_string(),
        entries: results.len(),
        per_field: field_counts
            .iter()
            .map(|(f, c)| (f.clone(), c.metrics().rounded()))
            .collect(),
        field_counts,
        claim_id: ClaimIdentification {
            correct,
            faulty,
            faulty_pct: claim_identification_rate(correct, faulty).unwrap_or(0.0),
            spurious,
            unclassified,
        },
        per_class: per_class_metrics(&confusion)
            .into_iter()
            .map(|(c, t)| (c, t.rounded()))
            .collect(),
        confusion,
    })
}

/// Plain-text tables comparing one or more reports side by side.
pub fn render_tables(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let header = |out: &mut String, first: &str| {
        let _ = write!(out, "{first:<12}");
        for r in reports {
            let _ = write!(out, " | {:^20}", truncate(&r.model_id, 20));
        }
        out.push('\n');
        let _ = write!(out, "{:<12}", "");
        for _ in reports {
            let _ = write!(out, " | {:>6}{:>7}{:>7}", "P", "R", "F1");
        }
        out.push('\n');
    };
    let triple = |out: &mut String, t: Option<&MetricsTriple>| match t {
        Some(t) => {
            let _ = write!(out, " | {:>6.2}{:>7.2}{:>7.2}", t.precision, t.recall, t.f1);
        }
        None => {
            let _ = write!(out, " | {:>20}", "-");
        }
    };

    out.push_str("Metadata extraction\n");
    header(&mut out, "Field");
    for (field, label) in FIELD_LABELS {
        let _ = write!(out, "{label:<12}");
        for r in reports {
            triple(&mut out, r.per_field.get(field));
        }
        out.push('\n');
    }

    out.push_str("\nClaim identification\n");
    let _ = writeln!(out, "{:<20} {:>8} {:>22}", "Model", "Correct", "Faulty or unidentified");
    for r in reports {
        let c = &r.claim_id;
        let _ = writeln!(
            out,
            "{:<20} {:>8} {:>22}",
            truncate(&r.model_id, 20),
            c.correct,
            format!("{} ({:.1}%)", c.faulty, c.faulty_pct)
        );
    }

    out.push_str("\nClaim categorisation\n");
    header(&mut out, "Category");
    for c in AuthenticityCategory::ALL {
        let _ = write!(out, "{:<12}", c.label());
        for r in reports {
            triple(&mut out, r.per_class.get(&c));
        }
        out.push('\n');
    }
    out
}

fn truncate(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}
