use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::normalize::AuthenticityCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldOutcome {
    TruePositive,
    TrueNegative,
    FalsePositive,
    FalseNegative,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl OutcomeCounts {
    pub fn add(&mut self, outcome: FieldOutcome) {
        match outcome {
            FieldOutcome::TruePositive => self.tp += 1,
            FieldOutcome::TrueNegative => self.tn += 1,
            FieldOutcome::FalsePositive => self.fp += 1,
            FieldOutcome::FalseNegative => self.fn_ += 1,
        }
    }

    pub fn metrics(&self) -> MetricsTriple {
        MetricsTriple::from_pr(ratio(self.tp, self.tp + self.fp), ratio(self.tp, self.tp + self.fn_))
    }
}

impl FromIterator<FieldOutcome> for OutcomeCounts {
    fn from_iter<T: IntoIterator<Item = FieldOutcome>>(iter: T) -> Self {
        let mut c = Self::default();
        iter.into_iter().for_each(|o| c.add(o));
        c
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Rounds half away from zero at `decimals` places. The small nudge keeps
/// values like 0.845 (stored as 0.84499..) on the side their decimal form implies.
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    (scaled.abs() + 0.5 + 1e-9).floor().copysign(scaled) / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricsTriple {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: f1_score(precision, recall),
        }
    }

    /// Display precision: half-up to two decimals.
    pub fn rounded(&self) -> Self {
        Self {
            precision: round_half_up(self.precision, 2),
            recall: round_half_up(self.recall, 2),
            f1: round_half_up(self.f1, 2),
        }
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn metrics_from_outcomes(outcomes: &[FieldOutcome]) -> MetricsTriple {
    outcomes.iter().copied().collect::<OutcomeCounts>().metrics()
}

/// `counts[gold][predicted]`, indexed by [`AuthenticityCategory::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix3 {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix3 {
    pub fn get(&self, gold: AuthenticityCategory, predicted: AuthenticityCategory) -> u64 {
        self.counts[gold.index()][predicted.index()]
    }

    pub fn add(&mut self, gold: AuthenticityCategory, predicted: AuthenticityCategory) {
        self.counts[gold.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, gold: AuthenticityCategory) -> u64 {
        self.counts[gold.index()].iter().sum()
    }

    pub fn column_sum(&self, predicted: AuthenticityCategory) -> u64 {
        self.counts.iter().map(|row| row[predicted.index()]).sum()
    }

    pub fn off_diagonal(&self) -> u64 {
        self.total() - (0..3).map(|i| self.counts[i][i]).sum::<u64>()
    }
}

pub fn confusion_matrix(
    pairs: &[(AuthenticityCategory, AuthenticityCategory)],
) -> ConfusionMatrix3 {
    let mut m = ConfusionMatrix3::default();
    for &(gold, predicted) in pairs {
        m.add(gold, predicted);
    }
    m
}

/// Precision over the predicted column, recall over the gold row.
pub fn per_class_metrics(matrix: &ConfusionMatrix3) -> IndexMap<AuthenticityCategory, MetricsTriple> {
    AuthenticityCategory::ALL
        .into_iter()
        .map(|c| {
            let hit = matrix.get(c, c);
            let triple =
                MetricsTriple::from_pr(ratio(hit, matrix.column_sum(c)), ratio(hit, matrix.row_sum(c)));
            (c, triple)
        })
        .collect()
}

/// Percentage of faulty or unidentified claims, truncated to one decimal.
pub fn claim_identification_rate(correct: u64, faulty: u64) -> Option<f64> {
    let total = correct + faulty;
    if total == 0 {
        return None;
    }
    // integer arithmetic keeps 42/296 at 14.1 rather than drifting through floats
    Some((1000 * faulty / total) as f64 / 10.0)
}
