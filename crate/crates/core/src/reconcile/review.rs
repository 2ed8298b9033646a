//! Human review of ambiguous matches, from a terminal or a decisions file.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{AuthorityCandidate, EntityKind, Service};
use crate::text::normalize_label;

const REJECT_ALL: &str = "REJECT_ALL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingReview {
    pub raw_label: String,
    pub kind: EntityKind,
    pub candidates: Vec<AuthorityCandidate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorityIds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wikidata_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viaf_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geonames_id: Option<String>,
}

impl AuthorityIds {
    pub fn of(candidate: &AuthorityCandidate) -> Self {
        let id = Some(candidate.external_id.clone());
        match candidate.service {
            Service::Wikidata => Self { wikidata_id: id, ..Self::default() },
            Service::Viaf => Self { viaf_id: id, ..Self::default() },
            Service::GeoNames => Self { geonames_id: id, ..Self::default() },
        }
    }

    fn get(&self, service: Service) -> Option<&str> {
        match service {
            Service::Wikidata => self.wikidata_id.as_deref(),
            Service::Viaf => self.viaf_id.as_deref(),
            Service::GeoNames => self.geonames_id.as_deref(),
        }
    }

    fn is_empty(&self) -> bool {
        self.wikidata_id.is_none() && self.viaf_id.is_none() && self.geonames_id.is_none()
    }
}

/// A recorded choice: concrete authority ids, or rejection of every candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    Ids(AuthorityIds),
    RejectAll,
}

/// A choice as written in a decisions file, which may also name a
/// candidate by its 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceInput {
    Candidate(usize),
    Ids(AuthorityIds),
    RejectAll,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawChoice {
    Tag(String),
    Candidate { candidate: usize },
    Ids(AuthorityIds),
}

impl<'de> Deserialize<'de> for ChoiceInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match RawChoice::deserialize(d)? {
            RawChoice::Tag(t) if t == REJECT_ALL => Ok(ChoiceInput::RejectAll),
            RawChoice::Tag(t) => Err(D::Error::custom(format!(
                "unknown choice `{t}`, expected {REJECT_ALL} or an id object"
            ))),
            RawChoice::Candidate { candidate } => Ok(ChoiceInput::Candidate(candidate)),
            RawChoice::Ids(ids) if ids.is_empty() => {
                Err(D::Error::custom("choice names no authority id"))
            }
            RawChoice::Ids(ids) => Ok(ChoiceInput::Ids(ids)),
        }
    }
}

impl Serialize for Choice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Choice::Ids(ids) => ids.serialize(s),
            Choice::RejectAll => s.serialize_str(REJECT_ALL),
        }
    }
}

impl<'de> Deserialize<'de> for Choice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match ChoiceInput::deserialize(d)? {
            ChoiceInput::Ids(ids) => Ok(Choice::Ids(ids)),
            ChoiceInput::RejectAll => Ok(Choice::RejectAll),
            ChoiceInput::Candidate(_) => {
                Err(D::Error::custom("positional choice must be resolved first"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub raw_label: String,
    pub kind: EntityKind,
    pub chosen: Choice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reviewer_note: Option<String>,
    pub decided_at: DateTime<Utc>,
}

/// One entry of a decisions file before it is checked against the offers.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct DecisionInput {
    pub raw_label: String,
    pub kind: EntityKind,
    pub chosen: ChoiceInput,
    #[serde(default)]
    pub reviewer_note: Option<String>,
    #[serde(default)]
    pub decided_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("cannot read decisions file {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed decisions file {path}: {source}")]
    Malformed {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("decision for {kind} `{label}` picks candidate #{index} but only {offered} were offered")]
    CandidateOutOfRange {
        label: String,
        kind: EntityKind,
        index: usize,
        offered: usize,
    },
    #[error("decision for {kind} `{label}` names an id that was never offered")]
    UnofferedCandidate { label: String, kind: EntityKind },
    #[error("more than one decision for {kind} `{label}`")]
    DuplicateDecision { label: String, kind: EntityKind },
    #[error("terminal i/o failed: {0}")]
    Terminal(io::Error),
}

impl PendingReview {
    fn matches(&self, label: &str, kind: EntityKind) -> bool {
        self.kind == kind && normalize_label(&self.raw_label) == normalize_label(label)
    }

    fn unoffered(&self) -> ReviewError {
        ReviewError::UnofferedCandidate {
            label: self.raw_label.clone(),
            kind: self.kind,
        }
    }

    /// The candidate a decision selects (`None` for a rejection), or an error
    /// when the decision names something that was not offered.
    pub fn chosen_candidate(
        &self,
        decision: &ReviewDecision,
    ) -> Result<Option<&AuthorityCandidate>, ReviewError> {
        match &decision.chosen {
            Choice::RejectAll => Ok(None),
            Choice::Ids(ids) => self
                .candidates
                .iter()
                .find(|c| ids.get(c.service) == Some(c.external_id.as_str()))
                .map(Some)
                .ok_or_else(|| self.unoffered()),
        }
    }
}

/// Checks a file decision against what was offered for its label.
pub fn resolve_decision(
    pending: &PendingReview,
    input: &DecisionInput,
    now: DateTime<Utc>,
) -> Result<ReviewDecision, ReviewError> {
    let chosen = match &input.chosen {
        ChoiceInput::RejectAll => Choice::RejectAll,
        ChoiceInput::Candidate(index) => {
            let candidate = index
                .checked_sub(1)
                .and_then(|i| pending.candidates.get(i))
                .ok_or_else(|| ReviewError::CandidateOutOfRange {
                    label: pending.raw_label.clone(),
                    kind: pending.kind,
                    index: *index,
                    offered: pending.candidates.len(),
                })?;
            Choice::Ids(AuthorityIds::of(candidate))
        }
        ChoiceInput::Ids(ids) => {
            let candidate = pending
                .candidates
                .iter()
                .find(|c| ids.get(c.service) == Some(c.external_id.as_str()))
                .ok_or_else(|| pending.unoffered())?;
            Choice::Ids(AuthorityIds::of(candidate))
        }
    };
    Ok(ReviewDecision {
        raw_label: pending.raw_label.clone(),
        kind: pending.kind,
        chosen,
        reviewer_note: input.reviewer_note.clone(),
        decided_at: input.decided_at.unwrap_or(now),
    })
}

pub enum ReviewMode<'a> {
    /// Decisions loaded from a file; entries for labels that are not pending are ignored.
    Batch(&'a [DecisionInput]),
    /// Numbered prompts on `output`, answers read line by line from `input`.
    Interactive {
        input: &'a mut dyn BufRead,
        output: &'a mut dyn Write,
    },
}

/// Collects a decision for each pending item that receives one.
pub fn review_queue(
    pending: &[PendingReview],
    mode: ReviewMode<'_>,
    now: DateTime<Utc>,
) -> Result<Vec<ReviewDecision>, ReviewError> {
    match mode {
        ReviewMode::Batch(inputs) => {
            let mut out = Vec::new();
            for item in pending {
                let mut found = inputs.iter().filter(|d| item.matches(&d.raw_label, d.kind));
                let Some(input) = found.next() else { continue };
                if found.next().is_some() {
                    return Err(ReviewError::DuplicateDecision {
                        label: item.raw_label.clone(),
                        kind: item.kind,
                    });
                }
                out.push(resolve_decision(item, input, now)?);
            }
            Ok(out)
        }
        ReviewMode::Interactive { input, output } => interactive(pending, input, output, now)
            .map_err(ReviewError::Terminal),
    }
}

fn interactive(
    pending: &[PendingReview],
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    now: DateTime<Utc>,
) -> io::Result<Vec<ReviewDecision>> {
    let mut out = Vec::new();
    'items: for (n, item) in pending.iter().enumerate() {
        writeln!(output, "[{}/{}] {} \"{}\"", n + 1, pending.len(), item.kind, item.raw_label)?;
        for (i, c) in item.candidates.iter().enumerate() {
            let desc = c.description.as_deref().unwrap_or("");
            writeln!(
                output,
                "  {:>2}) {} [{} {}] score {:.2}  {}",
                i + 1,
                c.label,
                c.service,
                c.external_id,
                c.score,
                desc
            )?;
        }
        loop {
            write!(output, "choice [1-{}, r = reject all, s = skip]: ", item.candidates.len())?;
            output.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                break 'items;
            }
            let (answer, note) = match line.trim().split_once(char::is_whitespace) {
                Some((a, rest)) => (a.to_string(), Some(rest.trim().to_string())),
                None => (line.trim().to_string(), None),
            };
            let chosen = match answer.to_ascii_lowercase().as_str() {
                "s" | "skip" => continue 'items,
                "r" | "reject" => Choice::RejectAll,
                other => match other.parse::<usize>().ok().and_then(|i| i.checked_sub(1)) {
                    Some(i) if i < item.candidates.len() => {
                        Choice::Ids(AuthorityIds::of(&item.candidates[i]))
                    }
                    _ => {
                        writeln!(output, "  not a valid choice")?;
                        continue;
                    }
                },
            };
            out.push(ReviewDecision {
                raw_label: item.raw_label.clone(),
                kind: item.kind,
                chosen,
                reviewer_note: note.filter(|s| !s.is_empty()),
                decided_at: now,
            });
            continue 'items;
        }
    }
    Ok(out)
}

pub fn load_decisions(path: &Path) -> Result<Vec<DecisionInput>, ReviewError> {
    let text = fs::read_to_string(path).map_err(|source| ReviewError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ReviewError::Malformed {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_decisions(path: &Path, decisions: &[ReviewDecision]) -> Result<(), ReviewError> {
    let io_err = |source| ReviewError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut text = serde_json::to_string_pretty(decisions).map_err(|e| io_err(e.into()))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err)
}
