//! LLM-driven extraction: three sequential tasks per corpus entry.
//!
//! 1. document metadata as the document presents it,
//! 2. claimants and their claim passages,
//! 3. classification of each claim as Authentic, Forgery or Suspicious.
//!
//! Task 2 output feeds Task 3; a claim Task 3 fails to classify is kept with
//! no category rather than dropped.

mod prompt;
mod provider;
mod repair;
mod rules;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::CorpusEntry;
use crate::text::normalize_label;

pub use prompt::{
    build_claims_prompt, build_classification_prompt, build_metadata_prompt, claims_enumeration,
    sections_text, PromptError, PromptSpec, PromptTemplates,
};
pub use provider::{
    request_hash, LiveProvider, Provider, ProviderError, ProviderRequest, RecordingProvider,
    ReplayProvider, RuleBasedProvider,
};
pub use repair::{render_output, repair_and_parse, ParseError, TaskOutput};

/// The literal a provider uses for a field the text does not state.
pub const NOT_MENTIONED: &str = "NOT_MENTIONED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Metadata,
    ClaimIdentification,
    ClaimClassification,
}

impl Task {
    pub const ALL: [Task; 3] = [
        Task::Metadata,
        Task::ClaimIdentification,
        Task::ClaimClassification,
    ];
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Metadata => "metadata",
            Task::ClaimIdentification => "claim-identification",
            Task::ClaimClassification => "claim-classification",
        })
    }
}

/// A metadata value or the explicit "not mentioned" report.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Mention {
    Stated(String),
    #[default]
    NotMentioned,
}

impl Mention {
    /// Empty and whitespace-only values are treated as not mentioned.
    pub fn from_raw(raw: &str) -> Self {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed == NOT_MENTIONED {
            Mention::NotMentioned
        } else {
            Mention::Stated(trimmed.to_string())
        }
    }

    pub fn as_stated(&self) -> Option<&str> {
        match self {
            Mention::Stated(s) => Some(s),
            Mention::NotMentioned => None,
        }
    }

    pub fn is_mentioned(&self) -> bool {
        matches!(self, Mention::Stated(_))
    }

    pub fn as_str(&self) -> &str {
        self.as_stated().unwrap_or(NOT_MENTIONED)
    }
}

impl From<&str> for Mention {
    fn from(s: &str) -> Self {
        Mention::from_raw(s)
    }
}

impl Serialize for Mention {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Mention {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Option::<String>::deserialize(deserializer)?;
        Ok(raw.as_deref().map(Mention::from_raw).unwrap_or_default())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMetadata {
    pub title: Mention,
    pub doc_type: Mention,
    pub alleged_date: Mention,
    pub alleged_place: Mention,
    pub alleged_author: Mention,
}

impl RawMetadata {
    pub const FIELDS: [&'static str; 5] = [
        "title",
        "doc_type",
        "alleged_date",
        "alleged_place",
        "alleged_author",
    ];

    pub fn field(&self, name: &str) -> Option<&Mention> {
        Some(match name {
            "title" => &self.title,
            "doc_type" => &self.doc_type,
            "alleged_date" => &self.alleged_date,
            "alleged_place" => &self.alleged_place,
            "alleged_author" => &self.alleged_author,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawClaim {
    pub claimant: String,
    pub opinion_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl RawClaim {
    pub fn new(claimant: impl Into<String>, opinion_text: impl Into<String>) -> Self {
        Self {
            claimant: claimant.into(),
            opinion_text: opinion_text.into(),
            category_label: None,
            source: None,
        }
    }

    pub fn classified(mut self, label: impl Into<String>) -> Self {
        self.category_label = Some(label.into());
        self
    }
}

/// One provider round trip, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub task: Task,
    pub attempt: u32,
    pub request: ProviderRequest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A task that never produced a usable answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFailure {
    pub task: Task,
    pub attempts: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub entry_id: String,
    pub model_id: String,
    pub template_version: String,
    pub metadata: RawMetadata,
    pub claims: Vec<RawClaim>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<TaskFailure>,
    pub transcript: Vec<Exchange>,
}

impl ExtractionResult {
    /// A result with no metadata, claims or transcript.
    pub fn empty(entry_id: impl Into<String>, model_id: impl Into<String>) -> Self {
        Self {
            entry_id: entry_id.into(),
            model_id: model_id.into(),
            template_version: String::new(),
            metadata: RawMetadata::default(),
            claims: Vec::new(),
            failures: Vec::new(),
            transcript: Vec::new(),
        }
    }

    pub fn exchanges(&self, task: Task) -> impl Iterator<Item = &Exchange> {
        self.transcript.iter().filter(move |x| x.task == task)
    }
}

#[derive(Debug, Error)]
pub enum ExtractionError {
    /// Non-retryable provider failure (replay miss, authentication).
    #[error("entry {entry_id}: {task} task: {source}")]
    Provider {
        entry_id: String,
        task: Task,
        #[source]
        source: ProviderError,
    },
    /// Some task exhausted its retries; the partial result is attached.
    #[error("entry {}: {} task(s) failed after retries", .partial.entry_id, .partial.failures.len())]
    Exhausted { partial: Box<ExtractionResult> },
    #[error("entry {entry_id}: {source}")]
    Prompt {
        entry_id: String,
        #[source]
        source: PromptError,
    },
}

impl ExtractionError {
    pub fn is_replay_miss(&self) -> bool {
        matches!(
            self,
            ExtractionError::Provider {
                source: ProviderError::ReplayMiss { .. },
                ..
            }
        )
    }
}

/// Runs the three extraction tasks against one provider.
pub struct Extractor {
    pub provider: Arc<dyn Provider>,
    pub templates: PromptTemplates,
    pub model_id: String,
    pub max_output_tokens: u32,
    pub retries: u32,
}

enum TaskRun {
    Done(TaskOutput),
    Exhausted(TaskFailure),
}

impl Extractor {
    pub fn new(provider: Arc<dyn Provider>, model_id: impl Into<String>) -> Self {
        Self {
            provider,
            templates: PromptTemplates::builtin(),
            model_id: model_id.into(),
            max_output_tokens: 2048,
            retries: 2,
        }
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    pub fn with_templates(mut self, templates: PromptTemplates) -> Self {
        self.templates = templates;
        self
    }

    fn request(&self, prompt: &PromptSpec) -> ProviderRequest {
        ProviderRequest {
            task: prompt.task,
            model_id: self.model_id.clone(),
            system_text: prompt.system_text.clone(),
            user_text: prompt.user_text.clone(),
            temperature: 0.0,
            max_output_tokens: self.max_output_tokens,
        }
    }

    fn run_task(
        &self,
        entry_id: &str,
        prompt: &PromptSpec,
        transcript: &mut Vec<Exchange>,
    ) -> Result<TaskRun, ExtractionError> {
        let request = self.request(prompt);
        let attempts = self.retries + 1;
        let mut last_error = String::new();
        for attempt in 1..=attempts {
            match self.provider.complete(&request) {
                Ok(text) => {
                    let parsed = repair_and_parse(&text, prompt.task);
                    transcript.push(Exchange {
                        task: prompt.task,
                        attempt,
                        request: request.clone(),
                        response: Some(text),
                        error: parsed.as_ref().err().map(ToString::to_string),
                    });
                    match parsed {
                        Ok(output) => return Ok(TaskRun::Done(output)),
                        Err(e) => last_error = e.to_string(),
                    }
                }
                Err(e) if e.is_retryable() => {
                    transcript.push(Exchange {
                        task: prompt.task,
                        attempt,
                        request: request.clone(),
                        response: None,
                        error: Some(e.to_string()),
                    });
                    last_error = e.to_string();
                }
                Err(source) => {
                    return Err(ExtractionError::Provider {
                        entry_id: entry_id.to_string(),
                        task: prompt.task,
                        source,
                    })
                }
            }
        }
        Ok(TaskRun::Exhausted(TaskFailure {
            task: prompt.task,
            attempts,
            message: last_error,
        }))
    }

    pub fn run(&self, entry: &CorpusEntry) -> Result<ExtractionResult, ExtractionError> {
        let prompt_err = |source| ExtractionError::Prompt {
            entry_id: entry.id.clone(),
            source,
        };
        let mut transcript = Vec::new();
        let mut failures = Vec::new();

        let metadata_prompt = build_metadata_prompt(&self.templates, entry);
        let metadata = match self.run_task(&entry.id, &metadata_prompt, &mut transcript)? {
            TaskRun::Done(TaskOutput::Metadata(m)) => m,
            TaskRun::Done(_) => unreachable!("metadata task parses to metadata"),
            TaskRun::Exhausted(f) => {
                failures.push(f);
                RawMetadata::default()
            }
        };

        let claims_prompt = build_claims_prompt(&self.templates, entry);
        let mut claims = match self.run_task(&entry.id, &claims_prompt, &mut transcript)? {
            TaskRun::Done(TaskOutput::Claims(c)) => c
                .into_iter()
                .map(|c| RawClaim {
                    category_label: None,
                    source: None,
                    ..c
                })
                .collect(),
            TaskRun::Done(_) => unreachable!("claims task parses to claims"),
            TaskRun::Exhausted(f) => {
                failures.push(f);
                Vec::new()
            }
        };

        if !claims.is_empty() {
            let prompt =
                build_classification_prompt(&self.templates, entry, &claims).map_err(prompt_err)?;
            match self.run_task(&entry.id, &prompt, &mut transcript)? {
                TaskRun::Done(TaskOutput::Claims(classified)) => {
                    attach_classifications(&mut claims, &classified)
                }
                TaskRun::Done(_) => unreachable!("classification task parses to claims"),
                TaskRun::Exhausted(f) => failures.push(f),
            }
        }

        let result = ExtractionResult {
            entry_id: entry.id.clone(),
            model_id: self.model_id.clone(),
            template_version: self.templates.version.clone(),
            metadata,
            claims,
            failures,
            transcript,
        };
        if result.failures.is_empty() {
            Ok(result)
        } else {
            Err(ExtractionError::Exhausted {
                partial: Box::new(result),
            })
        }
    }

    /// Extracts entries concurrently (at most `concurrency` at a time),
    /// returning results in input order.
    pub fn run_all(
        &self,
        entries: &[CorpusEntry],
        concurrency: usize,
    ) -> Vec<Result<ExtractionResult, ExtractionError>> {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(concurrency.max(1))
            .build()
            .expect("thread pool");
        pool.install(|| entries.par_iter().map(|e| self.run(e)).collect())
    }
}

/// Copies class and source from Task-3 output onto the Task-2 claims.
///
/// Items are paired by normalized claimant name first, then by position for
/// whatever is left. Claimant and opinion always stay as Task 2 produced them.
fn attach_classifications(claims: &mut [RawClaim], classified: &[RawClaim]) {
    let mut used = vec![false; classified.len()];
    let mut pending = Vec::new();
    for (i, claim) in claims.iter_mut().enumerate() {
        let key = normalize_label(&claim.claimant);
        let hit = classified
            .iter()
            .enumerate()
            .position(|(j, c)| !used[j] && normalize_label(&c.claimant) == key);
        match hit {
            Some(j) => {
                used[j] = true;
                claim.category_label = classified[j].category_label.clone();
                claim.source = classified[j].source.clone();
            }
            None => pending.push(i),
        }
    }
    for i in pending {
        if i < classified.len() && !used[i] {
            used[i] = true;
            claims[i].category_label = classified[i].category_label.clone();
            claims[i].source = classified[i].source.clone();
        }
    }
}

/// Runs extraction for one entry with the built-in templates.
pub fn run_extraction(
    provider: Arc<dyn Provider>,
    model_id: &str,
    entry: &CorpusEntry,
    retries: u32,
) -> Result<ExtractionResult, ExtractionError> {
    Extractor::new(provider, model_id)
        .with_retries(retries)
        .run(entry)
}
