use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{RawClaim, Task};
use crate::corpus::{CorpusEntry, Section};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("classification prompt needs at least one claim")]
    NoClaims,
    #[error("cannot read prompt template {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub task: Task,
    pub system_text: String,
    pub user_text: String,
    pub response_schema: Value,
}

/// Prompt wording, one system and one user template per task.
///
/// User templates use the placeholders `{description}`, `{sections}` and
/// `{claims_enumeration}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub version: String,
    pub metadata_system: String,
    pub metadata_user: String,
    pub claims_system: String,
    pub claims_user: String,
    pub classification_system: String,
    pub classification_user: String,
}

const TEMPLATE_FILES: [&str; 6] = [
    "metadata.system.txt",
    "metadata.user.txt",
    "claims.system.txt",
    "claims.user.txt",
    "classification.system.txt",
    "classification.user.txt",
];

impl PromptTemplates {
    pub fn builtin() -> Self {
        Self {
            version: include_str!("../../templates/VERSION").trim().to_string(),
            metadata_system: include_str!("../../templates/metadata.system.txt").to_string(),
            metadata_user: include_str!("../../templates/metadata.user.txt").to_string(),
            claims_system: include_str!("../../templates/claims.system.txt").to_string(),
            claims_user: include_str!("../../templates/claims.user.txt").to_string(),
            classification_system: include_str!("../../templates/classification.system.txt")
                .to_string(),
            classification_user: include_str!("../../templates/classification.user.txt")
                .to_string(),
        }
    }

    /// Loads templates from `dir`; any file that is absent falls back to the
    /// built-in text.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, PromptError> {
        let dir = dir.as_ref();
        let mut templates = Self::builtin();
        let read = |name: &str| -> Result<Option<String>, PromptError> {
            let path = dir.join(name);
            match fs::read_to_string(&path) {
                Ok(text) => Ok(Some(text)),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
                Err(source) => Err(PromptError::Io {
                    path: path.display().to_string(),
                    source,
                }),
            }
        };
        if let Some(v) = read("VERSION")? {
            templates.version = v.trim().to_string();
        }
        for name in TEMPLATE_FILES {
            if let Some(text) = read(name)? {
                *templates.slot_mut(name) = text;
            }
        }
        Ok(templates)
    }

    fn slot_mut(&mut self, file: &str) -> &mut String {
        match file {
            "metadata.system.txt" => &mut self.metadata_system,
            "metadata.user.txt" => &mut self.metadata_user,
            "claims.system.txt" => &mut self.claims_system,
            "claims.user.txt" => &mut self.claims_user,
            "classification.system.txt" => &mut self.classification_system,
            "classification.user.txt" => &mut self.classification_user,
            other => unreachable!("unknown template {other}"),
        }
    }
}

impl Default for PromptTemplates {
    fn default() -> Self {
        Self::builtin()
    }
}

fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in values {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

/// Sections rendered as `## heading` blocks separated by blank lines.
pub fn sections_text(sections: &[Section]) -> String {
    sections
        .iter()
        .map(|s| format!("## {}\n{}", s.heading.trim(), s.body.trim()))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Numbered claim list embedded in the classification prompt.
pub fn claims_enumeration(claims: &[RawClaim]) -> String {
    claims
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "{}. claimant: {}\n   opinion: {}",
                i + 1,
                one_line(&c.claimant),
                one_line(&c.opinion_text)
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn response_schema(task: Task) -> Value {
    match task {
        Task::Metadata => json!({
            "type": "object",
            "required": ["title", "doc_type", "alleged_date", "alleged_place", "alleged_author"],
            "properties": {
                "title": {"type": "string"},
                "doc_type": {"type": "string"},
                "alleged_date": {"type": "string"},
                "alleged_place": {"type": "string"},
                "alleged_author": {"type": "string"}
            }
        }),
        Task::ClaimIdentification => json!({
            "type": "array",
            "items": {
                "type": "object",
                "required": ["claimant", "opinion_text"],
                "properties": {
                    "claimant": {"type": "string"},
                    "opinion_text": {"type": "string"}
                }
            }
        }),
        Task::ClaimClassification => json!({
            "type": "array",
            "items": {
                "type": "object",
                "required": ["author", "class", "opinion"],
                "properties": {
                    "author": {"type": "string"},
                    "class": {"enum": ["Authentic", "Forgery", "Suspicious"]},
                    "opinion": {"type": "string"},
                    "source": {"type": ["string", "null"]}
                }
            }
        }),
    }
}

pub fn build_metadata_prompt(templates: &PromptTemplates, entry: &CorpusEntry) -> PromptSpec {
    PromptSpec {
        task: Task::Metadata,
        system_text: templates.metadata_system.clone(),
        user_text: fill(
            &templates.metadata_user,
            &[("description", entry.description.trim())],
        ),
        response_schema: response_schema(Task::Metadata),
    }
}

/// Claim-identification prompt. With no assessment sections the description
/// stands in for them.
pub fn build_claims_prompt(templates: &PromptTemplates, entry: &CorpusEntry) -> PromptSpec {
    let sections = if entry.sections.is_empty() {
        entry.description.trim().to_string()
    } else {
        sections_text(&entry.sections)
    };
    PromptSpec {
        task: Task::ClaimIdentification,
        system_text: templates.claims_system.clone(),
        user_text: fill(
            &templates.claims_user,
            &[
                ("description", entry.description.trim()),
                ("sections", &sections),
            ],
        ),
        response_schema: response_schema(Task::ClaimIdentification),
    }
}

pub fn build_classification_prompt(
    templates: &PromptTemplates,
    entry: &CorpusEntry,
    claims: &[RawClaim],
) -> Result<PromptSpec, PromptError> {
    if claims.is_empty() {
        return Err(PromptError::NoClaims);
    }
    let sections = if entry.sections.is_empty() {
        entry.description.trim().to_string()
    } else {
        sections_text(&entry.sections)
    };
    Ok(PromptSpec {
        task: Task::ClaimClassification,
        system_text: templates.classification_system.clone(),
        user_text: fill(
            &templates.classification_user,
            &[
                ("description", entry.description.trim()),
                ("sections", &sections),
                ("claims_enumeration", &claims_enumeration(claims)),
            ],
        ),
        response_schema: response_schema(Task::ClaimClassification),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn donation() -> CorpusEntry {
        CorpusEntry {
            id: "doc-01".into(),
            source_url: String::new(),
            title_hint: None,
            description: "The Donation of Constantine is a decree allegedly issued by \
                          Constantine the Great in the 4th century."
                .into(),
            sections: vec![Section::new(
                "Authenticity",
                "Lorenzo Valla declared it a forgery. Nicholas of Cusa doubted it.",
            )],
            sections_override: None,
        }
    }

    fn schema_keys(schema: &Value) -> Vec<String> {
        let props = schema
            .get("properties")
            .or_else(|| schema["items"].get("properties"))
            .unwrap();
        props.as_object().unwrap().keys().cloned().collect()
    }

    #[test]
    fn metadata_prompt_embeds_description_and_alleged_instruction() {
        let t = PromptTemplates::builtin();
        let p = build_metadata_prompt(&t, &donation());
        assert!(p.user_text.contains(&donation().description));
        assert!(p.user_text.contains("as presented within the document itself"));
        assert!(p.user_text.contains("NOT_MENTIONED"));
        assert!(p.system_text.contains("single JSON object"));
        assert_eq!(schema_keys(&p.response_schema).len(), 5);
    }

    #[test]
    fn metadata_prompt_ignores_sections() {
        let t = PromptTemplates::builtin();
        let mut entry = donation();
        entry.sections.clear();
        let p = build_metadata_prompt(&t, &entry);
        assert!(!p.user_text.contains("{description}"));
        assert_eq!(p, build_metadata_prompt(&t, &donation()));
    }

    #[test]
    fn claims_prompt_schema_and_fallback() {
        let t = PromptTemplates::builtin();
        let p = build_claims_prompt(&t, &donation());
        assert_eq!(p.response_schema["type"], "array");
        assert_eq!(
            schema_keys(&p.response_schema),
            ["claimant", "opinion_text"]
        );
        assert!(p.user_text.contains("## Authenticity"));

        let mut entry = donation();
        entry.sections.clear();
        let p = build_claims_prompt(&t, &entry);
        let block = p
            .user_text
            .split("-----BEGIN SECTIONS-----")
            .nth(1)
            .unwrap();
        assert!(block.trim_start().starts_with(entry.description.as_str()));
    }

    #[test]
    fn classification_prompt_enumerates_claims() {
        let t = PromptTemplates::builtin();
        let claims = vec![
            RawClaim::new("Lorenzo Valla", "declared it a forgery"),
            RawClaim::new("Nicholas of Cusa", "doubted it"),
        ];
        let p = build_classification_prompt(&t, &donation(), &claims).unwrap();
        assert!(p.user_text.contains("1. claimant: Lorenzo Valla"));
        assert!(p.user_text.contains("2. claimant: Nicholas of Cusa"));
        assert!(!p.user_text.contains("3. claimant:"));
        for class in ["\"Authentic\"", "\"Forgery\"", "\"Suspicious\""] {
            assert!(p.user_text.contains(class));
        }
        assert_eq!(
            p.response_schema["items"]["properties"]["class"]["enum"],
            json!(["Authentic", "Forgery", "Suspicious"])
        );
    }

    #[test]
    fn classification_prompt_rejects_empty_claims() {
        let t = PromptTemplates::builtin();
        assert!(matches!(
            build_classification_prompt(&t, &donation(), &[]),
            Err(PromptError::NoClaims)
        ));
    }

    #[test]
    fn template_dir_overrides_single_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("metadata.user.txt"), "DESC={description}").unwrap();
        let t = PromptTemplates::load_dir(dir.path()).unwrap();
        assert_eq!(
            build_metadata_prompt(&t, &donation()).user_text,
            format!("DESC={}", donation().description)
        );
        assert_eq!(t.claims_user, PromptTemplates::builtin().claims_user);
    }
}
