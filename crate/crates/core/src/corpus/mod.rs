//! Input corpus: one document under debate per line of a JSON Lines file.

mod fetch;

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fetch::{
    article_title_from_url, parse_article_payload, strip_markup, Article, ArticleFetcher,
    FetchError, DEFAULT_WIKI_API,
};

/// Heading keywords used when no manual section list is given.
pub const DEFAULT_SECTION_KEYWORDS: &[&str] = &[
    "authenticity",
    "forgery",
    "forged",
    "genuine",
    "debate",
    "criticism",
    "dispute",
    "authorship",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub body: String,
}

impl Section {
    pub fn new(heading: impl Into<String>, body: impl Into<String>) -> Self {
        Self {
            heading: heading.into(),
            body: body.into(),
        }
    }
}

/// One document whose authenticity has been debated.
///
/// `sections` holds the authenticity-debate sections already selected for the
/// entry. `sections_override` is only consulted when sections are (re)fetched
/// from the source article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    #[serde(default)]
    pub source_url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title_hint: Option<String>,
    pub description: String,
    #[serde(default)]
    pub sections: Vec<Section>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections_override: Option<Vec<String>>,
}

impl CorpusEntry {
    pub fn assessment_sections(&self) -> &[Section] {
        &self.sections
    }

    fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("`id` is empty".into());
        }
        if self.description.trim().is_empty() {
            return Err(format!("entry {:?}: `description` is empty", self.id));
        }
        if let Some(s) = self.sections.iter().find(|s| s.body.trim().is_empty()) {
            return Err(format!(
                "entry {:?}: section {:?} has an empty body",
                self.id, s.heading
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Parses corpus bytes. Blank lines are skipped; line numbers are 1-based.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let entry: CorpusEntry =
                serde_json::from_str(raw).map_err(|e| CorpusError::Malformed {
                    line,
                    message: e.to_string(),
                })?;
            entry
                .validate()
                .map_err(|message| CorpusError::Malformed { line, message })?;
            if !seen.insert(entry.id.clone()) {
                return Err(CorpusError::DuplicateId { line, id: entry.id });
            }
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    /// Canonical writer: one compact JSON object per line, LF terminated.
    pub fn write_to(&self, mut out: impl Write) -> io::Result<()> {
        for entry in &self.entries {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Corpus::parse(&text)
}

/// Keeps sections whose heading contains any keyword, case-insensitively,
/// in input order.
pub fn select_assessment_sections<S: AsRef<str>>(
    sections: &[Section],
    keywords: &[S],
) -> Vec<Section> {
    let keywords: Vec<String> = keywords
        .iter()
        .map(|k| k.as_ref().to_lowercase())
        .filter(|k| !k.is_empty())
        .collect();
    sections
        .iter()
        .filter(|s| {
            let heading = s.heading.to_lowercase();
            keywords.iter().any(|k| heading.contains(k.as_str()))
        })
        .cloned()
        .collect()
}

/// Section selection honouring a manual heading list when one is given.
pub fn select_sections_for_entry(
    sections: &[Section],
    keywords: &[&str],
    override_headings: Option<&[String]>,
) -> Vec<Section> {
    match override_headings {
        Some(wanted) => {
            let wanted: Vec<String> = wanted.iter().map(|h| h.trim().to_lowercase()).collect();
            sections
                .iter()
                .filter(|s| wanted.contains(&s.heading.trim().to_lowercase()))
                .cloned()
                .collect()
        }
        None => select_assessment_sections(sections, keywords),
    }
}
