//! Keyword and pattern heuristics behind `RuleBasedProvider`.
//!
//! Deliberately shallow: enough to drive the pipeline offline and in CI,
//! not a substitute for a language model.

use std::sync::LazyLock;

use regex::Regex;
use serde_json::{json, Value};

use super::NOT_MENTIONED;

const DOC_TYPES: &[&str] = &[
    "charter", "decree", "diploma", "privilege", "letter", "chronicle", "map", "manuscript",
    "codex", "gospel", "testament", "will", "bull", "edict", "treaty", "deed", "inscription",
    "diary", "register", "cartulary",
];

const NON_CLAIMANTS: &[&str] = &[
    "the", "it", "this", "that", "he", "she", "they", "these", "those", "its", "his", "her",
    "there", "however", "later", "scholars", "historians", "many", "some", "most",
];

static SENTENCE_END: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([.!?])\s+").unwrap());
static TITLE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:The\s+)?(.+?)\s+(?:is|was|are|were)\b").unwrap()
});
static ALLEGED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(purport|alleg|supposed|ostensibl|claims to|presents itself|pretends)").unwrap()
});
static CENTURY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(\d{1,2}(?:st|nd|rd|th))[- ]century(?:\s+(?:BC|BCE|AD|CE)\b)?").unwrap()
});
static YEAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:in|of|dated|from|year)\s+(\d{3,4})\b").unwrap());
static PLACE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:in|at)\s+([A-Z][a-z]+(?:\s+[A-Z][a-z]+)*)").unwrap()
});
static AUTHOR: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\bby\s+((?:(?:Emperor|Pope|King|Queen|Duke|Count|Saint|Bishop|Abbot)\s+)?[A-Z][\w'-]*(?:\s+(?:of|the|de|von|[A-Z][\w'-]*|[IVX]+)\b)*)",
    )
    .unwrap()
});
static CLAIM: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:(?:In|By|Around|After)\s+\d{3,4},?\s+)?((?:[A-Z][\w'.-]*)(?:\s+(?:of|de|da|di|von|van|der|the|[A-Z][\w'.-]*))*)\s+(?:\w+ly\s+)?(?:argued|claimed|declared|asserted|maintained|concluded|demonstrated|showed|proved|defended|doubted|suspected|considered|believed|accepted|questioned|denounced|exposed|rejected|challenged|regarded|held|dismissed|identified)\b",
    )
    .unwrap()
});
static ENUM_CLAIMANT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^\s*\d+\.\s*claimant:\s*(.+?)\s*$").unwrap());
static ENUM_OPINION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^\s*opinion:\s*(.+?)\s*$").unwrap());

fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for paragraph in text.split("\n\n") {
        let paragraph: String = paragraph
            .lines()
            .filter(|l| !l.trim_start().starts_with("## "))
            .collect::<Vec<_>>()
            .join(" ");
        let mut last = 0;
        for m in SENTENCE_END.find_iter(&paragraph) {
            let end = m.start() + 1;
            // initials and abbreviations such as "St." or "c." do not end a sentence
            let prev_word = paragraph[last..m.start()].rsplit(' ').next().unwrap_or("");
            if prev_word.len() <= 2 || matches!(prev_word, "St" | "ca" | "Mt") {
                continue;
            }
            out.push(paragraph[last..end].trim().to_string());
            last = m.end();
        }
        let tail = paragraph[last..].trim();
        if !tail.is_empty() {
            out.push(tail.to_string());
        }
    }
    out
}

fn or_marker(v: Option<String>) -> Value {
    Value::String(v.unwrap_or_else(|| NOT_MENTIONED.to_string()))
}

pub(super) fn metadata(description: &str) -> String {
    let sents = sentences(description);
    let title = sents
        .first()
        .and_then(|s| TITLE.captures(s))
        .map(|c| c[1].trim().to_string());
    let lower = description.to_lowercase();
    let doc_type = DOC_TYPES
        .iter()
        .filter_map(|t| {
            Regex::new(&format!(r"\b{t}\b"))
                .ok()?
                .find(&lower)
                .map(|m| (m.start(), *t))
        })
        .min()
        .map(|(_, t)| t.to_string());

    let alleged = sents.iter().find(|s| ALLEGED.is_match(s));
    let (date, place, author) = match alleged {
        Some(s) => (
            CENTURY
                .find(s)
                .map(|m| m.as_str().to_string())
                .or_else(|| YEAR.captures(s).map(|c| c[1].to_string())),
            PLACE
                .captures_iter(s)
                .map(|c| c[1].to_string())
                .find(|p| !is_month(p)),
            AUTHOR.captures(s).map(|c| c[1].trim().to_string()),
        ),
        None => (None, None, None),
    };

    let answer = json!({
        "title": or_marker(title),
        "doc_type": or_marker(doc_type),
        "alleged_date": or_marker(date),
        "alleged_place": or_marker(place),
        "alleged_author": or_marker(author),
    });
    serde_json::to_string_pretty(&answer).expect("JSON values serialize")
}

fn is_month(word: &str) -> bool {
    const MONTHS: &[&str] = &[
        "January", "February", "March", "April", "May", "June", "July", "August", "September",
        "October", "November", "December",
    ];
    MONTHS.iter().any(|m| word.starts_with(m))
}

pub(super) fn claims(sections: &str) -> String {
    let claims: Vec<Value> = sentences(sections)
        .into_iter()
        .filter_map(|s| {
            let claimant = CLAIM.captures(&s)?[1].trim().to_string();
            let first = claimant.split_whitespace().next()?.to_lowercase();
            if NON_CLAIMANTS.contains(&first.as_str()) && claimant.split_whitespace().count() == 1 {
                return None;
            }
            Some(json!({"claimant": claimant, "opinion_text": s}))
        })
        .collect();
    serde_json::to_string_pretty(&Value::Array(claims)).expect("JSON values serialize")
}

fn category_for(opinion: &str) -> &'static str {
    let o = opinion.to_lowercase();
    let has = |words: &[&str]| words.iter().any(|w| o.contains(w));
    if has(&["not genuine", "not authentic", "inauthentic"]) {
        "Forgery"
    } else if has(&["doubt", "suspic", "suspect", "question", "uncertain", "dubious", "interpolat"]) {
        "Suspicious"
    } else if has(&["forg", "fake", "spurious", "fabricat", "fraud", "counterfeit", "false"]) {
        "Forgery"
    } else if has(&["genuine", "authentic", "defended"]) {
        "Authentic"
    } else {
        "Suspicious"
    }
}

pub(super) fn classify(enumeration: &str) -> String {
    let claimants: Vec<String> = ENUM_CLAIMANT
        .captures_iter(enumeration)
        .map(|c| c[1].to_string())
        .collect();
    let opinions: Vec<String> = ENUM_OPINION
        .captures_iter(enumeration)
        .map(|c| c[1].to_string())
        .collect();
    let items: Vec<Value> = claimants
        .iter()
        .zip(opinions.iter())
        .map(|(author, opinion)| {
            json!({
                "author": author,
                "class": category_for(opinion),
                "opinion": opinion,
                "source": Value::Null,
            })
        })
        .collect();
    serde_json::to_string_pretty(&Value::Array(items)).expect("JSON values serialize")
}
