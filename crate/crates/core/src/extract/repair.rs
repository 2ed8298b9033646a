//! Recovers the task's JSON answer from free-form provider text.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Mention, RawClaim, RawMetadata, Task};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskOutput {
    Metadata(RawMetadata),
    /// Task 2 claims, or Task 3 classifications mapped onto claims
    /// (`author` → claimant, `opinion` → opinion text).
    Claims(Vec<RawClaim>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no complete JSON value found in provider output")]
    NoJson,
    #[error("schema violation at `{key}`: {message}")]
    Schema { key: String, message: String },
}

fn schema(key: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Schema {
        key: key.into(),
        message: message.into(),
    }
}

pub fn repair_and_parse(text: &str, task: Task) -> Result<TaskOutput, ParseError> {
    let value = locate_json(text, task).ok_or(ParseError::NoJson)?;
    match task {
        Task::Metadata => parse_metadata(&value).map(TaskOutput::Metadata),
        Task::ClaimIdentification => parse_claims(&value).map(TaskOutput::Claims),
        Task::ClaimClassification => parse_classifications(&value).map(TaskOutput::Claims),
    }
}

/// Serializes a task output in the shape the task's prompt asks for.
pub fn render_output(task: Task, output: &TaskOutput) -> String {
    let value = match (task, output) {
        (Task::Metadata, TaskOutput::Metadata(m)) => json!(m),
        (Task::ClaimIdentification, TaskOutput::Claims(claims)) => Value::Array(
            claims
                .iter()
                .map(|c| json!({"claimant": c.claimant, "opinion_text": c.opinion_text}))
                .collect(),
        ),
        (Task::ClaimClassification, TaskOutput::Claims(claims)) => Value::Array(
            claims
                .iter()
                .map(|c| {
                    json!({
                        "author": c.claimant,
                        "class": c.category_label,
                        "opinion": c.opinion_text,
                        "source": c.source,
                    })
                })
                .collect(),
        ),
        (task, _) => panic!("output shape does not belong to the {task} task"),
    };
    serde_json::to_string_pretty(&value).expect("JSON values serialize")
}

fn shape_fits(value: &Value, task: Task) -> bool {
    match task {
        Task::Metadata => value.is_object(),
        _ => value.is_array() || wrapped_array(value).is_some(),
    }
}

/// `{"claims": [...]}` style wrappers with exactly one array-valued key.
fn wrapped_array(value: &Value) -> Option<&Vec<Value>> {
    let obj = value.as_object()?;
    let mut arrays = obj.values().filter_map(Value::as_array);
    let first = arrays.next()?;
    arrays.next().is_none().then_some(first)
}

fn first_json_value(text: &str, task: Task) -> Option<Value> {
    for (idx, c) in text.char_indices() {
        if c != '{' && c != '[' {
            continue;
        }
        let mut stream = serde_json::Deserializer::from_str(&text[idx..]).into_iter::<Value>();
        if let Some(Ok(value)) = stream.next() {
            if shape_fits(&value, task) {
                return Some(value);
            }
        }
    }
    None
}

fn fenced_blocks(text: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        // skip an info string such as `json`
        let body_start = after.find('\n').map(|i| i + 1).unwrap_or(0);
        let info = &after[..body_start];
        let body_start = if info.trim().chars().all(|c| c.is_ascii_alphanumeric()) {
            body_start
        } else {
            0
        };
        let body = &after[body_start..];
        match body.find("```") {
            Some(close) => {
                blocks.push(&body[..close]);
                rest = &body[close + 3..];
            }
            None => break,
        }
    }
    blocks
}

fn locate_json(text: &str, task: Task) -> Option<Value> {
    fenced_blocks(text)
        .into_iter()
        .find_map(|b| first_json_value(b, task))
        .or_else(|| first_json_value(text, task))
}

fn string_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<String>, ParseError> {
    match obj.get(key) {
        None => Err(schema(path, "required key missing")),
        Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(schema(path, format!("expected a string, found {other}"))),
    }
}

fn required_text(obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, ParseError> {
    match string_field(obj, key, path)? {
        Some(s) if !s.trim().is_empty() => Ok(s.trim().to_string()),
        _ => Err(schema(path, "must be a non-empty string")),
    }
}

fn parse_metadata(value: &Value) -> Result<RawMetadata, ParseError> {
    let obj = value.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    let get = |key: &str| -> Result<Mention, ParseError> {
        Ok(string_field(obj, key, key)?
            .as_deref()
            .map(Mention::from_raw)
            .unwrap_or_default())
    };
    Ok(RawMetadata {
        title: get("title")?,
        doc_type: get("doc_type")?,
        alleged_date: get("alleged_date")?,
        alleged_place: get("alleged_place")?,
        alleged_author: get("alleged_author")?,
    })
}

fn items(value: &Value) -> Result<&Vec<Value>, ParseError> {
    value
        .as_array()
        .or_else(|| wrapped_array(value))
        .ok_or_else(|| schema("$", "expected an array"))
}

fn parse_claims(value: &Value) -> Result<Vec<RawClaim>, ParseError> {
    items(value)?
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let obj = item
                .as_object()
                .ok_or_else(|| schema(format!("[{i}]"), "expected an object"))?;
            Ok(RawClaim::new(
                required_text(obj, "claimant", &format!("[{i}].claimant"))?,
                required_text(obj, "opinion_text", &format!("[{i}].opinion_text"))?,
            ))
        })
        .collect()
}

fn parse_classifications(value: &Value) -> Result<Vec<RawClaim>, ParseError> {
    items(value)?
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let obj = item
                .as_object()
                .ok_or_else(|| schema(format!("[{i}]"), "expected an object"))?;
            let author = required_text(obj, "author", &format!("[{i}].author"))?;
            let class = string_field(obj, "class", &format!("[{i}].class"))?
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty());
            let opinion = string_field(obj, "opinion", &format!("[{i}].opinion"))?.unwrap_or_default();
            let source = match obj.get("source") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) if s.trim().is_empty() => None,
                Some(Value::String(s)) => Some(s.trim().to_string()),
                Some(other) => {
                    return Err(schema(
                        format!("[{i}].source"),
                        format!("expected a string or null, found {other}"),
                    ))
                }
            };
            Ok(RawClaim {
                claimant: author,
                opinion_text: opinion.trim().to_string(),
                category_label: class,
                source,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_fences() {
        let text = "```json {\"title\":\"X\",\"doc_type\":\"charter\",\"alleged_date\":\"NOT_MENTIONED\",\"alleged_place\":\"NOT_MENTIONED\",\"alleged_author\":\"NOT_MENTIONED\"} ```";
        let TaskOutput::Metadata(m) = repair_and_parse(text, Task::Metadata).unwrap() else {
            panic!("wrong shape")
        };
        assert_eq!(m.title, Mention::Stated("X".into()));
        assert_eq!(m.doc_type, Mention::Stated("charter".into()));
        assert_eq!(m.alleged_date, Mention::NotMentioned);
        assert_eq!(m.alleged_place, Mention::NotMentioned);
        assert_eq!(m.alleged_author, Mention::NotMentioned);
    }

    #[test]
    fn strips_prose() {
        let text = "Sure! Here is the array: [ {\"claimant\":\"Lorenzo Valla\",\"opinion_text\":\"declared it a forgery\"} ]";
        assert_eq!(
            repair_and_parse(text, Task::ClaimIdentification).unwrap(),
            TaskOutput::Claims(vec![RawClaim::new("Lorenzo Valla", "declared it a forgery")])
        );
    }

    #[test]
    fn truncated_is_error() {
        assert_eq!(
            repair_and_parse("{\"title\": \"X\"", Task::Metadata),
            Err(ParseError::NoJson)
        );
    }

    #[test]
    fn missing_key_is_named() {
        let err = repair_and_parse(r#"{"title":"X","doc_type":"charter"}"#, Task::Metadata).unwrap_err();
        assert_eq!(
            err,
            ParseError::Schema {
                key: "alleged_date".into(),
                message: "required key missing".into()
            }
        );
    }

    #[test]
    fn unknown_keys_ignored_and_null_is_not_mentioned() {
        let text = r#"{"title":"X","doc_type":null,"alleged_date":"","alleged_place":"Rome","alleged_author":"NOT_MENTIONED","confidence":0.4}"#;
        let TaskOutput::Metadata(m) = repair_and_parse(text, Task::Metadata).unwrap() else {
            panic!()
        };
        assert_eq!(m.doc_type, Mention::NotMentioned);
        assert_eq!(m.alleged_date, Mention::NotMentioned);
        assert_eq!(m.alleged_place, Mention::Stated("Rome".into()));
    }

    #[test]
    fn skips_bracketed_prose_before_json() {
        let text = "Claims [see below]:\n[{\"claimant\":\"A\",\"opinion_text\":\"b\"}]";
        assert!(matches!(
            repair_and_parse(text, Task::ClaimIdentification),
            Ok(TaskOutput::Claims(c)) if c.len() == 1
        ));
    }

    #[test]
    fn unwraps_single_array_object() {
        let text = r#"{"claims": [{"claimant":"A","opinion_text":"b"}]}"#;
        assert!(matches!(
            repair_and_parse(text, Task::ClaimIdentification),
            Ok(TaskOutput::Claims(c)) if c.len() == 1
        ));
    }

    #[test]
    fn empty_claimant_rejected() {
        let err = repair_and_parse(r#"[{"claimant":" ","opinion_text":"x"}]"#, Task::ClaimIdentification)
            .unwrap_err();
        assert!(matches!(err, ParseError::Schema { ref key, .. } if key == "[0].claimant"));
    }

    #[test]
    fn classification_maps_fields() {
        let text = r#"[{"author":"Lorenzo Valla","class":"Forgery","opinion":"it is false","source":"De falso credita"}]"#;
        let TaskOutput::Claims(c) = repair_and_parse(text, Task::ClaimClassification).unwrap() else {
            panic!()
        };
        assert_eq!(c[0].claimant, "Lorenzo Valla");
        assert_eq!(c[0].category_label.as_deref(), Some("Forgery"));
        assert_eq!(c[0].source.as_deref(), Some("De falso credita"));
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        "[A-Za-z][A-Za-z .,'\"{}\\[\\]é-]{0,24}".prop_map(|s| s.trim().to_string())
            .prop_filter("non-empty", |s| !s.is_empty() && s != "NOT_MENTIONED")
    }

    fn mention() -> impl Strategy<Value = Mention> {
        prop_oneof![Just(Mention::NotMentioned), text_strategy().prop_map(Mention::Stated)]
    }

    proptest! {
        #[test]
        fn metadata_round_trip(t in mention(), d in mention(), a in mention(), p in mention(), au in mention()) {
            let m = RawMetadata { title: t, doc_type: d, alleged_date: a, alleged_place: p, alleged_author: au };
            let out = TaskOutput::Metadata(m);
            let text = render_output(Task::Metadata, &out);
            prop_assert_eq!(repair_and_parse(&text, Task::Metadata).unwrap(), out);
        }

        #[test]
        fn claims_round_trip(pairs in prop::collection::vec((text_strategy(), text_strategy()), 0..5)) {
            let out = TaskOutput::Claims(pairs.into_iter().map(|(a, b)| RawClaim::new(a, b)).collect());
            let text = format!("Here you go:\n```json\n{}\n```", render_output(Task::ClaimIdentification, &out));
            prop_assert_eq!(repair_and_parse(&text, Task::ClaimIdentification).unwrap(), out);
        }

        #[test]
        fn classification_round_trip(items in prop::collection::vec(
            (text_strategy(), text_strategy(), prop::option::of(text_strategy()), prop::option::of(text_strategy())), 0..5)) {
            let out = TaskOutput::Claims(items.into_iter().map(|(a, o, c, s)| RawClaim {
                claimant: a, opinion_text: o, category_label: c, source: s,
            }).collect());
            let text = render_output(Task::ClaimClassification, &out);
            prop_assert_eq!(repair_and_parse(&text, Task::ClaimClassification).unwrap(), out);
        }
    }
}
