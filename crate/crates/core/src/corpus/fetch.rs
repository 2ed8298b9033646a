//! Single-article fetch against the MediaWiki action API, plain-text extracts.

use std::sync::{Arc, LazyLock};

use regex::Regex;
use serde::Deserialize;
use thiserror::Error;
use url::Url;

use super::Section;
use crate::http::{HttpClient, HttpError};

pub const DEFAULT_WIKI_API: &str = "https://en.wikipedia.org/w/api.php";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("not an article URL: {0}")]
    InvalidUrl(String),
    #[error(transparent)]
    Network(#[from] HttpError),
    #[error("article not found: {url}")]
    NotFound { url: String },
    #[error("unexpected HTTP status {status} for {url}")]
    Status { url: String, status: u16 },
    #[error("unparseable article payload: {0}")]
    Payload(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub title: String,
    pub sections: Vec<Section>,
}

#[derive(Deserialize)]
struct Payload {
    query: Query,
}

#[derive(Deserialize)]
struct Query {
    pages: Vec<Page>,
}

#[derive(Deserialize)]
struct Page {
    title: String,
    #[serde(default)]
    missing: bool,
    #[serde(default)]
    extract: String,
}

pub struct ArticleFetcher {
    http: Arc<dyn HttpClient>,
    api_base: String,
}

impl ArticleFetcher {
    pub fn new(http: Arc<dyn HttpClient>, api_base: impl Into<String>) -> Self {
        Self {
            http,
            api_base: api_base.into(),
        }
    }

    pub fn request_url(&self, title: &str) -> String {
        let mut url = Url::parse(&self.api_base)
            .unwrap_or_else(|_| Url::parse(DEFAULT_WIKI_API).expect("constant URL parses"));
        url.query_pairs_mut()
            .append_pair("action", "query")
            .append_pair("prop", "extracts")
            .append_pair("explaintext", "1")
            .append_pair("exsectionformat", "wiki")
            .append_pair("redirects", "1")
            .append_pair("format", "json")
            .append_pair("formatversion", "2")
            .append_pair("titles", title);
        url.into()
    }

    pub fn fetch_article(&self, article_url: &str) -> Result<Article, FetchError> {
        let title = article_title_from_url(article_url)?;
        let response = self.http.get(&self.request_url(&title))?;
        match response.status {
            200 => {}
            404 => {
                return Err(FetchError::NotFound {
                    url: article_url.to_string(),
                })
            }
            status => {
                return Err(FetchError::Status {
                    url: article_url.to_string(),
                    status,
                })
            }
        }
        parse_article_payload(&response.body).map_err(|e| match e {
            FetchError::NotFound { .. } => FetchError::NotFound {
                url: article_url.to_string(),
            },
            other => other,
        })
    }
}

/// `https://en.wikipedia.org/wiki/Donation_of_Constantine` → `Donation of Constantine`.
pub fn article_title_from_url(article_url: &str) -> Result<String, FetchError> {
    let url = Url::parse(article_url).map_err(|_| FetchError::InvalidUrl(article_url.into()))?;
    let path = url.path();
    let raw = path
        .strip_prefix("/wiki/")
        .filter(|t| !t.is_empty())
        .ok_or_else(|| FetchError::InvalidUrl(article_url.into()))?;
    let decoded = percent_decode(raw).ok_or_else(|| FetchError::InvalidUrl(article_url.into()))?;
    Ok(decoded.replace('_', " "))
}

fn percent_decode(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

static HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(={2,6})\s*(.*?)\s*={2,6}\s*$").unwrap());
static FOOTNOTE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\[(?:\d+|[a-z]|note \d+|citation needed|clarification needed)\]").unwrap()
});
static TEMPLATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{\{[^{}]*\}\}").unwrap());
static EMPHASIS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"'{2,}").unwrap());
static SPACES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[ \t]+").unwrap());

/// Drops templates, footnote markers and emphasis quotes; keeps paragraph breaks.
pub fn strip_markup(text: &str) -> String {
    let mut cleaned = text.to_string();
    // nested templates peel from the inside out
    loop {
        let next = TEMPLATE.replace_all(&cleaned, "").into_owned();
        if next == cleaned {
            break;
        }
        cleaned = next;
    }
    let cleaned = FOOTNOTE.replace_all(&cleaned, "");
    let cleaned = EMPHASIS.replace_all(&cleaned, "");

    let mut paragraphs = Vec::new();
    let mut current = Vec::new();
    for line in cleaned.lines() {
        let line = SPACES.replace_all(line.trim(), " ");
        if line.is_empty() {
            if !current.is_empty() {
                paragraphs.push(current.join(" "));
                current.clear();
            }
        } else {
            current.push(line.into_owned());
        }
    }
    if !current.is_empty() {
        paragraphs.push(current.join(" "));
    }
    paragraphs.join("\n\n")
}

/// Splits a plain-text extract into sections. Lead text before the first
/// heading is not a section; headings with no body of their own are dropped.
pub fn parse_article_payload(body: &str) -> Result<Article, FetchError> {
    let payload: Payload =
        serde_json::from_str(body).map_err(|e| FetchError::Payload(e.to_string()))?;
    let page = payload
        .query
        .pages
        .into_iter()
        .next()
        .ok_or_else(|| FetchError::Payload("no pages in response".into()))?;
    if page.missing {
        return Err(FetchError::NotFound { url: page.title });
    }

    let mut sections = Vec::new();
    let mut heading: Option<String> = None;
    let mut buf = String::new();
    let mut flush = |heading: &Option<String>, buf: &mut String| {
        if let Some(h) = heading {
            let body = strip_markup(buf);
            if !body.is_empty() {
                sections.push(Section::new(h.clone(), body));
            }
        }
        buf.clear();
    };
    for line in page.extract.lines() {
        if let Some(caps) = HEADING.captures(line.trim()) {
            flush(&heading, &mut buf);
            heading = Some(caps[2].to_string());
        } else {
            buf.push_str(line);
            buf.push('\n');
        }
    }
    flush(&heading, &mut buf);

    Ok(Article {
        title: page.title,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn title_from_url() {
        assert_eq!(
            article_title_from_url("https://en.wikipedia.org/wiki/Donation_of_Constantine")
                .unwrap(),
            "Donation of Constantine"
        );
        assert_eq!(
            article_title_from_url("https://en.wikipedia.org/wiki/Privilegium_%C2%ABmaius%C2%BB")
                .unwrap(),
            "Privilegium «maius»"
        );
        assert!(article_title_from_url("https://example.org/other").is_err());
        assert!(article_title_from_url("not a url").is_err());
    }

    #[test]
    fn strips_templates_and_footnotes() {
        let text = "Valla{{sfn|Valla|1440}} showed it[1] was ''false''.[citation needed]\n\n\nSecond   para.";
        assert_eq!(strip_markup(text), "Valla showed it was false.\n\nSecond para.");
    }

    #[test]
    fn nested_templates() {
        assert_eq!(strip_markup("a {{x|{{y}}}} b"), "a b");
    }

    #[test]
    fn payload_without_sections() {
        let body = r#"{"batchcomplete":true,"query":{"pages":[{"pageid":1,"ns":0,"title":"Stub","extract":"Only a lead."}]}}"#;
        let article = parse_article_payload(body).unwrap();
        assert_eq!(article.title, "Stub");
        assert!(article.sections.is_empty());
    }

    #[test]
    fn missing_page_is_not_found() {
        let body = r#"{"query":{"pages":[{"ns":0,"title":"Nope","missing":true}]}}"#;
        assert!(matches!(
            parse_article_payload(body),
            Err(FetchError::NotFound { .. })
        ));
    }

    #[test]
    fn garbage_payload() {
        assert!(matches!(
            parse_article_payload("<html>"),
            Err(FetchError::Payload(_))
        ));
    }
}
