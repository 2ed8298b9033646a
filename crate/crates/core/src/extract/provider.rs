//! Completion providers: live HTTP, replay from recorded fixtures, and an
//! offline rule-based heuristic.

use std::fs;
use std::io;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::{rules, Task};
use crate::http::{HttpClient, HttpError};
use crate::{sha256_hex, RateLimiter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub task: Task,
    pub model_id: String,
    pub system_text: String,
    pub user_text: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

/// Stable replay key: SHA-256 over model id, system text and user text,
/// separated by the ASCII unit separator.
pub fn request_hash(request: &ProviderRequest) -> String {
    sha256_hex(format!(
        "{}\u{1f}{}\u{1f}{}",
        request.model_id, request.system_text, request.user_text
    ))
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error(transparent)]
    Network(#[from] HttpError),
    #[error("provider returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("authentication rejected by provider (HTTP {status})")]
    Auth { status: u16 },
    #[error("replay miss: no recorded response for request {hash}")]
    ReplayMiss { hash: String },
    #[error("unexpected provider payload: {0}")]
    Payload(String),
    #[error("fixture I/O on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("provider not configured: {0}")]
    Config(String),
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        match self {
            ProviderError::Network(_) | ProviderError::Payload(_) => true,
            ProviderError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait Provider: Send + Sync {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError>;
}

impl<P: Provider + ?Sized> Provider for Arc<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// Returns recorded responses from `<dir>/<request_hash>.txt`.
pub struct ReplayProvider {
    dir: PathBuf,
}

impl ReplayProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn fixture_path(&self, request: &ProviderRequest) -> PathBuf {
        self.dir.join(format!("{}.txt", request_hash(request)))
    }
}

impl Provider for ReplayProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let path = self.fixture_path(request);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(ProviderError::ReplayMiss {
                hash: request_hash(request),
            }),
            Err(source) => Err(ProviderError::Io {
                path: path.display().to_string(),
                source,
            }),
        }
    }
}

/// Wraps another provider and writes every response into a replay directory.
pub struct RecordingProvider<P> {
    inner: P,
    dir: PathBuf,
}

impl<P: Provider> RecordingProvider<P> {
    pub fn new(inner: P, dir: impl Into<PathBuf>) -> Self {
        Self {
            inner,
            dir: dir.into(),
        }
    }
}

impl<P: Provider> Provider for RecordingProvider<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let text = self.inner.complete(request)?;
        let path = self.dir.join(format!("{}.txt", request_hash(request)));
        let io_err = |source| ProviderError::Io {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(&self.dir).map_err(io_err)?;
        fs::write(&path, &text).map_err(io_err)?;
        Ok(text)
    }
}

// ---------------------------------------------------------------------------
// Live
// ---------------------------------------------------------------------------

/// Chat-completion endpoint (`POST {base_url}/chat/completions`).
pub struct LiveProvider {
    http: Arc<dyn HttpClient>,
    base_url: String,
    api_key: Option<String>,
    limiter: RateLimiter,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

impl LiveProvider {
    pub fn new(http: Arc<dyn HttpClient>, base_url: impl Into<String>, api_key: Option<String>) -> Self {
        Self {
            http,
            base_url: base_url.into(),
            api_key,
            limiter: RateLimiter::new(Duration::from_secs(1)),
        }
    }

    /// Reads `FORGEKG_LLM_BASE_URL` and `FORGEKG_LLM_API_KEY`.
    pub fn from_env(http: Arc<dyn HttpClient>) -> Result<Self, ProviderError> {
        let base = std::env::var("FORGEKG_LLM_BASE_URL")
            .map_err(|_| ProviderError::Config("FORGEKG_LLM_BASE_URL is not set".into()))?;
        Ok(Self::new(http, base, std::env::var("FORGEKG_LLM_API_KEY").ok()))
    }

    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.limiter = RateLimiter::new(interval);
        self
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

impl Provider for LiveProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let body = json!({
            "model": request.model_id,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
        });
        let auth = self.api_key.as_ref().map(|k| format!("Bearer {k}"));
        let headers: Vec<(&str, &str)> = auth
            .as_deref()
            .map(|v| vec![("Authorization", v)])
            .unwrap_or_default();

        self.limiter.wait();
        let response = self.http.post_json(&self.endpoint(), &headers, &body)?;
        match response.status {
            200..=299 => {}
            401 | 403 => return Err(ProviderError::Auth { status: response.status }),
            status => {
                return Err(ProviderError::Status {
                    status,
                    body: response.body,
                })
            }
        }
        let parsed: ChatResponse = serde_json::from_str(&response.body)
            .map_err(|e| ProviderError::Payload(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ProviderError::Payload("no message content in response".into()))
    }
}

// ---------------------------------------------------------------------------
// Rule-based
// ---------------------------------------------------------------------------

/// Deterministic keyword/regex heuristics; needs neither network nor fixtures.
///
/// Reads the text between the `-----BEGIN X-----` / `-----END X-----`
/// markers of the built-in templates, falling back to the whole user text.
#[derive(Debug, Default, Clone, Copy)]
pub struct RuleBasedProvider;

impl Provider for RuleBasedProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let text = &request.user_text;
        let answer = match request.task {
            Task::Metadata => rules::metadata(block(text, "DESCRIPTION").unwrap_or(text)),
            Task::ClaimIdentification => {
                rules::claims(block(text, "SECTIONS").unwrap_or(text))
            }
            Task::ClaimClassification => {
                rules::classify(block(text, "CLAIMS").unwrap_or(text))
            }
        };
        Ok(answer)
    }
}

fn block<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    let begin = format!("-----BEGIN {name}-----");
    let end = format!("-----END {name}-----");
    let start = text.find(&begin)? + begin.len();
    let stop = text[start..].find(&end)? + start;
    Some(text[start..stop].trim())
}
