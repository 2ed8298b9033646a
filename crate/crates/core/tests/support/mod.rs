#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use forgekg::http::{HttpClient, HttpError, HttpResponse};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Counts requests; answers from a URL-substring table, 404 otherwise.
#[derive(Default)]
pub struct CountingHttp {
    calls: AtomicUsize,
    pub routes: Vec<(String, HttpResponse)>,
    pub seen: Mutex<Vec<String>>,
}

impl CountingHttp {
    pub fn with_routes(routes: HashMap<&str, HttpResponse>) -> Self {
        let mut routes: Vec<(String, HttpResponse)> =
            routes.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        routes.sort_by_key(|r| std::cmp::Reverse(r.0.len()));
        Self {
            routes,
            ..Self::default()
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl HttpClient for CountingHttp {
    fn get(&self, url: &str) -> Result<HttpResponse, HttpError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.seen.lock().unwrap().push(url.to_string());
        Ok(self
            .routes
            .iter()
            .find(|(k, _)| url.contains(k.as_str()))
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| HttpResponse::with_status(404, "")))
    }

    fn post_json(
        &self,
        url: &str,
        _headers: &[(&str, &str)],
        _body: &serde_json::Value,
    ) -> Result<HttpResponse, HttpError> {
        self.get(url)
    }
}
