#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use forgekg::http::{HttpClient, HttpError, HttpResponse};
use forgekg_cli::PipelineConfig;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .expect("fixtures directory")
}

/// The shipped fixture configuration, writing runs under `output_dir`.
pub fn fixture_config(output_dir: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&fixtures().join("config.toml")).unwrap();
    config.output_dir = output_dir.to_path_buf();
    config
}

/// Refuses every request and counts how often it was asked.
#[derive(Default)]
pub struct CountingHttp(AtomicUsize);

impl CountingHttp {
    pub fn calls(&self) -> usize {
        self.0.load(Ordering::SeqCst)
    }
}

impl HttpClient for CountingHttp {
    fn get(&self, url: &str) -> Result<HttpResponse, HttpError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        Err(HttpError::Transport {
            url: url.into(),
            message: "network disabled in tests".into(),
        })
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
