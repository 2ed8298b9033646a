//! Declarative pipeline configuration (TOML) with flag and env overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use forgekg::reconcile::{RateLimits, DEFAULT_MARGIN, DEFAULT_THRESHOLD};

use crate::error::CliError;

pub const CACHE_DIR_ENV: &str = "FORGEKG_CACHE_DIR";
pub const LLM_BASE_URL_ENV: &str = "FORGEKG_LLM_BASE_URL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    Live,
    Replay,
    RuleBased,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub model_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture_dir: Option<PathBuf>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_retries")]
    pub retries: u32,
}

fn default_concurrency() -> usize {
    4
}

fn default_retries() -> u32 {
    2
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::RuleBased,
            model_id: "rule-based".into(),
            base_url: None,
            fixture_dir: None,
            concurrency: default_concurrency(),
            retries: default_retries(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconcileConfig {
    pub threshold: f64,
    pub margin: f64,
    pub rate_limits: RateLimits,
    /// Never touch the network; a cache miss is an error.
    pub offline: bool,
    /// Review decisions applied to ambiguous matches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decisions: Option<PathBuf>,
}

impl Default for ReconcileConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            margin: DEFAULT_MARGIN,
            rate_limits: RateLimits::default(),
            offline: false,
            decisions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus_path: PathBuf,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prompt_template_dir: Option<PathBuf>,
    pub provider: ProviderConfig,
    pub reconcile: ReconcileConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus_path: "corpus.jsonl".into(),
            cache_dir: "cache".into(),
            output_dir: "runs".into(),
            prompt_template_dir: None,
            provider: ProviderConfig::default(),
            reconcile: ReconcileConfig::default(),
        }
    }
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    /// Parses TOML; relative paths are taken relative to `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut config: PipelineConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Config file when given, defaults otherwise; then `FORGEKG_CACHE_DIR`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        let mut config = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()) {
            config.cache_dir = PathBuf::from(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.corpus_path);
        resolve(base, &mut self.cache_dir);
        resolve(base, &mut self.output_dir);
        if let Some(p) = &mut self.prompt_template_dir {
            resolve(base, p);
        }
        if let Some(p) = &mut self.provider.fixture_dir {
            resolve(base, p);
        }
        if let Some(p) = &mut self.reconcile.decisions {
            resolve(base, p);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let r = &self.reconcile;
        if !(r.threshold > 0.0 && r.threshold <= 1.0) {
            return bad(format!("reconcile.threshold must be in (0, 1], got {}", r.threshold));
        }
        if !(0.0..1.0).contains(&r.margin) {
            return bad(format!("reconcile.margin must be in [0, 1), got {}", r.margin));
        }
        if self.provider.model_id.trim().is_empty() {
            return bad("provider.model_id is empty".into());
        }
        if self.provider.concurrency == 0 {
            return bad("provider.concurrency must be at least 1".into());
        }
        match self.provider.kind {
            ProviderKind::Replay if self.provider.fixture_dir.is_none() => {
                bad("provider.kind = \"replay\" needs provider.fixture_dir".into())
            }
            ProviderKind::Live
                if self.provider.base_url.is_none() && std::env::var(LLM_BASE_URL_ENV).is_err() =>
            {
                bad(format!("provider.kind = \"live\" needs provider.base_url or {LLM_BASE_URL_ENV}"))
            }
            _ => Ok(()),
        }
    }
}

/// Flags that override config fields, shared by the pipeline subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Pipeline configuration file (TOML)
    #[arg(long, short = 'c', global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub prompt_dir: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub provider: Option<ProviderKind>,
    #[arg(long, global = true)]
    pub model_id: Option<String>,
    #[arg(long, global = true)]
    pub base_url: Option<String>,
    #[arg(long, global = true)]
    pub fixture_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub concurrency: Option<usize>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub margin: Option<f64>,
    /// Reconcile from the cache only
    #[arg(long, global = true)]
    pub offline: bool,
    /// Run directory name under the output directory
    #[arg(long, global = true)]
    pub run_id: Option<String>,
}

impl Overrides {
    /// Loads the config and applies every flag that was given.
    pub fn config(&self) -> Result<PipelineConfig, CliError> {
        let mut c = PipelineConfig::load_or_default(self.config.as_deref())?;
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.corpus, c.corpus_path);
        set!(self.cache_dir, c.cache_dir);
        set!(self.output_dir, c.output_dir);
        set!(self.provider, c.provider.kind);
        set!(self.model_id, c.provider.model_id);
        set!(self.concurrency, c.provider.concurrency);
        set!(self.threshold, c.reconcile.threshold);
        set!(self.margin, c.reconcile.margin);
        if self.prompt_dir.is_some() {
            c.prompt_template_dir = self.prompt_dir.clone();
        }
        if self.base_url.is_some() {
            c.provider.base_url = self.base_url.clone();
        }
        if self.fixture_dir.is_some() {
            c.provider.fixture_dir = self.fixture_dir.clone();
        }
        c.reconcile.offline |= self.offline;
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_the_config_file() {
        let c = PipelineConfig::from_toml(
            r#"
            corpus_path = "corpus.jsonl"
            cache_dir = "/abs/cache"
            [provider]
            kind = "replay"
            model_id = "m"
            fixture_dir = "replay"
            [reconcile]
            threshold = 0.9
            [reconcile.rate_limits]
            viaf = 0.5
            "#,
            Path::new("/etc/fk"),
        )
        .unwrap();
        assert_eq!(c.corpus_path, Path::new("/etc/fk/corpus.jsonl"));
        assert_eq!(c.cache_dir, Path::new("/abs/cache"));
        assert_eq!(c.provider.fixture_dir.as_deref(), Some(Path::new("/etc/fk/replay")));
        assert_eq!(c.reconcile.rate_limits.viaf, 0.5);
        assert_eq!(c.reconcile.rate_limits.wikidata, 1.0);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn threshold_out_of_range() {
        let mut c = PipelineConfig::default();
        c.reconcile.threshold = 1.5;
        assert!(matches!(c.validate(), Err(CliError::Config(m)) if m.contains("threshold")));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(PipelineConfig::from_toml("corpus = 'x'", Path::new(".")).is_err());
        assert!(PipelineConfig::from_toml("[provider]\nkind = 'gpt'\nmodel_id = 'x'", Path::new(".")).is_err());
    }

    #[test]
    fn replay_needs_fixtures() {
        let mut c = PipelineConfig::default();
        c.provider.kind = ProviderKind::Replay;
        assert!(c.validate().is_err());
    }
}
