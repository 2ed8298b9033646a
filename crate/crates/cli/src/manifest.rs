//! Provenance record for one run directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use forgekg::{sha256_hex, Warning};

use crate::config::PipelineConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    /// `label` is what gets recorded as the path.
    pub fn of(path: &Path, label: impl Into<String>) -> std::io::Result<Self> {
        let data = fs::read(path)?;
        Ok(Self {
            path: label.into(),
            sha256: sha256_hex(&data),
            bytes: data.len() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub finished_at: DateTime<Utc>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarningSummary {
    pub total: usize,
    pub by_stage: BTreeMap<String, usize>,
}

impl WarningSummary {
    pub fn of(warnings: &[Warning]) -> Self {
        let mut by_stage = BTreeMap::new();
        for w in warnings {
            *by_stage.entry(w.stage.clone()).or_insert(0) += 1;
        }
        Self {
            total: warnings.len(),
            by_stage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub tool_version: String,
    pub created_at: DateTime<Utc>,
    pub config: PipelineConfig,
    pub stages: Vec<StageRecord>,
    pub warnings: WarningSummary,
    /// Shared by all stages, so tracked here rather than per stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warnings_file: Option<FileDigest>,
}

impl RunManifest {
    pub fn new(run_id: &str, config: &PipelineConfig) -> Self {
        Self {
            run_id: run_id.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: Utc::now(),
            config: config.clone(),
            stages: Vec::new(),
            warnings: WarningSummary::default(),
            warnings_file: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::stage("manifest", e))?;
        serde_json::from_str(&text).map_err(|e| CliError::stage("manifest", e))
    }

    /// Replaces any earlier record of the same stage.
    pub fn record(&mut self, stage: StageRecord) {
        self.stages.retain(|s| s.stage != stage.stage);
        self.stages.push(stage);
    }

    /// Every output digest that no longer matches the file on disk.
    pub fn stale_outputs(&self, run_dir: &Path) -> Vec<String> {
        self.stages
            .iter()
            .flat_map(|s| &s.outputs)
            .chain(&self.warnings_file)
            .filter(|d| {
                FileDigest::of(&run_dir.join(&d.path), d.path.clone())
                    .map_or(true, |now| now.sha256 != d.sha256)
            })
            .map(|d| d.path.clone())
            .collect()
    }
}
