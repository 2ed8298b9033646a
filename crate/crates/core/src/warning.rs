use serde::{Deserialize, Serialize};

/// A degradation recorded instead of failing a stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub entry_id: String,
    pub stage: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<String>,
}

impl Warning {
    pub fn new(entry_id: &str, stage: &str, message: impl Into<String>) -> Self {
        Self {
            entry_id: entry_id.to_string(),
            stage: stage.to_string(),
            message: message.into(),
            raw: None,
        }
    }

    pub fn with_raw(mut self, raw: impl Into<String>) -> Self {
        self.raw = Some(raw.into());
        self
    }
}
