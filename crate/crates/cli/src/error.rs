use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("stage `{stage}` failed{}: {message}", entry_suffix(.entry))]
    Stage {
        stage: &'static str,
        entry: Option<String>,
        message: String,
    },
    #[error("stage `extract` failed for entry {entry}: {message}")]
    ReplayMiss { entry: String, message: String },
}

fn entry_suffix(entry: &Option<String>) -> String {
    entry
        .as_ref()
        .map(|e| format!(" for entry {e}"))
        .unwrap_or_default()
}

impl CliError {
    pub fn stage(stage: &'static str, message: impl ToString) -> Self {
        CliError::Stage {
            stage,
            entry: None,
            message: message.to_string(),
        }
    }

    pub fn entry(stage: &'static str, entry: &str, message: impl ToString) -> Self {
        CliError::Stage {
            stage,
            entry: Some(entry.to_string()),
            message: message.to_string(),
        }
    }

    /// 1 for usage/config problems, 2 for stage failures, 3 for replay misses.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Stage { .. } => 2,
            CliError::ReplayMiss { .. } => 3,
        }
    }
}
