//! Library side of the `forgekg` command: configuration, run directories and
//! the stage drivers the binary dispatches to.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;

pub use config::{Overrides, PipelineConfig};
pub use error::CliError;
pub use manifest::RunManifest;
pub use pipeline::{run_pipeline, Review, Run};
