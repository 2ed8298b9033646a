//! Structured knowledge graphs of authenticity-assessment claims about
//! historical documents.
//!
//! The crate is organised as a batch pipeline:
//!
//! - [`corpus`]: load and fetch document descriptions and their debate sections
//! - [`extract`]: prompt a completion provider for metadata, claims and claim classes
//! - [`normalize`]: clean and type-validate raw extraction output
//! - [`reconcile`]: resolve people and places against Wikidata, VIAF and GeoNames
//! - [`kg`]: named-graph claim model, TriG serialization and quad matching
//! - [`evaluate`]: precision/recall/F1 and claim-identification scoring against gold data
//! - [`analyze`]: summary statistics and the claimant-century timeline

pub mod analyze;
pub mod corpus;
pub mod evaluate;
pub mod extract;
pub mod http;
pub mod kg;
pub mod normalize;
pub mod reconcile;
pub mod text;

mod digest;
mod ratelimit;
mod warning;

pub use digest::sha256_hex;
pub use ratelimit::RateLimiter;
pub use warning::Warning;
