//! Network-based hybrid high-level classification driven by deterministic
//! tourist walks, with a word-sense disambiguation pipeline around it.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`, which is what the CLI uses.

pub mod adjacency;
pub mod attgraph;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod scalar;
pub mod tourist;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = features::Dataset<f64>;
pub type Instance64 = features::Instance<f64>;
pub type ClassGraph64 = attgraph::ClassGraph<f64>;
pub type GraphConfig64 = attgraph::GraphConfig<f64>;
pub type MembershipVector64 = classify::MembershipVector<f64>;
pub type HighLevelClassifier64 = classify::HighLevelClassifier<f64>;
pub type PipelineConfig64 = eval::PipelineConfig<f64>;
pub type CvOutcome64 = eval::CvOutcome<f64>;
