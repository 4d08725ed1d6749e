//! Cross-validation, compliance sweeps, p-values, the toy experiment and
//! synthetic data generators.

mod config;
mod cv;
mod folds;
mod pvalue;
pub mod synthetic;
mod toy;

pub use config::ExperimentConfig;
pub use cv::{
    cross_validate, default_lambda_grid, lambda_grid, lambda_sweep, CvOutcome, ExperimentReport, Paradigm,
    PipelineConfig, Prediction, ReportRow, CSV_HEADER,
};
pub use folds::{FoldPlan, DEFAULT_FOLDS};
pub use pvalue::{p_value, p_value_monte_carlo};
pub use toy::{
    generate_toy, probe_instance, toy_experiment, ToyConfig, ToyData, ToyReport, ToyRow, ToyShape, STRUCTURED,
    TOY_CSV, TOY_SEED, UNSTRUCTURED,
};
