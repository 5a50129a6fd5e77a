//! Harness around the singlet kernels: configuration, experiment drivers,
//! and report emission. The binary in `main.rs` is a thin wrapper over
//! these modules so integration tests can drive the full pipeline in-process.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ModelKind, OutputFormat, RunConfig};
pub use experiment::{
    chsh_experiment, classify, oracle_table, run_experiment, sweep_kappa, ChshReport,
    CorrelationClass, CorrelationRecord, ExperimentError, ExperimentOutput, KappaRun,
};
pub use report::{render_csv, render_json, write_report, ReportError, CSV_HEADER};
