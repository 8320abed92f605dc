//! Experiment driver: configuration, seeded sweeps, CSV output and figure
//! pipelines.

mod config;
pub mod figures;
mod output;
pub mod plot;
mod sweep;

pub use config::{ExperimentConfig, SweepAxes, TableSpec, WORKERS_ENV};
pub use output::{metadata_lines, write_metadata};
pub use sweep::{
    read_sweep_csv, run_sweep, run_sweep_with_workers, trial_seeds, CellAccumulator, CellKey, CellSummary,
    Provenance, SweepResult,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
