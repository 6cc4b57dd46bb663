//! Monte-Carlo experiments: configuration, seeded runs, sweeps, output and
//! the verification suite.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;
pub mod verify;

pub use config::{EnergyConfig, ExperimentConfig};
pub use output::{emit_csv, emit_plot, read_csv, SweepRow, CSV_HEADER, METRIC_COLUMNS};
pub use run::{run_detailed, run_single, sample_types, RunDetail, RunMetrics, RunSeeds};
pub use sweep::{sweep_m, sweep_pe, MetricStats, SweepPoint, SweepResult};
pub use verify::{run_verification, CheckResult, VerifyOptions, VerifyReport};
