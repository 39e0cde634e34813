//! Seeded batch experiments for the pyramidal GA: instance sets, strategy
//! cells, per-run CSV results and aggregated reports.

pub mod config;
pub mod instances;
pub mod oracle;
pub mod report;
pub mod results;
pub mod runner;
pub mod seed;

pub use config::{ExperimentConfig, ProblemKind, StrategySpec};
pub use instances::InstanceSet;
pub use report::{aggregate, compare_orderings, emit_report, ExperimentReport, Metric, ReportFormat, Verdict};
pub use results::{CellResult, CellStatus};
pub use runner::run_experiment;
pub use seed::derive_seed;
