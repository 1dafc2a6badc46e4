//! Experiments, budget searches and property suites.

pub mod budget;
pub mod cli;
pub mod experiment;
pub mod output;
pub mod verify;

pub use budget::{budget_scaling, loglog_fit, minimal_budget, LogLogFit};
pub use experiment::{
    estimate_algorithm, estimate_success, hard_classes, trial_rng, wilson_interval, ClassResult, ExperimentSpec,
    InstanceClass, OutputFormat, ResultRow, DEFAULT_P_CAP, WILSON_Z,
};
pub use output::{render_bounds, render_report, render_rows, CSV_COLUMNS};
pub use verify::{verify_all, Suite, SuiteReport, SuiteResult, VerifyOptions};
