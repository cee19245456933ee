//! Experiment orchestration: JSON-driven configs, QFI sweeps, the
//! deterministic Bayesian Monte-Carlo, artifact emission (CSV with metadata
//! headers, JSON mirrors, SVG plots), and the built-in selftest suite.

mod bayes_sim;
mod config;
mod output;
mod qfi;
mod selftest;
mod svg;

pub use bayes_sim::{
    run_bayes_experiment, run_bayes_single, BayesAggregate, BayesGroup, RunSummary,
};
pub use config::{
    default_bayes_sweep, default_mean_grid, default_q_grid, default_qfi_vs_n_sweep,
    default_qfi_vs_q_sweep, ExperimentConfig, SplitRule, SweepSpec, DEFAULT_SEED,
};
pub use output::{
    bayes_aggregate_csv, bayes_runs_csv, emit_bayes_outputs, emit_qfi_outputs,
    parse_bayes_aggregate_csv, parse_bayes_runs_csv, parse_qfi_csv, qfi_csv,
    ARTIFACT_VERSION, BAYES_AGG_CSV_HEADER, BAYES_RUNS_CSV_HEADER,
};
pub use qfi::{build_input_for_means, cat_kind, qfi_point, run_qfi_sweep, QfiRow};
pub use selftest::{selftest, CheckResult};
pub use svg::{line_plot, Series};
