//! Repeated skew-and-measure trials and two-model comparison tables.
//!
//! A trial removes a fresh random share of one class inside one identity
//! term, draws fresh pinned sets, and measures every subgroup for every
//! model. Trial `i` uses seed `derive(master_seed, i)`; its skew and pinned
//! sampling use the child streams 1 and 2 of that seed. Trials run in
//! parallel and are aggregated in a fixed order, so results do not depend on
//! scheduling.

mod compare;
mod config;
mod runner;
mod summary;

pub use compare::{compare_models, compare_summary, ComparisonRow, ComparisonTable, Scenario};
pub use config::{DatasetSource, ExperimentConfig, ModelConfig, ModelKind};
pub use runner::{prepare, run_skew_experiment, run_trials, Prepared, ScoredModel, TrialSettings};
pub use summary::{MetricStats, SummaryRow, TrialSummary};
