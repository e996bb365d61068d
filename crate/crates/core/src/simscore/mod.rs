//! Simulated scorers with per-cell score distributions, and closed-form AUC
//! oracles for the populations they sample from.

mod analytic;
mod model;
mod quadrature;

pub use analytic::{
    analytic_decomposition, analytic_pairwise_auc, analytic_pinned_auc, closed_form_pairwise_auc,
    normal_cdf, AnalyticTerm,
};
pub use model::{score_dataset, squash, ScoreDistribution, ScoreModelSpec};
pub use quadrature::tanh_sinh;
