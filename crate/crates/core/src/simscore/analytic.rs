use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc;

use super::quadrature::tanh_sinh;
use super::{ScoreDistribution, ScoreModelSpec};
use crate::metrics::{CellCounts, PairLabel};
use crate::{Error, Result};

const QUADRATURE_TOL: f64 = 1e-10;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `P(pos > neg)` for two latent gaussians:
/// `Phi((mu_pos - mu_neg) / sqrt(sd_neg^2 + sd_pos^2))`.
pub fn closed_form_pairwise_auc(neg: &ScoreDistribution, pos: &ScoreDistribution) -> Result<f64> {
    neg.validate()?;
    pos.validate()?;
    match (*neg, *pos) {
        (
            ScoreDistribution::GaussianOnLatent {
                mean: mn,
                std_dev: sn,
            },
            ScoreDistribution::GaussianOnLatent {
                mean: mp,
                std_dev: sp,
            },
        ) => Ok(normal_cdf((mp - mn) / sn.hypot(sp))),
        (ScoreDistribution::Beta { .. }, _) | (_, ScoreDistribution::Beta { .. }) => {
            Err(Error::UnsupportedFamily("beta"))
        }
    }
}

/// `P(pos > neg)` for independent draws from the two cells.
///
/// Gaussian pairs use the closed form. Anything involving a beta cell is
/// integrated numerically on the [0, 1] score scale as
/// `integral f_neg(x) (1 - F_pos(x)) dx`, with gaussian cells taken through
/// the logistic squash.
pub fn analytic_pairwise_auc(neg: &ScoreDistribution, pos: &ScoreDistribution) -> Result<f64> {
    match closed_form_pairwise_auc(neg, pos) {
        Err(Error::UnsupportedFamily(_)) => Ok(tanh_sinh(
            |x, one_minus_x| density(neg, x, one_minus_x) * survival(pos, x, one_minus_x),
            QUADRATURE_TOL,
        )
        .clamp(0.0, 1.0)),
        other => other,
    }
}

fn density(d: &ScoreDistribution, x: f64, one_minus_x: f64) -> f64 {
    match *d {
        ScoreDistribution::Beta { alpha, beta } => {
            ((alpha - 1.0) * x.ln() + (beta - 1.0) * one_minus_x.ln() - ln_beta(alpha, beta)).exp()
        }
        ScoreDistribution::GaussianOnLatent { mean, std_dev } => {
            let z = ((x.ln() - one_minus_x.ln()) - mean) / std_dev;
            let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            phi / (std_dev * x * one_minus_x)
        }
    }
}

fn survival(d: &ScoreDistribution, x: f64, one_minus_x: f64) -> f64 {
    match *d {
        // 1 - I_x(a, b) = I_{1-x}(b, a)
        ScoreDistribution::Beta { alpha, beta } => beta_reg(beta, alpha, one_minus_x),
        ScoreDistribution::GaussianOnLatent { mean, std_dev } => {
            normal_cdf(-((x.ln() - one_minus_x.ln()) - mean) / std_dev)
        }
    }
}

/// One term of the population decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticTerm {
    pub pair_label: PairLabel,
    pub pair_count: u64,
    pub weight: f64,
    pub auc: f64,
}

/// Population version of the four-term decomposition for a pinned set whose
/// background half holds only background cells. `counts` are the pinned-set
/// cell sizes.
pub fn analytic_decomposition(
    model: &ScoreModelSpec,
    counts: &CellCounts,
) -> Result<[AnalyticTerm; 4]> {
    let bn = counts.background_negative as u64;
    let bp = counts.background_positive as u64;
    let sn = counts.subgroup_negative as u64;
    let sp = counts.subgroup_positive as u64;
    let total = (bn + sn) * (bp + sp);
    if total == 0 {
        return Err(Error::ZeroPairs);
    }
    let term = |pair_label,
                neg: &ScoreDistribution,
                pos: &ScoreDistribution,
                pair_count: u64|
     -> Result<AnalyticTerm> {
        Ok(AnalyticTerm {
            pair_label,
            pair_count,
            weight: pair_count as f64 / total as f64,
            auc: analytic_pairwise_auc(neg, pos)?,
        })
    };
    Ok([
        term(
            PairLabel::BgBg,
            &model.background_negative,
            &model.background_positive,
            bn * bp,
        )?,
        term(
            PairLabel::SubSub,
            &model.subgroup_negative,
            &model.subgroup_positive,
            sn * sp,
        )?,
        term(
            PairLabel::BgNegSubPos,
            &model.background_negative,
            &model.subgroup_positive,
            bn * sp,
        )?,
        term(
            PairLabel::SubNegBgPos,
            &model.subgroup_negative,
            &model.background_positive,
            sn * bp,
        )?,
    ])
}

/// The value a pinned AUC with these cell counts converges to: the
/// pair-count weighted average of the four pairwise population AUCs.
pub fn analytic_pinned_auc(model: &ScoreModelSpec, counts: &CellCounts) -> Result<f64> {
    Ok(analytic_decomposition(model, counts)?
        .iter()
        .filter(|t| t.pair_count > 0)
        .map(|t| t.weight * t.auc)
        .sum())
}
