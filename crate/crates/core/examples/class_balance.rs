//! Pinned AUC moves with a subgroup's class balance even though no pairwise
//! AUC changes.

use pinned_auc::metrics::CellCounts;
use pinned_auc::simscore::{analytic_decomposition, analytic_pinned_auc, ScoreModelSpec};

fn main() -> pinned_auc::Result<()> {
    let model = ScoreModelSpec::column_a("g", 0);
    let n = 1000;
    let scenarios = [
        (
            "balanced",
            CellCounts {
                subgroup_negative: n,
                subgroup_positive: n,
                background_negative: n,
                background_positive: n,
            },
        ),
        (
            "half subgroup negatives",
            CellCounts {
                subgroup_negative: n / 2,
                subgroup_positive: n,
                background_negative: 3 * n / 4,
                background_positive: 3 * n / 4,
            },
        ),
        (
            "half subgroup positives",
            CellCounts {
                subgroup_negative: n,
                subgroup_positive: n / 2,
                background_negative: 3 * n / 4,
                background_positive: 3 * n / 4,
            },
        ),
    ];
    for (name, counts) in scenarios {
        let terms = analytic_decomposition(&model, &counts)?;
        let aucs: Vec<String> = terms
            .iter()
            .map(|t| format!("{}={:.3}", t.pair_label.as_str(), t.auc))
            .collect();
        println!(
            "{name:<24} pinned {:.4}  [{}]",
            analytic_pinned_auc(&model, &counts)?,
            aucs.join(" ")
        );
    }
    Ok(())
}
