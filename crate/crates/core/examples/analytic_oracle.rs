//! Closed-form pinned AUC of a simulated model against a Monte Carlo draw.

use pinned_auc::metrics::{
    build_pinned_set, decompose, CellCounts, Dataset, Label, LabeledExample, SamplePolicy,
    SampleSize,
};
use pinned_auc::simscore::{
    analytic_decomposition, analytic_pinned_auc, score_dataset, ScoreModelSpec,
};

const PER_CELL: usize = 20_000;

fn main() -> pinned_auc::Result<()> {
    let mut examples = Vec::new();
    for (cell, (label, tagged)) in [
        (Label::Negative, true),
        (Label::Positive, true),
        (Label::Negative, false),
        (Label::Positive, false),
    ]
    .into_iter()
    .enumerate()
    {
        for i in 0..PER_CELL {
            let e = LabeledExample::new(format!("{cell}-{i}"), 0.0, label);
            examples.push(if tagged { e.with_subgroup("g") } else { e });
        }
    }
    let model = ScoreModelSpec::column_a("g", 5);
    let data = score_dataset(&Dataset::new(examples)?, &model)?;

    let policy = SamplePolicy {
        subgroup_sample_size: SampleSize::All,
        background_excludes_subgroup: true,
        ..SamplePolicy::default()
    };
    let report = decompose(&build_pinned_set(&data, "g", &policy)?)?;
    let counts = CellCounts {
        subgroup_negative: PER_CELL,
        subgroup_positive: PER_CELL,
        background_negative: PER_CELL,
        background_positive: PER_CELL,
    };
    let analytic = analytic_decomposition(&model, &counts)?;
    for (mc, exact) in report.terms.iter().zip(&analytic) {
        println!(
            "{:<14} monte carlo {:.4}  analytic {:.4}",
            exact.pair_label.as_str(),
            mc.auc.unwrap(),
            exact.auc
        );
    }
    println!(
        "pinned AUC: monte carlo {:.4}  analytic {:.4}",
        report.direct_pinned_auc(),
        analytic_pinned_auc(&model, &counts)?
    );
    Ok(())
}
