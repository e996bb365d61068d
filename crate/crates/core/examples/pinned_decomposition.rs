//! Build a pinned set and split its AUC into four pair-set terms.

use pinned_auc::datagen::{generate_synthetic, PerTermTarget, TemplateSpec};
use pinned_auc::metrics::{build_pinned_set, decompose, pinned_auc, SamplePolicy};
use pinned_auc::simscore::{score_dataset, ScoreModelSpec};
use std::num::NonZeroUsize;

fn main() -> pinned_auc::Result<()> {
    let spec = TemplateSpec::default_corpus()
        .with_identity_terms(["gay", "white", "elderly"])?
        .with_per_term_target(PerTermTarget::Count(NonZeroUsize::new(400).unwrap()))?;
    let data = score_dataset(
        &generate_synthetic(&spec),
        &ScoreModelSpec::column_a("gay", 1),
    )?;

    let policy = SamplePolicy::default().with_seed(42);
    let pinned = build_pinned_set(&data, "gay", &policy)?;
    println!(
        "pinned set: {} examples, pinned AUC {:.4}",
        pinned.len(),
        pinned_auc(&pinned)?
    );

    let report = decompose(&pinned)?;
    println!("{:<14} {:>8} {:>8} {:>8}", "term", "pairs", "weight", "auc");
    for t in &report.terms {
        let auc = t.auc.map_or("-".to_string(), |a| format!("{a:.4}"));
        println!(
            "{:<14} {:>8} {:>8.4} {:>8}",
            t.pair_label.as_str(),
            t.pair_count,
            t.weight,
            auc
        );
    }
    println!(
        "weighted sum {:.12} = direct {:.12}; U terms add up exactly: {}",
        report.reconstructed_pinned_auc,
        report.direct_pinned_auc(),
        report.mwu_identity_holds()
    );
    Ok(())
}
