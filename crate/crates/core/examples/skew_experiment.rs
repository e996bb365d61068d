//! Repeated skew-and-measure trials for a biased and a mitigated model.

use pinned_auc::experiments::{run_skew_experiment, ExperimentConfig};
use pinned_auc::metrics::Metric;

fn main() -> pinned_auc::Result<()> {
    let mut config = ExperimentConfig::biased_vs_mitigated("gay", 2024);
    config.trials = 50;
    let summary = run_skew_experiment(&config)?;

    println!(
        "{:<16} {:<10} {:>9} {:>9} {:>8} {:>6}",
        "subgroup", "model", "original", "skewed", "delta", "z"
    );
    for tag in ["gay", "lesbian", "white"] {
        for model in &summary.models {
            let row = summary.row(tag, model, Metric::PinnedAuc).unwrap();
            let delta = row.delta().unwrap();
            println!(
                "{tag:<16} {model:<10} {:>9.4} {:>9.4} {delta:>+8.4} {:>6.1}",
                row.baseline.mean.unwrap(),
                row.skewed.mean.unwrap(),
                delta / row.delta_std_error().unwrap()
            );
        }
    }
    Ok(())
}
