//! Two models side by side, keeping subgroups where they differ.

use pinned_auc::experiments::{compare_models, ExperimentConfig};

fn main() -> pinned_auc::Result<()> {
    let mut config = ExperimentConfig::biased_vs_mitigated("gay", 1);
    config.trials = 20;
    config.improvement_threshold = 0.005;
    config.selection_threshold = Some(0.02);
    let table = compare_models(&config)?;

    println!("{} vs {}", table.model_a, table.model_b);
    for r in &table.rows {
        let show = |v: pinned_auc::metrics::MetricValue| {
            v.value().map_or("-".into(), |x| format!("{x:.4}"))
        };
        println!(
            "{:<10} {:<9} {:<13} {:>7} {:>7} {}",
            r.subgroup,
            r.scenario.as_str(),
            r.metric.as_str(),
            show(r.model_a),
            show(r.model_b),
            if r.improved { "improved" } else { "" }
        );
    }
    Ok(())
}
