//! Generate the template dataset, then skew one term.

use pinned_auc::datagen::{
    dataset_stats, generate_synthetic, skew_dataset, SkewSpec, TemplateSpec,
};

fn main() -> pinned_auc::Result<()> {
    let spec = TemplateSpec::default_corpus();
    let data = generate_synthetic(&spec);
    let stats = dataset_stats(&data);
    println!(
        "{} examples over {} terms",
        stats.total.total(),
        stats.terms.len()
    );
    for e in data.examples().iter().take(3) {
        println!(
            "  {} [{}] {}",
            e.id,
            e.label,
            e.text.as_deref().unwrap_or("")
        );
    }

    let skew = SkewSpec::new("gay", 0.5, 11);
    let skewed = skew_dataset(&data, &skew)?;
    let (before, after) = (stats.terms["gay"], dataset_stats(&skewed).terms["gay"]);
    println!(
        "gay: {} -> {} examples, positive share {:.3} -> {:.3}",
        before.total(),
        after.total(),
        before.positive_share().unwrap(),
        after.positive_share().unwrap()
    );
    Ok(())
}
