//! All four metrics for every identity term of a scored dataset.

use pinned_auc::datagen::{generate_synthetic, TemplateSpec, REFERENCE_TERMS};
use pinned_auc::metrics::{bias_report, Metric, SamplePolicy};
use pinned_auc::simscore::{score_dataset, ScoreModelSpec};

fn main() -> pinned_auc::Result<()> {
    let spec = TemplateSpec::default_corpus().with_identity_terms(REFERENCE_TERMS)?;
    let data = score_dataset(
        &generate_synthetic(&spec),
        &ScoreModelSpec::column_a("gay", 7),
    )?;

    let tags: Vec<&str> = data.subgroups().collect();
    let rows = bias_report(&data, &tags, &SamplePolicy::default())?;
    print!("{:<16}", "subgroup");
    for m in Metric::ALL {
        print!("{:>14}", m.as_str());
    }
    println!();
    for r in &rows {
        print!("{:<16}", r.subgroup);
        for m in Metric::ALL {
            match r.get(m).value() {
                Some(v) => print!("{v:>14.4}"),
                None => print!("{:>14}", r.get(m).reason().unwrap().code()),
            }
        }
        println!();
    }
    Ok(())
}
