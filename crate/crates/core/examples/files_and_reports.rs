//! Write a dataset to csv and jsonl, read it back, and render reports.

use pinned_auc::datagen::{generate_synthetic, PerTermTarget, TemplateSpec};
use pinned_auc::io::{
    load_dataset, render_report, write_dataset, DataFormat, Report, ReportFormat,
};
use pinned_auc::metrics::{bias_report, SamplePolicy};
use pinned_auc::simscore::{score_dataset, ScoreModelSpec};
use std::num::NonZeroUsize;

fn main() -> pinned_auc::Result<()> {
    let spec = TemplateSpec::default_corpus()
        .with_identity_terms(["gay", "white"])?
        .with_per_term_target(PerTermTarget::Count(NonZeroUsize::new(20).unwrap()))?;
    let data = score_dataset(
        &generate_synthetic(&spec),
        &ScoreModelSpec::column_a("gay", 3),
    )?;

    let dir = std::env::temp_dir().join("pinned-auc-example");
    std::fs::create_dir_all(&dir)?;
    for (format, name) in [
        (DataFormat::Csv, "data.csv"),
        (DataFormat::Jsonl, "data.jsonl"),
    ] {
        let path = dir.join(name);
        write_dataset(&data, &path, format)?;
        assert_eq!(load_dataset(&path, format)?, data);
        println!("wrote and reloaded {}", path.display());
    }

    let rows = bias_report(
        &data,
        &["gay", "white", "martian"],
        &SamplePolicy::default(),
    )?;
    print!(
        "{}",
        render_report(&Report::Bias(&rows), ReportFormat::Csv)?
    );
    print!(
        "{}",
        render_report(&Report::Bias(&rows[2..]), ReportFormat::Json)?
    );
    Ok(())
}
