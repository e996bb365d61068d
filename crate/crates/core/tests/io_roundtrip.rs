use pinned_auc::io::{load_dataset, write_dataset, DataFormat};
use pinned_auc::metrics::{Dataset, Label, LabeledExample};
use proptest::prelude::*;

fn example() -> impl Strategy<Value = (f64, bool, Vec<String>, Option<String>)> {
    (
        prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0],
        any::<bool>(),
        prop::collection::vec("[a-z][a-z ]{0,8}", 0..3),
        prop::option::of("[^\u{0}]{1,20}"),
    )
}

fn dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(example(), 0..40).prop_map(|rows| {
        let examples = rows
            .into_iter()
            .enumerate()
            .map(|(i, (score, pos, tags, text))| {
                let label = if pos {
                    Label::Positive
                } else {
                    Label::Negative
                };
                let mut e =
                    LabeledExample::new(format!("id-{i}"), score, label).with_subgroups(tags);
                e.text = text;
                e
            })
            .collect();
        Dataset::new(examples).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_then_load_is_identity(ds in dataset()) {
        let dir = tempfile::tempdir().unwrap();
        for (format, name) in [(DataFormat::Csv, "d.csv"), (DataFormat::Jsonl, "d.jsonl")] {
            let path = dir.path().join(name);
            write_dataset(&ds, &path, format).unwrap();
            prop_assert_eq!(&load_dataset(&path, format).unwrap(), &ds);
        }
    }
}

#[test]
fn generated_corpus_round_trips() {
    let spec = pinned_auc::datagen::TemplateSpec::default_corpus();
    let ds = pinned_auc::datagen::generate_synthetic(&spec);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.csv");
    write_dataset(&ds, &path, DataFormat::Csv).unwrap();
    assert_eq!(load_dataset(&path, DataFormat::Csv).unwrap(), ds);
}
