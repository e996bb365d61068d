//! The installed binary, end to end.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinned-auc"))
}

fn run(dir: &Path, args: &[&str]) -> std::process::Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

#[test]
fn no_args_prints_usage_and_exits_1() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn generate_score_evaluate_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| {
        let out = run(d, args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out
    };
    ok(&[
        "generate",
        "--terms",
        "gay,white,lesbian",
        "--per-term",
        "100",
        "--out",
        "gen.csv",
    ]);
    ok(&[
        "score",
        "--in",
        "gen.csv",
        "--seed",
        "9",
        "--out",
        "scored.csv",
    ]);

    let eval = ok(&["evaluate", "--in", "scored.csv", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&eval.stdout).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);

    let dec = ok(&["decompose", "--in", "scored.csv", "--subgroup", "gay"]);
    let text = String::from_utf8(dec.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    let weighted: f64 = rows[..4]
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap() * r[5].parse::<f64>().unwrap())
        .sum();
    let printed: f64 = rows[5][5].parse().unwrap();
    assert_eq!(rows[4][5], rows[5][5]);
    assert!((weighted - printed).abs() < 1e-5);
    assert!(String::from_utf8_lossy(&dec.stderr).contains("union U: true"));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "id,score,label\na,1.5,0\n").unwrap();
    let out = run(dir.path(), &["evaluate", "--in", "bad.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn compare_with_experiment_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.toml"),
        r#"
trials = 5
master_seed = 1
[dataset]
source = "generated"
per_term_target = 100
identity_terms = ["gay", "white", "elderly"]
[skew]
term = "gay"
removal_fraction = 0.5
[[models]]
name = "a"
[models.simulated]
subgroup = "gay"
background_negative = { family = "gaussian-on-latent", mean = -2.0, std_dev = 1.0 }
background_positive = { family = "gaussian-on-latent", mean = 2.0, std_dev = 1.0 }
subgroup_negative = { family = "gaussian-on-latent", mean = 1.0, std_dev = 1.0 }
subgroup_positive = { family = "gaussian-on-latent", mean = 5.0, std_dev = 1.0 }
[[models]]
name = "b"
[models.simulated]
subgroup = "gay"
background_negative = { family = "gaussian-on-latent", mean = -2.0, std_dev = 1.0 }
background_positive = { family = "gaussian-on-latent", mean = 2.0, std_dev = 1.0 }
subgroup_negative = { family = "beta", alpha = 2.0, beta = 5.0 }
subgroup_positive = { family = "beta", alpha = 5.0, beta = 2.0 }
"#,
    )
    .unwrap();
    let out = run(dir.path(), &["compare", "--config", "exp.toml"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "subgroup,metric,model_a,model_b,improved"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 4);
    assert!(text.contains("gay,skewed/pinned_auc,"));
}
