//! Command line front end. [`run`] does all the work so the binary stays a
//! one-liner and tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::datagen::{generate_synthetic, PerTermTarget, TemplateSpec};
use crate::experiments::{compare_models, run_skew_experiment, ExperimentConfig, ModelKind};
use crate::io::{
    load_dataset_with, render_report, score_remote, write_dataset_to, DataFormat, LoadOptions,
    Report, ReportFormat,
};
use crate::metrics::{bias_report, build_pinned_set, decompose, Dataset, SamplePolicy};
use crate::simscore::{score_dataset, ScoreModelSpec};
use crate::{seed, Error, Result};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for bad arguments.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for unreadable or invalid data and configs.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pinned-auc",
    version,
    about = "Subgroup bias metrics for binary classifiers",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random draw in the command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config; its meaning depends on the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format. Datasets use csv or jsonl, reports csv or json.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Jsonl,
}

impl Format {
    fn data(self) -> DataFormat {
        match self {
            Format::Csv => DataFormat::Csv,
            Format::Json | Format::Jsonl => DataFormat::Jsonl,
        }
    }

    fn report(self) -> ReportFormat {
        match self {
            Format::Csv => ReportFormat::Csv,
            Format::Json | Format::Jsonl => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the labeled template dataset (--config: template TOML).
    Generate {
        /// Comma-separated identity terms replacing the corpus list.
        #[arg(long, value_delimiter = ',')]
        terms: Option<Vec<String>>,
        /// Examples per term: an even count or `all`.
        #[arg(long, value_parser = parse_per_term)]
        per_term: Option<PerTermTarget>,
    },
    /// Score a dataset with a simulated or remote model (--config: model TOML).
    Score {
        #[command(flatten)]
        input: Input,
        /// Built-in simulated model used without --config.
        #[arg(long, value_enum, default_value_t = BuiltinModel::Biased)]
        model: BuiltinModel,
        /// Subgroup the built-in model treats differently.
        #[arg(long, default_value = "gay")]
        subgroup: String,
    },
    /// Subgroup, BPSN, BNSP and pinned AUC per subgroup (--config: sample policy TOML).
    Evaluate {
        #[command(flatten)]
        input: Input,
        /// Subgroups to report; every tag when omitted.
        #[arg(long)]
        subgroup: Vec<String>,
    },
    /// Four-term pinned AUC decomposition (--config: sample policy TOML).
    Decompose {
        #[command(flatten)]
        input: Input,
        #[arg(long, required = true)]
        subgroup: Vec<String>,
    },
    /// Repeated skew-and-measure trials (--config: experiment TOML).
    SkewExperiment {
        #[command(flatten)]
        experiment: ExperimentArgs,
    },
    /// Two models side by side on original and skewed data (--config: experiment TOML).
    Compare {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Margin by which model B must beat model A to count as improved.
        #[arg(long)]
        improvement_threshold: Option<f64>,
        /// Keep subgroups whose original pinned AUC differs between models by more than this.
        #[arg(long)]
        selection_threshold: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Dataset file (.csv or .jsonl).
    #[arg(long = "in", value_name = "PATH")]
    path: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    in_format: Option<InFormat>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinModel {
    Biased,
    Unbiased,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    trials: Option<usize>,
    /// Fraction of the term's negatives removed per trial.
    #[arg(long)]
    fraction: Option<f64>,
    /// Term to skew.
    #[arg(long)]
    term: Option<String>,
}

fn parse_per_term(s: &str) -> std::result::Result<PerTermTarget, String> {
    if s == "all" {
        return Ok(PerTermTarget::AllCombinations);
    }
    s.parse::<NonZeroUsize>()
        .map(PerTermTarget::Count)
        .map_err(|_| format!("`{s}` is neither `all` nor a positive integer"))
}

/// Failures split by exit code.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // A bare invocation prints help but is still a usage error.
            let usage = e.use_stderr()
                || e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand;
            let sink: &mut dyn Write = if usage { stderr } else { stdout };
            let _ = sink.write_all(e.render().to_string().as_bytes());
            return if usage { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

fn execute(
    cli: &Cli,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Generate { terms, per_term } => {
            require_format(c.format, &[Format::Csv, Format::Jsonl, Format::Json])?;
            let mut spec = match &c.config {
                Some(path) => TemplateSpec::from_path(path)?,
                None => TemplateSpec::default_corpus(),
            };
            if let Some(target) = per_term {
                spec = spec.with_per_term_target(*target)?;
            }
            if let Some(terms) = terms {
                spec = spec.with_identity_terms(terms.clone())?;
            }
            emit_dataset(&generate_synthetic(&spec), c, stdout)
        }
        Command::Score {
            input,
            model,
            subgroup,
        } => {
            let data = load(input, false)?;
            let kind = match &c.config {
                Some(path) => read_model_config(path)?,
                None => ModelKind::Simulated(match model {
                    BuiltinModel::Biased => ScoreModelSpec::column_a(subgroup, 0),
                    BuiltinModel::Unbiased => ScoreModelSpec::unbiased(subgroup, 0),
                }),
            };
            let scored = match kind {
                ModelKind::Simulated(mut spec) => {
                    if let Some(s) = c.seed {
                        spec.seed = s;
                    }
                    score_dataset(&data, &spec)?
                }
                ModelKind::Remote(remote) => {
                    let texts: Vec<&str> = data
                        .examples()
                        .iter()
                        .map(|e| e.text.as_deref().unwrap_or(""))
                        .collect();
                    let results = score_remote(&texts, &remote)?;
                    let mut scores = Vec::with_capacity(results.len());
                    for (e, r) in data.examples().iter().zip(results) {
                        match r {
                            Ok(s) => scores.push(s),
                            Err(err) => {
                                return Err(
                                    Error::Remote(format!("example `{}`: {err}", e.id)).into()
                                )
                            }
                        }
                    }
                    data.with_scores(&scores)?
                }
            };
            emit_dataset(&scored, c, stdout)
        }
        Command::Evaluate { input, subgroup } => {
            let data = load(input, true)?;
            let policy = read_policy(c)?;
            let tags: Vec<String> = if subgroup.is_empty() {
                data.subgroups().map(str::to_string).collect()
            } else {
                subgroup.clone()
            };
            let rows = bias_report(&data, &tags, &policy)?;
            emit_report(&Report::Bias(&rows), c, stdout)
        }
        Command::Decompose { input, subgroup } => {
            let data = load(input, true)?;
            let policy = read_policy(c)?;
            let mut reports = Vec::with_capacity(subgroup.len());
            for tag in subgroup {
                let tag_policy = policy.with_seed(seed::derive_str(policy.seed, tag));
                let pinned = build_pinned_set(&data, tag, &tag_policy)?;
                let report = decompose(&pinned)?;
                let _ = writeln!(
                    stderr,
                    "{tag}: weighted sum {:.12} vs pinned AUC {:.12}; term U values sum to union U: {}",
                    report.reconstructed_pinned_auc,
                    report.direct_pinned_auc(),
                    report.mwu_identity_holds()
                );
                reports.push(report);
            }
            emit_report(&Report::Decomposition(&reports), c, stdout)
        }
        Command::SkewExperiment { experiment } => {
            let config = experiment_config(c, experiment)?;
            let summary = run_skew_experiment(&config)?;
            emit_report(&Report::Summary(&summary), c, stdout)
        }
        Command::Compare {
            experiment,
            improvement_threshold,
            selection_threshold,
        } => {
            let mut config = experiment_config(c, experiment)?;
            if let Some(t) = improvement_threshold {
                config.improvement_threshold = *t;
            }
            if selection_threshold.is_some() {
                config.selection_threshold = *selection_threshold;
            }
            if config.models.len() != 2 {
                return Err(Failure::Usage(format!(
                    "compare needs exactly two models, the config has {}",
                    config.models.len()
                )));
            }
            let table = compare_models(&config)?;
            emit_report(&Report::Comparison(&table), c, stdout)
        }
    }
}

fn require_format(format: Format, allowed: &[Format]) -> std::result::Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "format {format:?} is not supported here"
        )))
    }
}

fn load(input: &Input, require_scores: bool) -> Result<Dataset> {
    let format = match input.in_format {
        Some(InFormat::Csv) => DataFormat::Csv,
        Some(InFormat::Jsonl) => DataFormat::Jsonl,
        None => DataFormat::from_path(&input.path).unwrap_or(DataFormat::Csv),
    };
    load_dataset_with(&input.path, format, LoadOptions { require_scores })
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// A model TOML holds one `[simulated]` or `[remote]` table.
fn read_model_config(path: &Path) -> Result<ModelKind> {
    let kind: ModelKind = read_toml(path)?;
    match &kind {
        ModelKind::Simulated(spec) => spec.validate()?,
        ModelKind::Remote(remote) => remote.validate()?,
    }
    Ok(kind)
}

fn read_policy(c: &Common) -> Result<SamplePolicy> {
    let policy: SamplePolicy = match &c.config {
        Some(path) => read_toml(path)?,
        None => SamplePolicy::default(),
    };
    Ok(match c.seed {
        Some(s) => policy.with_seed(s),
        None => policy,
    })
}

fn experiment_config(
    c: &Common,
    args: &ExperimentArgs,
) -> std::result::Result<ExperimentConfig, Failure> {
    let master_seed = c.seed.unwrap_or(0);
    let mut config = match &c.config {
        Some(path) => {
            let mut config = ExperimentConfig::from_path(path)?;
            if let Some(s) = c.seed {
                config.master_seed = s;
            }
            config
        }
        None => ExperimentConfig::biased_vs_mitigated(
            args.term.as_deref().unwrap_or("gay"),
            master_seed,
        ),
    };
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if args.fraction.is_some() || args.term.is_some() {
        let Some(skew) = config.skew.as_mut() else {
            return Err(Failure::Usage(
                "--fraction/--term need a [skew] section in the config".into(),
            ));
        };
        if let Some(f) = args.fraction {
            skew.removal_fraction = f;
        }
        if let Some(t) = &args.term {
            skew.term = t.clone();
        }
    }
    config.validate()?;
    Ok(config)
}

fn emit_dataset(
    data: &Dataset,
    c: &Common,
    stdout: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match &c.out {
        Some(path) => write_dataset_to(
            data,
            std::io::BufWriter::new(std::fs::File::create(path).map_err(Error::from)?),
            c.format.data(),
        )?,
        None => write_dataset_to(data, stdout, c.format.data())?,
    }
    Ok(())
}

fn emit_report(
    report: &Report<'_>,
    c: &Common,
    stdout: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    if c.format == Format::Jsonl {
        return Err(Failure::Usage("reports are written as csv or json".into()));
    }
    let text = render_report(report, c.format.report())?;
    match &c.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from)?,
        None => stdout.write_all(text.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}
