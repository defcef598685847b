//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or config error,
//! 3 fairness gate failure (the fairgroup run's positive class is not
//! alpha-fair).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fairgroup_core::synth::{self, SynthConfig};
use fairgroup_core::{run_experiment, Dataset, Kind};
use log::{debug, info};
use thiserror::Error;

use crate::config::RunConfig;
use crate::{artifacts, csv_io, model_io, report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GATE: i32 = 3;

pub const DEFAULT_OUT: &str = "fairgroup-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Gate(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Gate(_) => EXIT_GATE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: impl ToString) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "fairgroup", version, about = "Fairgroup construction for binary classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic ACS-like dataset as CSV, plus a `.meta` sidecar.
    Synth(SynthArgs),
    /// Train, classify the test split directly and through fairgroups, and report.
    Run(Box<RunArgs>),
    /// Dump the importance matrix, clustering and fairgroup plan of a run as CSVs.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, alias = "seed-synth", default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Share of households below the income threshold.
    #[arg(long)]
    prevalence: Option<f64>,
    /// Label flip probability.
    #[arg(long)]
    noise: Option<f64>,
}

/// Every value flag is read as text so that flag and config-file values go
/// through the same parser.
#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    /// Generate the synthetic benchmark instead of reading --data.
    #[arg(long)]
    synth: bool,
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "seed-synth")]
    seed_synth: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    protected: Option<String>,
    /// Numeric protected features are binarized as value < threshold.
    #[arg(long)]
    threshold: Option<String>,
    /// Comma-separated features to drop before training.
    #[arg(long)]
    exclude: Option<String>,
    /// linear, logistic or svm.
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long = "learning-rate")]
    learning_rate: Option<String>,
    #[arg(long)]
    l2: Option<String>,
    #[arg(long = "svm-cost")]
    svm_cost: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Protected:unprotected members per fairgroup, e.g. 4:1.
    #[arg(long)]
    ratio: Option<String>,
    /// one-sided or two-sided.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Training fraction.
    #[arg(long)]
    split: Option<String>,
    #[arg(long = "seed-split")]
    seed_split: Option<String>,
    #[arg(long = "seed-cluster")]
    seed_cluster: Option<String>,
    #[arg(long = "seed-representative")]
    seed_representative: Option<String>,
    #[arg(long = "max-iters")]
    max_iters: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    /// Directory of a previous run.
    #[arg(long, default_value = DEFAULT_OUT)]
    run: PathBuf,
    /// Where to write the CSVs; defaults to the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("data", &self.data),
            ("n", &self.n),
            ("seed-synth", &self.seed_synth),
            ("target", &self.target),
            ("protected", &self.protected),
            ("threshold", &self.threshold),
            ("exclude", &self.exclude),
            ("classifier", &self.classifier),
            ("epochs", &self.epochs),
            ("learning-rate", &self.learning_rate),
            ("l2", &self.l2),
            ("svm-cost", &self.svm_cost),
            ("k", &self.k),
            ("ratio", &self.ratio),
            ("mode", &self.mode),
            ("alpha", &self.alpha),
            ("split", &self.split),
            ("seed-split", &self.seed_split),
            ("seed-cluster", &self.seed_cluster),
            ("seed-representative", &self.seed_representative),
            ("max-iters", &self.max_iters),
            ("out", &self.out),
        ]
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read --config {}: {e}", path.display())))?;
            cfg.apply_text(&text).map_err(usage)?;
        }
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v).map_err(usage)?;
            }
        }
        if self.synth {
            cfg.synth = true;
        }
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

/// Loads or generates the data and applies exclusions and the protected
/// feature.
pub fn prepare_dataset(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let raw = match &cfg.data {
        Some(path) => csv_io::load_csv_inferred(path, &cfg.target)
            .map_err(|e| usage(format!("--data {}: {e}", path.display())))?,
        None => {
            let d = synth::synth_acs(cfg.n, cfg.seed_synth, &SynthConfig::default()).map_err(usage)?;
            if cfg.target != d.target_name() {
                return Err(usage(format!(
                    "--target: synthetic data has target `{}`",
                    d.target_name()
                )));
            }
            d
        }
    };
    let excluded: Vec<&str> = cfg.exclude.iter().map(String::as_str).collect();
    let d = raw
        .drop_features(&excluded)
        .map_err(|e| usage(format!("--exclude: {e}")))?;
    let spec = d
        .specs()
        .iter()
        .find(|s| s.name == cfg.protected)
        .ok_or_else(|| usage(format!("--protected: no feature named `{}`", cfg.protected)))?;
    match (spec.kind, cfg.threshold) {
        (Kind::Numeric, Some(t)) => d
            .binarize_protected(&cfg.protected, t)
            .map_err(|e| usage(format!("--protected: {e}"))),
        (Kind::Numeric, None) => Err(usage(format!(
            "--threshold is required: protected feature `{}` is numeric",
            cfg.protected
        ))),
        (Kind::Binary, None) => d
            .mark_protected(&cfg.protected)
            .map_err(|e| usage(format!("--protected: {e}"))),
        (Kind::Binary, Some(_)) => Err(usage(format!(
            "--threshold: protected feature `{}` is already binary",
            cfg.protected
        ))),
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut cfg = SynthConfig::default();
    if let Some(p) = args.prevalence {
        cfg.prevalence = p;
    }
    if let Some(v) = args.noise {
        cfg.noise = v;
    }
    if args.n < synth::MIN_ROWS {
        return Err(usage(format!("--n must be at least {}, got {}", synth::MIN_ROWS, args.n)));
    }
    let d = synth::synth_acs(args.n, args.seed, &cfg).map_err(usage)?;
    csv_io::save_csv(&d, &args.out).map_err(internal)?;
    let e = &cfg.effects;
    let meta = format!(
        "generator=synth_acs\nn={}\nseed={}\nprevalence={}\nnoise={}\nage_gap={}\ninterest_shift={}\n\
         interest_age_corr={}\nhousehold_proxy={}\neffect.protected={}\neffect.age={}\n\
         effect.interest={}\neffect.disability={}\neffect.intercept={}\nincome_threshold={}\n",
        args.n,
        args.seed,
        cfg.prevalence,
        cfg.noise,
        cfg.age_gap,
        cfg.interest_shift,
        cfg.interest_age_corr,
        cfg.household_proxy,
        e.protected,
        e.age,
        e.interest,
        e.disability,
        e.intercept,
        synth::INCOME_THRESHOLD,
    );
    let mut meta_path = args.out.clone().into_os_string();
    meta_path.push(".meta");
    fs::write(PathBuf::from(meta_path), meta).map_err(internal)?;
    info!("wrote {} rows to {}", d.len(), args.out.display());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let rendered = cfg.render();
    debug!("effective config:\n{rendered}");
    let d = prepare_dataset(&cfg)?;
    let outcome = run_experiment(&d, &cfg.experiment()).map_err(internal)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let all = d.protected_flags().ok_or_else(|| internal("dataset lost its protected feature"))?;
    let protected: Vec<bool> = outcome.test_rows.iter().map(|&r| all[r]).collect();
    write_run(&out, &cfg, &rendered, &outcome, &protected)?;

    print!("{}", report::table(cfg.classifier, &outcome));
    info!(
        "{} groups, {} unmatched; reports in {}",
        outcome.plan.groups.len(),
        outcome.plan.unmatched.len(),
        out.display()
    );
    if !outcome.fair.alpha_fair[1] {
        return Err(CliError::Gate(format!(
            "fairness gate failed: positive-class balance {:.4} is below alpha {}",
            outcome.fair.positive_class_balance, cfg.alpha
        )));
    }
    Ok(())
}

fn write_run(
    out: &Path,
    cfg: &RunConfig,
    rendered: &str,
    outcome: &fairgroup_core::ExperimentOutcome,
    protected: &[bool],
) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(internal)?;
    fs::write(out.join("report.txt"), report::text(cfg.classifier, outcome, rendered)).map_err(internal)?;
    fs::write(
        out.join("report.json"),
        report::record(cfg.classifier, outcome, rendered) + "\n",
    )
    .map_err(internal)?;
    fs::write(out.join("config.cfg"), rendered).map_err(internal)?;
    model_io::save_model(&outcome.model, &out.join("model.txt")).map_err(internal)?;
    artifacts::write(out, outcome, protected).map_err(internal)
}

fn cmd_inspect(args: &InspectArgs) -> Result<(), CliError> {
    let dest = args.out.clone().unwrap_or_else(|| args.run.clone());
    let written = artifacts::inspect(&args.run, &dest).map_err(|e| match e {
        artifacts::ArtifactError::MissingArtifact(_) => usage(e),
        other => internal(other),
    })?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("FAIRGROUP_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Run(a) => cmd_run(a),
        Command::Inspect(a) => cmd_inspect(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
