//! `ff-lab`: train, sweep, analyze and evaluate Forward-Forward networks.
//!
//! Exit codes: 0 on success, 1 on configuration or usage errors, 2 when
//! input data is missing or malformed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ff_core::config::{ExperimentConfig, InferenceMode, RawConfig};
use ff_core::experiment;
use ff_core::thresholds::K_SWEEP_GRID;
use ff_core::Error;

#[derive(Parser)]
#[command(name = "ff-lab", version, about = "Forward-Forward training lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network and write metrics, checkpoint and analysis files.
    Train {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Train once per value of a config key and write a summary table.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// `key=v1,v2,...`; `k` is short for `threshold.k`. Defaults to the standard k grid.
        #[arg(long = "sweep", value_name = "KEY=VALUES")]
        sweep: Option<String>,
    },
    /// Weight statistics and heatmaps for a checkpoint.
    Analyze {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Output directory (default: `analysis/` next to the checkpoint).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test error of a checkpoint.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value = "head")]
        mode: String,
        /// Config file (default: `config.resolved.txt` next to the checkpoint).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `section.key = value` file; omitted means all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the long reference recipe (four 2000-unit layers, 100 epochs, full data).
    #[arg(long)]
    full: bool,
    /// Suppress per-epoch progress on stderr.
    #[arg(long, short)]
    quiet: bool,
    #[command(flatten)]
    overrides: Overrides,
}

/// Command-line values; each one replaces the matching config key.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long = "batch-size")]
    batch_size: Option<String>,
    /// Comma-separated layer widths.
    #[arg(long)]
    arch: Option<String>,
    #[arg(long)]
    activation: Option<String>,
    /// Threshold factor for the constant strategy.
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "output")]
    output: Option<String>,
    /// Any config key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn pairs(&self) -> Result<Vec<(String, String)>, Error> {
        let named = [
            ("dataset", &self.dataset),
            ("seed", &self.seed),
            ("epochs", &self.epochs),
            ("lr", &self.lr),
            ("batch_size", &self.batch_size),
            ("arch", &self.arch),
            ("activation", &self.activation),
            ("threshold.k", &self.k),
            ("output.dir", &self.output),
        ];
        let mut out: Vec<(String, String)> = named
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| Error::Config {
                line: 0,
                key: s.clone(),
                msg: "expected --set key=value".into(),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }
}

fn read_text(path: Option<&Path>) -> Result<String, Error> {
    match path {
        None => Ok(String::new()),
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config {
            line: 0,
            key: "--config".into(),
            msg: format!("cannot read {}: {e}", p.display()),
        }),
    }
}

fn raw_config(run: &RunArgs) -> Result<RawConfig, Error> {
    let mut raw = RawConfig::parse(&read_text(run.config.as_deref())?)?;
    if run.full {
        raw.apply_full_recipe()?;
    }
    for (k, v) in run.overrides.pairs()? {
        raw.set(&k, &v, 0)?;
    }
    Ok(raw)
}

fn logger(quiet: bool) -> impl FnMut(&str) {
    move |msg: &str| {
        if !quiet {
            eprintln!("{msg}");
        }
    }
}

fn train(run: &RunArgs) -> Result<(), Error> {
    let cfg = raw_config(run)?.resolve()?;
    let report = experiment::run_experiment(&cfg, &mut logger(run.quiet))?;
    println!(
        "final test error {:.4} (best {:.4} at epoch {}); outputs in {}",
        report.final_test_err,
        report.best_test_err,
        report.best_epoch,
        report.output_dir.display()
    );
    if let Some(b) = &report.baseline {
        println!("baseline final test error {:.4}", b.final_test_err);
    }
    Ok(())
}

fn sweep(run: &RunArgs, spec: Option<&str>) -> Result<(), Error> {
    let raw = raw_config(run)?;
    let (key, values) = match spec {
        None => (
            "threshold.k".to_string(),
            K_SWEEP_GRID.iter().map(f64::to_string).collect(),
        ),
        Some(s) => {
            let (k, vs) = s.split_once('=').ok_or_else(|| Error::Config {
                line: 0,
                key: s.to_string(),
                msg: "expected --sweep key=v1,v2,...".into(),
            })?;
            let key = match k.trim() {
                "k" => "threshold.k".to_string(),
                other => other.to_string(),
            };
            let values: Vec<String> = vs
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            (key, values)
        }
    };
    let rows = experiment::run_sweep(&raw, &key, &values, &mut logger(run.quiet))?;
    println!("{key},final_test_err,best_test_err,best_epoch");
    for r in rows {
        println!(
            "{},{:.4},{:.4},{}",
            r.value, r.final_test_err, r.best_test_err, r.best_epoch
        );
    }
    Ok(())
}

fn analyze(checkpoint: &Path, out: Option<&Path>) -> Result<(), Error> {
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| {
        checkpoint
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("analysis")
    });
    let stats = experiment::analyze_checkpoint(checkpoint, &out)?;
    println!("layer,min,max,mean,var");
    for (l, s) in stats.iter().enumerate() {
        println!("{l},{},{},{},{}", s.min, s.max, s.mean, s.var);
    }
    println!("heatmaps and weights.csv written to {}", out.display());
    Ok(())
}

fn eval(
    checkpoint: &Path,
    mode: &str,
    config: Option<&Path>,
    overrides: &Overrides,
) -> Result<(), Error> {
    let mode: InferenceMode = mode.parse()?;
    let default_cfg = checkpoint
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join("config.resolved.txt");
    let text = read_text(Some(config.unwrap_or(&default_cfg)))?;
    let cfg = ExperimentConfig::load(&text, false, &overrides.pairs()?)?;
    let err = experiment::evaluate_checkpoint(&cfg, checkpoint, mode, &mut logger(true))?;
    println!("{mode} test error {err:.4}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    let result = match &cli.command {
        Command::Train { run } => train(run),
        Command::Sweep { run, sweep: spec } => sweep(run, spec.as_deref()),
        Command::Analyze { checkpoint, out } => analyze(checkpoint, out.as_deref()),
        Command::Eval {
            checkpoint,
            mode,
            config,
            overrides,
        } => eval(checkpoint, mode, config.as_deref(), overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
