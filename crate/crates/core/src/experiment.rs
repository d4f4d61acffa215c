//! End-to-end runs: data loading, FF training with per-epoch evaluation,
//! the optional backprop baseline, and the files each run leaves behind.
//!
//! Output directory layout:
//!
//! | file | contents |
//! |---|---|
//! | `config.resolved.txt` | every configuration key with its effective value |
//! | `metrics.csv` | one row per epoch and layer |
//! | `eval.csv` | test error of each inference mode at evaluated epochs |
//! | `timing.csv` | wall-clock seconds per epoch |
//! | `model.ffn` | final network with its classifier head |
//! | `weights.csv`, `layer{i}.pgm`, `goodness_hist.csv`, `separation.csv` | analysis |
//! | `baseline_*.csv`, `baseline.bpn` | backprop baseline, when enabled |
//! | `report.txt` | final and best-epoch errors |
//!
//! Randomness comes from independent streams forked off the seed, so the
//! training trajectory does not depend on how often evaluation runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{self, WeightStats};
use crate::baseline::BPNetwork;
use crate::checkpoint;
use crate::config::{Dataset, ExperimentConfig, InferenceMode, RawConfig};
use crate::data::mnist::{self, Split};
use crate::data::synthetic::BlobSpec;
use crate::data::text::{imdb, preprocess, sgns, vectorize_review};
use crate::data::LabeledSet;
use crate::error::{Error, Result};
use crate::ffnet::{FFNetwork, LayerMetrics};
use crate::inference::{self, ClassifierHead};
use crate::numerics::{Matrix, Rng};

const STREAM_INIT: u64 = 1;
const STREAM_TRAIN: u64 = 2;
const STREAM_HEAD: u64 = 3;
const STREAM_BASELINE: u64 = 4;
const STREAM_ANALYSIS: u64 = 5;
const STREAM_SUBSET: u64 = 6;
/// Training items used for the goodness histograms.
const ANALYSIS_ITEMS: usize = 2000;

pub const METRICS_HEADER: &str =
    "epoch,layer,mean_loss,mean_G_pos,mean_G_neg,theta,train_err,test_err,seconds";

/// Where progress messages go.
pub type Log<'a> = &'a mut dyn FnMut(&str);

/// First `n` indices of a seeded permutation, restored to ascending order.
fn seeded_subset(len: usize, n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut idx = rng.permutation(len);
    idx.truncate(n.min(len));
    idx.sort_unstable();
    idx
}

fn imdb_sets(cfg: &ExperimentConfig, log: Log<'_>) -> Result<(LabeledSet, LabeledSet)> {
    let root = Rng::new(cfg.seed).fork(STREAM_SUBSET);
    let train_reviews = imdb::load_split(&cfg.imdb_dir, "train")?;
    let test_reviews = imdb::load_split(&cfg.imdb_dir, "test")?;
    if train_reviews.is_empty() || test_reviews.is_empty() {
        return Err(Error::data(
            &cfg.imdb_dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no reviews found"),
        ));
    }
    // Reviews are stored grouped by label, so subsets are drawn at random.
    let pick = |n: Option<usize>, len: usize, stream: u64| match n {
        Some(n) => seeded_subset(len, n, &mut root.fork(stream)),
        None => (0..len).collect(),
    };
    let train_idx = pick(cfg.train_limit, train_reviews.len(), 0);
    let test_idx = pick(cfg.test_limit, test_reviews.len(), 1);
    log(&format!(
        "imdb: preprocessing {} train and {} test reviews",
        train_idx.len(),
        test_idx.len()
    ));
    let train_tokens: Vec<Vec<String>> = if cfg.sgns_full_corpus {
        train_reviews.iter().map(|r| preprocess(&r.text)).collect()
    } else {
        train_idx
            .iter()
            .map(|&i| preprocess(&train_reviews[i].text))
            .collect()
    };
    let corpus_pos = |k: usize| {
        if cfg.sgns_full_corpus {
            train_idx[k]
        } else {
            k
        }
    };
    if let Some(parent) = cfg.embeddings_cache.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    log(&format!(
        "imdb: word vectors from {} reviews (cache {})",
        train_tokens.len(),
        cfg.embeddings_cache.display()
    ));
    let table = sgns::train_or_load(&train_tokens, &cfg.sgns, cfg.seed, &cfg.embeddings_cache)?;
    let train = LabeledSet::new(
        (0..train_idx.len())
            .map(|k| vectorize_review(&train_tokens[corpus_pos(k)], &table))
            .collect(),
        train_idx.iter().map(|&i| train_reviews[i].label).collect(),
        imdb::CODING,
    )?;
    let test = LabeledSet::new(
        test_idx
            .iter()
            .map(|&i| vectorize_review(&preprocess(&test_reviews[i].text), &table))
            .collect(),
        test_idx.iter().map(|&i| test_reviews[i].label).collect(),
        imdb::CODING,
    )?;
    Ok((train, test))
}

/// Loads the train and test sets named by the configuration.
pub fn load_data(cfg: &ExperimentConfig, log: Log<'_>) -> Result<(LabeledSet, LabeledSet)> {
    match cfg.dataset {
        Dataset::Mnist => Ok((
            mnist::load(&cfg.mnist_dir, Split::Train, cfg.train_limit)?,
            mnist::load(&cfg.mnist_dir, Split::Test, cfg.test_limit)?,
        )),
        Dataset::Synthetic => {
            BlobSpec::default().generate(cfg.synthetic_train, cfg.synthetic_test, cfg.seed)
        }
        Dataset::Imdb => imdb_sets(cfg, log),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub layers: Vec<LayerMetrics>,
    /// Errors of the configured inference mode, when evaluated this epoch.
    pub train_err: Option<f64>,
    pub test_err: Option<f64>,
    pub head_test_err: Option<f64>,
    pub sweep_test_err: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRecord {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_err: f64,
    pub test_err: f64,
}

#[derive(Debug, Clone)]
pub struct BaselineReport {
    pub net: BPNetwork,
    pub epochs: Vec<BaselineRecord>,
    pub final_test_err: f64,
    pub weight_stats: Vec<WeightStats>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub net: FFNetwork,
    pub head: ClassifierHead,
    pub epochs: Vec<EpochRecord>,
    pub final_test_err: f64,
    pub best_test_err: f64,
    /// 1-based epoch of the best evaluated test error.
    pub best_epoch: usize,
    pub final_head_err: Option<f64>,
    pub final_sweep_err: Option<f64>,
    pub weight_stats: Vec<WeightStats>,
    pub baseline: Option<BaselineReport>,
    pub output_dir: PathBuf,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn metrics_csv(epochs: &[EpochRecord], with_seconds: bool) -> String {
    let mut s = format!("{METRICS_HEADER}\n");
    for r in epochs {
        let secs = if with_seconds {
            format!("{:.3}", r.seconds)
        } else {
            String::new()
        };
        for (l, m) in r.layers.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{l},{},{},{},{},{},{},{secs}",
                r.epoch + 1,
                m.mean_loss,
                m.mean_g_pos,
                m.mean_g_neg,
                m.theta,
                fmt_opt(r.train_err),
                fmt_opt(r.test_err),
            );
        }
    }
    s
}

fn eval_csv(epochs: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,mode,test_err\n");
    for r in epochs {
        for (mode, v) in [("head", r.head_test_err), ("sweep", r.sweep_test_err)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{},{mode},{v}", r.epoch + 1);
            }
        }
    }
    s
}

fn timing_csv(epochs: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,seconds\n");
    for r in epochs {
        let _ = writeln!(s, "{},{:.3}", r.epoch + 1, r.seconds);
    }
    s
}

struct Evaluation {
    head: ClassifierHead,
    train_err: f64,
    test_err: f64,
    head_err: Option<f64>,
    sweep_err: Option<f64>,
}

/// Trains a fresh head on the training set and scores the requested modes.
fn evaluate(
    cfg: &ExperimentConfig,
    net: &FFNetwork,
    train: &LabeledSet,
    test: &LabeledSet,
    epoch: usize,
) -> Result<Evaluation> {
    let included = inference::included_layers(net.depth(), cfg.skip_first_layer);
    let features = inference::head_features(net, train, &included)?;
    let mut rng = Rng::new(cfg.seed).fork(STREAM_HEAD).fork(epoch as u64);
    let head = inference::train_head_on_features(
        &features,
        &train.labels,
        train.num_classes(),
        included.clone(),
        &cfg.head,
        &mut rng,
    )?;
    let subset = match cfg.eval_train_subset {
        0 => train.len(),
        n => n.min(train.len()),
    };
    let want_head = cfg.inference == InferenceMode::Head || cfg.eval_both_modes;
    let want_sweep = cfg.inference == InferenceMode::Sweep || cfg.eval_both_modes;
    let head_err = if want_head {
        Some(inference::error_rate(
            &inference::predictions_head(net, &head, test)?,
            &test.labels,
        ))
    } else {
        None
    };
    let sweep_err = if want_sweep {
        Some(inference::error_rate(
            &inference::predictions_sweep(net, test, &included)?,
            &test.labels,
        ))
    } else {
        None
    };
    let (train_err, test_err) = match cfg.inference {
        InferenceMode::Head => {
            let preds: Vec<usize> = (0..subset)
                .map(|i| head.predict_features(features.row(i)))
                .collect::<Result<_>>()?;
            (
                inference::error_rate(&preds, &train.labels[..subset]),
                head_err.unwrap_or_default(),
            )
        }
        InferenceMode::Sweep => {
            let part = train.truncated(subset);
            let preds = inference::predictions_sweep(net, &part, &included)?;
            (
                inference::error_rate(&preds, &part.labels),
                sweep_err.unwrap_or_default(),
            )
        }
    };
    Ok(Evaluation {
        head,
        train_err,
        test_err,
        head_err,
        sweep_err,
    })
}

fn run_baseline(
    cfg: &ExperimentConfig,
    train: &LabeledSet,
    test: &LabeledSet,
    log: Log<'_>,
) -> Result<Option<BaselineReport>> {
    let Some(bc) = cfg.baseline else {
        return Ok(None);
    };
    let root = Rng::new(cfg.seed).fork(STREAM_BASELINE);
    let mut net = BPNetwork::new(
        train.input_dim(),
        &cfg.arch,
        train.num_classes(),
        cfg.activation,
        bc.lr,
        &mut root.fork(0),
    )?;
    let mut rng = root.fork(1);
    let mut records = Vec::with_capacity(bc.epochs);
    for epoch in 0..bc.epochs {
        let m = net.train_epoch(train, epoch, bc.batch_size, &mut rng)?;
        let test_err = inference::error_rate(&net.predictions(test)?, &test.labels);
        log(&format!(
            "baseline epoch {}/{}: loss {:.4} train_err {:.4} test_err {:.4}",
            epoch + 1,
            bc.epochs,
            m.mean_loss,
            m.train_err,
            test_err
        ));
        records.push(BaselineRecord {
            epoch,
            mean_loss: m.mean_loss,
            train_err: m.train_err,
            test_err,
        });
    }
    let mut weights: Vec<&Matrix> = net.hidden.iter().map(|l| &l.w).collect();
    weights.push(&net.output.w);
    let weight_stats = analysis::weight_stats_of(&weights);
    Ok(Some(BaselineReport {
        final_test_err: records.last().map_or(1.0, |r| r.test_err),
        epochs: records,
        weight_stats,
        net,
    }))
}

/// Trains and evaluates on already loaded data, writing nothing to disk.
pub fn train_and_evaluate(
    cfg: &ExperimentConfig,
    train: &LabeledSet,
    test: &LabeledSet,
    log: Log<'_>,
) -> Result<RunReport> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::usage("training and test sets must be non-empty"));
    }
    let root = Rng::new(cfg.seed);
    let mut net = FFNetwork::new(
        train.input_dim(),
        &cfg.arch,
        cfg.activation,
        cfg.lr,
        &mut root.fork(STREAM_INIT),
    )?;
    cfg.thresholds.validate(net.depth())?;
    let mut rng = root.fork(STREAM_TRAIN);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut last_eval = None;
    for epoch in 0..cfg.epochs {
        let start = Instant::now();
        let stream = train.training_stream(&mut rng)?;
        let m = net.train_epoch(&stream, &cfg.thresholds, epoch, cfg.batch_size, &mut rng)?;
        let last = epoch + 1 == cfg.epochs;
        let due = cfg.eval_every > 0 && (epoch + 1) % cfg.eval_every == 0;
        let eval = if due || last {
            Some(evaluate(cfg, &net, train, test, epoch)?)
        } else {
            None
        };
        let losses: Vec<String> = m
            .layers
            .iter()
            .map(|l| format!("{:.4}", l.mean_loss))
            .collect();
        let mut line = format!(
            "epoch {}/{}: loss [{}]",
            epoch + 1,
            cfg.epochs,
            losses.join(", ")
        );
        if let Some(e) = &eval {
            let _ = write!(
                line,
                " train_err {:.4} test_err {:.4}",
                e.train_err, e.test_err
            );
        }
        log(&line);
        epochs.push(EpochRecord {
            epoch,
            layers: m.layers,
            train_err: eval.as_ref().map(|e| e.train_err),
            test_err: eval.as_ref().map(|e| e.test_err),
            head_test_err: eval.as_ref().and_then(|e| e.head_err),
            sweep_test_err: eval.as_ref().and_then(|e| e.sweep_err),
            seconds: start.elapsed().as_secs_f64(),
        });
        if eval.is_some() {
            last_eval = eval;
        }
    }
    let final_eval = last_eval.expect("the final epoch is always evaluated");
    let (best_epoch, best_test_err) = epochs
        .iter()
        .filter_map(|r| r.test_err.map(|e| (r.epoch + 1, e)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    let baseline = run_baseline(cfg, train, test, log)?;
    Ok(RunReport {
        weight_stats: analysis::weight_stats(&net),
        head: final_eval.head,
        final_test_err: final_eval.test_err,
        final_head_err: final_eval.head_err,
        final_sweep_err: final_eval.sweep_err,
        best_test_err,
        best_epoch,
        epochs,
        baseline,
        net,
        output_dir: cfg.output_dir.clone(),
    })
}

fn report_text(cfg: &ExperimentConfig, r: &RunReport, train_len: usize, test_len: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "dataset: {} ({train_len} train, {test_len} test)",
        cfg.dataset
    );
    let _ = writeln!(s, "arch: {:?} {}", cfg.arch, cfg.activation);
    let _ = writeln!(s, "thresholds: {}", cfg.thresholds);
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "inference: {}", cfg.inference);
    let _ = writeln!(s, "final test error: {:.4}", r.final_test_err);
    let _ = writeln!(
        s,
        "best test error: {:.4} (epoch {})",
        r.best_test_err, r.best_epoch
    );
    if let Some(e) = r.final_head_err {
        let _ = writeln!(s, "final head error: {e:.4}");
    }
    if let Some(e) = r.final_sweep_err {
        let _ = writeln!(s, "final sweep error: {e:.4}");
    }
    for (l, st) in r.weight_stats.iter().enumerate() {
        let _ = writeln!(
            s,
            "ff layer {l} weights: min {:.4} max {:.4}",
            st.min, st.max
        );
    }
    if let Some(b) = &r.baseline {
        let lr = cfg.baseline.map_or(0.0, |c| c.lr);
        let _ = writeln!(
            s,
            "baseline final test error: {:.4} (lr {lr})",
            b.final_test_err
        );
        for (l, st) in b.weight_stats.iter().enumerate() {
            let _ = writeln!(
                s,
                "bp layer {l} weights: min {:.4} max {:.4}",
                st.min, st.max
            );
        }
        match analysis::first_layer_range_ratio(&r.net, &b.net) {
            Ok(ratio) => {
                let _ = writeln!(s, "layer-0 range ratio ff/bp: {ratio:.3}");
            }
            Err(e) => {
                let _ = writeln!(s, "layer-0 range ratio ff/bp: n/a ({e})");
            }
        }
    }
    s
}

/// Writes every artifact of a finished run into `cfg.output_dir`.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    report: &RunReport,
    train: &LabeledSet,
    test_len: usize,
) -> Result<()> {
    let dir = &cfg.output_dir;
    write(
        &dir.join("metrics.csv"),
        metrics_csv(&report.epochs, cfg.record_seconds),
    )?;
    write(&dir.join("eval.csv"), eval_csv(&report.epochs))?;
    write(&dir.join("timing.csv"), timing_csv(&report.epochs))?;
    checkpoint::save_ff(&dir.join("model.ffn"), &report.net, Some(&report.head))?;
    if cfg.write_analysis {
        write(
            &dir.join("weights.csv"),
            analysis::stats_csv(&report.weight_stats),
        )?;
        for (l, layer) in report.net.layers.iter().enumerate() {
            analysis::export_heatmap(&layer.w, &dir.join(format!("layer{l}.pgm")))?;
        }
        let mut rng = Rng::new(cfg.seed).fork(STREAM_ANALYSIS);
        let part = train.truncated(ANALYSIS_ITEMS);
        let samples = part.training_stream(&mut rng)?;
        let last_epoch = cfg.epochs.saturating_sub(1);
        let g = analysis::goodness_report(&report.net, &samples, &cfg.thresholds, last_epoch)?;
        write(&dir.join("goodness_hist.csv"), analysis::histogram_csv(&g))?;
        write(&dir.join("separation.csv"), analysis::separation_csv(&g))?;
    }
    if let Some(b) = &report.baseline {
        let mut s = String::from("epoch,mean_loss,train_err,test_err\n");
        for r in &b.epochs {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.epoch + 1,
                r.mean_loss,
                r.train_err,
                r.test_err
            );
        }
        write(&dir.join("baseline_metrics.csv"), s)?;
        write(
            &dir.join("baseline_weights.csv"),
            analysis::stats_csv(&b.weight_stats),
        )?;
        checkpoint::save_bp(&dir.join("baseline.bpn"), &b.net)?;
    }
    write(
        &dir.join("report.txt"),
        report_text(cfg, report, train.len(), test_len),
    )
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<()> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("config.resolved.txt"), &cfg.resolved_text)
}

/// Loads data, trains, evaluates and writes all artifacts.
pub fn run_experiment(cfg: &ExperimentConfig, log: Log<'_>) -> Result<RunReport> {
    prepare_dir(cfg)?;
    let (train, test) = load_data(cfg, log)?;
    run_on_data(cfg, &train, &test, log)
}

pub fn run_on_data(
    cfg: &ExperimentConfig,
    train: &LabeledSet,
    test: &LabeledSet,
    log: Log<'_>,
) -> Result<RunReport> {
    prepare_dir(cfg)?;
    let report = train_and_evaluate(cfg, train, test, log)?;
    write_outputs(cfg, &report, train, test.len())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub final_test_err: f64,
    pub best_test_err: f64,
    pub best_epoch: usize,
}

/// Runs one experiment per value of `key`, each in `<output.dir>/<key>=<value>`,
/// and writes `summary.csv` in the base output directory. Data is loaded once.
pub fn run_sweep(
    raw: &RawConfig,
    key: &str,
    values: &[String],
    log: Log<'_>,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::usage("sweep needs at least one value"));
    }
    let base = raw.resolve()?;
    std::fs::create_dir_all(&base.output_dir).map_err(|e| Error::io(&base.output_dir, e))?;
    let (train, test) = load_data(&base, log)?;
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let mut r = raw.clone();
        r.set(key, v, 0)?;
        let dir = base.output_dir.join(format!("{key}={v}"));
        r.set("output.dir", &dir.to_string_lossy(), 0)?;
        let cfg = r.resolve()?;
        log(&format!("sweep {key} = {v}"));
        let report = run_on_data(&cfg, &train, &test, log)?;
        rows.push(SweepRow {
            value: v.clone(),
            final_test_err: report.final_test_err,
            best_test_err: report.best_test_err,
            best_epoch: report.best_epoch,
        });
    }
    let mut s = format!("{key},final_test_err,best_test_err,best_epoch\n");
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.value, r.final_test_err, r.best_test_err, r.best_epoch
        );
    }
    write(&base.output_dir.join("summary.csv"), s)?;
    Ok(rows)
}

/// Test error of a saved network under the given inference mode.
pub fn evaluate_checkpoint(
    cfg: &ExperimentConfig,
    path: &Path,
    mode: InferenceMode,
    log: Log<'_>,
) -> Result<f64> {
    let bytes = std::fs::read(path).map_err(|e| Error::data(path, e))?;
    let (_, test) = load_data(cfg, log)?;
    if bytes.starts_with(checkpoint::BP_MAGIC) {
        let net = checkpoint::decode_bp(&bytes, 0.0)?;
        return Ok(inference::error_rate(
            &net.predictions(&test)?,
            &test.labels,
        ));
    }
    let (net, head) = checkpoint::decode_ff(&bytes, 0.0)?;
    if net.input_dim != test.input_dim() {
        return Err(Error::usage(format!(
            "checkpoint expects {} inputs but the data has {}",
            net.input_dim,
            test.input_dim()
        )));
    }
    let preds = match mode {
        InferenceMode::Head => {
            let head = head.ok_or_else(|| Error::usage("checkpoint has no HEAD section"))?;
            inference::predictions_head(&net, &head, &test)?
        }
        InferenceMode::Sweep => {
            let included = inference::included_layers(net.depth(), cfg.skip_first_layer);
            inference::predictions_sweep(&net, &test, &included)?
        }
    };
    Ok(inference::error_rate(&preds, &test.labels))
}

/// Weight statistics and heatmaps for a saved FF or baseline network.
/// Returns the per-layer statistics.
pub fn analyze_checkpoint(path: &Path, out_dir: &Path) -> Result<Vec<WeightStats>> {
    let bytes = std::fs::read(path).map_err(|e| Error::data(path, e))?;
    let weights: Vec<Matrix> = if bytes.starts_with(checkpoint::BP_MAGIC) {
        let net = checkpoint::decode_bp(&bytes, 0.0)?;
        net.hidden
            .into_iter()
            .map(|l| l.w)
            .chain(std::iter::once(net.output.w))
            .collect()
    } else {
        let (net, _) = checkpoint::decode_ff(&bytes, 0.0)?;
        net.layers.into_iter().map(|l| l.w).collect()
    };
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let stats = analysis::weight_stats_of(&weights.iter().collect::<Vec<_>>());
    write(&out_dir.join("weights.csv"), analysis::stats_csv(&stats))?;
    for (l, w) in weights.iter().enumerate() {
        analysis::export_heatmap(w, &out_dir.join(format!("layer{l}.pgm")))?;
    }
    Ok(stats)
}
