//! Experiment configuration: `section.key = value` files with `#` comments,
//! overridable from the command line.
//!
//! Every key is declared in [`KEYS`] with its type and default. Unknown keys,
//! malformed values and missing required keys are errors naming the key and
//! the line (line 0 stands for the command line).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::text::SgnsConfig;
use crate::error::{Error, Result};
use crate::ffnet::ActivationKind;
use crate::inference::HeadConfig;
use crate::thresholds::ThresholdStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Str,
    Count,
    Seed,
    Real,
    Flag,
    Widths,
    Reals,
    Choice(&'static [&'static str]),
    Activation,
}

/// `(key, type, default)`; a `None` default marks a required key.
const KEYS: &[(&str, Kind, Option<&str>)] = &[
    (
        "dataset",
        Kind::Choice(&["mnist", "imdb", "synthetic"]),
        None,
    ),
    ("seed", Kind::Seed, None),
    ("data.mnist_dir", Kind::Str, Some("data/mnist")),
    ("data.imdb_dir", Kind::Str, Some("data/aclImdb")),
    ("data.train_limit", Kind::Count, Some("0")),
    ("data.test_limit", Kind::Count, Some("0")),
    ("data.synthetic_train", Kind::Count, Some("2000")),
    ("data.synthetic_test", Kind::Count, Some("1000")),
    ("data.embeddings_cache", Kind::Str, Some("")),
    (
        "sgns.corpus",
        Kind::Choice(&["train", "subset"]),
        Some("train"),
    ),
    ("sgns.dim", Kind::Count, Some("100")),
    ("sgns.window", Kind::Count, Some("5")),
    ("sgns.negatives", Kind::Count, Some("5")),
    ("sgns.min_count", Kind::Count, Some("5")),
    ("sgns.epochs", Kind::Count, Some("5")),
    ("sgns.lr", Kind::Real, Some("0.025")),
    ("arch", Kind::Widths, Some("2000,2000,2000,2000")),
    ("activation", Kind::Activation, Some("relu")),
    (
        "threshold.strategy",
        Kind::Choice(&["constant", "pyramidal", "scheduled"]),
        Some("constant"),
    ),
    ("threshold.k", Kind::Real, Some("1")),
    (
        "threshold.k_per_layer",
        Kind::Reals,
        Some("0.3,0.5,0.7,0.9"),
    ),
    (
        "threshold.base",
        Kind::Choice(&["constant", "pyramidal"]),
        Some("constant"),
    ),
    ("threshold.k_start", Kind::Real, Some("0.1")),
    ("threshold.k_end", Kind::Real, Some("1")),
    ("threshold.ramp_epochs", Kind::Count, Some("10")),
    ("lr", Kind::Real, Some("0.01")),
    ("epochs", Kind::Count, Some("100")),
    ("batch_size", Kind::Count, Some("128")),
    (
        "inference.mode",
        Kind::Choice(&["head", "sweep"]),
        Some("head"),
    ),
    ("inference.skip_first_layer", Kind::Flag, Some("true")),
    ("head.epochs", Kind::Count, Some("20")),
    ("head.lr", Kind::Real, Some("0.1")),
    ("head.batch_size", Kind::Count, Some("128")),
    ("eval.every", Kind::Count, Some("1")),
    ("eval.both_modes", Kind::Flag, Some("true")),
    ("eval.train_subset", Kind::Count, Some("10000")),
    ("baseline.enabled", Kind::Flag, Some("false")),
    ("baseline.lr", Kind::Real, Some("0.001")),
    ("baseline.epochs", Kind::Count, Some("0")),
    ("baseline.batch_size", Kind::Count, Some("0")),
    ("output.dir", Kind::Str, Some("runs/ff")),
    ("output.record_seconds", Kind::Flag, Some("false")),
    ("output.analysis", Kind::Flag, Some("true")),
];

/// Overrides applied by `--full`: the long-running reference recipe.
pub const FULL_RECIPE: &[(&str, &str)] = &[
    ("arch", "2000,2000,2000,2000"),
    ("epochs", "100"),
    ("lr", "0.01"),
    ("threshold.strategy", "constant"),
    ("threshold.k", "10"),
    ("data.train_limit", "0"),
    ("data.test_limit", "0"),
];

fn spec(key: &str) -> Option<(Kind, Option<&'static str>)> {
    KEYS.iter()
        .find(|(k, ..)| *k == key)
        .map(|&(_, kind, d)| (kind, d))
}

fn type_err(key: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_list<T: FromStr>(v: &str) -> Option<Vec<T>> {
    let v = v.trim().trim_start_matches('[').trim_end_matches(']');
    if v.trim().is_empty() {
        return Some(Vec::new());
    }
    v.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn parse_flag(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn check(kind: Kind, v: &str) -> std::result::Result<(), String> {
    let ok = match kind {
        Kind::Str => true,
        Kind::Count => v.parse::<usize>().is_ok(),
        Kind::Seed => v.parse::<u64>().is_ok(),
        Kind::Real => v.parse::<f64>().is_ok_and(f64::is_finite),
        Kind::Flag => parse_flag(v).is_some(),
        Kind::Widths => parse_list::<usize>(v).is_some_and(|w| !w.is_empty() && !w.contains(&0)),
        Kind::Reals => parse_list::<f64>(v).is_some_and(|w| w.iter().all(|x| x.is_finite())),
        Kind::Choice(opts) => opts.contains(&v),
        Kind::Activation => v.parse::<ActivationKind>().is_ok(),
    };
    if ok {
        return Ok(());
    }
    Err(match kind {
        Kind::Str => unreachable!(),
        Kind::Count => format!("expected a non-negative integer, got `{v}`"),
        Kind::Seed => format!("expected an unsigned 64-bit seed, got `{v}`"),
        Kind::Real => format!("expected a finite number, got `{v}`"),
        Kind::Flag => format!("expected true or false, got `{v}`"),
        Kind::Widths => format!("expected a comma-separated list of positive widths, got `{v}`"),
        Kind::Reals => format!("expected a comma-separated list of numbers, got `{v}`"),
        Kind::Choice(opts) => format!("expected one of {}, got `{v}`", opts.join("|")),
        Kind::Activation => {
            format!("expected relu|leaky_relu[:slope]|tanh|sigmoid|gelu, got `{v}`")
        }
    })
}

/// Validated but unresolved key/value pairs with their source lines.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(type_err(content, lineno, "expected `key = value`"));
            };
            raw.set(k.trim(), v.trim(), lineno)?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets one key after checking it exists and the value has its type.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let (kind, _) = spec(key).ok_or_else(|| type_err(key, line, "unknown key"))?;
        check(kind, value).map_err(|m| type_err(key, line, m))?;
        self.values
            .insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    pub fn apply_full_recipe(&mut self) -> Result<()> {
        for (k, v) in FULL_RECIPE {
            self.set(k, v, 0)?;
        }
        Ok(())
    }

    fn value(&self, key: &str) -> Result<(&str, usize)> {
        match self.values.get(key) {
            Some((v, line)) => Ok((v.as_str(), *line)),
            None => match spec(key) {
                Some((_, Some(d))) => Ok((d, 0)),
                Some((_, None)) => Err(type_err(key, 0, "required key is missing")),
                None => Err(type_err(key, 0, "unknown key")),
            },
        }
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<T> {
        let (v, line) = self.value(key)?;
        v.parse()
            .map_err(|_| type_err(key, line, format!("cannot parse `{v}`")))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        let (v, line) = self.value(key)?;
        parse_flag(v).ok_or_else(|| type_err(key, line, format!("cannot parse `{v}`")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let (v, line) = self.value(key)?;
        parse_list(v).ok_or_else(|| type_err(key, line, format!("cannot parse `{v}`")))
    }

    /// Every key, explicit or defaulted, in declaration order. Parsing the
    /// result yields the same configuration.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        for (k, _, d) in KEYS {
            let v = self.get(k).or(*d).unwrap_or("");
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let dataset = match self.value("dataset")?.0 {
            "mnist" => Dataset::Mnist,
            "imdb" => Dataset::Imdb,
            _ => Dataset::Synthetic,
        };
        let arch: Vec<usize> = self.list("arch")?;
        let k = self.parsed::<f64>("threshold.k")?;
        let ks: Vec<f64> = self.list("threshold.k_per_layer")?;
        let base = match self.value("threshold.base")?.0 {
            "pyramidal" => ThresholdStrategy::pyramidal(ks.clone()),
            _ => ThresholdStrategy::constant(k),
        };
        let strategy_line = self.value("threshold.strategy")?.1;
        let thresholds = match self.value("threshold.strategy")?.0 {
            "pyramidal" => ThresholdStrategy::pyramidal(ks),
            "scheduled" => ThresholdStrategy::Scheduled {
                k_start: self.parsed("threshold.k_start")?,
                k_end: self.parsed("threshold.k_end")?,
                ramp_epochs: self.parsed("threshold.ramp_epochs")?,
                base: Box::new(base),
            },
            _ => ThresholdStrategy::constant(k),
        };
        thresholds
            .validate(arch.len())
            .map_err(|e| type_err("threshold.strategy", strategy_line, e.to_string()))?;

        let positive = |key: &str| -> Result<usize> {
            let n: usize = self.parsed(key)?;
            if n == 0 {
                return Err(type_err(key, self.value(key)?.1, "must be at least 1"));
            }
            Ok(n)
        };
        let positive_real = |key: &str| -> Result<f64> {
            let x: f64 = self.parsed(key)?;
            if x < 0.0 {
                return Err(type_err(key, self.value(key)?.1, "must not be negative"));
            }
            Ok(x)
        };
        let limit = |key: &str| -> Result<Option<usize>> {
            let n: usize = self.parsed(key)?;
            Ok((n > 0).then_some(n))
        };
        let epochs = positive("epochs")?;
        let batch_size = positive("batch_size")?;
        let baseline = if self.flag("baseline.enabled")? {
            let e: usize = self.parsed("baseline.epochs")?;
            let b: usize = self.parsed("baseline.batch_size")?;
            Some(BaselineConfig {
                lr: positive_real("baseline.lr")?,
                epochs: if e == 0 { epochs } else { e },
                batch_size: if b == 0 { batch_size } else { b },
            })
        } else {
            None
        };
        let output_dir = PathBuf::from(self.value("output.dir")?.0);
        let cache = self.value("data.embeddings_cache")?.0;
        Ok(ExperimentConfig {
            dataset,
            seed: self.parsed("seed")?,
            mnist_dir: PathBuf::from(self.value("data.mnist_dir")?.0),
            imdb_dir: PathBuf::from(self.value("data.imdb_dir")?.0),
            train_limit: limit("data.train_limit")?,
            test_limit: limit("data.test_limit")?,
            synthetic_train: positive("data.synthetic_train")?,
            synthetic_test: positive("data.synthetic_test")?,
            embeddings_cache: if cache.is_empty() {
                output_dir.join("embeddings.txt")
            } else {
                PathBuf::from(cache)
            },
            sgns_full_corpus: self.value("sgns.corpus")?.0 == "train",
            sgns: SgnsConfig {
                dim: positive("sgns.dim")?,
                window: positive("sgns.window")?,
                negatives: self.parsed("sgns.negatives")?,
                min_count: self.parsed("sgns.min_count")?,
                epochs: self.parsed("sgns.epochs")?,
                lr: positive_real("sgns.lr")?,
                ..SgnsConfig::default()
            },
            arch,
            activation: self.parsed("activation")?,
            thresholds,
            lr: positive_real("lr")?,
            epochs,
            batch_size,
            inference: if self.value("inference.mode")?.0 == "sweep" {
                InferenceMode::Sweep
            } else {
                InferenceMode::Head
            },
            skip_first_layer: self.flag("inference.skip_first_layer")?,
            head: HeadConfig {
                epochs: self.parsed("head.epochs")?,
                lr: positive_real("head.lr")?,
                batch_size: positive("head.batch_size")?,
            },
            eval_every: self.parsed("eval.every")?,
            eval_both_modes: self.flag("eval.both_modes")?,
            eval_train_subset: self.parsed("eval.train_subset")?,
            baseline,
            output_dir,
            record_seconds: self.flag("output.record_seconds")?,
            write_analysis: self.flag("output.analysis")?,
            resolved_text: self.resolved_text(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    Mnist,
    Imdb,
    Synthetic,
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dataset::Mnist => "mnist",
            Dataset::Imdb => "imdb",
            Dataset::Synthetic => "synthetic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceMode {
    Head,
    Sweep,
}

impl fmt::Display for InferenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InferenceMode::Head => "head",
            InferenceMode::Sweep => "sweep",
        })
    }
}

impl FromStr for InferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "head" => Ok(InferenceMode::Head),
            "sweep" => Ok(InferenceMode::Sweep),
            _ => Err(Error::usage(format!("unknown inference mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub seed: u64,
    pub mnist_dir: PathBuf,
    pub imdb_dir: PathBuf,
    pub train_limit: Option<usize>,
    pub test_limit: Option<usize>,
    pub synthetic_train: usize,
    pub synthetic_test: usize,
    pub embeddings_cache: PathBuf,
    /// Train word vectors on every training review rather than the subset.
    pub sgns_full_corpus: bool,
    pub sgns: SgnsConfig,
    pub arch: Vec<usize>,
    pub activation: ActivationKind,
    pub thresholds: ThresholdStrategy,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub inference: InferenceMode,
    pub skip_first_layer: bool,
    pub head: HeadConfig,
    /// Evaluate test error every this many epochs (0: final epoch only).
    pub eval_every: usize,
    pub eval_both_modes: bool,
    /// Training examples used to measure train error (0: all).
    pub eval_train_subset: usize,
    pub baseline: Option<BaselineConfig>,
    pub output_dir: PathBuf,
    /// Fill the `seconds` metrics column with wall time (breaks byte-identical reruns).
    pub record_seconds: bool,
    pub write_analysis: bool,
    /// Fully resolved `key = value` listing echoed next to the outputs.
    pub resolved_text: String,
}

impl ExperimentConfig {
    /// Parses `text`, then applies `--full` (if requested) and the flag
    /// overrides in order.
    pub fn load(text: &str, full: bool, overrides: &[(String, String)]) -> Result<Self> {
        let mut raw = RawConfig::parse(text)?;
        if full {
            raw.apply_full_recipe()?;
        }
        for (k, v) in overrides {
            raw.set(k, v, 0)?;
        }
        raw.resolve()
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let owned: Vec<(String, String)> = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self::load("", false, &owned)
    }
}

pub fn known_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|(k, ..)| *k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn required() -> Vec<(String, String)> {
        vec![
            ("dataset".into(), "synthetic".into()),
            ("seed".into(), "7".into()),
        ]
    }

    #[test]
    fn empty_file_takes_defaults() {
        let c = ExperimentConfig::load("", false, &required()).unwrap();
        assert_eq!(c.arch, vec![2000; 4]);
        assert_eq!(c.lr, 0.01);
        assert_eq!(c.epochs, 100);
        assert_eq!(c.batch_size, 128);
        assert_eq!(c.inference, InferenceMode::Head);
        assert!(c.skip_first_layer);
        assert_eq!(c.thresholds, ThresholdStrategy::constant(1.0));
        assert!(c.baseline.is_none());
    }

    #[test]
    fn bad_value_names_key_and_line() {
        let text = "dataset = mnist\nseed = 1\n# comment\nthreshold.k = banana\n";
        match RawConfig::parse(text).unwrap_err() {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 4);
                assert_eq!(key, "threshold.k");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn unknown_and_missing_keys_are_errors() {
        let err = RawConfig::parse("seed = 1\nthreshold.kk = 2").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = ExperimentConfig::load("seed = 1", false, &[]).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "dataset"));
    }

    #[test]
    fn flags_override_file() {
        let over = vec![
            ("dataset".into(), "synthetic".into()),
            ("lr".into(), "0.02".into()),
        ];
        let c = ExperimentConfig::load("seed = 3\nlr = 0.01 # file value\n", false, &over).unwrap();
        assert_eq!(c.lr, 0.02);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn resolved_text_round_trips() {
        let text = "dataset = imdb\nseed = 5\narch = [500, 500]\nthreshold.strategy = pyramidal\nthreshold.k_per_layer = 0.3,0.5\nactivation = leaky_relu:0.1\n";
        let c = ExperimentConfig::load(text, false, &[]).unwrap();
        let again = ExperimentConfig::load(&c.resolved_text, false, &[]).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.activation, ActivationKind::LeakyRelu(0.1));
    }

    #[test]
    fn structural_checks() {
        let bad_depth = "dataset = mnist\nseed = 1\narch = 10,10\nthreshold.strategy = pyramidal\n";
        assert!(ExperimentConfig::load(bad_depth, false, &[]).is_err());
        let zero_width = "dataset = mnist\nseed = 1\narch = 10,0\n";
        assert!(RawConfig::parse(zero_width).is_err());
        let zero_epochs = "dataset = mnist\nseed = 1\nepochs = 0\n";
        assert!(ExperimentConfig::load(zero_epochs, false, &[]).is_err());
    }

    #[test]
    fn full_recipe_precedes_flags() {
        let over = vec![("epochs".into(), "3".into())];
        let c =
            ExperimentConfig::load("dataset = mnist\nseed = 1\narch = 5\n", true, &over).unwrap();
        assert_eq!(c.arch, vec![2000; 4]);
        assert_eq!(c.epochs, 3);
        assert_eq!(c.thresholds, ThresholdStrategy::constant(10.0));
    }
}
