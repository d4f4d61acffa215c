use crate::error::{Error, Result};
use crate::ffnet::{Polarity, Sample};
use crate::numerics::{argmax, Rng};

/// How a candidate class is written into an input vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelCoding {
    /// Overwrite the first `classes` features with a one-hot (MNIST border pixels).
    Overwrite { classes: usize },
    /// Append a one-hot of length `classes` after the raw features.
    Append { classes: usize },
}

impl LabelCoding {
    pub fn num_classes(self) -> usize {
        match self {
            LabelCoding::Overwrite { classes } | LabelCoding::Append { classes } => classes,
        }
    }

    pub fn input_dim(self, raw_dim: usize) -> usize {
        match self {
            LabelCoding::Overwrite { .. } => raw_dim,
            LabelCoding::Append { classes } => raw_dim + classes,
        }
    }

    fn slots(self, raw_dim: usize) -> std::ops::Range<usize> {
        match self {
            LabelCoding::Overwrite { classes } => 0..classes,
            LabelCoding::Append { classes } => raw_dim..raw_dim + classes,
        }
    }

    /// Writes `label` as a one-hot into the label slots; `None` writes the
    /// neutral all-zero code.
    pub fn embed(self, raw: &[f64], label: Option<usize>) -> Result<Vec<f64>> {
        let classes = self.num_classes();
        if let Some(l) = label {
            if l >= classes {
                return Err(Error::usage(format!(
                    "label {l} out of range for {classes} classes"
                )));
            }
        }
        if let LabelCoding::Overwrite { classes } = self {
            if raw.len() < classes {
                return Err(Error::dim("embed_label", (1, raw.len()), (1, classes)));
            }
        }
        let mut out = Vec::with_capacity(self.input_dim(raw.len()));
        out.extend_from_slice(raw);
        if let LabelCoding::Append { classes } = self {
            out.resize(raw.len() + classes, 0.0);
        }
        let slots = self.slots(raw.len());
        let start = slots.start;
        out[slots].iter_mut().for_each(|v| *v = 0.0);
        if let Some(l) = label {
            out[start + l] = 1.0;
        }
        Ok(out)
    }

    /// Reads back the embedded class (argmax over the label slots).
    pub fn embedded_label(self, features: &[f64]) -> usize {
        let raw_dim = match self {
            LabelCoding::Overwrite { .. } => features.len(),
            LabelCoding::Append { classes } => features.len() - classes,
        };
        argmax(&features[self.slots(raw_dim)])
    }

    /// A uniformly drawn label different from `label`.
    pub fn wrong_label(self, label: usize, rng: &mut Rng) -> usize {
        let classes = self.num_classes();
        debug_assert!(classes >= 2);
        (label + 1 + rng.below(classes - 1)) % classes
    }
}

/// Raw (unlabeled) feature vectors with their classes and label coding.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    pub raw: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub coding: LabelCoding,
}

impl LabeledSet {
    pub fn new(raw: Vec<Vec<f64>>, labels: Vec<usize>, coding: LabelCoding) -> Result<Self> {
        if raw.len() != labels.len() {
            return Err(Error::usage(format!(
                "{} feature rows but {} labels",
                raw.len(),
                labels.len()
            )));
        }
        let dim = raw.first().map_or(0, Vec::len);
        if raw.iter().any(|r| r.len() != dim) {
            return Err(Error::usage("feature rows differ in length"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= coding.num_classes()) {
            return Err(Error::usage(format!("label {bad} out of range")));
        }
        Ok(LabeledSet {
            raw,
            labels,
            coding,
        })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw_dim(&self) -> usize {
        self.raw.first().map_or(0, Vec::len)
    }

    pub fn input_dim(&self) -> usize {
        self.coding.input_dim(self.raw_dim())
    }

    pub fn num_classes(&self) -> usize {
        self.coding.num_classes()
    }

    /// First `n` items (or all, if fewer).
    pub fn truncated(&self, n: usize) -> LabeledSet {
        let n = n.min(self.len());
        LabeledSet {
            raw: self.raw[..n].to_vec(),
            labels: self.labels[..n].to_vec(),
            coding: self.coding,
        }
    }

    pub fn positive(&self, i: usize) -> Result<Sample> {
        Ok(Sample {
            features: self.coding.embed(&self.raw[i], Some(self.labels[i]))?,
            polarity: Polarity::Positive,
            true_label: self.labels[i],
        })
    }

    pub fn negative(&self, i: usize, rng: &mut Rng) -> Result<Sample> {
        let wrong = self.coding.wrong_label(self.labels[i], rng);
        Ok(Sample {
            features: self.coding.embed(&self.raw[i], Some(wrong))?,
            polarity: Polarity::Negative,
            true_label: self.labels[i],
        })
    }

    /// One positive and one freshly drawn negative per item, shuffled.
    pub fn training_stream(&self, rng: &mut Rng) -> Result<Vec<Sample>> {
        if self.is_empty() {
            return Err(Error::usage("cannot build a training stream from no data"));
        }
        let mut out = Vec::with_capacity(2 * self.len());
        for i in 0..self.len() {
            out.push(self.positive(i)?);
            out.push(self.negative(i, rng)?);
        }
        rng.shuffle(&mut out);
        Ok(out)
    }
}
