//! Prediction from a trained FF network: a softmax head over concatenated
//! layer activations, and a label sweep that picks the class with the
//! highest accumulated goodness.

use crate::data::{LabelCoding, LabeledSet};
use crate::error::{Error, Result};
use crate::ffnet::{goodness, FFNetwork};
use crate::numerics::{
    argmax, l2_normalize_floor_in_place, matmul_transa, matmul_transb, softmax_in_place, AdamState,
    Matrix, Rng, NORM_EPS,
};

const EVAL_BATCH: usize = 256;

/// Layers whose activations feed inference. Skipping the first layer keeps
/// the predictor away from units that can read the label slots directly.
pub fn included_layers(depth: usize, skip_first: bool) -> Vec<usize> {
    if skip_first && depth > 1 {
        (1..depth).collect()
    } else {
        (0..depth).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
}

impl Default for HeadConfig {
    fn default() -> Self {
        HeadConfig {
            epochs: 20,
            lr: 0.1,
            batch_size: 128,
        }
    }
}

/// Single softmax layer trained on frozen FF activations.
#[derive(Debug, Clone)]
pub struct ClassifierHead {
    /// `classes × feature_width`
    pub w: Matrix,
    pub b: Vec<f64>,
    pub adam_w: AdamState,
    pub adam_b: AdamState,
    pub included_layers: Vec<usize>,
}

impl ClassifierHead {
    pub fn zeros(
        classes: usize,
        feature_width: usize,
        included_layers: Vec<usize>,
        lr: f64,
    ) -> Self {
        ClassifierHead {
            w: Matrix::zeros(classes, feature_width),
            b: vec![0.0; classes],
            adam_w: AdamState::new(classes * feature_width, lr),
            adam_b: AdamState::new(classes, lr),
            included_layers,
        }
    }

    pub fn from_parts(w: Matrix, b: Vec<f64>, included_layers: Vec<usize>) -> Result<Self> {
        if b.len() != w.rows() {
            return Err(Error::dim(
                "ClassifierHead::from_parts",
                w.shape(),
                (b.len(), 1),
            ));
        }
        let mut head = ClassifierHead::zeros(w.rows(), w.cols(), included_layers, 0.0);
        head.w = w;
        head.b = b;
        Ok(head)
    }

    pub fn num_classes(&self) -> usize {
        self.w.rows()
    }

    pub fn feature_width(&self) -> usize {
        self.w.cols()
    }

    pub fn logits(&self, features: &[f64]) -> Result<Vec<f64>> {
        let f = Matrix::from_vec(1, features.len(), features.to_vec())?;
        Ok(self.logits_batch(&f)?.into_data())
    }

    pub fn logits_batch(&self, features: &Matrix) -> Result<Matrix> {
        let mut z = matmul_transb(features, &self.w)?;
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.b) {
                *v += b;
            }
        }
        Ok(z)
    }

    /// Mean cross-entropy and its gradient `(ŷ − y) ⊗ f` over a batch.
    pub fn batch_grads(
        &self,
        features: &Matrix,
        labels: &[usize],
    ) -> Result<(Matrix, Vec<f64>, f64)> {
        if labels.len() != features.rows() {
            return Err(Error::dim(
                "head_grads",
                features.shape(),
                (labels.len(), 1),
            ));
        }
        let mut p = self.logits_batch(features)?;
        let mut loss = 0.0;
        for (r, &y) in labels.iter().enumerate() {
            if y >= self.num_classes() {
                return Err(Error::usage(format!("label {y} out of range")));
            }
            let row = p.row_mut(r);
            softmax_in_place(row);
            loss -= row[y].max(f64::MIN_POSITIVE).ln();
            row[y] -= 1.0;
        }
        let n = labels.len().max(1) as f64;
        let mut dw = matmul_transa(&p, features)?;
        dw.scale(1.0 / n);
        let mut db = vec![0.0; self.num_classes()];
        for row in p.row_iter() {
            for (acc, v) in db.iter_mut().zip(row) {
                *acc += v / n;
            }
        }
        Ok((dw, db, loss / n))
    }

    pub fn loss(&self, features: &[f64], label: usize) -> Result<f64> {
        let f = Matrix::from_vec(1, features.len(), features.to_vec())?;
        Ok(self.batch_grads(&f, &[label])?.2)
    }

    pub fn predict_features(&self, features: &[f64]) -> Result<usize> {
        Ok(argmax(&self.logits(features)?))
    }
}

/// Concatenated, length-normalized activations of `included` layers for a
/// batch of already-encoded inputs.
pub fn features_batch(net: &FFNetwork, inputs: &Matrix, included: &[usize]) -> Result<Matrix> {
    let acts = net.activations_batch(inputs)?;
    let width: usize = included
        .iter()
        .map(|&l| acts.get(l).map(Matrix::cols))
        .sum::<Option<usize>>()
        .ok_or_else(|| Error::usage(format!("included layers {included:?} exceed depth")))?;
    let mut out = Matrix::zeros(inputs.rows(), width);
    for r in 0..inputs.rows() {
        let row = out.row_mut(r);
        let mut off = 0;
        for &l in included {
            let a = acts[l].row(r);
            let seg = &mut row[off..off + a.len()];
            seg.copy_from_slice(a);
            l2_normalize_floor_in_place(seg, NORM_EPS);
            off += a.len();
        }
    }
    Ok(out)
}

fn encode_rows(coding: LabelCoding, raws: &[Vec<f64>], label: Option<usize>) -> Result<Matrix> {
    let rows = raws
        .iter()
        .map(|r| coding.embed(r, label))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(&rows)
}

/// Head features for every item of `set`, using the neutral label code.
pub fn head_features(net: &FFNetwork, set: &LabeledSet, included: &[usize]) -> Result<Matrix> {
    let width: usize = included
        .iter()
        .map(|&l| net.layers.get(l).map(|layer| layer.out_dim()))
        .sum::<Option<usize>>()
        .ok_or_else(|| Error::usage(format!("included layers {included:?} exceed depth")))?;
    let mut data = Vec::with_capacity(set.len() * width);
    for chunk in set.raw.chunks(EVAL_BATCH) {
        let inputs = encode_rows(set.coding, chunk, None)?;
        data.extend_from_slice(features_batch(net, &inputs, included)?.data());
    }
    Matrix::from_vec(set.len(), width, data)
}

/// Trains a softmax head on precomputed features. The network is only read.
pub fn train_head_on_features(
    features: &Matrix,
    labels: &[usize],
    classes: usize,
    included: Vec<usize>,
    cfg: &HeadConfig,
    rng: &mut Rng,
) -> Result<ClassifierHead> {
    if features.rows() == 0 || labels.is_empty() {
        return Err(Error::usage("head training needs at least one example"));
    }
    if cfg.batch_size == 0 {
        return Err(Error::usage("head batch size must be at least 1"));
    }
    let mut head = ClassifierHead::zeros(classes, features.cols(), included, cfg.lr);
    for _ in 0..cfg.epochs {
        let order = rng.permutation(features.rows());
        for chunk in order.chunks(cfg.batch_size) {
            let mut data = Vec::with_capacity(chunk.len() * features.cols());
            let mut ys = Vec::with_capacity(chunk.len());
            for &i in chunk {
                data.extend_from_slice(features.row(i));
                ys.push(labels[i]);
            }
            let batch = Matrix::from_vec(chunk.len(), features.cols(), data)?;
            let (dw, db, _) = head.batch_grads(&batch, &ys)?;
            head.adam_w.step(head.w.data_mut(), dw.data())?;
            head.adam_b.step(&mut head.b, &db)?;
        }
    }
    Ok(head)
}

pub fn train_head(
    net: &FFNetwork,
    set: &LabeledSet,
    skip_first: bool,
    cfg: &HeadConfig,
    rng: &mut Rng,
) -> Result<ClassifierHead> {
    if set.is_empty() {
        return Err(Error::usage("head training needs at least one example"));
    }
    let included = included_layers(net.depth(), skip_first);
    let features = head_features(net, set, &included)?;
    train_head_on_features(
        &features,
        &set.labels,
        set.num_classes(),
        included,
        cfg,
        rng,
    )
}

pub fn predict_head(
    net: &FFNetwork,
    head: &ClassifierHead,
    coding: LabelCoding,
    x_raw: &[f64],
) -> Result<usize> {
    let inputs = encode_rows(coding, std::slice::from_ref(&x_raw.to_vec()), None)?;
    let f = features_batch(net, &inputs, &head.included_layers)?;
    head.predict_features(f.row(0))
}

/// Goodness accumulated over `included` layers for every candidate label.
pub fn sweep_scores(
    net: &FFNetwork,
    coding: LabelCoding,
    raws: &[Vec<f64>],
    included: &[usize],
) -> Result<Matrix> {
    let classes = coding.num_classes();
    let mut scores = Matrix::zeros(raws.len(), classes);
    for c in 0..classes {
        let inputs = encode_rows(coding, raws, Some(c))?;
        let acts = net.activations_batch(&inputs)?;
        for &l in included {
            let a = acts
                .get(l)
                .ok_or_else(|| Error::usage(format!("layer {l} exceeds depth")))?;
            for r in 0..raws.len() {
                let s = scores.get(r, c) + goodness(a.row(r));
                scores.set(r, c, s);
            }
        }
    }
    Ok(scores)
}

pub fn predict_sweep(
    net: &FFNetwork,
    coding: LabelCoding,
    x_raw: &[f64],
    included: &[usize],
) -> Result<usize> {
    let scores = sweep_scores(net, coding, std::slice::from_ref(&x_raw.to_vec()), included)?;
    Ok(argmax(scores.row(0)))
}

pub fn predictions_head(
    net: &FFNetwork,
    head: &ClassifierHead,
    set: &LabeledSet,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(set.len());
    for chunk in set.raw.chunks(EVAL_BATCH) {
        let inputs = encode_rows(set.coding, chunk, None)?;
        let f = features_batch(net, &inputs, &head.included_layers)?;
        let logits = head.logits_batch(&f)?;
        out.extend(logits.row_iter().map(argmax));
    }
    Ok(out)
}

pub fn predictions_sweep(
    net: &FFNetwork,
    set: &LabeledSet,
    included: &[usize],
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(set.len());
    for chunk in set.raw.chunks(EVAL_BATCH) {
        let scores = sweep_scores(net, set.coding, chunk, included)?;
        out.extend(scores.row_iter().map(argmax));
    }
    Ok(out)
}

/// Fraction of mismatches between predictions and labels.
pub fn error_rate(predictions: &[usize], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let wrong = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p != y)
        .count();
    wrong as f64 / labels.len() as f64
}
