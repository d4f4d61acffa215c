//! Backpropagation MLP with the FF hidden geometry plus a softmax output,
//! used as the reference point for error rates and weight ranges.

use crate::data::LabeledSet;
use crate::error::{Error, Result};
use crate::ffnet::ActivationKind;
use crate::numerics::{
    argmax, matmul, matmul_transa, matmul_transb, softmax_in_place, AdamState, Matrix, Rng,
};

/// Affine layer with its own Adam state.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    /// `out × in`
    pub w: Matrix,
    pub b: Vec<f64>,
    pub adam_w: AdamState,
    pub adam_b: AdamState,
}

impl DenseLayer {
    pub fn new(in_dim: usize, out_dim: usize, lr: f64, rng: &mut Rng) -> Self {
        let bound = 1.0 / (in_dim.max(1) as f64).sqrt();
        let data = (0..in_dim * out_dim)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        let w = Matrix::from_vec(out_dim, in_dim, data).expect("length matches");
        Self::from_parts(w, vec![0.0; out_dim], lr).expect("shapes agree")
    }

    pub fn from_parts(w: Matrix, b: Vec<f64>, lr: f64) -> Result<Self> {
        if b.len() != w.rows() {
            return Err(Error::dim(
                "DenseLayer::from_parts",
                w.shape(),
                (b.len(), 1),
            ));
        }
        Ok(DenseLayer {
            adam_w: AdamState::new(w.rows() * w.cols(), lr),
            adam_b: AdamState::new(b.len(), lr),
            w,
            b,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.rows()
    }

    fn affine(&self, input: &Matrix) -> Result<Matrix> {
        let mut z = matmul_transb(input, &self.w)?;
        for r in 0..z.rows() {
            for (v, b) in z.row_mut(r).iter_mut().zip(&self.b) {
                *v += b;
            }
        }
        Ok(z)
    }
}

#[derive(Debug, Clone)]
pub struct BPNetwork {
    pub hidden: Vec<DenseLayer>,
    pub output: DenseLayer,
    pub act: ActivationKind,
}

#[derive(Debug, Clone)]
pub struct BPGrads {
    /// `(dW, db)` per hidden layer, then the output layer last.
    pub layers: Vec<(Matrix, Vec<f64>)>,
    pub loss: f64,
    /// Argmax of the forward logits, before any update.
    pub predictions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BPEpochMetrics {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_err: f64,
}

impl BPNetwork {
    pub fn new(
        input_dim: usize,
        widths: &[usize],
        classes: usize,
        act: ActivationKind,
        lr: f64,
        rng: &mut Rng,
    ) -> Result<Self> {
        if input_dim == 0 || widths.contains(&0) || classes < 2 {
            return Err(Error::usage(format!(
                "invalid baseline architecture: input {input_dim}, widths {widths:?}, {classes} classes"
            )));
        }
        let mut hidden = Vec::with_capacity(widths.len());
        let mut fan_in = input_dim;
        for &w in widths {
            hidden.push(DenseLayer::new(fan_in, w, lr, rng));
            fan_in = w;
        }
        let output = DenseLayer::new(fan_in, classes, lr, rng);
        Ok(BPNetwork {
            hidden,
            output,
            act,
        })
    }

    pub fn from_layers(
        hidden: Vec<DenseLayer>,
        output: DenseLayer,
        act: ActivationKind,
    ) -> Result<Self> {
        let mut fan_in = hidden.first().unwrap_or(&output).in_dim();
        for l in hidden.iter().chain(std::iter::once(&output)) {
            if l.in_dim() != fan_in {
                return Err(Error::dim(
                    "BPNetwork::from_layers",
                    (fan_in, 0),
                    l.w.shape(),
                ));
            }
            fan_in = l.out_dim();
        }
        Ok(BPNetwork {
            hidden,
            output,
            act,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.first().unwrap_or(&self.output).in_dim()
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.hidden.iter().map(DenseLayer::out_dim).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.output.out_dim()
    }

    pub fn set_lr(&mut self, lr: f64) {
        for l in self
            .hidden
            .iter_mut()
            .chain(std::iter::once(&mut self.output))
        {
            l.adam_w.lr = lr;
            l.adam_b.lr = lr;
        }
    }

    /// Hidden pre-activations, hidden activations and output logits.
    fn forward_cached(&self, input: &Matrix) -> Result<(Vec<Matrix>, Vec<Matrix>, Matrix)> {
        let mut zs = Vec::with_capacity(self.hidden.len());
        let mut hs: Vec<Matrix> = Vec::with_capacity(self.hidden.len());
        for layer in &self.hidden {
            let z = layer.affine(hs.last().unwrap_or(input))?;
            let mut h = z.clone();
            h.data_mut()
                .iter_mut()
                .for_each(|v| *v = self.act.apply(*v));
            zs.push(z);
            hs.push(h);
        }
        let logits = self.output.affine(hs.last().unwrap_or(input))?;
        Ok((zs, hs, logits))
    }

    pub fn logits_batch(&self, input: &Matrix) -> Result<Matrix> {
        Ok(self.forward_cached(input)?.2)
    }

    /// Mean softmax cross-entropy over the batch and its gradients by the
    /// layer-by-layer delta recursion.
    pub fn batch_grads(&self, input: &Matrix, labels: &[usize]) -> Result<BPGrads> {
        if labels.len() != input.rows() {
            return Err(Error::dim("bp_grads", input.shape(), (labels.len(), 1)));
        }
        let (zs, hs, mut delta) = self.forward_cached(input)?;
        let predictions = delta.row_iter().map(argmax).collect();
        let n = labels.len().max(1) as f64;
        let mut loss = 0.0;
        for (r, &y) in labels.iter().enumerate() {
            if y >= self.num_classes() {
                return Err(Error::usage(format!("label {y} out of range")));
            }
            let row = delta.row_mut(r);
            softmax_in_place(row);
            loss -= row[y].max(f64::MIN_POSITIVE).ln();
            row[y] -= 1.0;
            row.iter_mut().for_each(|v| *v /= n);
        }

        let depth = self.hidden.len();
        let mut grads: Vec<(Matrix, Vec<f64>)> = Vec::with_capacity(depth + 1);
        let mut layer = &self.output;
        for l in (0..=depth).rev() {
            let below = if l == 0 { input } else { &hs[l - 1] };
            let dw = matmul_transa(&delta, below)?;
            let mut db = vec![0.0; layer.out_dim()];
            for row in delta.row_iter() {
                for (acc, v) in db.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            grads.push((dw, db));
            if l > 0 {
                let mut next = matmul(&delta, &layer.w)?;
                for (d, &z) in next.data_mut().iter_mut().zip(zs[l - 1].data()) {
                    *d *= self.act.derivative(z);
                }
                delta = next;
                layer = &self.hidden[l - 1];
            }
        }
        grads.reverse();
        Ok(BPGrads {
            layers: grads,
            loss: loss / n,
            predictions,
        })
    }

    pub fn loss(&self, x: &[f64], label: usize) -> Result<f64> {
        let input = Matrix::from_vec(1, x.len(), x.to_vec())?;
        Ok(self.batch_grads(&input, &[label])?.loss)
    }

    pub fn apply_grads(&mut self, grads: &BPGrads) -> Result<()> {
        let layers = self
            .hidden
            .iter_mut()
            .chain(std::iter::once(&mut self.output));
        for (layer, (dw, db)) in layers.zip(&grads.layers) {
            layer.adam_w.step(layer.w.data_mut(), dw.data())?;
            layer.adam_b.step(&mut layer.b, db)?;
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let input = Matrix::from_vec(1, x.len(), x.to_vec())?;
        if input.cols() != self.input_dim() {
            return Err(Error::dim(
                "bp_predict",
                input.shape(),
                (1, self.input_dim()),
            ));
        }
        Ok(argmax(self.logits_batch(&input)?.row(0)))
    }

    /// Inputs for the baseline: raw features with neutral (all-zero) label slots.
    pub fn encode(set: &LabeledSet, idx: &[usize]) -> Result<Matrix> {
        let rows = idx
            .iter()
            .map(|&i| set.coding.embed(&set.raw[i], None))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(&rows)
    }

    pub fn train_epoch(
        &mut self,
        set: &LabeledSet,
        epoch: usize,
        batch_size: usize,
        rng: &mut Rng,
    ) -> Result<BPEpochMetrics> {
        if set.is_empty() {
            return Err(Error::usage("baseline training needs at least one example"));
        }
        if batch_size == 0 {
            return Err(Error::usage("batch size must be at least 1"));
        }
        let order = rng.permutation(set.len());
        let mut loss_sum = 0.0;
        let mut wrong = 0usize;
        for chunk in order.chunks(batch_size) {
            let input = Self::encode(set, chunk)?;
            let labels: Vec<usize> = chunk.iter().map(|&i| set.labels[i]).collect();
            let grads = self.batch_grads(&input, &labels)?;
            loss_sum += grads.loss * chunk.len() as f64;
            wrong += grads
                .predictions
                .iter()
                .zip(&labels)
                .filter(|(p, y)| p != y)
                .count();
            self.apply_grads(&grads)?;
        }
        Ok(BPEpochMetrics {
            epoch,
            mean_loss: loss_sum / set.len() as f64,
            train_err: wrong as f64 / set.len() as f64,
        })
    }

    pub fn predictions(&self, set: &LabeledSet) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(set.len());
        let idx: Vec<usize> = (0..set.len()).collect();
        for chunk in idx.chunks(256) {
            let logits = self.logits_batch(&Self::encode(set, chunk)?)?;
            out.extend(logits.row_iter().map(argmax));
        }
        Ok(out)
    }
}
