use crate::error::{Error, Result};
use crate::numerics::{
    l2_normalize_floor_in_place, matmul_transa, matmul_transb, sigmoid, softplus, AdamState,
    Matrix, Rng, NORM_EPS,
};

use super::ActivationKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    /// +1 for positive data, −1 for negative data.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }
}

/// One FF training input: features with a label already embedded.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub polarity: Polarity,
    pub true_label: usize,
}

/// Sum of squared activations.
pub fn goodness(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Logistic loss on the signed goodness margin:
/// `softplus(θ − G)` for positive data and `softplus(G − θ)` for negative data.
pub fn ff_loss(goodness: f64, theta: f64, polarity: Polarity) -> f64 {
    softplus(polarity.sign() * (theta - goodness))
}

/// `dL/dG` for [`ff_loss`].
#[inline]
pub fn ff_loss_dgoodness(goodness: f64, theta: f64, polarity: Polarity) -> f64 {
    let s = polarity.sign();
    -s * sigmoid(s * (theta - goodness))
}

/// A fully connected layer trained only by its own goodness loss.
#[derive(Debug, Clone)]
pub struct FFLayer {
    /// `out × in`
    pub w: Matrix,
    pub b: Vec<f64>,
    pub act: ActivationKind,
    pub adam_w: AdamState,
    pub adam_b: AdamState,
}

/// Per-row intermediates of a batched forward pass.
#[derive(Debug, Clone)]
pub struct BatchForward {
    pub xhat: Matrix,
    pub z: Matrix,
    pub a: Matrix,
}

#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub dw: Matrix,
    pub db: Vec<f64>,
    /// Summed (not averaged) loss over the batch rows.
    pub loss_sum: f64,
    pub goodness: Vec<f64>,
}

impl FFLayer {
    /// Weights uniform in ±1/√fan_in, zero bias.
    pub fn new(in_dim: usize, out_dim: usize, act: ActivationKind, lr: f64, rng: &mut Rng) -> Self {
        let bound = 1.0 / (in_dim.max(1) as f64).sqrt();
        let data = (0..in_dim * out_dim)
            .map(|_| rng.uniform_range(-bound, bound))
            .collect();
        let w = Matrix::from_vec(out_dim, in_dim, data).expect("length matches shape");
        Self::from_parts(w, vec![0.0; out_dim], act, lr).expect("shapes agree")
    }

    pub fn from_parts(w: Matrix, b: Vec<f64>, act: ActivationKind, lr: f64) -> Result<Self> {
        if b.len() != w.rows() {
            return Err(Error::dim("FFLayer::from_parts", w.shape(), (b.len(), 1)));
        }
        let adam_w = AdamState::new(w.rows() * w.cols(), lr);
        let adam_b = AdamState::new(b.len(), lr);
        Ok(FFLayer {
            w,
            b,
            act,
            adam_w,
            adam_b,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.adam_w.lr = lr;
        self.adam_b.lr = lr;
    }

    /// Normalize `x`, then return `(z, a)` with `z = W·x̂ + b`, `a = f(z)`.
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let input = Matrix::from_vec(1, x.len(), x.to_vec())?;
        let fwd = self.forward_batch(&input)?;
        Ok((fwd.z.into_data(), fwd.a.into_data()))
    }

    pub fn forward_batch(&self, input: &Matrix) -> Result<BatchForward> {
        if input.cols() != self.in_dim() {
            return Err(Error::dim("layer_forward", input.shape(), self.w.shape()));
        }
        let mut xhat = input.clone();
        for r in 0..xhat.rows() {
            l2_normalize_floor_in_place(xhat.row_mut(r), NORM_EPS);
        }
        let mut z = matmul_transb(&xhat, &self.w)?;
        let mut a = Matrix::zeros(z.rows(), z.cols());
        for r in 0..z.rows() {
            let zr = z.row_mut(r);
            for (zi, bi) in zr.iter_mut().zip(&self.b) {
                *zi += bi;
            }
            for (ai, &zi) in a.row_mut(r).iter_mut().zip(z.row(r)) {
                *ai = self.act.apply(zi);
            }
        }
        Ok(BatchForward { xhat, z, a })
    }

    /// Batch-averaged gradients of the local loss. Reads only this layer's
    /// parameters and the cached forward pass; nothing flows to the input.
    pub fn batch_grads(
        &self,
        fwd: &BatchForward,
        polarity: &[Polarity],
        theta: f64,
    ) -> Result<LayerGrads> {
        let n = fwd.a.rows();
        if polarity.len() != n {
            return Err(Error::dim(
                "layer_grads",
                fwd.a.shape(),
                (polarity.len(), 1),
            ));
        }
        let mut dz = Matrix::zeros(n, self.out_dim());
        let mut loss_sum = 0.0;
        let mut gs = Vec::with_capacity(n);
        for (r, &pol) in polarity.iter().enumerate() {
            let a = fwd.a.row(r);
            let g = goodness(a);
            loss_sum += ff_loss(g, theta, pol);
            gs.push(g);
            let dg = ff_loss_dgoodness(g, theta, pol);
            for ((d, &ai), &zi) in dz.row_mut(r).iter_mut().zip(a).zip(fwd.z.row(r)) {
                *d = dg * 2.0 * ai * self.act.derivative(zi);
            }
        }
        let inv = 1.0 / n.max(1) as f64;
        let mut dw = matmul_transa(&dz, &fwd.xhat)?;
        dw.scale(inv);
        let mut db = vec![0.0; self.out_dim()];
        for row in dz.row_iter() {
            for (acc, v) in db.iter_mut().zip(row) {
                *acc += v;
            }
        }
        db.iter_mut().for_each(|v| *v *= inv);
        Ok(LayerGrads {
            dw,
            db,
            loss_sum,
            goodness: gs,
        })
    }

    /// Gradient of the loss for a single sample: `(dW, db, L)`.
    pub fn grads(
        &self,
        x: &[f64],
        polarity: Polarity,
        theta: f64,
    ) -> Result<(Matrix, Vec<f64>, f64)> {
        let input = Matrix::from_vec(1, x.len(), x.to_vec())?;
        let fwd = self.forward_batch(&input)?;
        let g = self.batch_grads(&fwd, &[polarity], theta)?;
        Ok((g.dw, g.db, g.loss_sum))
    }

    pub fn apply_grads(&mut self, grads: &LayerGrads) -> Result<()> {
        self.adam_w.step(self.w.data_mut(), grads.dw.data())?;
        self.adam_b.step(&mut self.b, &grads.db)?;
        Ok(())
    }

    /// Loss for one sample, used by finite-difference checks.
    pub fn loss(&self, x: &[f64], polarity: Polarity, theta: f64) -> Result<f64> {
        let (_, a) = self.forward(x)?;
        Ok(ff_loss(goodness(&a), theta, polarity))
    }
}
