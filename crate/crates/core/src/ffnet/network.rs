use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};
use crate::thresholds::ThresholdStrategy;

use super::layer::{BatchForward, FFLayer, Polarity, Sample};
use super::ActivationKind;

/// A stack of FF layers. Each layer sees the previous layer's activations
/// as a plain input; no gradient ever crosses a layer boundary.
#[derive(Debug, Clone)]
pub struct FFNetwork {
    pub layers: Vec<FFLayer>,
    pub input_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerMetrics {
    pub mean_loss: f64,
    pub mean_g_pos: f64,
    pub mean_g_neg: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub layers: Vec<LayerMetrics>,
}

impl FFNetwork {
    pub fn new(
        input_dim: usize,
        widths: &[usize],
        act: ActivationKind,
        lr: f64,
        rng: &mut Rng,
    ) -> Result<Self> {
        if widths.is_empty() || widths.contains(&0) || input_dim == 0 {
            return Err(Error::usage(format!(
                "invalid architecture: input {input_dim}, widths {widths:?}"
            )));
        }
        let mut layers = Vec::with_capacity(widths.len());
        let mut fan_in = input_dim;
        for &w in widths {
            layers.push(FFLayer::new(fan_in, w, act, lr, rng));
            fan_in = w;
        }
        Ok(FFNetwork { layers, input_dim })
    }

    pub fn from_layers(layers: Vec<FFLayer>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::usage("network needs at least one layer"))?;
        let input_dim = first.in_dim();
        for pair in layers.windows(2) {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::dim(
                    "FFNetwork::from_layers",
                    pair[0].w.shape(),
                    pair[1].w.shape(),
                ));
            }
        }
        Ok(FFNetwork { layers, input_dim })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(FFLayer::out_dim).collect()
    }

    pub fn set_lr(&mut self, lr: f64) {
        self.layers.iter_mut().for_each(|l| l.set_lr(lr));
    }

    /// Per-layer `(z, a)` for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        if x.len() != self.input_dim {
            return Err(Error::dim(
                "network_forward",
                (1, x.len()),
                (1, self.input_dim),
            ));
        }
        let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(self.depth());
        for layer in &self.layers {
            let input = out.last().map_or(x, |(_, a)| a.as_slice());
            out.push(layer.forward(input)?);
        }
        Ok(out)
    }

    /// Batched forward returning each layer's cached intermediates.
    pub fn forward_batch(&self, input: &Matrix) -> Result<Vec<BatchForward>> {
        let mut out: Vec<BatchForward> = Vec::with_capacity(self.depth());
        for layer in &self.layers {
            let fwd = match out.last() {
                Some(prev) => layer.forward_batch(&prev.a)?,
                None => layer.forward_batch(input)?,
            };
            out.push(fwd);
        }
        Ok(out)
    }

    /// Activations of every layer for a batch, without the cached inputs.
    pub fn activations_batch(&self, input: &Matrix) -> Result<Vec<Matrix>> {
        let mut out: Vec<Matrix> = Vec::with_capacity(self.depth());
        for layer in &self.layers {
            let fwd = layer.forward_batch(out.last().unwrap_or(input))?;
            out.push(fwd.a);
        }
        Ok(out)
    }

    /// One pass over `samples` in a shuffled order. Every layer takes one
    /// Adam step per batch from its own local loss; all layers train in the
    /// same pass.
    pub fn train_epoch(
        &mut self,
        samples: &[Sample],
        thresholds: &ThresholdStrategy,
        epoch: usize,
        batch_size: usize,
        rng: &mut Rng,
    ) -> Result<EpochMetrics> {
        if samples.is_empty() {
            return Err(Error::usage("train_epoch needs at least one sample"));
        }
        if batch_size == 0 {
            return Err(Error::usage("batch size must be at least 1"));
        }
        thresholds.validate(self.depth())?;
        let thetas = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| thresholds.resolve(i, l.out_dim(), epoch))
            .collect::<Result<Vec<_>>>()?;

        let depth = self.depth();
        let mut loss_sum = vec![0.0; depth];
        let mut g_pos = vec![0.0; depth];
        let mut g_neg = vec![0.0; depth];
        let (mut n_pos, mut n_neg) = (0usize, 0usize);

        let order = rng.permutation(samples.len());
        for chunk in order.chunks(batch_size) {
            let mut data = Vec::with_capacity(chunk.len() * self.input_dim);
            let mut pols = Vec::with_capacity(chunk.len());
            for &i in chunk {
                let s = &samples[i];
                if s.features.len() != self.input_dim {
                    return Err(Error::dim(
                        "train_epoch",
                        (1, s.features.len()),
                        (1, self.input_dim),
                    ));
                }
                data.extend_from_slice(&s.features);
                pols.push(s.polarity);
            }
            n_pos += pols.iter().filter(|&&p| p == Polarity::Positive).count();
            n_neg += pols.iter().filter(|&&p| p == Polarity::Negative).count();

            let mut input = Matrix::from_vec(chunk.len(), self.input_dim, data)?;
            for (li, layer) in self.layers.iter_mut().enumerate() {
                let fwd = layer.forward_batch(&input)?;
                let grads = layer.batch_grads(&fwd, &pols, thetas[li])?;
                layer.apply_grads(&grads)?;
                loss_sum[li] += grads.loss_sum;
                for (&g, &p) in grads.goodness.iter().zip(&pols) {
                    match p {
                        Polarity::Positive => g_pos[li] += g,
                        Polarity::Negative => g_neg[li] += g,
                    }
                }
                input = fwd.a;
            }
        }

        let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
        let layers = (0..depth)
            .map(|li| LayerMetrics {
                mean_loss: loss_sum[li] / samples.len() as f64,
                mean_g_pos: mean(g_pos[li], n_pos),
                mean_g_neg: mean(g_neg[li], n_neg),
                theta: thetas[li],
            })
            .collect();
        Ok(EpochMetrics { epoch, layers })
    }
}
