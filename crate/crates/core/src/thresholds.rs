//! Goodness thresholds θ as a function of layer, width and epoch.

use std::fmt;

use crate::error::{Error, Result};

/// Default per-layer factors for the increasing (pyramidal) scheme.
pub const DEFAULT_PYRAMID: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

/// Proportionality factors swept by the ablation harness.
pub const K_SWEEP_GRID: [f64; 10] = [0.005, 0.01, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdStrategy {
    /// θ = k · width
    ConstantK { k: f64 },
    /// θ = k[layer] · width
    Pyramidal { k_per_layer: Vec<f64> },
    /// The base θ scaled by a factor ramping linearly from `k_start` to
    /// `k_end` over `ramp_epochs` epochs, then held at `k_end`.
    Scheduled {
        k_start: f64,
        k_end: f64,
        ramp_epochs: usize,
        base: Box<ThresholdStrategy>,
    },
}

impl ThresholdStrategy {
    pub fn constant(k: f64) -> Self {
        ThresholdStrategy::ConstantK { k }
    }

    pub fn pyramidal(k_per_layer: impl Into<Vec<f64>>) -> Self {
        ThresholdStrategy::Pyramidal {
            k_per_layer: k_per_layer.into(),
        }
    }

    /// Checks the invariants against a network of the given depth.
    pub fn validate(&self, depth: usize) -> Result<()> {
        let positive = |k: f64, what: &str| {
            if k > 0.0 && k.is_finite() {
                Ok(())
            } else {
                Err(Error::usage(format!("{what} must be positive, got {k}")))
            }
        };
        match self {
            ThresholdStrategy::ConstantK { k } => positive(*k, "threshold k"),
            ThresholdStrategy::Pyramidal { k_per_layer } => {
                if k_per_layer.len() != depth {
                    return Err(Error::usage(format!(
                        "pyramidal thresholds list {} factors for a network of depth {depth}",
                        k_per_layer.len()
                    )));
                }
                k_per_layer
                    .iter()
                    .try_for_each(|&k| positive(k, "pyramidal k"))
            }
            ThresholdStrategy::Scheduled {
                k_start,
                k_end,
                ramp_epochs,
                base,
            } => {
                positive(*k_start, "k_start")?;
                positive(*k_end, "k_end")?;
                if *ramp_epochs == 0 {
                    return Err(Error::usage("ramp_epochs must be at least 1"));
                }
                if matches!(**base, ThresholdStrategy::Scheduled { .. }) {
                    return Err(Error::usage("scheduled thresholds cannot be nested"));
                }
                base.validate(depth)
            }
        }
    }

    /// Schedule multiplier at `epoch` (1 for unscheduled strategies).
    pub fn epoch_factor(&self, epoch: usize) -> f64 {
        match self {
            ThresholdStrategy::Scheduled {
                k_start,
                k_end,
                ramp_epochs,
                ..
            } => {
                if epoch >= *ramp_epochs {
                    *k_end
                } else {
                    let frac = epoch as f64 / *ramp_epochs as f64;
                    k_start + (k_end - k_start) * frac
                }
            }
            _ => 1.0,
        }
    }

    pub fn resolve(&self, layer_idx: usize, layer_width: usize, epoch: usize) -> Result<f64> {
        if layer_width == 0 {
            return Err(Error::usage("layer width must be at least 1"));
        }
        let width = layer_width as f64;
        match self {
            ThresholdStrategy::ConstantK { k } => Ok(k * width),
            ThresholdStrategy::Pyramidal { k_per_layer } => k_per_layer
                .get(layer_idx)
                .map(|k| k * width)
                .ok_or_else(|| {
                    Error::usage(format!(
                        "layer {layer_idx} out of range for {} pyramidal factors",
                        k_per_layer.len()
                    ))
                }),
            ThresholdStrategy::Scheduled { base, .. } => {
                Ok(self.epoch_factor(epoch) * base.resolve(layer_idx, layer_width, epoch)?)
            }
        }
    }
}

fn join(ks: &[f64]) -> String {
    ks.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ThresholdStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdStrategy::ConstantK { k } => write!(f, "constant(k={k})"),
            ThresholdStrategy::Pyramidal { k_per_layer } => {
                write!(f, "pyramidal(k=[{}])", join(k_per_layer))
            }
            ThresholdStrategy::Scheduled {
                k_start,
                k_end,
                ramp_epochs,
                base,
            } => write!(
                f,
                "scheduled({k_start}->{k_end} over {ramp_epochs} epochs, base={base})"
            ),
        }
    }
}
