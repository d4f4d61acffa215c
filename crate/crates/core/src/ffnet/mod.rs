//! Layers trained by local goodness losses.

mod activation;
mod layer;
mod network;

pub use activation::ActivationKind;
pub use layer::{
    ff_loss, ff_loss_dgoodness, goodness, BatchForward, FFLayer, LayerGrads, Polarity, Sample,
};
pub use network::{EpochMetrics, FFNetwork, LayerMetrics};
