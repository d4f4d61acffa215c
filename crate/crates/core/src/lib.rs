//! Forward-Forward networks: layer-local goodness training, inference,
//! a backpropagation baseline and weight analysis.

pub mod analysis;
pub mod baseline;
pub mod checkpoint;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod ffnet;
pub mod inference;
pub mod numerics;
pub mod thresholds;

pub use error::{Error, Result};
