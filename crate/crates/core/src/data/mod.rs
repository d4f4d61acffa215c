//! Datasets and the conversion of labeled examples into FF samples.

mod labels;
pub mod mnist;
pub mod synthetic;
pub mod text;

pub use labels::{LabelCoding, LabeledSet};
