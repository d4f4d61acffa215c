//! The aclImdb review layout: `{train,test}/{pos,neg}/*.txt`.

use std::path::Path;

use crate::data::LabelCoding;
use crate::error::{Error, Result};
use crate::ffnet::{Polarity, Sample};

pub const NEG: usize = 0;
pub const POS: usize = 1;
pub const CODING: LabelCoding = LabelCoding::Append { classes: 2 };

#[derive(Debug, Clone, PartialEq)]
pub struct Review {
    pub text: String,
    pub label: usize,
}

/// Reads every review of one split. Files are visited in sorted name order,
/// negatives first.
pub fn load_split(root: &Path, split: &str) -> Result<Vec<Review>> {
    let mut out = Vec::new();
    for (sub, label) in [("neg", NEG), ("pos", POS)] {
        let dir = root.join(split).join(sub);
        let entries = std::fs::read_dir(&dir).map_err(|e| Error::data(&dir, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::data(&dir, e))?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "txt") {
                paths.push(path);
            }
        }
        paths.sort();
        for path in paths {
            let bytes = std::fs::read(&path).map_err(|e| Error::data(&path, e))?;
            out.push(Review {
                text: String::from_utf8_lossy(&bytes).into_owned(),
                label,
            });
        }
    }
    Ok(out)
}

/// Appends a two-slot one-hot to a review vector. Positive samples carry
/// the true sentiment; negative samples carry the other one.
pub fn attach_sentiment_label(
    features: &[f64],
    label: usize,
    polarity: Polarity,
) -> Result<Sample> {
    if label > POS {
        return Err(Error::usage(format!(
            "sentiment label {label} is not 0 or 1"
        )));
    }
    let embedded = match polarity {
        Polarity::Positive => label,
        Polarity::Negative => 1 - label,
    };
    Ok(Sample {
        features: CODING.embed(features, Some(embedded))?,
        polarity,
        true_label: label,
    })
}
