//! MNIST IDX parsing and FF sample generation by label embedding.

use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::ffnet::{Polarity, Sample};
use crate::numerics::Rng;

use super::{LabelCoding, LabeledSet};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const SIDE: usize = 28;
pub const PIXELS: usize = SIDE * SIDE;
pub const CLASSES: usize = 10;
pub const CODING: LabelCoding = LabelCoding::Overwrite { classes: CLASSES };

#[derive(Debug, Clone, PartialEq)]
pub struct MnistImage {
    /// 784 values in [0, 1]
    pub pixels: Vec<f64>,
    pub label: usize,
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| {
            Error::format(
                bytes.len(),
                format!("truncated header, need u32 at {offset}"),
            )
        })
}

fn payload(bytes: &[u8], start: usize, len: usize) -> Result<&[u8]> {
    let end = start
        .checked_add(len)
        .ok_or_else(|| Error::format(start, "payload size overflows"))?;
    if bytes.len() < end {
        return Err(Error::format(
            bytes.len(),
            format!(
                "truncated payload: expected {end} bytes, found {}",
                bytes.len()
            ),
        ));
    }
    if bytes.len() > end {
        return Err(Error::format(end, "trailing bytes after payload"));
    }
    Ok(&bytes[start..end])
}

/// Inflates gzip input (detected by the `1f 8b` prefix); passes anything else through.
pub fn maybe_gunzip(bytes: Vec<u8>) -> Result<Vec<u8>> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(bytes.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::format(0, format!("bad gzip stream: {e}")))?;
        Ok(out)
    } else {
        Ok(bytes)
    }
}

/// Parses an IDX3 image file into rows of 784 pixels scaled to [0, 1].
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(Error::format(0, format!("bad image magic {magic:#010x}")));
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    if rows != SIDE {
        return Err(Error::format(
            8,
            format!("expected {SIDE} rows, found {rows}"),
        ));
    }
    if cols != SIDE {
        return Err(Error::format(
            12,
            format!("expected {SIDE} columns, found {cols}"),
        ));
    }
    let len = count
        .checked_mul(PIXELS)
        .ok_or_else(|| Error::format(4, "image count overflows"))?;
    let data = payload(bytes, 16, len)?;
    Ok(data
        .chunks_exact(PIXELS)
        .map(|img| img.iter().map(|&p| f64::from(p) / 255.0).collect())
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let magic = read_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(Error::format(0, format!("bad label magic {magic:#010x}")));
    }
    let count = read_u32(bytes, 4)? as usize;
    let data = payload(bytes, 8, count)?;
    data.iter()
        .enumerate()
        .map(|(i, &l)| {
            if usize::from(l) < CLASSES {
                Ok(usize::from(l))
            } else {
                Err(Error::format(8 + i, format!("label {l} out of range")))
            }
        })
        .collect()
}

pub fn pair(images: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Vec<MnistImage>> {
    if images.len() != labels.len() {
        return Err(Error::format(
            4,
            format!("{} images but {} labels", images.len(), labels.len()),
        ));
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|(pixels, label)| MnistImage { pixels, label })
        .collect())
}

/// Overwrites the first 10 pixels with a one-hot of `label`.
pub fn embed_label(image: &MnistImage, label: usize) -> Result<Vec<f64>> {
    CODING.embed(&image.pixels, Some(label))
}

pub fn make_negative(image: &MnistImage, rng: &mut Rng) -> Result<Sample> {
    let wrong = CODING.wrong_label(image.label, rng);
    Ok(Sample {
        features: embed_label(image, wrong)?,
        polarity: Polarity::Negative,
        true_label: image.label,
    })
}

pub fn build_training_stream(images: &[MnistImage], rng: &mut Rng) -> Result<Vec<Sample>> {
    to_labeled_set(images)?.training_stream(rng)
}

pub fn to_labeled_set(images: &[MnistImage]) -> Result<LabeledSet> {
    LabeledSet::new(
        images.iter().map(|i| i.pixels.clone()).collect(),
        images.iter().map(|i| i.label).collect(),
        CODING,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

fn find_file(dir: &Path, stem: &str) -> Result<PathBuf> {
    let candidates = [
        dir.join(stem),
        dir.join(format!("{stem}.gz")),
        dir.join(stem.replacen("-idx", ".idx", 1)),
    ];
    candidates
        .iter()
        .find(|p| p.is_file())
        .cloned()
        .ok_or_else(|| {
            Error::data(
                dir.join(stem),
                std::io::Error::new(std::io::ErrorKind::NotFound, "MNIST file not found"),
            )
        })
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| Error::data(path, e))?;
    maybe_gunzip(bytes)
}

/// Loads a split from the standard file names in `dir`, keeping at most `limit` images.
pub fn load(dir: &Path, split: Split, limit: Option<usize>) -> Result<LabeledSet> {
    let prefix = match split {
        Split::Train => "train",
        Split::Test => "t10k",
    };
    let img_path = find_file(dir, &format!("{prefix}-images-idx3-ubyte"))?;
    let lbl_path = find_file(dir, &format!("{prefix}-labels-idx1-ubyte"))?;
    let mut images = parse_idx_images(&read_file(&img_path)?)?;
    let mut labels = parse_idx_labels(&read_file(&lbl_path)?)?;
    if images.len() != labels.len() {
        return Err(Error::format(
            4,
            format!("{} images but {} labels", images.len(), labels.len()),
        ));
    }
    if let Some(n) = limit {
        images.truncate(n);
        labels.truncate(n);
    }
    LabeledSet::new(images, labels, CODING)
}
