//! Little-endian binary checkpoints.
//!
//! ```text
//! magic "FFN1" | u32 layers | per layer: u32 in, u32 out, u8 act, [f64 slope if act = 1], W (f64 row-major), b (f64)
//! optional trailer: "HEAD" | u32 classes | u32 features | u32 n | n × u32 layer | W | b
//! ```
//!
//! The backprop baseline uses the same container under magic "BPN1"; its last
//! layer is the linear softmax output and carries activation tag 255.
//! Optimizer state is not stored.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::baseline::{BPNetwork, DenseLayer};
use crate::error::{Error, Result};
use crate::ffnet::{ActivationKind, FFLayer, FFNetwork};
use crate::inference::ClassifierHead;
use crate::numerics::Matrix;

pub const FF_MAGIC: &[u8; 4] = b"FFN1";
pub const BP_MAGIC: &[u8; 4] = b"BPN1";
pub const HEAD_TAG: &[u8; 4] = b"HEAD";
const LINEAR_TAG: u8 = 255;

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("dimension fits in u32");
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn f64s(&mut self, vs: &[f64]) {
        for v in vs {
            self.0.extend_from_slice(&v.to_le_bytes());
        }
    }

    fn layer(&mut self, w: &Matrix, b: &[f64], tag: u8, slope: Option<f64>) {
        self.u32(w.cols());
        self.u32(w.rows());
        self.0.push(tag);
        if let Some(s) = slope {
            self.f64s(&[s]);
        }
        self.f64s(w.data());
        self.f64s(b);
    }

    fn act(&mut self, w: &Matrix, b: &[f64], act: ActivationKind) {
        let slope = match act {
            ActivationKind::LeakyRelu(s) => Some(s),
            _ => None,
        };
        self.layer(w, b, act.tag(), slope);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::format(
                self.bytes.len(),
                "unexpected end of checkpoint",
            ));
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| Error::format(self.pos, "array length overflows"))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }

    fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }

    /// Returns `(W, b, tag, slope)`.
    fn layer(&mut self) -> Result<(Matrix, Vec<f64>, u8, f64)> {
        let start = self.pos;
        let in_dim = self.u32()?;
        let out_dim = self.u32()?;
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::format(start, "layer with zero width"));
        }
        let tag = self.u8()?;
        let slope = if tag == 1 { self.f64s(1)?[0] } else { 0.0 };
        let w = Matrix::from_vec(out_dim, in_dim, self.f64s(in_dim * out_dim)?)?;
        let b = self.f64s(out_dim)?;
        Ok((w, b, tag, slope))
    }

    fn activation(&mut self) -> Result<(Matrix, Vec<f64>, ActivationKind)> {
        let at = self.pos + 8;
        let (w, b, tag, slope) = self.layer()?;
        let act = ActivationKind::from_tag(tag, slope)
            .ok_or_else(|| Error::format(at, format!("unknown activation tag {tag}")))?;
        Ok((w, b, act))
    }
}

fn check_magic(r: &mut Reader<'_>, magic: &[u8; 4]) -> Result<()> {
    let got = r.take(4)?;
    if got != magic {
        return Err(Error::format(
            0,
            format!(
                "expected magic {:?}, found {:?}",
                String::from_utf8_lossy(magic),
                String::from_utf8_lossy(got)
            ),
        ));
    }
    Ok(())
}

/// Serializes the network, followed by the head trailer when given.
pub fn encode_ff(net: &FFNetwork, head: Option<&ClassifierHead>) -> Vec<u8> {
    let mut w = Writer(FF_MAGIC.to_vec());
    w.u32(net.depth());
    for l in &net.layers {
        w.act(&l.w, &l.b, l.act);
    }
    if let Some(h) = head {
        w.0.extend_from_slice(HEAD_TAG);
        w.u32(h.w.rows());
        w.u32(h.w.cols());
        w.u32(h.included_layers.len());
        for &l in &h.included_layers {
            w.u32(l);
        }
        w.f64s(h.w.data());
        w.f64s(&h.b);
    }
    w.0
}

/// Parses an FFN1 checkpoint. Optimizer state starts fresh at `lr`.
pub fn decode_ff(bytes: &[u8], lr: f64) -> Result<(FFNetwork, Option<ClassifierHead>)> {
    let mut r = Reader { bytes, pos: 0 };
    check_magic(&mut r, FF_MAGIC)?;
    let depth = r.u32()?;
    if depth == 0 {
        return Err(Error::format(4, "checkpoint has no layers"));
    }
    let mut layers = Vec::with_capacity(depth.min(64));
    for _ in 0..depth {
        let (w, b, act) = r.activation()?;
        layers.push(FFLayer::from_parts(w, b, act, lr)?);
    }
    let net = FFNetwork::from_layers(layers).map_err(|e| Error::format(4, e.to_string()))?;
    if r.at_end() {
        return Ok((net, None));
    }
    let at = r.pos;
    if r.take(4)? != HEAD_TAG {
        return Err(Error::format(at, "trailing bytes are not a HEAD section"));
    }
    let classes = r.u32()?;
    let features = r.u32()?;
    let n = r.u32()?;
    if n > net.depth() {
        return Err(Error::format(
            r.pos,
            "head lists more layers than the net has",
        ));
    }
    let included = (0..n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    if included.iter().any(|&l| l >= net.depth()) {
        return Err(Error::format(r.pos, "head references a missing layer"));
    }
    let expected: usize = included.iter().map(|&l| net.layers[l].out_dim()).sum();
    if expected != features {
        return Err(Error::format(
            r.pos,
            "head width does not match included layers",
        ));
    }
    let w = Matrix::from_vec(classes, features, r.f64s(classes * features)?)?;
    let b = r.f64s(classes)?;
    if !r.at_end() {
        return Err(Error::format(r.pos, "trailing bytes after HEAD section"));
    }
    let mut head = ClassifierHead::from_parts(w, b, included)?;
    head.adam_w.lr = lr;
    head.adam_b.lr = lr;
    Ok((net, Some(head)))
}

pub fn encode_bp(net: &BPNetwork) -> Vec<u8> {
    let mut w = Writer(BP_MAGIC.to_vec());
    w.u32(net.hidden.len() + 1);
    for l in &net.hidden {
        w.act(&l.w, &l.b, net.act);
    }
    // The hidden activation is repeated in the output record's slope slot
    // only when there are no hidden layers, so it survives a round trip.
    w.layer(&net.output.w, &net.output.b, LINEAR_TAG, None);
    if net.hidden.is_empty() {
        w.0.push(net.act.tag());
        if let ActivationKind::LeakyRelu(s) = net.act {
            w.f64s(&[s]);
        }
    }
    w.0
}

pub fn decode_bp(bytes: &[u8], lr: f64) -> Result<BPNetwork> {
    let mut r = Reader { bytes, pos: 0 };
    check_magic(&mut r, BP_MAGIC)?;
    let count = r.u32()?;
    if count == 0 {
        return Err(Error::format(4, "checkpoint has no layers"));
    }
    let mut hidden = Vec::with_capacity((count - 1).min(64));
    let mut act = None;
    for _ in 0..count - 1 {
        let (w, b, a) = r.activation()?;
        if act.is_some_and(|prev| prev != a) {
            return Err(Error::format(
                r.pos,
                "baseline layers disagree on activation",
            ));
        }
        act = Some(a);
        hidden.push(DenseLayer::from_parts(w, b, lr)?);
    }
    let at = r.pos + 8;
    let (w, b, tag, _) = r.layer()?;
    if tag != LINEAR_TAG {
        return Err(Error::format(at, "output layer must be linear"));
    }
    let output = DenseLayer::from_parts(w, b, lr)?;
    let act = match act {
        Some(a) => a,
        None => {
            let tag = r.u8()?;
            let slope = if tag == 1 { r.f64s(1)?[0] } else { 0.0 };
            ActivationKind::from_tag(tag, slope)
                .ok_or_else(|| Error::format(r.pos, format!("unknown activation tag {tag}")))?
        }
    };
    if !r.at_end() {
        return Err(Error::format(
            r.pos,
            "trailing bytes after baseline checkpoint",
        ));
    }
    BPNetwork::from_layers(hidden, output, act).map_err(|e| Error::format(4, e.to_string()))
}

/// SHA-256 of the serialized network weights, as lowercase hex.
pub fn weights_hash(net: &FFNetwork) -> String {
    let digest = Sha256::digest(encode_ff(net, None));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_ff(path: &Path, net: &FFNetwork, head: Option<&ClassifierHead>) -> Result<()> {
    std::fs::write(path, encode_ff(net, head)).map_err(|e| Error::io(path, e))
}

pub fn load_ff(path: &Path, lr: f64) -> Result<(FFNetwork, Option<ClassifierHead>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::data(path, e))?;
    decode_ff(&bytes, lr)
}

pub fn save_bp(path: &Path, net: &BPNetwork) -> Result<()> {
    std::fs::write(path, encode_bp(net)).map_err(|e| Error::io(path, e))
}

pub fn load_bp(path: &Path, lr: f64) -> Result<BPNetwork> {
    let bytes = std::fs::read(path).map_err(|e| Error::data(path, e))?;
    decode_bp(&bytes, lr)
}
