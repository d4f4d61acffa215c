//! Weight statistics, PGM heatmaps and goodness histograms.

use std::fmt::Write as _;
use std::path::Path;

use crate::baseline::BPNetwork;
use crate::error::{Error, Result};
use crate::ffnet::{goodness, FFNetwork, Polarity, Sample};
use crate::numerics::Matrix;
use crate::thresholds::ThresholdStrategy;

pub const HIST_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population variance.
    pub var: f64,
}

impl WeightStats {
    pub fn of(values: &[f64]) -> WeightStats {
        if values.is_empty() {
            return WeightStats {
                min: 0.0,
                max: 0.0,
                mean: 0.0,
                var: 0.0,
            };
        }
        let n = values.len() as f64;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = sum / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        WeightStats {
            min,
            max,
            mean,
            var,
        }
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

/// Statistics of each layer's weight matrix, in layer order.
pub fn weight_stats(net: &FFNetwork) -> Vec<WeightStats> {
    net.layers
        .iter()
        .map(|l| WeightStats::of(l.w.data()))
        .collect()
}

pub fn weight_stats_of(matrices: &[&Matrix]) -> Vec<WeightStats> {
    matrices.iter().map(|m| WeightStats::of(m.data())).collect()
}

pub fn stats_csv(stats: &[WeightStats]) -> String {
    let mut s = String::from("# variance is the population variance\nlayer,min,max,mean,var\n");
    for (i, st) in stats.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{},{},{}", st.min, st.max, st.mean, st.var);
    }
    s
}

/// First-layer weight range of the FF net divided by the baseline's. The two
/// networks must have the same hidden widths.
pub fn first_layer_range_ratio(ff: &FFNetwork, bp: &BPNetwork) -> Result<f64> {
    if ff.widths() != bp.hidden_widths() || ff.input_dim != bp.input_dim() {
        return Err(Error::usage(format!(
            "architecture mismatch: FF {} -> {:?}, baseline {} -> {:?}",
            ff.input_dim,
            ff.widths(),
            bp.input_dim(),
            bp.hidden_widths()
        )));
    }
    let f = WeightStats::of(ff.layers[0].w.data()).range();
    let b = WeightStats::of(bp.hidden[0].w.data()).range();
    Ok(if b > 0.0 { f / b } else { f64::INFINITY })
}

/// Mean |w| over the label columns `0..label_cols` and over the remaining columns.
pub fn label_column_magnitudes(w: &Matrix, label_cols: usize) -> (f64, f64) {
    let (mut lab, mut rest) = (0.0, 0.0);
    for row in w.row_iter() {
        lab += row[..label_cols].iter().map(|v| v.abs()).sum::<f64>();
        rest += row[label_cols..].iter().map(|v| v.abs()).sum::<f64>();
    }
    let rows = w.rows() as f64;
    (
        lab / (rows * label_cols as f64),
        rest / (rows * (w.cols() - label_cols) as f64),
    )
}

/// Affine map min→0, max→255 (rounded); a constant matrix maps to 128.
pub fn heatmap_bytes(w: &Matrix) -> Vec<u8> {
    let Some((lo, hi)) = w.min_max() else {
        return Vec::new();
    };
    if hi <= lo {
        return vec![128; w.data().len()];
    }
    let scale = 255.0 / (hi - lo);
    w.data()
        .iter()
        .map(|&v| ((v - lo) * scale).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Binary PGM (P5, maxval 255), one pixel per weight; rows of `w` are image rows.
pub fn encode_pgm(w: &Matrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", w.cols(), w.rows()).into_bytes();
    out.extend(heatmap_bytes(w));
    out
}

pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(pos, "truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(Error::format(
            0,
            format!("not a binary PGM: `{}`", fields[0]),
        ));
    }
    let num = |i: usize| {
        fields[i]
            .parse::<usize>()
            .map_err(|_| Error::format(0, format!("bad PGM header field `{}`", fields[i])))
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval != 255 {
        return Err(Error::format(0, format!("unsupported maxval {maxval}")));
    }
    pos += 1; // single whitespace after maxval
    let need = width * height;
    let pixels = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::format(bytes.len(), "truncated PGM payload"))?
        .to_vec();
    Ok(Pgm {
        width,
        height,
        pixels,
    })
}

pub fn export_heatmap(w: &Matrix, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pgm(w)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGoodness {
    pub layer: usize,
    pub theta: f64,
    pub bin_width: f64,
    pub pos_counts: Vec<usize>,
    pub neg_counts: Vec<usize>,
    pub pos_goodness: Vec<f64>,
    pub neg_goodness: Vec<f64>,
    /// Fraction of positive samples with G > θ.
    pub pos_above: f64,
    /// Fraction of negative samples with G < θ.
    pub neg_below: f64,
}

/// Histograms of per-layer goodness over `[0, max G]` split by polarity.
pub fn goodness_report(
    net: &FFNetwork,
    samples: &[Sample],
    thresholds: &ThresholdStrategy,
    epoch: usize,
) -> Result<Vec<LayerGoodness>> {
    let depth = net.depth();
    let mut pos: Vec<Vec<f64>> = vec![Vec::new(); depth];
    let mut neg: Vec<Vec<f64>> = vec![Vec::new(); depth];
    for chunk in samples.chunks(256) {
        let rows: Vec<Vec<f64>> = chunk.iter().map(|s| s.features.clone()).collect();
        let acts = net.activations_batch(&Matrix::from_rows(&rows)?)?;
        for (l, a) in acts.iter().enumerate() {
            for (r, s) in chunk.iter().enumerate() {
                let g = goodness(a.row(r));
                match s.polarity {
                    Polarity::Positive => pos[l].push(g),
                    Polarity::Negative => neg[l].push(g),
                }
            }
        }
    }
    let mut out = Vec::with_capacity(depth);
    for (l, (p, n)) in pos.into_iter().zip(neg).enumerate() {
        let theta = thresholds.resolve(l, net.layers[l].out_dim(), epoch)?;
        let max = p.iter().chain(&n).copied().fold(0.0, f64::max);
        let bin_width = if max > 0.0 {
            max / HIST_BINS as f64
        } else {
            1.0
        };
        let hist = |gs: &[f64]| {
            let mut counts = vec![0usize; HIST_BINS];
            for &g in gs {
                let b = ((g / bin_width) as usize).min(HIST_BINS - 1);
                counts[b] += 1;
            }
            counts
        };
        let frac = |gs: &[f64], pred: &dyn Fn(f64) -> bool| {
            if gs.is_empty() {
                0.0
            } else {
                gs.iter().filter(|&&g| pred(g)).count() as f64 / gs.len() as f64
            }
        };
        out.push(LayerGoodness {
            layer: l,
            theta,
            bin_width,
            pos_counts: hist(&p),
            neg_counts: hist(&n),
            pos_above: frac(&p, &|g| g > theta),
            neg_below: frac(&n, &|g| g < theta),
            pos_goodness: p,
            neg_goodness: n,
        });
    }
    Ok(out)
}

pub fn histogram_csv(report: &[LayerGoodness]) -> String {
    let mut s = String::from("layer,bin_lo,bin_hi,pos_count,neg_count\n");
    for lg in report {
        for b in 0..HIST_BINS {
            let lo = b as f64 * lg.bin_width;
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                lg.layer,
                lo,
                lo + lg.bin_width,
                lg.pos_counts[b],
                lg.neg_counts[b]
            );
        }
    }
    s
}

pub fn separation_csv(report: &[LayerGoodness]) -> String {
    let mut s = String::from("layer,theta,pos_above_theta,neg_below_theta\n");
    for lg in report {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            lg.layer, lg.theta, lg.pos_above, lg.neg_below
        );
    }
    s
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 1.0);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    (d, kolmogorov_q(lambda))
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = f64::from(k);
        let term = sign * 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_zero_and_hand_matrix() {
        let z = WeightStats::of(&[0.0; 6]);
        assert_eq!((z.min, z.max, z.mean, z.var), (0.0, 0.0, 0.0, 0.0));
        let s = WeightStats::of(&[-1.0, 2.0, 0.0, 3.0]);
        assert_eq!((s.min, s.max, s.mean, s.var), (-1.0, 3.0, 1.0, 2.5));
    }

    #[test]
    fn heatmap_degenerate_and_endpoints() {
        let c = Matrix::from_vec(2, 3, vec![0.7; 6]).unwrap();
        assert_eq!(heatmap_bytes(&c), vec![128; 6]);
        let e = Matrix::from_vec(1, 2, vec![-3.0, 5.0]).unwrap();
        assert_eq!(heatmap_bytes(&e), vec![0, 255]);
    }

    #[test]
    fn pgm_round_trip_recovers_weights() {
        let data: Vec<f64> = (0..40)
            .map(|i| ((i * 37) % 23) as f64 * 0.3 - 2.0)
            .collect();
        let w = Matrix::from_vec(5, 8, data).unwrap();
        let bytes = encode_pgm(&w);
        assert!(bytes.starts_with(b"P5\n8 5\n255\n"));
        let pgm = decode_pgm(&bytes).unwrap();
        assert_eq!((pgm.width, pgm.height), (8, 5));
        let (lo, hi) = w.min_max().unwrap();
        let step = (hi - lo) / 255.0;
        for (&p, &v) in pgm.pixels.iter().zip(w.data()) {
            let back = lo + f64::from(p) * step;
            assert!((back - v).abs() <= step, "{back} vs {v}");
        }
        assert!(decode_pgm(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
    }

    #[test]
    fn ks_detects_shift_and_accepts_same() {
        let a: Vec<f64> = (0..200).map(f64::from).collect();
        let b: Vec<f64> = (100..300).map(f64::from).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!((d - 0.5).abs() < 1e-12);
        assert!(p < 1e-6);
        let (d0, p0) = ks_two_sample(&a, &a);
        assert_eq!(d0, 0.0);
        assert_eq!(p0, 1.0);
    }
}
