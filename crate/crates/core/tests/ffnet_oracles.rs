#![allow(clippy::needless_range_loop)]
mod common;

use common::*;
use ff_core::data::synthetic::BlobSpec;
use ff_core::ffnet::{goodness, ActivationKind, FFLayer, FFNetwork, Polarity, Sample};
use ff_core::numerics::{softplus, Matrix, Rng};
use ff_core::thresholds::ThresholdStrategy;
use proptest::prelude::*;

#[test]
fn layer_forward_matches_plain_loops() {
    let mut rng = Rng::new(1);
    for act in ActivationKind::ALL_DEFAULT {
        let w = random_matrix(2, 3, 1.0, &mut rng);
        let b = random_vec(2, 0.5, &mut rng);
        let x = random_vec(3, 2.0, &mut rng);
        let layer = FFLayer::from_parts(w.clone(), b.clone(), act, 0.0).unwrap();
        let (_, a) = layer.forward(&x).unwrap();
        let want = loop_forward(&w, &b, act, &x);
        for (p, q) in a.iter().zip(&want) {
            assert!((p - q).abs() < 1e-14, "{act}: {p} vs {q}");
        }
    }
}

#[test]
fn goodness_of_wide_vector_matches_loop() {
    let mut rng = Rng::new(2);
    let a = random_vec(2000, 3.0, &mut rng);
    let mut want = 0.0;
    for v in &a {
        want += v * v;
    }
    assert!((goodness(&a) - want).abs() <= 1e-12 * want);
}

#[test]
fn two_layer_forward_is_a_composition() {
    let mut rng = Rng::new(3);
    let net = FFNetwork::new(5, &[4, 3], ActivationKind::Relu, 0.01, &mut rng).unwrap();
    let x = random_vec(5, 1.0, &mut rng);
    let out = net.forward(&x).unwrap();
    let (_, a0) = net.layers[0].forward(&x).unwrap();
    let (_, a1) = net.layers[1].forward(&a0).unwrap();
    assert_eq!(out[0].1, a0);
    assert_eq!(out[1].1, a1);
}

#[test]
fn scaled_input_leaves_first_layer_unchanged() {
    let mut rng = Rng::new(4);
    let net = FFNetwork::new(8, &[6, 6], ActivationKind::Gelu, 0.01, &mut rng).unwrap();
    let x = random_vec(8, 1.0, &mut rng);
    let x10: Vec<f64> = x.iter().map(|v| v * 10.0).collect();
    let a = &net.forward(&x).unwrap()[0].1;
    let b = &net.forward(&x10).unwrap()[0].1;
    for (p, q) in a.iter().zip(b) {
        assert!((p - q).abs() < 1e-12);
    }
}

struct LoopLayer {
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
    mw: Vec<Vec<f64>>,
    vw: Vec<Vec<f64>>,
    mb: Vec<f64>,
    vb: Vec<f64>,
}

fn adam_scalar(p: &mut f64, g: f64, m: &mut f64, v: &mut f64, t: i32, lr: f64) {
    *m = 0.9 * *m + 0.1 * g;
    *v = 0.999 * *v + 0.001 * g * g;
    let mh = *m / (1.0 - 0.9f64.powi(t));
    let vh = *v / (1.0 - 0.999f64.powi(t));
    *p -= lr * mh / (vh.sqrt() + 1e-8);
}

/// Straight-line relu epoch: per batch, every layer computes its own loss
/// gradient with scalar loops and takes one Adam step.
fn loop_epoch(
    layers: &mut [LoopLayer],
    samples: &[Sample],
    order: &[usize],
    thetas: &[f64],
    batch: usize,
    lr: f64,
    t: &mut i32,
) -> Vec<f64> {
    let mut losses = vec![0.0; layers.len()];
    for chunk in order.chunks(batch) {
        *t += 1;
        let mut inputs: Vec<Vec<f64>> =
            chunk.iter().map(|&i| samples[i].features.clone()).collect();
        for (li, layer) in layers.iter_mut().enumerate() {
            let (out, inp) = (layer.w.len(), layer.w[0].len());
            let mut gw = vec![vec![0.0; inp]; out];
            let mut gb = vec![0.0; out];
            let mut next = Vec::new();
            for (k, &i) in chunk.iter().enumerate() {
                let x = &inputs[k];
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-8);
                let xh: Vec<f64> = x.iter().map(|v| v / norm).collect();
                let mut z = vec![0.0; out];
                let mut a = vec![0.0; out];
                for r in 0..out {
                    z[r] = layer.b[r];
                    for c in 0..inp {
                        z[r] += layer.w[r][c] * xh[c];
                    }
                    a[r] = z[r].max(0.0);
                }
                let g: f64 = a.iter().map(|v| v * v).sum();
                let s = if samples[i].polarity == Polarity::Positive {
                    1.0
                } else {
                    -1.0
                };
                let u = s * (thetas[li] - g);
                losses[li] += softplus(u);
                let dg = -s / (1.0 + (-u).exp());
                for r in 0..out {
                    let dz = if z[r] > 0.0 { dg * 2.0 * a[r] } else { 0.0 };
                    for c in 0..inp {
                        gw[r][c] += dz * xh[c] / chunk.len() as f64;
                    }
                    gb[r] += dz / chunk.len() as f64;
                }
                next.push(a);
            }
            for r in 0..out {
                for c in 0..inp {
                    adam_scalar(
                        &mut layer.w[r][c],
                        gw[r][c],
                        &mut layer.mw[r][c],
                        &mut layer.vw[r][c],
                        *t,
                        lr,
                    );
                }
                adam_scalar(
                    &mut layer.b[r],
                    gb[r],
                    &mut layer.mb[r],
                    &mut layer.vb[r],
                    *t,
                    lr,
                );
            }
            inputs = next;
        }
    }
    losses.iter().map(|l| l / samples.len() as f64).collect()
}

#[test]
fn epoch_matches_straight_line_reference() {
    let (train, _) = BlobSpec::default().generate(10, 1, 3).unwrap();
    let mut rng = Rng::new(8);
    let samples = train.training_stream(&mut rng).unwrap();
    assert_eq!(samples.len(), 20);
    let mut net = FFNetwork::new(
        train.input_dim(),
        &[5, 4],
        ActivationKind::Relu,
        0.01,
        &mut Rng::new(9),
    )
    .unwrap();
    let mut reference: Vec<LoopLayer> = net
        .layers
        .iter()
        .map(|l| {
            let rows: Vec<Vec<f64>> = l.w.row_iter().map(<[f64]>::to_vec).collect();
            LoopLayer {
                mw: vec![vec![0.0; l.in_dim()]; l.out_dim()],
                vw: vec![vec![0.0; l.in_dim()]; l.out_dim()],
                mb: vec![0.0; l.out_dim()],
                vb: vec![0.0; l.out_dim()],
                w: rows,
                b: l.b.clone(),
            }
        })
        .collect();
    let th = ThresholdStrategy::constant(0.5);
    let thetas = [2.5, 2.0];
    let mut t = 0;
    for epoch in 0..3 {
        let mut epoch_rng = Rng::new(100 + epoch as u64);
        let order = epoch_rng.clone().permutation(samples.len());
        let m = net
            .train_epoch(&samples, &th, epoch, 6, &mut epoch_rng)
            .unwrap();
        let want = loop_epoch(&mut reference, &samples, &order, &thetas, 6, 0.01, &mut t);
        for (l, w) in m.layers.iter().zip(&want) {
            assert!(
                (l.mean_loss - w).abs() <= 1e-10 * w.abs().max(1.0),
                "{} vs {w}",
                l.mean_loss
            );
        }
    }
    for (layer, r) in net.layers.iter().zip(&reference) {
        for (i, row) in r.w.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((layer.w.get(i, j) - v).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn zero_learning_rate_leaves_weights_bit_identical() {
    let (train, _) = BlobSpec::default().generate(40, 1, 1).unwrap();
    let mut rng = Rng::new(0);
    let mut net = FFNetwork::new(
        train.input_dim(),
        &[8, 8],
        ActivationKind::Relu,
        0.0,
        &mut rng,
    )
    .unwrap();
    let before = net.clone();
    let s = train.training_stream(&mut rng).unwrap();
    net.train_epoch(&s, &ThresholdStrategy::constant(1.0), 0, 16, &mut rng)
        .unwrap();
    for (a, b) in net.layers.iter().zip(&before.layers) {
        assert_eq!(a.w, b.w);
        assert_eq!(a.b, b.b);
    }
}

#[test]
fn layer_updates_do_not_depend_on_later_layers() {
    let (train, _) = BlobSpec::default().generate(60, 1, 2).unwrap();
    let samples = train.training_stream(&mut Rng::new(1)).unwrap();
    let deep = FFNetwork::new(
        train.input_dim(),
        &[7, 5, 3],
        ActivationKind::Relu,
        0.01,
        &mut Rng::new(4),
    )
    .unwrap();
    let mut shallow = FFNetwork::from_layers(deep.layers[..1].to_vec()).unwrap();
    let mut deep = deep;
    let th = ThresholdStrategy::constant(0.7);
    for epoch in 0..2 {
        deep.train_epoch(&samples, &th, epoch, 16, &mut Rng::new(epoch as u64))
            .unwrap();
        shallow
            .train_epoch(&samples, &th, epoch, 16, &mut Rng::new(epoch as u64))
            .unwrap();
    }
    assert_eq!(deep.layers[0].w, shallow.layers[0].w);
    assert_eq!(deep.layers[0].b, shallow.layers[0].b);
}

#[test]
fn goodness_separates_during_synthetic_training() {
    let (train, _) = BlobSpec::default().generate(1000, 1, 5).unwrap();
    let mut rng = Rng::new(5);
    let mut net = FFNetwork::new(
        train.input_dim(),
        &[64, 64],
        ActivationKind::Relu,
        0.01,
        &mut rng,
    )
    .unwrap();
    // Initial goodness sits near theta, so both polarities carry gradient.
    let th = ThresholdStrategy::constant(0.05);
    let mut history = Vec::new();
    for epoch in 0..5 {
        let s = train.training_stream(&mut rng).unwrap();
        history.push(net.train_epoch(&s, &th, epoch, 32, &mut rng).unwrap());
    }
    for l in 0..2 {
        let (first, last) = (&history[0].layers[l], &history[4].layers[l]);
        assert!(
            last.mean_g_pos > first.mean_g_pos,
            "layer {l} positive goodness"
        );
        assert!(
            last.mean_g_neg < first.mean_g_neg,
            "layer {l} negative goodness"
        );
    }
}

proptest! {
    #[test]
    fn layer_output_is_scale_invariant(seed in any::<u64>(), c in prop::sample::select(vec![1e-3, 1.0, 1e3])) {
        let mut rng = Rng::new(seed);
        let layer = FFLayer::new(6, 5, ActivationKind::Relu, 0.0, &mut rng);
        let x = random_vec(6, 2.0, &mut rng);
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let xc: Vec<f64> = x.iter().map(|v| v * c).collect();
        let (_, a) = layer.forward(&x).unwrap();
        let (_, b) = layer.forward(&xc).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn bounded_activations_bound_goodness(seed in any::<u64>(), scale in 0.1f64..100.0) {
        let mut rng = Rng::new(seed);
        for act in [ActivationKind::Sigmoid, ActivationKind::Tanh] {
            let w = random_matrix(9, 4, scale, &mut rng);
            let layer = FFLayer::from_parts(w, random_vec(9, scale, &mut rng), act, 0.0).unwrap();
            let (_, a) = layer.forward(&random_vec(4, 5.0, &mut rng)).unwrap();
            prop_assert!(goodness(&a) <= 9.0);
        }
    }

    #[test]
    fn batched_forward_equals_per_sample(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let layer = FFLayer::new(7, 4, ActivationKind::Gelu, 0.0, &mut rng);
        let rows: Vec<Vec<f64>> = (0..5).map(|_| random_vec(7, 1.0, &mut rng)).collect();
        let batch = layer.forward_batch(&Matrix::from_rows(&rows).unwrap()).unwrap();
        for (r, x) in rows.iter().enumerate() {
            let (_, a) = layer.forward(x).unwrap();
            prop_assert_eq!(batch.a.row(r), a.as_slice());
        }
    }
}
