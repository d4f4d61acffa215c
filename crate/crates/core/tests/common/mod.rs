#![allow(clippy::needless_range_loop)]
//! Shared oracles: central finite differences and plain-loop reference
//! implementations, used by the behaviour tests and the acceptance suite.
#![allow(dead_code)]

use ff_core::baseline::{BPNetwork, DenseLayer};
use ff_core::data::text::SgnsModel;
use ff_core::ffnet::{goodness, ActivationKind, FFLayer, Polarity};
use ff_core::inference::ClassifierHead;
use ff_core::numerics::{Matrix, Rng};

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-4;
/// Absolute floor on the relative-error denominator so entries that are
/// zero up to rounding do not divide by noise.
pub const FD_FLOOR: f64 = 1e-6;

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FD_FLOOR)
}

/// Largest relative error between `analytic` and the central difference of
/// `loss` with respect to each entry of `params`.
pub fn fd_check(params: &mut [f64], analytic: &[f64], mut loss: impl FnMut(&[f64]) -> f64) -> f64 {
    assert_eq!(params.len(), analytic.len());
    let mut worst = 0.0f64;
    for i in 0..params.len() {
        let orig = params[i];
        params[i] = orig + FD_STEP;
        let up = loss(params);
        params[i] = orig - FD_STEP;
        let down = loss(params);
        params[i] = orig;
        let numeric = (up - down) / (2.0 * FD_STEP);
        worst = worst.max(rel_err(analytic[i], numeric));
    }
    worst
}

pub fn random_vec(n: usize, scale: f64, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_range(-scale, scale)).collect()
}

pub fn random_matrix(rows: usize, cols: usize, scale: f64, rng: &mut Rng) -> Matrix {
    Matrix::from_vec(rows, cols, random_vec(rows * cols, scale, rng)).unwrap()
}

/// Plain-loop layer forward: normalize, affine, activation.
pub fn loop_forward(w: &Matrix, b: &[f64], act: ActivationKind, x: &[f64]) -> Vec<f64> {
    let mut norm = 0.0;
    for v in x {
        norm += v * v;
    }
    let denom = norm.sqrt().max(1e-8);
    let mut out = Vec::with_capacity(w.rows());
    for i in 0..w.rows() {
        let mut z = b[i];
        for j in 0..w.cols() {
            z += w.get(i, j) * (x[j] / denom);
        }
        out.push(act.apply(z));
    }
    out
}

/// A layer with pre-activations kept away from activation kinks, paired
/// with an input and a threshold near its goodness so the loss is not
/// saturated. Returns `(layer, x, theta)`.
pub fn ff_case(act: ActivationKind, rng: &mut Rng) -> (FFLayer, Vec<f64>, f64) {
    loop {
        let in_dim = 2 + rng.below(7);
        let out_dim = 1 + rng.below(6);
        let w = random_matrix(out_dim, in_dim, 1.5, rng);
        let b = random_vec(out_dim, 0.5, rng);
        let x = random_vec(in_dim, 3.0, rng);
        let layer = FFLayer::from_parts(w, b, act, 0.01).unwrap();
        let (z, a) = layer.forward(&x).unwrap();
        if z.iter().any(|v| v.abs() < 1e-3) {
            continue;
        }
        let theta = goodness(&a) * rng.uniform_range(0.5, 1.5) + rng.uniform_range(-0.5, 0.5);
        return (layer, x, theta);
    }
}

/// Worst relative error over every weight and bias of one FF case.
pub fn ff_layer_fd(layer: &FFLayer, x: &[f64], pol: Polarity, theta: f64) -> f64 {
    let (dw, db, _) = layer.grads(x, pol, theta).unwrap();
    let mut probe = layer.clone();
    let mut w = layer.w.data().to_vec();
    let ew = fd_check(&mut w, dw.data(), |p| {
        probe.w.data_mut().copy_from_slice(p);
        probe.loss(x, pol, theta).unwrap()
    });
    let mut probe = layer.clone();
    let mut b = layer.b.clone();
    let eb = fd_check(&mut b, &db, |p| {
        probe.b.copy_from_slice(p);
        probe.loss(x, pol, theta).unwrap()
    });
    ew.max(eb)
}

/// 20 random cases for every activation and both polarities.
pub fn ff_gradient_suite(seed: u64) -> (usize, f64) {
    let mut rng = Rng::new(seed);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for act in ActivationKind::ALL_DEFAULT {
        for pol in [Polarity::Positive, Polarity::Negative] {
            for _ in 0..20 {
                let (layer, x, theta) = ff_case(act, &mut rng);
                worst = worst.max(ff_layer_fd(&layer, &x, pol, theta));
                cases += 1;
            }
        }
    }
    (cases, worst)
}

pub fn head_gradient_check(seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let (classes, width, n) = (4, 7, 5);
    let w = random_matrix(classes, width, 1.0, &mut rng);
    let b = random_vec(classes, 0.5, &mut rng);
    let head = ClassifierHead::from_parts(w, b, vec![0]).unwrap();
    let feats = random_matrix(n, width, 1.0, &mut rng);
    let labels: Vec<usize> = (0..n).map(|_| rng.below(classes)).collect();
    let (dw, db, _) = head.batch_grads(&feats, &labels).unwrap();
    let mut probe = head.clone();
    let mut wp = head.w.data().to_vec();
    let ew = fd_check(&mut wp, dw.data(), |p| {
        probe.w.data_mut().copy_from_slice(p);
        probe.batch_grads(&feats, &labels).unwrap().2
    });
    let mut probe = head.clone();
    let mut bp = head.b.clone();
    let eb = fd_check(&mut bp, &db, |p| {
        probe.b.copy_from_slice(p);
        probe.batch_grads(&feats, &labels).unwrap().2
    });
    ew.max(eb)
}

pub fn sgns_gradient_check(seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let (vocab, dim) = (8, 6);
    let model = SgnsModel {
        input: random_matrix(vocab, dim, 0.8, &mut rng),
        output: random_matrix(vocab, dim, 0.8, &mut rng),
    };
    let (center, context, negs) = (1, 3, [5usize, 6, 2]);
    let g = model.pair_grads(center, context, &negs);
    let mut worst = 0.0f64;

    let mut probe = model.clone();
    let mut v = model.input.row(center).to_vec();
    worst = worst.max(fd_check(&mut v, &g.center, |p| {
        probe.input.row_mut(center).copy_from_slice(p);
        probe.pair_loss(center, context, &negs)
    }));
    let mut probe = model.clone();
    let mut u = model.output.row(context).to_vec();
    worst = worst.max(fd_check(&mut u, &g.context, |p| {
        probe.output.row_mut(context).copy_from_slice(p);
        probe.pair_loss(center, context, &negs)
    }));
    for (k, &n) in negs.iter().enumerate() {
        let mut probe = model.clone();
        let mut u = model.output.row(n).to_vec();
        worst = worst.max(fd_check(&mut u, &g.negatives[k], |p| {
            probe.output.row_mut(n).copy_from_slice(p);
            probe.pair_loss(center, context, &negs)
        }));
    }
    worst
}

/// 6-4-3 baseline with a smooth activation, checked on every parameter.
pub fn bp_gradient_check(seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let mut worst = 0.0f64;
    for act in [
        ActivationKind::Tanh,
        ActivationKind::Gelu,
        ActivationKind::Sigmoid,
    ] {
        let hidden = DenseLayer::from_parts(
            random_matrix(4, 6, 0.8, &mut rng),
            random_vec(4, 0.3, &mut rng),
            0.0,
        )
        .unwrap();
        let out = DenseLayer::from_parts(
            random_matrix(3, 4, 0.8, &mut rng),
            random_vec(3, 0.3, &mut rng),
            0.0,
        )
        .unwrap();
        let net = BPNetwork::from_layers(vec![hidden], out, act).unwrap();
        let x = random_matrix(5, 6, 1.0, &mut rng);
        let labels: Vec<usize> = (0..5).map(|_| rng.below(3)).collect();
        let grads = net.batch_grads(&x, &labels).unwrap();
        for (li, (dw, db)) in grads.layers.iter().enumerate() {
            let set_w = |n: &mut BPNetwork, p: &[f64]| {
                let l = if li == 0 {
                    &mut n.hidden[0]
                } else {
                    &mut n.output
                };
                l.w.data_mut().copy_from_slice(p);
            };
            let set_b = |n: &mut BPNetwork, p: &[f64]| {
                let l = if li == 0 {
                    &mut n.hidden[0]
                } else {
                    &mut n.output
                };
                l.b.copy_from_slice(p);
            };
            let layer = if li == 0 { &net.hidden[0] } else { &net.output };
            let mut probe = net.clone();
            let mut wp = layer.w.data().to_vec();
            worst = worst.max(fd_check(&mut wp, dw.data(), |p| {
                set_w(&mut probe, p);
                probe.batch_grads(&x, &labels).unwrap().loss
            }));
            let mut probe = net.clone();
            let mut bp = layer.b.clone();
            worst = worst.max(fd_check(&mut bp, db, |p| {
                set_b(&mut probe, p);
                probe.batch_grads(&x, &labels).unwrap().loss
            }));
        }
    }
    worst
}

/// Root holding `mnist/` and `aclImdb/`; overridable with `FF_DATA_DIR`.
pub fn data_dir() -> std::path::PathBuf {
    std::env::var_os("FF_DATA_DIR")
        .map(Into::into)
        .unwrap_or_else(|| "/root/data".into())
}

/// A two-layer relu net trained on the blob task at θ = k·width, with its data.
pub fn trained_blob_net(
    seed: u64,
    epochs: usize,
    k: f64,
) -> (
    ff_core::ffnet::FFNetwork,
    ff_core::data::LabeledSet,
    ff_core::data::LabeledSet,
) {
    use ff_core::data::synthetic::BlobSpec;
    use ff_core::ffnet::FFNetwork;
    use ff_core::thresholds::ThresholdStrategy;
    let (train, test) = BlobSpec::default().generate(1000, 500, seed).unwrap();
    let mut rng = Rng::new(seed);
    let mut net = FFNetwork::new(
        train.input_dim(),
        &[64, 64],
        ActivationKind::Relu,
        0.01,
        &mut rng,
    )
    .unwrap();
    let th = ThresholdStrategy::constant(k);
    for e in 0..epochs {
        let s = train.training_stream(&mut rng).unwrap();
        net.train_epoch(&s, &th, e, 32, &mut rng).unwrap();
    }
    (net, train, test)
}
