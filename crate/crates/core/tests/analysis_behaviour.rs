mod common;

use common::{random_matrix, trained_blob_net};
use ff_core::analysis::{decode_pgm, encode_pgm, goodness_report, ks_two_sample, HIST_BINS};
use ff_core::checkpoint::save_ff;
use ff_core::data::synthetic::BlobSpec;
use ff_core::experiment::analyze_checkpoint;
use ff_core::ffnet::{ActivationKind, FFNetwork};
use ff_core::numerics::Rng;
use ff_core::thresholds::ThresholdStrategy;
use proptest::prelude::*;

#[test]
fn untrained_net_does_not_separate_polarities() {
    let (train, _) = BlobSpec::default().generate(1000, 1, 31).unwrap();
    let mut rng = Rng::new(32);
    let net = FFNetwork::new(
        train.input_dim(),
        &[64, 64],
        ActivationKind::Relu,
        0.01,
        &mut rng,
    )
    .unwrap();
    let stream = train.training_stream(&mut rng).unwrap();
    let report = goodness_report(&net, &stream, &ThresholdStrategy::constant(0.05), 0).unwrap();
    for lg in &report {
        let (d, p) = ks_two_sample(&lg.pos_goodness, &lg.neg_goodness);
        assert!(p > 0.01, "layer {}: D {d} p {p}", lg.layer);
    }
}

#[test]
fn trained_toy_net_separates_training_data() {
    let (net, train, _) = trained_blob_net(33, 20, 0.05);
    let stream = train.training_stream(&mut Rng::new(34)).unwrap();
    let report = goodness_report(&net, &stream, &ThresholdStrategy::constant(0.05), 19).unwrap();
    let first = &report[0];
    assert!(
        first.pos_above > 0.9,
        "positives above theta {}",
        first.pos_above
    );
    assert!(
        first.neg_below > 0.9,
        "negatives below theta {}",
        first.neg_below
    );
}

#[test]
fn analysing_a_checkpoint_twice_is_bit_identical() {
    let (net, _, _) = trained_blob_net(35, 1, 0.05);
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("model.ffn");
    save_ff(&ckpt, &net, None).unwrap();
    let a = analyze_checkpoint(&ckpt, &dir.path().join("a")).unwrap();
    let b = analyze_checkpoint(&ckpt, &dir.path().join("b")).unwrap();
    assert_eq!(a, b);
    for name in ["weights.csv", "layer0.pgm", "layer1.pgm"] {
        let x = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn histogram_counts_sum_to_sample_count(seed in any::<u64>(), n in 1usize..120) {
        let (train, _) = BlobSpec::default().generate(n, 1, seed).unwrap();
        let mut rng = Rng::new(seed);
        let net = FFNetwork::new(train.input_dim(), &[7, 5], ActivationKind::Relu, 0.0, &mut rng).unwrap();
        let stream = train.training_stream(&mut rng).unwrap();
        for lg in goodness_report(&net, &stream, &ThresholdStrategy::constant(1.0), 0).unwrap() {
            prop_assert_eq!(lg.pos_counts.len(), HIST_BINS);
            prop_assert_eq!(lg.pos_counts.iter().sum::<usize>(), n);
            prop_assert_eq!(lg.neg_counts.iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn heatmap_inverts_within_one_quantization_step(seed in any::<u64>(), r in 1usize..12, c in 1usize..12, scale in 1e-3f64..1e3) {
        let w = random_matrix(r, c, scale, &mut Rng::new(seed));
        let pgm = decode_pgm(&encode_pgm(&w)).unwrap();
        prop_assert_eq!((pgm.width, pgm.height), (c, r));
        let (lo, hi) = w.min_max().unwrap();
        let step = (hi - lo) / 255.0;
        for (&px, &v) in pgm.pixels.iter().zip(w.data()) {
            let back = lo + f64::from(px) * step;
            prop_assert!((back - v).abs() <= step * (1.0 + 1e-9));
        }
    }
}
