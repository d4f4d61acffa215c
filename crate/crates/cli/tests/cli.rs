use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ff-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn ff-lab")
}

fn small_train(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "train",
        "--dataset",
        "synthetic",
        "--seed",
        "7",
        "--epochs",
        "3",
        "--arch",
        "16,16",
        "--k",
        "0.05",
        "--batch-size",
        "32",
        "--set",
        "data.synthetic_train=300",
        "--set",
        "data.synthetic_test=100",
        "-q",
        "--output",
    ];
    let out = out.to_str().unwrap();
    args.push(out);
    args.extend_from_slice(extra);
    run(&args)
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn identical_runs_produce_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = small_train(d, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "metrics.csv",
        "model.ffn",
        "eval.csv",
        "weights.csv",
        "layer0.pgm",
    ] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f} differs");
    }
    let metrics = String::from_utf8(read(&a.join("metrics.csv"))).unwrap();
    assert_eq!(
        metrics.lines().next().unwrap(),
        "epoch,layer,mean_loss,mean_G_pos,mean_G_neg,theta,train_err,test_err,seconds"
    );
    assert_eq!(metrics.lines().count(), 1 + 3 * 2);
}

#[test]
fn resolved_config_is_echoed_and_reusable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(small_train(&out, &[]).status.success());
    let echo = String::from_utf8(read(&out.join("config.resolved.txt"))).unwrap();
    assert!(echo.contains("threshold.k = 0.05"));
    assert!(echo.contains("seed = 7"));
    let again = dir.path().join("again");
    let o = run(&[
        "train",
        "--config",
        out.join("config.resolved.txt").to_str().unwrap(),
        "--output",
        again.to_str().unwrap(),
        "-q",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(&out.join("metrics.csv")),
        read(&again.join("metrics.csv"))
    );
}

#[test]
fn config_errors_exit_with_one_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(
        &cfg,
        "dataset = synthetic\nseed = 1\nthreshold.k = banana\n",
    )
    .unwrap();
    let o = run(&["train", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("line 3") && err.contains("threshold.k"),
        "{err}"
    );

    std::fs::write(&cfg, "dataset = synthetic\nseed = 1\nthreshold.q = 1\n").unwrap();
    assert_eq!(
        run(&["train", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let o = run(&["train", "--dataset", "synthetic"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn missing_data_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "train",
        "--dataset",
        "mnist",
        "--seed",
        "1",
        "--set",
        &format!("data.mnist_dir={}", dir.path().join("nowhere").display()),
        "--output",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_writes_one_run_per_value_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = run(&[
        "sweep",
        "--dataset",
        "synthetic",
        "--seed",
        "3",
        "--epochs",
        "2",
        "--arch",
        "8,8",
        "--set",
        "data.synthetic_train=200",
        "--set",
        "data.synthetic_test=50",
        "--sweep",
        "k=0.005,0.5,10",
        "-q",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for v in ["0.005", "0.5", "10"] {
        assert!(out
            .join(format!("threshold.k={v}"))
            .join("metrics.csv")
            .is_file());
    }
    let summary = String::from_utf8(read(&out.join("summary.csv"))).unwrap();
    assert_eq!(summary.lines().count(), 4, "{summary}");
}

#[test]
fn analyze_and_eval_read_a_saved_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(small_train(&out, &[]).status.success());
    let ckpt = out.join("model.ffn");

    let an = dir.path().join("an");
    let o = run(&[
        "analyze",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--out",
        an.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(&an.join("weights.csv")),
        read(&out.join("weights.csv"))
    );
    assert_eq!(read(&an.join("layer0.pgm")), read(&out.join("layer0.pgm")));

    for mode in ["head", "sweep"] {
        let o = run(&[
            "eval",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--mode",
            mode,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("test error"));
    }
    let o = run(&[
        "eval",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--mode",
        "vote",
    ]);
    assert_eq!(o.status.code(), Some(1));

    std::fs::write(dir.path().join("junk.ffn"), b"FFN1\x01").unwrap();
    let o = run(&[
        "analyze",
        "--checkpoint",
        dir.path().join("junk.ffn").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
