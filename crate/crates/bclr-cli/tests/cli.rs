//! End-to-end checks of the `bclr` binary: exit codes, JSON schema, and
//! numerical parity with direct library calls under the same seed.

use bclr_core::rng::{domains, stream_id};
use bclr_core::{
    embed_tabular_series, gen_exp_images, gen_mixed, run_gibbs, stack, ChangepointPosterior,
    EmbeddingSpec, GaussianPrior, GibbsConfig, KappaPrior, RngStream,
};
use std::path::Path;
use std::process::{Command, Output};

fn bclr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bclr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write_csv(path: &Path, rows: &nalgebra::DMatrix<f64>) {
    let mut w = csv::Writer::from_path(path).unwrap();
    for i in 0..rows.nrows() {
        w.write_record(rows.row(i).iter().map(|v| format!("{v}")))
            .unwrap();
    }
    w.flush().unwrap();
}

#[test]
fn fit_matches_library_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("mixed.csv");
    let mut data_rng = RngStream::new(123, stream_id(domains::DATA, 0, 0));
    let (rows, _) = gen_mixed(&mut data_rng);
    write_csv(&csv_path, &rows);

    let out = bclr(&[
        "fit",
        csv_path.to_str().unwrap(),
        "--embed",
        "identity",
        "--iters",
        "900",
        "--burn-in",
        "450",
        "--seed",
        "77",
    ]);
    let report = json_stdout(&out);
    assert_eq!(report["schema"], "bclr/1");
    assert_eq!(report["n"], 600);
    assert_eq!(report["d"], 5);

    // Library path with an identical stream must reproduce the pmf bit for
    // bit; this doubles as a cross-process determinism check.
    let x = embed_tabular_series(&rows, &EmbeddingSpec::identity()).unwrap();
    let prior = GaussianPrior::isotropic(5, 1.0 / 3.0).unwrap();
    let kappa_prior = KappaPrior::uniform(600).unwrap();
    let mut rng = RngStream::new(77, stream_id(domains::CHAIN, 0, 0));
    let samples = run_gibbs(
        &x,
        &prior,
        &kappa_prior,
        &GibbsConfig::new(900, 450).unwrap(),
        &mut rng,
    )
    .unwrap();
    let posterior = ChangepointPosterior::from_draws(samples.kappa_draws(), 1, 599).unwrap();

    let pmf: Vec<f64> = report["posterior"]["pmf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(pmf.len(), 599);
    for (cli, lib) in pmf.iter().zip(posterior.pmf()) {
        assert_eq!(cli, lib);
    }
    assert_eq!(report["mode"].as_u64().unwrap() as usize, posterior.mode());
}

#[test]
fn simulate_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = bclr(&[
        "simulate",
        "exp1",
        "--reps",
        "1",
        "--seed",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["true_changepoints"][0], 25);

    let stack_path = dir.path().join("rep000.stack");
    let frames = stack::read_stack_file(&stack_path).unwrap();
    assert_eq!(frames.len(), 50);

    // The written stack must equal the generator output bit for bit.
    let mut rng = RngStream::new(5, stream_id(domains::DATA, 0, 0));
    let (direct, _) = gen_exp_images(1, &mut rng);
    for (a, b) in frames.iter().zip(&direct) {
        assert_eq!(a.pixels(), b.pixels());
    }

    let out = bclr(&[
        "fit",
        stack_path.to_str().unwrap(),
        "--iters",
        "600",
        "--burn-in",
        "300",
        "--seed",
        "5",
        "--draws-csv",
        dir.path().join("draws.csv").to_str().unwrap(),
    ]);
    let report = json_stdout(&out);
    assert_eq!(report["d"], 36);
    let mode = report["mode"].as_u64().unwrap();
    assert!(
        (20..=30).contains(&mode),
        "mode {mode} far from the planted changepoint"
    );

    let draws = std::fs::read_to_string(dir.path().join("draws.csv")).unwrap();
    let mut lines = draws.lines();
    assert!(lines.next().unwrap().starts_with("kappa,beta_0"));
    assert_eq!(lines.count(), 300);
}

#[test]
fn multi_subcommand_reports_changepoints() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("multi.csv");
    let mut data_rng = RngStream::new(321, stream_id(domains::DATA, 0, 0));
    let (rows, _) = bclr_core::gen_multi3(&mut data_rng);
    write_csv(&csv_path, &rows);

    let out = bclr(&[
        "multi",
        csv_path.to_str().unwrap(),
        "--embed",
        "poly2",
        "--iters",
        "1500",
        "--burn-in",
        "750",
        "--warm-iters",
        "400",
        "--seed",
        "321",
    ]);
    let report = json_stdout(&out);
    assert_eq!(report["schema"], "bclr/1");
    assert_eq!(report["d"], 9);
    let cps: Vec<u64> = report["changepoints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(!cps.is_empty());
    assert!(cps.windows(2).all(|w| w[1] >= w[0] + 10));
    // The large mean shift at 175 is the easiest change; it must be found.
    assert!(
        cps.iter().any(|k| (170..=180).contains(k)),
        "changepoints {cps:?} miss the mean shift at 175"
    );
    let reports = report["reports"].as_array().unwrap();
    assert_eq!(reports.len(), cps.len());
    for r in reports {
        assert!(r["entropy"].as_f64().unwrap() < 1.0);
    }
}

#[test]
fn binomial_kappa_prior_flag() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("series.csv");
    // Deterministic wiggle with a jump after row 40.
    let rows = nalgebra::DMatrix::from_fn(50, 2, |i, j| {
        ((i * 7 + j * 3) % 11) as f64 * 0.1 + if i >= 40 { 3.0 } else { 0.0 }
    });
    write_csv(&csv_path, &rows);

    let out = bclr(&[
        "fit",
        csv_path.to_str().unwrap(),
        "--kappa-prior",
        "binomial:p=0.8",
        "--iters",
        "600",
        "--burn-in",
        "300",
        "--seed",
        "55",
    ]);
    let report = json_stdout(&out);
    assert_eq!(report["mode"], 40);

    let out = bclr(&[
        "fit",
        csv_path.to_str().unwrap(),
        "--kappa-prior",
        "geometric",
    ]);
    assert!(!out.status.success());
}

#[test]
fn malformed_input_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b\n1,2\nx,y\n").unwrap();
    let out = bclr(&["fit", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("error"), "stderr: {msg}");

    let out = bclr(&["bench", "nonsense", "--reps", "1"]);
    assert!(!out.status.success());
}

#[test]
fn bench_emits_metrics_json() {
    let out = bclr(&[
        "bench",
        "mixed",
        "--reps",
        "2",
        "--seed",
        "2",
        "--iters",
        "600",
        "--burn-in",
        "300",
    ]);
    let report = json_stdout(&out);
    assert_eq!(report["schema"], "bclr/1");
    assert_eq!(report["scenario"], "mixed");
    let metrics = &report["metrics"];
    assert!(metrics["pct_exact"].is_number());
    assert!(metrics["rmse0"].is_number());
    assert_eq!(metrics["coverage"].as_array().unwrap().len(), 5);
}
