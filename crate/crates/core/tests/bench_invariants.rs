//! Benchmark-level properties at a small scale.

use sketchnet::bench::{gen_synthetic, run_benchmark, run_cell, BenchSpec, Cell, Learner, Scheme, SynthConfig, Task, TrainConfig};

fn small() -> SynthConfig {
    SynthConfig { d: 400, k: 10, s: 12, n: 3_000, relevant_size: 12, per_example_relevant: 4, max_term_card: 1, min_term_card: 1, noise_sd: 0.1, seed: 5 }
}

fn train() -> TrainConfig {
    TrainConfig { hidden_units: 12, epochs: 10, ..TrainConfig::default() }
}

fn strip_runtime(csv: &[u8]) -> Vec<String> {
    String::from_utf8_lossy(csv).lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn rerun_gives_identical_csv_apart_from_runtime() {
    let spec = BenchSpec {
        seed: 9,
        replicates: 2,
        tasks: vec![Task { name: "lin".into(), synth: small() }],
        cells: vec![Cell::net(Scheme::Sketch { m: 30, t: 3 }), Cell::linear(Scheme::Raw), Cell::net(Scheme::Gaussian { dim: 40 })],
        train: train(),
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    run_benchmark(&spec, |_| {}).unwrap().write_csv(&mut a).unwrap();
    run_benchmark(&spec, |_| {}).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(strip_runtime(&a), strip_runtime(&b));
    assert_eq!(strip_runtime(&a).len(), 1 + 3 * 2 + 3);
}

#[test]
fn failed_cells_are_marked_and_the_run_continues() {
    let spec = BenchSpec {
        seed: 1,
        replicates: 1,
        tasks: vec![Task { name: "poly".into(), synth: small().polynomial(2, 2) }],
        cells: vec![Cell { scheme: Scheme::Gaussian { dim: 20 }, learner: Learner::Constructed }, Cell::linear(Scheme::Raw)],
        train: train(),
    };
    let report = run_benchmark(&spec, |_| {}).unwrap();
    assert!(report.rows[0].test_mse.is_nan() && report.rows[0].error.is_some());
    assert!(report.rows[1].test_mse.is_finite());
}

#[test]
fn constructed_net_is_no_worse_than_training() {
    let ds = gen_synthetic(&small()).unwrap();
    let scheme = Scheme::Sketch { m: 40, t: 4 };
    let (_, built) = run_cell(&ds, &Cell { scheme, learner: Learner::Constructed }, 3, &train()).unwrap();
    let (_, trained) = run_cell(&ds, &Cell::net(scheme), 3, &train()).unwrap();
    assert!(built <= trained + 0.01, "constructed {built}, trained {trained}");
}

#[test]
fn no_model_beats_the_noise_floor() {
    let cfg = SynthConfig { noise_sd: 0.3, ..small() };
    let ds = gen_synthetic(&cfg).unwrap();
    let floor = cfg.noise_sd * cfg.noise_sd;
    for cell in [Cell::net(Scheme::Raw), Cell::net(Scheme::Sketch { m: 40, t: 4 }), Cell { scheme: Scheme::Raw, learner: Learner::Constructed }] {
        let (_, test) = run_cell(&ds, &cell, 4, &train()).unwrap();
        assert!(test >= 0.8 * floor, "{}: {test} < 0.8 * {floor}", cell.label());
    }
}
