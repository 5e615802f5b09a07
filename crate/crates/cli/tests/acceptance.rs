//! Acceptance suite: one test per acceptance criterion, each printing a
//! pass line and enforcing its stated tolerance and runtime budget.
//! Run with `cargo test -p wtconv-cli --test acceptance -- --nocapture`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use wtconv_checks::{suites, CheckConfig};
use wtconv_core::analysis::{approx_millions, flops_depthwise, flops_wt_iwt, flops_wtconv_convs};
use wtconv_core::grad::PlainDepthwise;
use wtconv_core::toytrain::{
    generate_dataset, train, DatasetSpec, TaskKind, ToyModel, TrainOptions,
};
use wtconv_core::wtconv::{receptive_field, InitScheme, WtConvParams};

// the training criterion allocates large short-lived tensors every batch
#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wtconv"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn report(number: u32, name: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {number} ({name}): PASS in {elapsed:.2}s (budget {budget_s}s)");
    assert!(
        elapsed < budget_s,
        "criterion {number} exceeded its {budget_s}s budget: {elapsed:.2}s"
    );
}

#[test]
fn criterion_1_flop_reproduction() {
    let started = Instant::now();

    // exact integers from the cost model
    assert_eq!(flops_depthwise(1, 7, 7, 512, 512, 1, 1), 12_845_056);
    assert_eq!(flops_depthwise(1, 31, 31, 512, 512, 1, 1), 251_920_384);
    assert_eq!(flops_wtconv_convs(1, 5, 512, 512, 3), 15_155_200);
    let (wt, iwt) = flops_wt_iwt(1, 512, 512, 3);
    assert_eq!(wt + iwt, 2_752_512);
    assert_eq!(flops_wtconv_convs(1, 5, 512, 512, 3) + wt + iwt, 17_907_712);

    // rounded renderings match the published forms
    assert_eq!(approx_millions(12_845_056), "12.8M");
    assert_eq!(approx_millions(251_920_384), "252M");
    assert_eq!(approx_millions(15_155_200), "15.1M");
    assert_eq!(approx_millions(2_752_512), "2.8M");
    assert_eq!(approx_millions(17_907_712), "17.9M");

    // and the command surface prints both
    let out = bin()
        .args(["flops", "--kernel", "5", "--size", "512", "--levels", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for needle in ["15155200", "(15.1M)", "2752512", "(2.8M)", "17907712", "(17.9M)"] {
        assert!(text.contains(needle), "flops output missing {needle}: {text}");
    }
    for (args, needles) in [
        (["flops", "--kernel", "7", "--size", "512"], ["12845056", "(12.8M)"]),
        (["flops", "--kernel", "31", "--size", "512"], ["251920384", "(252M)"]),
    ] {
        let out = bin().args(args).output().unwrap();
        assert!(out.status.success());
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        for needle in needles {
            assert!(text.contains(needle), "flops output missing {needle}: {text}");
        }
    }

    report(1, "flop reproduction", started, 1.0);
}

#[test]
fn criterion_2_perfect_reconstruction() {
    let started = Instant::now();
    let cfg = CheckConfig { reconstruction_cases: 100, ..CheckConfig::default() };
    let outcome = suites::wavelet_reconstruction(&cfg);
    assert!(outcome.passed, "{}", outcome.detail);
    report(2, "perfect reconstruction", started, 10.0);
}

#[test]
fn criterion_3_orthonormality_and_parseval() {
    let started = Instant::now();
    let outcome = suites::wavelet_orthonormality(&CheckConfig::default());
    assert!(outcome.passed, "{}", outcome.detail);
    report(3, "orthonormality and energy conservation", started, 30.0);
}

#[test]
fn criterion_4_dense_oracle_equivalence() {
    let started = Instant::now();
    let cfg = CheckConfig { dense_draws: 20, ..CheckConfig::default() };
    let outcome = suites::layer_dense_oracle(&cfg);
    assert!(outcome.passed, "{}", outcome.detail);
    assert_eq!(outcome.cases, 20);
    report(4, "dense-oracle equivalence", started, 60.0);
}

#[test]
fn criterion_5_gradient_correctness() {
    let started = Instant::now();
    let cfg = CheckConfig { gradient_seeds: vec![1, 2, 3, 4, 5], ..CheckConfig::default() };
    let fd = suites::grad_finite_difference(&cfg);
    assert!(fd.passed, "{}", fd.detail);
    let adjoint = suites::grad_dense_adjoint(&cfg);
    assert!(adjoint.passed, "{}", adjoint.detail);
    report(5, "gradient correctness", started, 120.0);
}

#[test]
fn criterion_6_receptive_field_growth() {
    let started = Instant::now();
    let p = WtConvParams::<f64>::init(1, 5, 3, 0, InitScheme::Zeros).unwrap();
    assert_eq!(receptive_field(&p), 40, "receptive_field(k=5, levels=3)");
    let cfg = CheckConfig { erf_draws: 10, ..CheckConfig::default() };
    let outcome = suites::layer_receptive_field(&cfg);
    assert!(outcome.passed, "{}", outcome.detail);
    report(6, "receptive-field growth", started, 120.0);
}

#[test]
fn criterion_7_parameter_scaling() {
    let started = Instant::now();
    let outcome = suites::layer_param_scaling(&CheckConfig::default());
    assert!(outcome.passed, "{}", outcome.detail);
    report(7, "parameter scaling", started, 30.0);
}

fn dataset(task: TaskKind, count: usize, size: usize, noise: f64, seed: u64) -> wtconv_core::toytrain::FreqDataset<f64> {
    generate_dataset(&DatasetSpec { task, count, h: size, w: size, noise, seed }).unwrap()
}

#[test]
fn criterion_8_toy_training() {
    let started = Instant::now();

    // (a) the separable task at the stated configuration
    let train_set = dataset(TaskKind::FreqSeparable, 512, 64, 0.02, 32);
    let test_set = dataset(TaskKind::FreqSeparable, 256, 64, 0.02, 33);
    let mixer = WtConvParams::<f64>::init(4, 3, 2, 10, InitScheme::UniformFanIn).unwrap();
    let mut model = ToyModel::new(Box::new(mixer), 11);
    let log = train(
        &mut model,
        &train_set,
        &test_set,
        &TrainOptions { epochs: 30, lr: 0.05, batch: 32, shuffle_seed: 13 },
    )
    .unwrap();
    let final_acc = log.epochs.last().unwrap().test_acc;
    println!("  (a) separable task test accuracy: {final_acc}");
    assert!(final_acc >= 0.95, "separable-task accuracy {final_acc} < 0.95");

    // (b) the long-wavelength variant: mean gap over five paired seeds
    let mut wavelet_accs = Vec::new();
    let mut plain_accs = Vec::new();
    for seed in [1u64, 2, 3, 4, 5] {
        let train_set = dataset(TaskKind::LongWavelength, 256, 32, 0.05, seed * 10 + 2);
        let test_set = dataset(TaskKind::LongWavelength, 128, 32, 0.05, seed * 10 + 3);
        let opts = TrainOptions { epochs: 60, lr: 1.0, batch: 32, shuffle_seed: seed * 10 + 3 };

        let mixer = WtConvParams::<f64>::init(4, 3, 2, seed * 10, InitScheme::UniformFanIn).unwrap();
        let mut model = ToyModel::new(Box::new(mixer), seed * 10 + 1);
        let log = train(&mut model, &train_set, &test_set, &opts).unwrap();
        wavelet_accs.push(log.epochs.last().unwrap().test_acc);

        let mixer = PlainDepthwise::<f64>::init(4, 3, seed * 10, InitScheme::UniformFanIn).unwrap();
        let mut model = ToyModel::new(Box::new(mixer), seed * 10 + 1);
        let log = train(&mut model, &train_set, &test_set, &opts).unwrap();
        plain_accs.push(log.epochs.last().unwrap().test_acc);
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (wavelet_mean, plain_mean) = (mean(&wavelet_accs), mean(&plain_accs));
    println!(
        "  (b) long-wavelength mean accuracy: wavelet {wavelet_mean:.4} {wavelet_accs:?} vs plain {plain_mean:.4} {plain_accs:?}"
    );
    assert!(
        wavelet_mean - plain_mean >= 0.05,
        "mean accuracy gap {:.4} < 0.05",
        wavelet_mean - plain_mean
    );

    report(8, "toy training", started, 600.0);
}

#[test]
fn criterion_9_cli_determinism() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let write_cfg = |name: &str, body: &str| -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        path
    };

    // forward: same config + input twice
    let fwd_cfg = write_cfg(
        "fwd.cfg",
        "[layer]\nchannels = 2\nkernel = 3\nlevels = 2\nseed = 7\ninit = uniform-fan-in\nprecision = f64\n",
    );
    let mut forward_runs = Vec::new();
    for run in 0..2 {
        let out_path = dir.path().join(format!("fwd_{run}.f64t"));
        let out = bin()
            .args(["forward", "--config"])
            .arg(&fwd_cfg)
            .arg("--input")
            .arg(data("forward_input.f64t"))
            .arg("--output")
            .arg(&out_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
        forward_runs.push(fs::read(out_path).unwrap());
    }
    assert_eq!(forward_runs[0], forward_runs[1], "forward artifacts differ across reruns");

    // erf: pgm + csv twice
    let mut erf_runs = Vec::new();
    for run in 0..2 {
        let pgm = dir.path().join(format!("erf_{run}.pgm"));
        let csv = dir.path().join(format!("erf_{run}.csv"));
        let cfg = write_cfg(
            &format!("erf_{run}.cfg"),
            &format!(
                "[layer]\nchannels = 1\nkernel = 3\nlevels = 2\nseed = 5\ninit = uniform-fan-in\nprecision = f64\n\n\
                 [erf]\nimages = 2\nimage-size = 32\nimage-seed = 9\n\n\
                 [output]\npgm = {}\ncsv = {}\n",
                pgm.display(),
                csv.display()
            ),
        );
        let out = bin().args(["erf", "--config"]).arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{out:?}");
        erf_runs.push((fs::read(pgm).unwrap(), fs::read(csv).unwrap()));
    }
    assert_eq!(erf_runs[0], erf_runs[1], "erf artifacts differ across reruns");

    // train: csv log + checkpoint twice
    let mut train_runs = Vec::new();
    for run in 0..2 {
        let log = dir.path().join(format!("train_{run}.csv"));
        let ckpt = dir.path().join(format!("train_{run}.bin"));
        let cfg = write_cfg(
            &format!("train_{run}.cfg"),
            &format!(
                "[layer]\nchannels = 2\nkernel = 3\nlevels = 1\nseed = 3\ninit = uniform-fan-in\nprecision = f64\n\n\
                 [model]\nmixer = wtconv\nhead-seed = 4\n\n\
                 [data]\ntask = freq-separable\ntrain = 16\ntest = 8\nsize = 16\nnoise = 0.02\nseed = 5\n\n\
                 [train]\nepochs = 3\nlr = 0.05\nbatch = 8\nshuffle-seed = 6\n\n\
                 [output]\nlog = {}\ncheckpoint = {}\n",
                log.display(),
                ckpt.display()
            ),
        );
        let out = bin().args(["train", "--config"]).arg(&cfg).output().unwrap();
        assert!(out.status.success(), "{out:?}");
        train_runs.push((fs::read(log).unwrap(), fs::read(ckpt).unwrap()));
    }
    assert_eq!(train_runs[0], train_runs[1], "train artifacts differ across reruns");

    // flops: stdout is the artifact
    let a = bin().args(["flops", "--kernel", "5", "--size", "512", "--levels", "3"]).output().unwrap();
    let b = bin().args(["flops", "--kernel", "5", "--size", "512", "--levels", "3"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);

    report(9, "CLI determinism", started, 120.0);
}
