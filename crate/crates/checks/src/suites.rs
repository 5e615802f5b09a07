//! Named verification suites.
//!
//! Each suite exercises one contract of the core library against an
//! independent route (closed formulas, the reference evaluator, adjoint
//! probes, finite differences) and reports pass/fail with its worst
//! observed error. The transform suites take the filter bank as a value so
//! a deliberately corrupted bank demonstrates that the suites actually
//! detect faults.

use wtconv_core::analysis::{
    approx_millions, erf_map, flop_report, flops_depthwise, flops_wt_iwt, flops_wtconv_convs,
    measured_forward, measured_mac_count, WtMode,
};
use wtconv_core::conv::{depthwise_conv, depthwise_conv_transposed, DepthwiseKernel};
use wtconv_core::grad::{wtconv_backward, Mixer, PlainDepthwise};
use wtconv_core::tensor::Tensor4;
use wtconv_core::wavelet::{
    wt_cascade, wt_cascade_banked, wt_cascade_inverse, wt_cascade_inverse_banked, wt_forward,
    wt_forward_banked, wt_inverse, wt_inverse_banked, HaarFilterBank, SubbandQuad,
};
use wtconv_core::wtconv::{self, param_count, receptive_field, InitScheme, WtConvParams};

use crate::dense::DenseOperator;
use crate::reference::RefParams;

/// Result of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Worst error metric observed (0 when the suite checks exact values).
    pub worst: f64,
    pub detail: String,
}

impl SuiteOutcome {
    fn new(name: &'static str, passed: bool, cases: usize, worst: f64, detail: String) -> Self {
        SuiteOutcome { name, passed, cases, worst, detail }
    }
}

/// Knobs shared by the suites. `bank` is the transform filter bank the
/// wavelet suites run against; substituting a corrupted bank must flip them
/// to FAIL.
pub struct CheckConfig {
    pub bank: HaarFilterBank<f64>,
    /// Round-trip tensors for the reconstruction suite.
    pub reconstruction_cases: usize,
    /// Parameter draws for the dense-oracle suites.
    pub dense_draws: usize,
    /// Seeds for the finite-difference gradient suite.
    pub gradient_seeds: Vec<u64>,
    /// Parameter draws for the ERF inclusion check.
    pub erf_draws: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            bank: HaarFilterBank::haar(),
            reconstruction_cases: 100,
            dense_draws: 20,
            gradient_seeds: vec![1, 2, 3, 4, 5],
            erf_draws: 10,
        }
    }
}

fn rand_t(n: usize, c: usize, h: usize, w: usize, seed: u64) -> Tensor4<f64> {
    Tensor4::random_uniform(n, c, h, w, -1.0, 1.0, seed).unwrap()
}

/// Gram identity of the bank (exact) and cascade energy conservation
/// (relative 1e-10).
pub fn wavelet_orthonormality(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "wavelet.orthonormality";
    let gram = cfg.bank.gram();
    let mut worst = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - expect).abs());
        }
    }
    let gram_ok = worst == 0.0;

    let mut energy_worst = 0.0f64;
    let mut cases = 16;
    for i in 0..16u64 {
        let levels = 1 + (i % 3) as usize;
        let x = rand_t(1, 1 + (i % 3) as usize, 32, 32, 900 + i);
        let p = wt_cascade_banked(&x, levels, &cfg.bank).unwrap();
        let mut total: f64 = p.levels().last().unwrap().ll.data().iter().map(|v| v * v).sum();
        for quad in p.levels() {
            for band in [&quad.lh, &quad.hl, &quad.hh] {
                total += band.data().iter().map(|v| v * v).sum::<f64>();
            }
        }
        let input: f64 = x.data().iter().map(|v| v * v).sum();
        energy_worst = energy_worst.max((total - input).abs() / input);
    }
    cases += 16;
    let energy_ok = energy_worst < 1e-10;
    SuiteOutcome::new(
        name,
        gram_ok && energy_ok,
        cases,
        worst.max(energy_worst),
        format!(
            "gram deviation {worst:.1e} (limit exact), energy deviation {energy_worst:.1e} (limit 1e-10)"
        ),
    )
}

/// Cascade round trips: banked and fast paths in f64 (1e-12 absolute) and
/// the fast path in f32 (1e-5 of the input magnitude).
pub fn wavelet_reconstruction(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "wavelet.reconstruction";
    let mut worst64 = 0.0f64;
    let mut worst32 = 0.0f64;
    for i in 0..cfg.reconstruction_cases as u64 {
        let n = 1 + (i % 2) as usize;
        let c = 1 + (i % 4) as usize;
        let h = 8 * (1 + (i * 3 % 8) as usize);
        let w = 8 * (1 + (i * 5 % 8) as usize);
        let levels = 1 + (i % 3) as usize;
        let x = rand_t(n, c, h, w, 1000 + i);

        let banked = wt_cascade_inverse_banked(
            &wt_cascade_banked(&x, levels, &cfg.bank).unwrap(),
            &cfg.bank,
        )
        .unwrap();
        worst64 = worst64.max(x.max_abs_diff(&banked).unwrap());

        let fast = wt_cascade_inverse(&wt_cascade(&x, levels).unwrap()).unwrap();
        worst64 = worst64.max(x.max_abs_diff(&fast).unwrap());

        let x32 = x.cast::<f32>();
        let fast32 = wt_cascade_inverse(&wt_cascade(&x32, levels).unwrap()).unwrap();
        let err32 = x32.max_abs_diff(&fast32).unwrap() / x32.max_abs();
        worst32 = worst32.max(err32 as f64);
    }
    let passed = worst64 < 1e-12 && worst32 < 1e-5;
    SuiteOutcome::new(
        name,
        passed,
        cfg.reconstruction_cases * 3,
        worst64,
        format!("f64 worst {worst64:.1e} (limit 1e-12), f32 worst {worst32:.1e} (limit 1e-5)"),
    )
}

/// Inner-product adjoint probes for the transform pair, banked and fast.
pub fn wavelet_adjoint(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "wavelet.adjoint";
    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 0..12u64 {
        let c = 1 + (i % 3) as usize;
        let x = rand_t(1, c, 8, 8, 2000 + i);
        let q = SubbandQuad::new(
            rand_t(1, c, 4, 4, 2100 + i),
            rand_t(1, c, 4, 4, 2200 + i),
            rand_t(1, c, 4, 4, 2300 + i),
            rand_t(1, c, 4, 4, 2400 + i),
        )
        .unwrap();
        for banked in [false, true] {
            let fx = if banked {
                wt_forward_banked(&x, &cfg.bank).unwrap()
            } else {
                wt_forward(&x).unwrap()
            };
            let ix = if banked {
                wt_inverse_banked(&q, &cfg.bank).unwrap()
            } else {
                wt_inverse(&q).unwrap()
            };
            let lhs: f64 = fx
                .bands()
                .into_iter()
                .zip(q.bands())
                .map(|(a, b)| a.dot(b).unwrap())
                .sum();
            let rhs = x.dot(&ix).unwrap();
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            cases += 1;
        }
    }
    SuiteOutcome::new(
        name,
        worst < 1e-12,
        cases,
        worst,
        format!("probe deviation {worst:.1e} (limit 1e-12)"),
    )
}

/// The fast path must equal the bank-as-convolutions construction, and the
/// layer must not care which one runs.
pub fn wavelet_equivalence(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "wavelet.equivalence";
    let mut worst = 0.0f64;
    let mut cases = 0;
    for i in 0..8u64 {
        let x = rand_t(1, 1 + (i % 3) as usize, 16, 16, 3000 + i);
        let fast = wt_forward(&x).unwrap();
        let banked = wt_forward_banked(&x, &cfg.bank).unwrap();
        for (a, b) in fast.bands().into_iter().zip(banked.bands()) {
            worst = worst.max(a.max_abs_diff(b).unwrap());
        }
        worst = worst.max(
            wt_inverse(&fast)
                .unwrap()
                .max_abs_diff(&wt_inverse_banked(&banked, &cfg.bank).unwrap())
                .unwrap(),
        );
        cases += 1;
    }
    for i in 0..4u64 {
        let c = 1 + (i % 2) as usize;
        let x = rand_t(1, c, 16, 16, 3100 + i);
        let p = WtConvParams::init(c, 3, 2, 3200 + i, InitScheme::UniformFanIn).unwrap();
        let (fast, _) = measured_forward(&x, &p, WtMode::Fast).unwrap();
        let (naive, _) = measured_forward(&x, &p, WtMode::Naive).unwrap();
        worst = worst.max(fast.max_abs_diff(&naive).unwrap());
        cases += 1;
    }
    SuiteOutcome::new(
        name,
        worst < 1e-12,
        cases,
        worst,
        format!("path divergence {worst:.1e} (limit 1e-12)"),
    )
}

/// Adjoint probes for the convolution pair at exact-fit shapes.
pub fn conv_adjoint(_cfg: &CheckConfig) -> SuiteOutcome {
    let name = "conv.adjoint";
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, (stride, (h, w))) in [
        ((1usize, 1usize), (8usize, 8usize)),
        ((2, 2), (9, 9)),
        ((2, 1), (9, 8)),
        ((3, 2), (9, 9)),
    ]
    .into_iter()
    .enumerate()
    {
        let seed = 4000 + i as u64;
        let x = rand_t(1, 2, h, w, seed);
        let kernel = DepthwiseKernel::random_uniform(2, 3, 3, -1.0, 1.0, seed + 50).unwrap();
        let cx = depthwise_conv(&x, &kernel, stride, (0, 0)).unwrap();
        let (_, _, oh, ow) = cx.shape();
        let y = rand_t(1, 2, oh, ow, seed + 100);
        let ty = depthwise_conv_transposed(&y, &kernel, stride).unwrap();
        let lhs = cx.dot(&y).unwrap();
        let rhs = x.dot(&ty).unwrap();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        cases += 1;
    }
    SuiteOutcome::new(
        name,
        worst < 1e-12,
        cases,
        worst,
        format!("probe deviation {worst:.1e} (limit 1e-12)"),
    )
}

fn draw_config(i: u64) -> (usize, usize, usize, usize, usize) {
    let c = 1 + (i % 4) as usize;
    let levels = (i % 3) as usize;
    let k = [1usize, 3, 5][(i % 3) as usize];
    let h = [8usize, 12, 16][(i % 3) as usize];
    let w = [16usize, 8, 12][((i / 3) % 3) as usize];
    (c, k, levels, h, w)
}

/// The production forward pass against the basis-probed dense matrix of the
/// reference evaluator.
pub fn layer_dense_oracle(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "layer.dense-oracle";
    let mut worst = 0.0f64;
    for i in 0..cfg.dense_draws as u64 {
        let (c, k, levels, h, w) = draw_config(i);
        let p = WtConvParams::init(c, k, levels, 5000 + i, InitScheme::UniformFanIn).unwrap();
        let dense = DenseOperator::build(&RefParams::from_params(&p), h, w);
        let x = rand_t(1, c, h, w, 5100 + i);
        let y = wtconv::forward(&x, &p).unwrap();
        let oracle = dense.apply(x.data());
        let err = y
            .data()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(err);
    }
    SuiteOutcome::new(
        name,
        worst < 1e-10,
        cfg.dense_draws,
        worst,
        format!("max |layer - dense| {worst:.1e} (limit 1e-10)"),
    )
}

/// Full finite-difference gradient check at the stated instance
/// (1x2x16x16, levels 2, kernel 3): every parameter coordinate and every
/// input coordinate, central differences at eps = 1e-5.
pub fn grad_finite_difference(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "grad.finite-difference";
    let eps = 1e-5;
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for &seed in &cfg.gradient_seeds {
        let x = rand_t(1, 2, 16, 16, seed);
        let p = WtConvParams::init(2, 3, 2, seed + 1000, InitScheme::UniformFanIn).unwrap();
        let d_out = rand_t(1, 2, 16, 16, seed + 2000);
        let g = wtconv_backward(&x, &p, &d_out).unwrap();
        let loss = |params: &WtConvParams<f64>, input: &Tensor4<f64>| {
            wtconv::forward(input, params).unwrap().dot(&d_out).unwrap()
        };

        let mut record = |analytic: f64, plus: f64, minus: f64| {
            let fd = (plus - minus) / (2.0 * eps);
            worst = worst.max((analytic - fd).abs() / analytic.abs().max(1e-8));
            cases += 1;
        };

        macro_rules! sweep {
            ($get:expr, $coords:expr, $apply:expr) => {
                for idx in 0..$coords {
                    let mut up = p.clone();
                    let mut down = p.clone();
                    $apply(&mut up, idx, eps);
                    $apply(&mut down, idx, -eps);
                    record($get(idx), loss(&up, &x), loss(&down, &x));
                }
            };
        }

        sweep!(
            |i| g.d_w0.weights()[i],
            p.base_kernel().weights().len(),
            |q: &mut WtConvParams<f64>, i: usize, d: f64| {
                let mut kernel = q.base_kernel().clone();
                kernel.weights_mut()[i] += d;
                *q = WtConvParams::new(
                    q.channels(),
                    q.kernel_extent(),
                    q.levels(),
                    kernel,
                    q.level_kernels().to_vec(),
                    q.base_scale().clone(),
                    q.level_scales().to_vec(),
                )
                .unwrap();
            }
        );
        for lvl in 0..p.levels() {
            sweep!(
                |i| g.d_w_levels[lvl].weights()[i],
                p.level_kernels()[lvl].weights().len(),
                |q: &mut WtConvParams<f64>, i: usize, d: f64| {
                    let mut kernels = q.level_kernels().to_vec();
                    kernels[lvl].weights_mut()[i] += d;
                    *q = WtConvParams::new(
                        q.channels(),
                        q.kernel_extent(),
                        q.levels(),
                        q.base_kernel().clone(),
                        kernels,
                        q.base_scale().clone(),
                        q.level_scales().to_vec(),
                    )
                    .unwrap();
                }
            );
            sweep!(
                |i| g.d_scale_levels[lvl].values()[i],
                p.level_scales()[lvl].values().len(),
                |q: &mut WtConvParams<f64>, i: usize, d: f64| {
                    let mut scales = q.level_scales().to_vec();
                    scales[lvl].values_mut()[i] += d;
                    *q = WtConvParams::new(
                        q.channels(),
                        q.kernel_extent(),
                        q.levels(),
                        q.base_kernel().clone(),
                        q.level_kernels().to_vec(),
                        q.base_scale().clone(),
                        scales,
                    )
                    .unwrap();
                }
            );
        }
        sweep!(
            |i| g.d_scale0.values()[i],
            p.base_scale().values().len(),
            |q: &mut WtConvParams<f64>, i: usize, d: f64| {
                let mut scale = q.base_scale().clone();
                scale.values_mut()[i] += d;
                *q = WtConvParams::new(
                    q.channels(),
                    q.kernel_extent(),
                    q.levels(),
                    q.base_kernel().clone(),
                    q.level_kernels().to_vec(),
                    scale,
                    q.level_scales().to_vec(),
                )
                .unwrap();
            }
        );
        for i in 0..x.len() {
            let mut up = x.clone();
            up.data_mut()[i] += eps;
            let mut down = x.clone();
            down.data_mut()[i] -= eps;
            record(g.d_input.data()[i], loss(&p, &up), loss(&p, &down));
        }
    }
    SuiteOutcome::new(
        name,
        worst < 1e-6,
        cases,
        worst,
        format!("max relative error {worst:.1e} (limit 1e-6)"),
    )
}

/// The backward input gradient against the dense operator's transpose.
pub fn grad_dense_adjoint(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "grad.dense-adjoint";
    let mut worst = 0.0f64;
    let draws = cfg.dense_draws.min(8);
    for i in 0..draws as u64 {
        let (c, k, levels, h, w) = draw_config(i);
        let p = WtConvParams::init(c, k, levels, 6000 + i, InitScheme::UniformFanIn).unwrap();
        let dense = DenseOperator::build(&RefParams::from_params(&p), h, w);
        let x = rand_t(1, c, h, w, 6100 + i);
        let d_out = rand_t(1, c, h, w, 6200 + i);
        let g = wtconv_backward(&x, &p, &d_out).unwrap();
        let oracle = dense.apply_transpose(d_out.data());
        let err = g
            .d_input
            .data()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(err);
    }
    SuiteOutcome::new(
        name,
        worst < 1e-10,
        draws,
        worst,
        format!("max |backward - dense^T| {worst:.1e} (limit 1e-10)"),
    )
}

/// The published cost-model integers, their renderings, and structural
/// identities of the report.
pub fn analysis_flops(_cfg: &CheckConfig) -> SuiteOutcome {
    let name = "analysis.flops";
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    check(flops_depthwise(1, 7, 7, 512, 512, 1, 1) == 12_845_056, "7x7 depthwise");
    check(flops_depthwise(1, 31, 31, 512, 512, 1, 1) == 251_920_384, "31x31 depthwise");
    check(flops_wtconv_convs(1, 5, 512, 512, 3) == 15_155_200, "3-level conv set");
    let (wt, iwt) = flops_wt_iwt(1, 512, 512, 3);
    check(wt == 1_376_256 && wt + iwt == 2_752_512, "transform cost");
    let report = flop_report(1, 5, 512, 512, 3);
    check(report.total == 17_907_712, "total");
    check(approx_millions(12_845_056) == "12.8M", "12.8M rendering");
    check(approx_millions(251_920_384) == "252M", "252M rendering");
    check(approx_millions(15_155_200) == "15.1M", "15.1M rendering");
    check(approx_millions(2_752_512) == "2.8M", "2.8M rendering");
    check(approx_millions(17_907_712) == "17.9M", "17.9M rendering");
    check(
        report.base_conv_flops() + report.per_level.iter().sum::<u64>() == report.conv_flops,
        "per-level itemization",
    );
    check(
        flops_wtconv_convs(1, 7, 512, 512, 0) == flops_depthwise(1, 7, 7, 512, 512, 1, 1),
        "zero-level reduction",
    );
    check(
        flops_wtconv_convs(2, 5, 512, 512, 3) == 2 * flops_wtconv_convs(1, 5, 512, 512, 3),
        "channel linearity",
    );
    let passed = failures.is_empty();
    SuiteOutcome::new(
        name,
        passed,
        13,
        0.0,
        if passed {
            "all published values reproduced exactly".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

/// Instrumented MAC counts against the formulas.
pub fn analysis_macs(_cfg: &CheckConfig) -> SuiteOutcome {
    let name = "analysis.macs";
    let mut failures = Vec::new();
    for (c, k, levels, h, w) in [(1usize, 5usize, 0usize, 64usize, 64usize), (3, 3, 2, 32, 32), (1, 3, 3, 8, 8)] {
        let x = rand_t(1, c, h, w, 7000 + c as u64);
        let p = WtConvParams::init(c, k, levels, 7100, InitScheme::UniformFanIn).unwrap();
        let conv_formula = flops_wtconv_convs(c as u64, k as u64, w as u64, h as u64, levels as u32);
        let (wt_formula, iwt_formula) =
            flops_wt_iwt(c as u64, w as u64, h as u64, levels as u32);

        let naive = measured_mac_count(&x, &p, WtMode::Naive).unwrap();
        if naive.conv != conv_formula {
            failures.push(format!("naive conv {} != {}", naive.conv, conv_formula));
        }
        if naive.wt != wt_formula || naive.iwt != iwt_formula {
            failures.push(format!("naive transforms {}/{}", naive.wt, naive.iwt));
        }
        let fast = measured_mac_count(&x, &p, WtMode::Fast).unwrap();
        if fast.conv != conv_formula {
            failures.push(format!("fast conv {} != {}", fast.conv, conv_formula));
        }
        if fast.wt > naive.wt || fast.iwt > naive.iwt {
            failures.push("fast path exceeded naive cost".into());
        }
    }
    let passed = failures.is_empty();
    SuiteOutcome::new(
        name,
        passed,
        3,
        0.0,
        if passed {
            "conv MACs equal the formulas; fast transforms undercut naive".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

/// Impulse support, the closed receptive-field values, and ERF support
/// inclusion over parameter draws.
pub fn layer_receptive_field(cfg: &CheckConfig) -> SuiteOutcome {
    let name = "layer.receptive-field";
    let mut failures = Vec::new();

    let p = WtConvParams::<f64>::init(1, 5, 3, 7500, InitScheme::UniformFanIn).unwrap();
    if receptive_field(&p) != 40 {
        failures.push("receptive_field(k=5, levels=3) != 40".into());
    }
    let (h, w) = (128usize, 128usize);
    let mut impulse = Tensor4::zeros(1, 1, h, w).unwrap();
    impulse.set(0, 0, h / 2, w / 2, 1.0);
    let response = wtconv::forward(&impulse, &p).unwrap();
    let mut beyond_plain = false;
    for y in 0..h {
        for x in 0..w {
            let dist = (y as isize - (h / 2) as isize)
                .abs()
                .max((x as isize - (w / 2) as isize).abs()) as usize;
            let v = response.get(0, 0, y, x);
            if dist > 40 && v != 0.0 {
                failures.push(format!("response outside the 80x80 bound at ({y}, {x})"));
            }
            if dist > 5 && v != 0.0 {
                beyond_plain = true;
            }
        }
    }
    if !beyond_plain {
        failures.push("impulse support did not exceed the 5x5 window".into());
    }

    let mut cases = 2;
    for i in 0..cfg.erf_draws as u64 {
        let plain = PlainDepthwise::<f64>::init(1, 5, 7600 + i, InitScheme::UniformFanIn).unwrap();
        let layer = WtConvParams::<f64>::init(1, 5, 3, 7700 + i, InitScheme::UniformFanIn).unwrap();
        let images = vec![rand_t(1, 1, 128, 128, 7800 + i)];
        let plain_map = erf_map(&[&plain as &dyn Mixer<f64>], &images).unwrap();
        let layer_map = erf_map(&[&layer as &dyn Mixer<f64>], &images).unwrap();
        let mut strict = false;
        'outer: for y in 0..128 {
            for x in 0..128 {
                if plain_map.get(y, x) > 0.0 && layer_map.get(y, x) == 0.0 {
                    failures.push(format!("draw {i}: ERF lost plain support at ({y}, {x})"));
                    break 'outer;
                }
                if plain_map.get(y, x) == 0.0 && layer_map.get(y, x) > 0.0 {
                    strict = true;
                }
            }
        }
        if !strict {
            failures.push(format!("draw {i}: ERF support not strictly larger"));
        }
        cases += 1;
    }

    let passed = failures.is_empty();
    SuiteOutcome::new(
        name,
        passed,
        cases,
        0.0,
        if passed {
            format!(
                "support within the 80x80 bound, beyond 5x5, ERF inclusion on {} draws",
                cfg.erf_draws
            )
        } else {
            format!("failed: {}", failures.join("; "))
        },
    )
}

/// Level-kernel term, linear total growth, exponential receptive field.
pub fn layer_param_scaling(_cfg: &CheckConfig) -> SuiteOutcome {
    let name = "layer.param-scaling";
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in [1usize, 3, 8] {
        for k in [3usize, 5, 7] {
            let mut previous_total = None;
            let mut step = None;
            for levels in 0..=5usize {
                let p = WtConvParams::<f64>::init(c, k, levels, 0, InitScheme::Zeros).unwrap();
                let count = param_count(&p);
                let expect_level = (levels * 4 * c * k * k) as u64;
                if count.level_kernels != expect_level {
                    failures.push(format!(
                        "c={c} k={k} levels={levels}: level term {} != {expect_level}",
                        count.level_kernels
                    ));
                }
                if receptive_field(&p) != ((1u64 << levels) * k as u64) {
                    failures.push(format!("c={c} k={k} levels={levels}: receptive field"));
                }
                if let Some(prev) = previous_total {
                    let diff = count.total() - prev;
                    match step {
                        None => step = Some(diff),
                        Some(s) if s != diff => {
                            failures.push(format!("c={c} k={k}: total growth not linear"))
                        }
                        _ => {}
                    }
                }
                previous_total = Some(count.total());
                cases += 1;
            }
        }
    }
    let passed = failures.is_empty();
    SuiteOutcome::new(
        name,
        passed,
        cases,
        0.0,
        if passed {
            "level term exact, total linear in levels, receptive field doubles per level".into()
        } else {
            format!("failed: {}", failures.join("; "))
        },
    )
}

/// Every suite, in a stable order.
pub fn run_all(cfg: &CheckConfig) -> Vec<SuiteOutcome> {
    vec![
        wavelet_orthonormality(cfg),
        wavelet_reconstruction(cfg),
        wavelet_adjoint(cfg),
        wavelet_equivalence(cfg),
        conv_adjoint(cfg),
        layer_dense_oracle(cfg),
        layer_receptive_field(cfg),
        layer_param_scaling(cfg),
        grad_finite_difference(cfg),
        grad_dense_adjoint(cfg),
        analysis_flops(cfg),
        analysis_macs(cfg),
    ]
}

/// Run one suite by name.
pub fn run_suite(name: &str, cfg: &CheckConfig) -> Option<SuiteOutcome> {
    match name {
        "wavelet.orthonormality" => Some(wavelet_orthonormality(cfg)),
        "wavelet.reconstruction" => Some(wavelet_reconstruction(cfg)),
        "wavelet.adjoint" => Some(wavelet_adjoint(cfg)),
        "wavelet.equivalence" => Some(wavelet_equivalence(cfg)),
        "conv.adjoint" => Some(conv_adjoint(cfg)),
        "layer.dense-oracle" => Some(layer_dense_oracle(cfg)),
        "layer.receptive-field" => Some(layer_receptive_field(cfg)),
        "layer.param-scaling" => Some(layer_param_scaling(cfg)),
        "grad.finite-difference" => Some(grad_finite_difference(cfg)),
        "grad.dense-adjoint" => Some(grad_dense_adjoint(cfg)),
        "analysis.flops" => Some(analysis_flops(cfg)),
        "analysis.macs" => Some(analysis_macs(cfg)),
        _ => None,
    }
}

/// Suite names in [`run_all`] order (the `check` command's filter keys).
pub fn suite_names() -> Vec<&'static str> {
    vec![
        "wavelet.orthonormality",
        "wavelet.reconstruction",
        "wavelet.adjoint",
        "wavelet.equivalence",
        "conv.adjoint",
        "layer.dense-oracle",
        "layer.receptive-field",
        "layer.param-scaling",
        "grad.finite-difference",
        "grad.dense-adjoint",
        "analysis.flops",
        "analysis.macs",
    ]
}
