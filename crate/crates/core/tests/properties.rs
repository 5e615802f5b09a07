//! Property tests over randomized shapes, seeds, and parameters.

use proptest::prelude::*;

use wtconv_core::conv::{depthwise_conv, depthwise_conv_transposed, DepthwiseKernel};
use wtconv_core::tensor::Tensor4;
use wtconv_core::wavelet::{wt_cascade, wt_cascade_inverse, wt_forward};
use wtconv_core::wtconv::{self, InitScheme, WtConvParams};

fn dyadic_extent() -> impl Strategy<Value = usize> {
    (1usize..=6).prop_map(|m| 8 * m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indexing_round_trips(
        n in 1usize..=2,
        c in 1usize..=3,
        h in 1usize..=9,
        w in 1usize..=9,
        value in -1e6f64..1e6,
    ) {
        let mut t = Tensor4::zeros(n, c, h, w).unwrap();
        let (pn, pc, py, px) = (n - 1, c / 2, h / 2, w / 2);
        t.set(pn, pc, py, px, value);
        prop_assert_eq!(t.get(pn, pc, py, px), value);
        prop_assert_eq!(
            t.data().iter().filter(|&&v| v != 0.0).count(),
            usize::from(value != 0.0)
        );
    }

    #[test]
    fn add_commutes_and_norm_scales(
        seed_a in 0u64..1000,
        seed_b in 1000u64..2000,
        s in -8.0f64..8.0,
    ) {
        let a = Tensor4::<f64>::random_uniform(1, 2, 8, 8, -1.0, 1.0, seed_a).unwrap();
        let b = Tensor4::<f64>::random_uniform(1, 2, 8, 8, -1.0, 1.0, seed_b).unwrap();
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());

        let norm = a.l2_norm();
        let scaled = a.scalar_mul(s).l2_norm();
        prop_assert!((scaled - s.abs() * norm).abs() <= 1e-12 * norm.max(1.0));
    }

    #[test]
    fn cascade_reconstructs_and_conserves_energy(
        n in 1usize..=2,
        c in 1usize..=3,
        h in dyadic_extent(),
        w in dyadic_extent(),
        levels in 1usize..=3,
        seed in 0u64..10_000,
    ) {
        let x = Tensor4::<f64>::random_uniform(n, c, h, w, -1.0, 1.0, seed).unwrap();
        let pyramid = wt_cascade(&x, levels).unwrap();
        prop_assert_eq!(pyramid.depth(), levels);

        let back = wt_cascade_inverse(&pyramid).unwrap();
        prop_assert!(x.max_abs_diff(&back).unwrap() < 1e-12);

        let mut energy: f64 = pyramid.levels().last().unwrap().ll.data().iter().map(|v| v * v).sum();
        for quad in pyramid.levels() {
            for band in [&quad.lh, &quad.hl, &quad.hh] {
                energy += band.data().iter().map(|v| v * v).sum::<f64>();
            }
        }
        let input: f64 = x.data().iter().map(|v| v * v).sum();
        prop_assert!((energy - input).abs() <= 1e-10 * input.max(1e-12));
    }

    #[test]
    fn conv_and_transposed_conv_are_adjoint(
        c in 1usize..=3,
        k in 1usize..=3,
        s in 1usize..=2,
        m in 2usize..=5,
        seed in 0u64..10_000,
    ) {
        // exact-fit input extent for the stride
        let h = (m - 1) * s + k;
        let x = Tensor4::<f64>::random_uniform(1, c, h, h, -1.0, 1.0, seed).unwrap();
        let kernel = DepthwiseKernel::random_uniform(c, k, k, -1.0, 1.0, seed + 1).unwrap();
        let cx = depthwise_conv(&x, &kernel, (s, s), (0, 0)).unwrap();
        let (_, _, oh, ow) = cx.shape();
        let y = Tensor4::random_uniform(1, c, oh, ow, -1.0, 1.0, seed + 2).unwrap();
        let ty = depthwise_conv_transposed(&y, &kernel, (s, s)).unwrap();
        let lhs = cx.dot(&y).unwrap();
        let rhs = x.dot(&ty).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn layer_preserves_shape_and_linearity(
        c in 1usize..=3,
        levels in 0usize..=2,
        seed in 0u64..10_000,
    ) {
        let p = WtConvParams::<f64>::init(c, 3, levels, seed, InitScheme::UniformFanIn).unwrap();
        let x = Tensor4::random_uniform(1, c, 16, 16, -1.0, 1.0, seed + 1).unwrap();
        let y = Tensor4::random_uniform(1, c, 16, 16, -1.0, 1.0, seed + 2).unwrap();

        let fx = wtconv::forward(&x, &p).unwrap();
        prop_assert_eq!(fx.shape(), x.shape());

        let (a, b) = (0.75, -1.25);
        let lhs = wtconv::forward(&x.scalar_mul(a).add(&y.scalar_mul(b)).unwrap(), &p).unwrap();
        let rhs = fx
            .scalar_mul(a)
            .add(&wtconv::forward(&y, &p).unwrap().scalar_mul(b))
            .unwrap();
        let scale = rhs.max_abs().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() / scale < 1e-12);
    }

    #[test]
    fn wavelet_forward_is_linear_in_the_input(
        a in -4.0f64..4.0,
        b in -4.0f64..4.0,
        seed in 0u64..10_000,
    ) {
        let x = Tensor4::<f64>::random_uniform(1, 2, 16, 16, -1.0, 1.0, seed).unwrap();
        let y = Tensor4::<f64>::random_uniform(1, 2, 16, 16, -1.0, 1.0, seed + 7).unwrap();
        let combo = wt_forward(&x.scalar_mul(a).add(&y.scalar_mul(b)).unwrap()).unwrap();
        let qx = wt_forward(&x).unwrap();
        let qy = wt_forward(&y).unwrap();
        for ((cb, bx), by) in combo.bands().into_iter().zip(qx.bands()).zip(qy.bands()) {
            let expect = bx.scalar_mul(a).add(&by.scalar_mul(b)).unwrap();
            prop_assert!(cb.max_abs_diff(&expect).unwrap() < 1e-12);
        }
    }
}
