//! The wavelet-domain depth-wise convolution layer.
//!
//! Forward pass: a base `k x k` depth-wise convolution on the raw input,
//! plus, per cascade level, a depth-wise convolution over the four packed
//! subbands of that level. Level outputs are merged on the way back up by
//! adding each deeper reconstruction into the current level's low-pass band
//! before inverting, which sums all levels' contributions by linearity of
//! the inverse transform. Every convolution is stride 1 with same-size zero
//! padding, every scale is per-channel, and there is no bias and no
//! nonlinearity: the layer is exactly linear in its input and preserves the
//! input shape, so it drops in wherever a stride-1 depth-wise convolution
//! would sit.
//!
//! Subband packing order is `LL, LH, HL, HH`, each block `c` channels wide;
//! the per-level kernels and scales are laid out in that channel order.

use std::io::{Read, Write};

use crate::conv::{channel_scale, depthwise_conv, ChannelScale, DepthwiseKernel};
use crate::error::{Error, Result};
use crate::rng::Rng64;
use crate::tensor::{Element, Tensor4};
use crate::wavelet::{
    max_levels, wt_forward, wt_forward_banked, wt_inverse, wt_inverse_banked, HaarFilterBank,
    SubbandQuad,
};

/// How [`WtConvParams::init`] fills the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    /// Kernel weights uniform over `(-1/k, +1/k)` (fan-in of a `k x k`
    /// depth-wise tap), scales one.
    UniformFanIn,
    /// Kernels zero, scales one.
    Zeros,
}

/// All trainable state of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct WtConvParams<T: Element> {
    pub(crate) c: usize,
    pub(crate) k: usize,
    pub(crate) levels: usize,
    pub(crate) w0: DepthwiseKernel<T>,
    pub(crate) w_levels: Vec<DepthwiseKernel<T>>,
    pub(crate) scale0: ChannelScale<T>,
    pub(crate) scale_levels: Vec<ChannelScale<T>>,
}

impl<T: Element> WtConvParams<T> {
    pub fn new(
        c: usize,
        k: usize,
        levels: usize,
        w0: DepthwiseKernel<T>,
        w_levels: Vec<DepthwiseKernel<T>>,
        scale0: ChannelScale<T>,
        scale_levels: Vec<ChannelScale<T>>,
    ) -> Result<Self> {
        let p = WtConvParams { c, k, levels, w0, w_levels, scale0, scale_levels };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return Err(Error::Param("channel count must be >= 1".into()));
        }
        if self.k.is_multiple_of(2) {
            return Err(Error::Param(format!(
                "kernel extent must be odd for same-size padding, got {}",
                self.k
            )));
        }
        if self.w0.channels() != self.c || self.w0.extents() != (self.k, self.k) {
            return Err(Error::Shape(format!(
                "base kernel is {}x{:?}, expected {}x({}, {})",
                self.w0.channels(),
                self.w0.extents(),
                self.c,
                self.k,
                self.k
            )));
        }
        if self.w_levels.len() != self.levels || self.scale_levels.len() != self.levels {
            return Err(Error::Shape(format!(
                "expected {} level kernels and scales, got {} and {}",
                self.levels,
                self.w_levels.len(),
                self.scale_levels.len()
            )));
        }
        for (i, w) in self.w_levels.iter().enumerate() {
            if w.channels() != 4 * self.c || w.extents() != (self.k, self.k) {
                return Err(Error::Shape(format!(
                    "level {} kernel is {}x{:?}, expected {}x({}, {})",
                    i + 1,
                    w.channels(),
                    w.extents(),
                    4 * self.c,
                    self.k,
                    self.k
                )));
            }
        }
        if self.scale0.channels() != self.c {
            return Err(Error::Shape(format!(
                "base scale covers {} channels, expected {}",
                self.scale0.channels(),
                self.c
            )));
        }
        for (i, s) in self.scale_levels.iter().enumerate() {
            if s.channels() != 4 * self.c {
                return Err(Error::Shape(format!(
                    "level {} scale covers {} channels, expected {}",
                    i + 1,
                    s.channels(),
                    4 * self.c
                )));
            }
        }
        let finite = self
            .w0
            .weights()
            .iter()
            .chain(self.w_levels.iter().flat_map(|w| w.weights()))
            .chain(self.scale0.values())
            .chain(self.scale_levels.iter().flat_map(|s| s.values()))
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Param("parameters contain non-finite values".into()));
        }
        Ok(())
    }

    /// Deterministic initialization. Kernel weights are drawn from one
    /// generator stream seeded with `seed`, in order: base kernel, then each
    /// level kernel, each in `(channel, row, col)` raster order. Scales do
    /// not consume draws.
    pub fn init(c: usize, k: usize, levels: usize, seed: u64, scheme: InitScheme) -> Result<Self> {
        if k.is_multiple_of(2) {
            return Err(Error::Param(format!(
                "kernel extent must be odd for same-size padding, got {k}"
            )));
        }
        let (w0, w_levels) = match scheme {
            InitScheme::Zeros => {
                let w0 = DepthwiseKernel::zeros(c, k, k)?;
                let w_levels = (0..levels)
                    .map(|_| DepthwiseKernel::zeros(4 * c, k, k))
                    .collect::<Result<Vec<_>>>()?;
                (w0, w_levels)
            }
            InitScheme::UniformFanIn => {
                let bound = T::from_f64(1.0 / k as f64);
                let mut rng = Rng64::new(seed);
                let w0 = DepthwiseKernel::from_rng(c, k, k, -bound, bound, &mut rng)?;
                let w_levels = (0..levels)
                    .map(|_| DepthwiseKernel::from_rng(4 * c, k, k, -bound, bound, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                (w0, w_levels)
            }
        };
        let scale0 = ChannelScale::ones(c)?;
        let scale_levels = (0..levels)
            .map(|_| ChannelScale::ones(4 * c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(c, k, levels, w0, w_levels, scale0, scale_levels)
    }

    pub fn channels(&self) -> usize {
        self.c
    }
    pub fn kernel_extent(&self) -> usize {
        self.k
    }
    pub fn levels(&self) -> usize {
        self.levels
    }
    pub fn base_kernel(&self) -> &DepthwiseKernel<T> {
        &self.w0
    }
    pub fn level_kernels(&self) -> &[DepthwiseKernel<T>] {
        &self.w_levels
    }
    pub fn base_scale(&self) -> &ChannelScale<T> {
        &self.scale0
    }
    pub fn level_scales(&self) -> &[ChannelScale<T>] {
        &self.scale_levels
    }

    /// Serialize: magic `WTCV`, format version, `c`, `k`, `levels`, element
    /// byte width (all little-endian u32), then the base kernel, the level
    /// kernels in order, the base scale, and the level scales, as raw
    /// little-endian values in natural raster order.
    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(b"WTCV");
        for v in [1u32, self.c as u32, self.k as u32, self.levels as u32, T::BYTE_WIDTH as u32] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &v in self.w0.weights() {
            v.write_le(&mut buf);
        }
        for w in &self.w_levels {
            for &v in w.weights() {
                v.write_le(&mut buf);
            }
        }
        for &v in self.scale0.values() {
            v.write_le(&mut buf);
        }
        for s in &self.scale_levels {
            for &v in s.values() {
                v.write_le(&mut buf);
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<Self> {
        let mut header = [0u8; 24];
        input.read_exact(&mut header)?;
        if &header[0..4] != b"WTCV" {
            return Err(Error::Format("missing WTCV magic".into()));
        }
        let field = |i: usize| u32::from_le_bytes(header[4 + 4 * i..8 + 4 * i].try_into().unwrap());
        let version = field(0);
        if version != 1 {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let (c, k, levels) = (field(1) as usize, field(2) as usize, field(3) as usize);
        let width = field(4) as usize;
        if width != T::BYTE_WIDTH {
            return Err(Error::Format(format!(
                "file holds {width}-byte elements, expected {}",
                T::BYTE_WIDTH
            )));
        }
        let mut read_values = |count: usize| -> Result<Vec<T>> {
            let mut bytes = vec![0u8; count * T::BYTE_WIDTH];
            input.read_exact(&mut bytes).map_err(|e| {
                Error::Format(format!("parameter payload truncated: {e}"))
            })?;
            Ok(bytes.chunks_exact(T::BYTE_WIDTH).map(T::read_le).collect())
        };
        let w0 = DepthwiseKernel::new(c, k, k, read_values(c * k * k)?)?;
        let mut w_levels = Vec::with_capacity(levels);
        for _ in 0..levels {
            w_levels.push(DepthwiseKernel::new(4 * c, k, k, read_values(4 * c * k * k)?)?);
        }
        let scale0 = ChannelScale::new(read_values(c)?)?;
        let mut scale_levels = Vec::with_capacity(levels);
        for _ in 0..levels {
            scale_levels.push(ChannelScale::new(read_values(4 * c)?)?);
        }
        Self::new(c, k, levels, w0, w_levels, scale0, scale_levels)
    }
}

/// Itemized trainable-value counts for one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCount {
    /// `c * k^2`
    pub base_kernel: u64,
    /// `levels * 4 * c * k^2` — the term that grows with depth
    pub level_kernels: u64,
    /// `c`
    pub base_scale: u64,
    /// `levels * 4 * c`
    pub level_scales: u64,
}

impl ParamCount {
    pub fn total(&self) -> u64 {
        self.base_kernel + self.level_kernels + self.base_scale + self.level_scales
    }
}

/// Count every trainable value, itemized by role.
pub fn param_count<T: Element>(p: &WtConvParams<T>) -> ParamCount {
    let (c, k, levels) = (p.c as u64, p.k as u64, p.levels as u64);
    ParamCount {
        base_kernel: c * k * k,
        level_kernels: levels * 4 * c * k * k,
        base_scale: c,
        level_scales: levels * 4 * c,
    }
}

/// Side length of the input region one output element can see: `2^levels * k`.
pub fn receptive_field<T: Element>(p: &WtConvParams<T>) -> u64 {
    (1u64 << p.levels) * p.k as u64
}

/// Stack a quad into one `4c`-channel tensor in `LL, LH, HL, HH` block order.
pub fn pack_subbands<T: Element>(q: &SubbandQuad<T>) -> Result<Tensor4<T>> {
    let (n, c, h, w) = q.shape();
    let mut out = Tensor4::zeros(n, 4 * c, h, w)?;
    // each band's (c, h, w) block per batch item is contiguous in both
    // layouts, so blocks move as single slices
    let block = c * h * w;
    for (which, band) in q.bands().into_iter().enumerate() {
        for bn in 0..n {
            let src = &band.data()[bn * block..][..block];
            out.data_mut()[(bn * 4 + which) * block..][..block].copy_from_slice(src);
        }
    }
    Ok(out)
}

/// Inverse of [`pack_subbands`].
pub fn unpack_subbands<T: Element>(t: &Tensor4<T>, c: usize) -> Result<SubbandQuad<T>> {
    let (n, packed_c, h, w) = t.shape();
    if packed_c != 4 * c {
        return Err(Error::Shape(format!(
            "packed tensor has {packed_c} channels, expected {}",
            4 * c
        )));
    }
    let block = c * h * w;
    let mut bands = Vec::with_capacity(4);
    for which in 0..4 {
        let mut band = Tensor4::zeros(n, c, h, w)?;
        for bn in 0..n {
            let src = &t.data()[(bn * 4 + which) * block..][..block];
            band.data_mut()[bn * block..][..block].copy_from_slice(src);
        }
        bands.push(band);
    }
    let hh = bands.pop().unwrap();
    let hl = bands.pop().unwrap();
    let lh = bands.pop().unwrap();
    let ll = bands.pop().unwrap();
    SubbandQuad::new(ll, lh, hl, hh)
}

pub(crate) fn check_input<T: Element>(x: &Tensor4<T>, p: &WtConvParams<T>) -> Result<()> {
    let (_, c, h, w) = x.shape();
    if c != p.c {
        return Err(Error::Shape(format!(
            "input has {c} channels, layer expects {}",
            p.c
        )));
    }
    let admissible = max_levels(h, w);
    if p.levels > admissible {
        return Err(Error::Shape(format!(
            "input extents {h}x{w} admit at most {admissible} levels, layer has {}",
            p.levels
        )));
    }
    Ok(())
}

/// Forward pass. Output shape equals input shape.
pub fn forward<T: Element>(x: &Tensor4<T>, p: &WtConvParams<T>) -> Result<Tensor4<T>> {
    forward_impl(x, p, false)
}

/// Forward pass with the transforms executed as literal strided
/// convolutions instead of the Haar fast path. Same values, naive cost;
/// used by instrumented runs.
pub fn forward_conv_wavelets<T: Element>(x: &Tensor4<T>, p: &WtConvParams<T>) -> Result<Tensor4<T>> {
    forward_impl(x, p, true)
}

fn forward_impl<T: Element>(
    x: &Tensor4<T>,
    p: &WtConvParams<T>,
    conv_wavelets: bool,
) -> Result<Tensor4<T>> {
    check_input(x, p)?;
    let bank = HaarFilterBank::haar();
    let analyze = |t: &Tensor4<T>| {
        if conv_wavelets {
            wt_forward_banked(t, &bank)
        } else {
            wt_forward(t)
        }
    };
    let synthesize = |q: &SubbandQuad<T>| {
        if conv_wavelets {
            wt_inverse_banked(q, &bank)
        } else {
            wt_inverse(q)
        }
    };

    let pad = ((p.k - 1) / 2, (p.k - 1) / 2);
    let base = channel_scale(&depthwise_conv(x, &p.w0, (1, 1), pad)?, &p.scale0)?;
    if p.levels == 0 {
        return Ok(base);
    }

    // analysis sweep: decompose, convolve each level's packed subbands
    let mut level_outputs = Vec::with_capacity(p.levels);
    let mut current_ll = x.clone();
    for i in 0..p.levels {
        let quad = analyze(&current_ll)?;
        current_ll = quad.ll.clone();
        let packed = pack_subbands(&quad)?;
        let convolved = depthwise_conv(&packed, &p.w_levels[i], (1, 1), pad)?;
        let scaled = channel_scale(&convolved, &p.scale_levels[i])?;
        level_outputs.push(unpack_subbands(&scaled, p.c)?);
    }

    // synthesis sweep: fold deeper aggregates into each level's low band
    let mut aggregate: Option<Tensor4<T>> = None;
    for out in level_outputs.iter().rev() {
        let ll = match aggregate {
            Some(deeper) => out.ll.add(&deeper)?,
            None => out.ll.clone(),
        };
        let merged = SubbandQuad::new(ll, out.lh.clone(), out.hl.clone(), out.hh.clone())?;
        aggregate = Some(synthesize(&merged)?);
    }
    base.add(&aggregate.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_t(n: usize, c: usize, h: usize, w: usize, seed: u64) -> Tensor4<f64> {
        Tensor4::random_uniform(n, c, h, w, -1.0, 1.0, seed).unwrap()
    }

    /// Kernels that make every convolution an identity map.
    fn identity_params(c: usize, k: usize, levels: usize) -> WtConvParams<f64> {
        let w0 = DepthwiseKernel::delta(c, k).unwrap();
        let w_levels = (0..levels)
            .map(|_| DepthwiseKernel::delta(4 * c, k).unwrap())
            .collect();
        WtConvParams::new(
            c,
            k,
            levels,
            w0,
            w_levels,
            ChannelScale::ones(c).unwrap(),
            (0..levels).map(|_| ChannelScale::ones(4 * c).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_levels_reduces_to_plain_scaled_conv() {
        let x = rand_t(1, 2, 8, 8, 1);
        let p = identity_params(2, 3, 0);
        let y = forward(&x, &p).unwrap();
        assert_eq!(x.max_abs_diff(&y).unwrap(), 0.0);

        let p = WtConvParams::init(2, 3, 0, 5, InitScheme::UniformFanIn).unwrap();
        let y = forward(&x, &p).unwrap();
        let direct = channel_scale(
            &depthwise_conv(&x, p.base_kernel(), (1, 1), (1, 1)).unwrap(),
            p.base_scale(),
        )
        .unwrap();
        assert_eq!(y, direct);
    }

    #[test]
    fn zero_kernels_give_zero_output() {
        let x = rand_t(1, 2, 16, 16, 2);
        for levels in [0, 1, 2] {
            let p = WtConvParams::init(2, 3, levels, 0, InitScheme::Zeros).unwrap();
            let y = forward(&x, &p).unwrap();
            assert!(y.data().iter().all(|&v| v == 0.0), "levels={levels}");
        }
    }

    #[test]
    fn identity_kernels_reconstruct_and_emphasize_low_pass() {
        // one level: base path passes x through, the cascade path
        // reconstructs x perfectly, so the output is 2x
        let x = rand_t(1, 2, 16, 16, 3);
        let p = identity_params(2, 3, 1);
        let y = forward(&x, &p).unwrap();
        assert!(y.max_abs_diff(&x.scalar_mul(2.0)).unwrap() < 1e-12);

        // deeper levels fold their reconstruction into the enclosing LL
        // band, so every extra identity level re-adds one low-pass
        // projection: 2x + P_1(x) for two levels
        let p = identity_params(2, 3, 2);
        let y = forward(&x, &p).unwrap();
        let quad = wt_forward(&x).unwrap();
        let mut low_only = quad.zeros_like().unwrap();
        low_only.ll = quad.ll.clone();
        let projection = wt_inverse(&low_only).unwrap();
        let expect = x.scalar_mul(2.0).add(&projection).unwrap();
        assert!(y.max_abs_diff(&expect).unwrap() < 1e-12);

        // constant input: every path returns the constant, giving
        // (levels + 1) * c
        for levels in 1..=3usize {
            let c = Tensor4::new_filled(1, 1, 16, 16, 0.5f64).unwrap();
            let p = identity_params(1, 3, levels);
            let y = forward(&c, &p).unwrap();
            let expect = 0.5 * (levels as f64 + 1.0);
            assert!(
                y.data().iter().all(|&v| (v - expect).abs() < 1e-12),
                "levels={levels}"
            );
        }
    }

    #[test]
    fn output_shape_equals_input_shape() {
        for (n, c, h, w, levels) in [(1, 1, 8, 8, 1), (2, 3, 16, 32, 2), (1, 2, 64, 64, 3)] {
            let x = rand_t(n, c, h, w, 4);
            let p = WtConvParams::init(c, 3, levels, 7, InitScheme::UniformFanIn).unwrap();
            assert_eq!(forward(&x, &p).unwrap().shape(), x.shape());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = WtConvParams::init(2, 3, 3, 7, InitScheme::UniformFanIn).unwrap();
        let wrong_c = rand_t(1, 3, 16, 16, 5);
        assert!(matches!(forward(&wrong_c, &p), Err(Error::Shape(_))));

        let shallow = rand_t(1, 2, 12, 16, 6);
        let err = forward(&shallow, &p).unwrap_err().to_string();
        assert!(err.contains("at most 2"), "message: {err}");

        assert!(matches!(
            WtConvParams::<f64>::init(2, 4, 1, 0, InitScheme::UniformFanIn),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn layer_is_linear_in_input() {
        let p = WtConvParams::init(2, 3, 2, 11, InitScheme::UniformFanIn).unwrap();
        let x = rand_t(1, 2, 16, 16, 12);
        let y = rand_t(1, 2, 16, 16, 13);
        let (a, b) = (0.6, -2.1);
        let lhs = forward(&x.scalar_mul(a).add(&y.scalar_mul(b)).unwrap(), &p).unwrap();
        let rhs = forward(&x, &p)
            .unwrap()
            .scalar_mul(a)
            .add(&forward(&y, &p).unwrap().scalar_mul(b))
            .unwrap();
        let scale = rhs.max_abs().max(1.0);
        assert!(lhs.max_abs_diff(&rhs).unwrap() / scale < 1e-12);
    }

    #[test]
    fn channels_stay_independent() {
        let p = WtConvParams::init(3, 3, 2, 21, InitScheme::UniformFanIn).unwrap();
        let x = rand_t(1, 3, 16, 16, 22);
        let base = forward(&x, &p).unwrap();

        let mut x2 = x.clone();
        for y in 0..16 {
            for x_ in 0..16 {
                x2.set(0, 1, y, x_, 0.0);
            }
        }
        let out = forward(&x2, &p).unwrap();
        for ch in [0usize, 2] {
            for y in 0..16 {
                for x_ in 0..16 {
                    assert_eq!(out.get(0, ch, y, x_), base.get(0, ch, y, x_), "ch {ch}");
                }
            }
        }
        for y in 0..16 {
            for x_ in 0..16 {
                assert_eq!(out.get(0, 1, y, x_), 0.0);
            }
        }
    }

    #[test]
    fn impulse_support_is_bounded_and_exceeds_plain_conv() {
        let (k, levels) = (3usize, 2usize);
        let (h, w) = (64usize, 64usize);
        let p = WtConvParams::init(1, k, levels, 31, InitScheme::UniformFanIn).unwrap();
        let mut x = Tensor4::zeros(1, 1, h, w).unwrap();
        let (cy, cx) = (h / 2, w / 2);
        x.set(0, 0, cy, cx, 1.0);
        let y = forward(&x, &p).unwrap();

        // conservative bound: no response farther than 2^(levels+1) * k / 2
        let bound = ((1usize << (levels + 1)) * k) / 2;
        let mut beyond_plain = false;
        for yy in 0..h {
            for xx in 0..w {
                let dist = (yy as isize - cy as isize)
                    .abs()
                    .max((xx as isize - cx as isize).abs()) as usize;
                let v = y.get(0, 0, yy, xx);
                if dist > bound {
                    assert_eq!(v, 0.0, "response at distance {dist}");
                }
                if dist > k && v != 0.0 {
                    beyond_plain = true;
                }
            }
        }
        assert!(beyond_plain, "support did not exceed the plain kernel window");
    }

    #[test]
    fn deep_low_pass_kernel_ignores_checkerboard() {
        // only the deepest level's LL-block kernel is nonzero
        for levels in [1usize, 2] {
            let c = 1;
            let k = 3;
            let mut p = WtConvParams::init(c, k, levels, 0, InitScheme::Zeros).unwrap();
            let weights = p.w_levels[levels - 1].weights_mut();
            for (i, w) in weights.iter_mut().enumerate() {
                if i < c * k * k {
                    *w = 0.37 + i as f64 * 0.05;
                }
            }
            let mut x = Tensor4::zeros(1, 1, 16, 16).unwrap();
            for y in 0..16 {
                for x_ in 0..16 {
                    x.set(0, 0, y, x_, if (y + x_) % 2 == 0 { 1.0 } else { -1.0 });
                }
            }
            let out = forward(&x, &p).unwrap();
            assert!(out.max_abs() < 1e-10, "levels={levels}, got {}", out.max_abs());
        }
    }

    #[test]
    fn param_count_itemization() {
        let p = WtConvParams::<f64>::init(1, 5, 3, 0, InitScheme::Zeros).unwrap();
        let count = param_count(&p);
        assert_eq!(count.level_kernels, 300);
        assert_eq!(count.total(), 25 + 300 + 1 + 12);

        let p = WtConvParams::<f64>::init(4, 7, 0, 0, InitScheme::Zeros).unwrap();
        let count = param_count(&p);
        assert_eq!(count.level_kernels, 0);
        assert_eq!(count.total(), 4 * 49 + 4);
    }

    #[test]
    fn receptive_field_examples() {
        let p = WtConvParams::<f64>::init(1, 5, 3, 0, InitScheme::Zeros).unwrap();
        assert_eq!(receptive_field(&p), 40);
        let p = WtConvParams::<f64>::init(1, 7, 0, 0, InitScheme::Zeros).unwrap();
        assert_eq!(receptive_field(&p), 7);
        let p = WtConvParams::<f64>::init(1, 3, 2, 0, InitScheme::Zeros).unwrap();
        assert_eq!(receptive_field(&p), 12);
    }

    #[test]
    fn non_finite_parameters_are_rejected() {
        let mut w0 = DepthwiseKernel::delta(1, 3).unwrap();
        w0.weights_mut()[0] = f64::NAN;
        assert!(matches!(
            WtConvParams::new(1, 3, 0, w0, vec![], ChannelScale::ones(1).unwrap(), vec![]),
            Err(Error::Param(_))
        ));
        let w0 = DepthwiseKernel::delta(1, 3).unwrap();
        let scale = ChannelScale::new(vec![f64::INFINITY]).unwrap();
        assert!(matches!(
            WtConvParams::new(1, 3, 0, w0, vec![], scale, vec![]),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = WtConvParams::<f64>::init(2, 3, 1, 9, InitScheme::UniformFanIn).unwrap();
        let b = WtConvParams::<f64>::init(2, 3, 1, 9, InitScheme::UniformFanIn).unwrap();
        assert_eq!(a, b);

        let third = 1.0 / 3.0;
        let in_bound = |w: &DepthwiseKernel<f64>| {
            w.weights().iter().all(|&v| -third < v && v < third)
        };
        assert!(in_bound(&a.w0));
        assert!(a.w_levels.iter().all(in_bound));
        assert!(a.scale0.values().iter().all(|&v| v == 1.0));

        let z = WtConvParams::<f64>::init(2, 3, 1, 9, InitScheme::Zeros).unwrap();
        assert!(z.w0.weights().iter().all(|&v| v == 0.0));
        assert!(z.w_levels[0].weights().iter().all(|&v| v == 0.0));
        assert!(z.scale_levels[0].values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn pack_unpack_round_trip() {
        let q = wt_forward(&rand_t(2, 3, 8, 8, 41)).unwrap();
        let packed = pack_subbands(&q).unwrap();
        assert_eq!(packed.shape(), (2, 12, 4, 4));
        // LL block occupies channels 0..c
        assert_eq!(packed.get(1, 2, 0, 0), q.ll.get(1, 2, 0, 0));
        assert_eq!(packed.get(1, 5, 1, 1), q.lh.get(1, 2, 1, 1));
        let back = unpack_subbands(&packed, 3).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn serialization_round_trip() {
        let p = WtConvParams::<f64>::init(2, 3, 2, 77, InitScheme::UniformFanIn).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let back = WtConvParams::<f64>::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(p, back);

        let p32 = WtConvParams::<f32>::init(1, 5, 1, 3, InitScheme::UniformFanIn).unwrap();
        let mut buf32 = Vec::new();
        p32.write_to(&mut buf32).unwrap();
        assert_eq!(WtConvParams::<f32>::read_from(&mut buf32.as_slice()).unwrap(), p32);

        // wrong element width is rejected
        assert!(matches!(
            WtConvParams::<f32>::read_from(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
        // corrupt magic is rejected
        buf[0] = b'X';
        assert!(matches!(
            WtConvParams::<f64>::read_from(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
    }
}
