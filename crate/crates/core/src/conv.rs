//! Depth-wise 2D convolution primitives.
//!
//! All operators use the correlation convention (no kernel flip) and zero
//! padding; taps that fall outside the input read as zero but still execute
//! their multiply-accumulate, so instrumented MAC counts equal the closed
//! cost formulas in [`crate::analysis`]. Per output pixel the kernel window
//! is accumulated in raster order (top-left to bottom-right), which pins the
//! floating-point result independent of any execution schedule.

use crate::error::{Error, Result};
use crate::macs;
use crate::rng::Rng64;
use crate::tensor::{Element, Tensor4};

/// Per-channel spatial kernel: one `k_h x k_w` slice per channel, no
/// cross-channel mixing. Weights are stored `(c, k_h, k_w)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthwiseKernel<T: Element> {
    c: usize,
    k_h: usize,
    k_w: usize,
    weights: Vec<T>,
}

impl<T: Element> DepthwiseKernel<T> {
    pub fn new(c: usize, k_h: usize, k_w: usize, weights: Vec<T>) -> Result<Self> {
        if c == 0 || k_h == 0 || k_w == 0 {
            return Err(Error::Shape(format!(
                "kernel dimensions must be >= 1, got c={c}, k={k_h}x{k_w}"
            )));
        }
        if weights.len() != c * k_h * k_w {
            return Err(Error::Shape(format!(
                "kernel buffer has {} weights, shape {c}x{k_h}x{k_w} needs {}",
                weights.len(),
                c * k_h * k_w
            )));
        }
        Ok(DepthwiseKernel { c, k_h, k_w, weights })
    }

    pub fn filled(c: usize, k_h: usize, k_w: usize, value: T) -> Result<Self> {
        Self::new(c, k_h, k_w, vec![value; c * k_h * k_w])
    }

    pub fn zeros(c: usize, k_h: usize, k_w: usize) -> Result<Self> {
        Self::filled(c, k_h, k_w, T::zero())
    }

    /// Odd-extent kernel with 1 at the center of every channel slice:
    /// the identity map under stride 1 and same padding.
    pub fn delta(c: usize, k: usize) -> Result<Self> {
        if k.is_multiple_of(2) {
            return Err(Error::Param(format!("delta kernel needs odd extent, got {k}")));
        }
        let mut kernel = Self::zeros(c, k, k)?;
        for ch in 0..c {
            kernel.set(ch, k / 2, k / 2, T::one());
        }
        Ok(kernel)
    }

    /// Fill from an explicit generator stream in `(c, k_h, k_w)` raster
    /// order, uniform over `[lo, hi)`.
    pub fn from_rng(c: usize, k_h: usize, k_w: usize, lo: T, hi: T, rng: &mut Rng64) -> Result<Self> {
        // negated form so NaN bounds fail the check too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lo < hi) {
            return Err(Error::Param(format!("need lo < hi, got lo={lo}, hi={hi}")));
        }
        let span = hi - lo;
        let weights = (0..c * k_h * k_w)
            .map(|_| {
                let v = lo + span * T::unit_from_u64(rng.next_u64());
                if v >= hi {
                    hi.step_down()
                } else {
                    v
                }
            })
            .collect();
        Self::new(c, k_h, k_w, weights)
    }

    pub fn random_uniform(c: usize, k_h: usize, k_w: usize, lo: T, hi: T, seed: u64) -> Result<Self> {
        Self::from_rng(c, k_h, k_w, lo, hi, &mut Rng64::new(seed))
    }

    pub fn channels(&self) -> usize {
        self.c
    }
    pub fn extents(&self) -> (usize, usize) {
        (self.k_h, self.k_w)
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    #[inline]
    pub fn get(&self, c: usize, u: usize, v: usize) -> T {
        self.weights[(c * self.k_h + u) * self.k_w + v]
    }

    #[inline]
    pub fn set(&mut self, c: usize, u: usize, v: usize, value: T) {
        self.weights[(c * self.k_h + u) * self.k_w + v] = value;
    }
}

/// Learnable per-channel multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScale<T: Element> {
    scale: Vec<T>,
}

impl<T: Element> ChannelScale<T> {
    pub fn new(scale: Vec<T>) -> Result<Self> {
        if scale.is_empty() {
            return Err(Error::Shape("channel scale needs at least one channel".into()));
        }
        Ok(ChannelScale { scale })
    }

    pub fn ones(c: usize) -> Result<Self> {
        Self::new(vec![T::one(); c])
    }

    pub fn channels(&self) -> usize {
        self.scale.len()
    }
    pub fn values(&self) -> &[T] {
        &self.scale
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.scale
    }

    #[inline]
    pub fn get(&self, c: usize) -> T {
        self.scale[c]
    }
}

fn conv_output_extent(input: usize, k: usize, pad: usize, stride: usize) -> Result<usize> {
    let reach = input + 2 * pad;
    if reach < k {
        return Err(Error::Shape(format!(
            "kernel extent {k} exceeds padded input extent {reach}"
        )));
    }
    Ok((reach - k) / stride + 1)
}

/// Strided, zero-padded depth-wise convolution (correlation convention):
///
/// `out(n,c,y,x) = sum_{u,v} in(n,c, y*s_h - p_h + u, x*s_w - p_w + v) * w(c,u,v)`
///
/// with out-of-range input reads contributing zero. Output extents are
/// `floor((h + 2*p_h - k_h) / s_h) + 1` and likewise for width.
pub fn depthwise_conv<T: Element>(
    x: &Tensor4<T>,
    w: &DepthwiseKernel<T>,
    stride: (usize, usize),
    padding: (usize, usize),
) -> Result<Tensor4<T>> {
    let (n, c, h, width) = x.shape();
    if w.channels() != c {
        return Err(Error::Shape(format!(
            "kernel has {} channels, input has {c}",
            w.channels()
        )));
    }
    let (s_h, s_w) = stride;
    if s_h == 0 || s_w == 0 {
        return Err(Error::Param("stride must be >= 1".into()));
    }
    let (p_h, p_w) = padding;
    let (k_h, k_w) = w.extents();
    let out_h = conv_output_extent(h, k_h, p_h, s_h)?;
    let out_w = conv_output_extent(width, k_w, p_w, s_w)?;
    let mut out = Tensor4::zeros(n, c, out_h, out_w)?;

    // Instrumented runs take the strict path, where every tap of every
    // output pixel executes its multiply (out-of-range reads as zero), so
    // the measured count is the executed count. The stride-1 sweep path
    // below produces the same values (equal per-pixel accumulation order).
    if macs::is_counting() || stride != (1, 1) {
        conv_strict(x, w, &mut out, stride, padding);
        macs::add((n * c * out_h * out_w * k_h * k_w) as u64);
    } else {
        conv_sweep_stride1(x, w, &mut out, padding);
    }
    Ok(out)
}

/// Per-pixel gather with the kernel window in raster order; all taps
/// execute.
fn conv_strict<T: Element>(
    x: &Tensor4<T>,
    w: &DepthwiseKernel<T>,
    out: &mut Tensor4<T>,
    (s_h, s_w): (usize, usize),
    (p_h, p_w): (usize, usize),
) {
    let (n, c, h, width) = x.shape();
    let (_, _, out_h, out_w) = out.shape();
    let (k_h, k_w) = w.extents();
    for bn in 0..n {
        for ch in 0..c {
            let in_plane = &x.data()[(bn * c + ch) * h * width..][..h * width];
            let w_slice = &w.weights()[ch * k_h * k_w..][..k_h * k_w];
            let out_plane =
                &mut out.data_mut()[(bn * c + ch) * out_h * out_w..][..out_h * out_w];
            for oy in 0..out_h {
                let iy0 = (oy * s_h) as isize - p_h as isize;
                for ox in 0..out_w {
                    let ix0 = (ox * s_w) as isize - p_w as isize;
                    let mut acc = T::zero();
                    for u in 0..k_h {
                        let iy = iy0 + u as isize;
                        for v in 0..k_w {
                            let ix = ix0 + v as isize;
                            let val = if iy >= 0
                                && ix >= 0
                                && (iy as usize) < h
                                && (ix as usize) < width
                            {
                                in_plane[iy as usize * width + ix as usize]
                            } else {
                                T::zero()
                            };
                            acc = acc + val * w_slice[u * k_w + v];
                        }
                    }
                    out_plane[oy * out_w + ox] = acc;
                }
            }
        }
    }
}

/// Stride-1 path: one shifted multiply-add row sweep per kernel tap.
/// Every output element still receives its taps in kernel raster order, so
/// results match [`conv_strict`] (out-of-range taps contribute exact
/// zeros there and are skipped here).
fn conv_sweep_stride1<T: Element>(
    x: &Tensor4<T>,
    w: &DepthwiseKernel<T>,
    out: &mut Tensor4<T>,
    (p_h, p_w): (usize, usize),
) {
    let (n, c, h, width) = x.shape();
    let (_, _, out_h, out_w) = out.shape();
    let (k_h, k_w) = w.extents();
    for bn in 0..n {
        for ch in 0..c {
            let in_plane = &x.data()[(bn * c + ch) * h * width..][..h * width];
            let w_slice = &w.weights()[ch * k_h * k_w..][..k_h * k_w];
            let out_plane =
                &mut out.data_mut()[(bn * c + ch) * out_h * out_w..][..out_h * out_w];
            for u in 0..k_h {
                let oy_lo = p_h.saturating_sub(u);
                let oy_hi = (h + p_h).saturating_sub(u).min(out_h);
                for v in 0..k_w {
                    let w_uv = w_slice[u * k_w + v];
                    let ox_lo = p_w.saturating_sub(v);
                    let ox_hi = (width + p_w).saturating_sub(v).min(out_w);
                    if ox_lo >= ox_hi || oy_lo >= oy_hi {
                        continue;
                    }
                    for oy in oy_lo..oy_hi {
                        let iy = oy + u - p_h;
                        let in_row = &in_plane[iy * width + (ox_lo + v - p_w)..][..ox_hi - ox_lo];
                        let out_row = &mut out_plane[oy * out_w + ox_lo..][..ox_hi - ox_lo];
                        for (o, &i) in out_row.iter_mut().zip(in_row) {
                            *o = *o + i * w_uv;
                        }
                    }
                }
            }
        }
    }
}

/// Transposed (adjoint) depth-wise convolution for the zero-padding case:
/// the exact adjoint of [`depthwise_conv`] with the same stride and
/// `padding = (0, 0)`. Output extents are `(h-1)*s_h + k_h` and likewise
/// for width.
pub fn depthwise_conv_transposed<T: Element>(
    x: &Tensor4<T>,
    w: &DepthwiseKernel<T>,
    stride: (usize, usize),
) -> Result<Tensor4<T>> {
    let (n, c, h, width) = x.shape();
    if w.channels() != c {
        return Err(Error::Shape(format!(
            "kernel has {} channels, input has {c}",
            w.channels()
        )));
    }
    let (s_h, s_w) = stride;
    if s_h == 0 || s_w == 0 {
        return Err(Error::Param("stride must be >= 1".into()));
    }
    let (k_h, k_w) = w.extents();
    let out_h = (h - 1) * s_h + k_h;
    let out_w = (width - 1) * s_w + k_w;

    let mut out = Tensor4::zeros(n, c, out_h, out_w)?;
    let mut macs_done: u64 = 0;
    for bn in 0..n {
        for ch in 0..c {
            for iy in 0..h {
                for ix in 0..width {
                    let val = x.get(bn, ch, iy, ix);
                    for u in 0..k_h {
                        for v in 0..k_w {
                            let oy = iy * s_h + u;
                            let ox = ix * s_w + v;
                            let cur = out.get(bn, ch, oy, ox);
                            out.set(bn, ch, oy, ox, cur + val * w.get(ch, u, v));
                        }
                    }
                    macs_done += (k_h * k_w) as u64;
                }
            }
        }
    }
    macs::add(macs_done);
    Ok(out)
}

/// Multiply every channel by its scale: `out(n,c,y,x) = x(n,c,y,x) * s[c]`.
pub fn channel_scale<T: Element>(x: &Tensor4<T>, s: &ChannelScale<T>) -> Result<Tensor4<T>> {
    let (n, c, h, w) = x.shape();
    if s.channels() != c {
        return Err(Error::Shape(format!(
            "scale has {} channels, input has {c}",
            s.channels()
        )));
    }
    let mut out = x.clone();
    let plane = h * w;
    for bn in 0..n {
        for ch in 0..c {
            let factor = s.get(ch);
            for v in &mut out.data_mut()[(bn * c + ch) * plane..][..plane] {
                *v = *v * factor;
            }
        }
    }
    Ok(out)
}
