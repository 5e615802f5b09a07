//! Reverse-mode gradients for every primitive and for the composed layer.
//!
//! The computation graph is small and fixed, so each backward pass is
//! derived by hand as the exact adjoint of its forward loop rather than
//! through a general tape. Because the wavelet bank is orthonormal, the
//! backward of the forward transform is the inverse transform and vice
//! versa; both identities are asserted by adjoint probes in the tests, not
//! assumed. Gradient accumulation runs in fixed batch-major order, so f64
//! single-threaded gradients are bit-reproducible.

use crate::conv::{channel_scale, depthwise_conv, ChannelScale, DepthwiseKernel};
use crate::error::{Error, Result};
use crate::tensor::{Element, Tensor4};
use crate::wavelet::{wt_forward, wt_inverse, SubbandQuad};
use crate::wtconv::{self, pack_subbands, unpack_subbands, WtConvParams};

/// Gradients of a scalar loss with respect to one layer call. Shapes mirror
/// [`WtConvParams`] plus the input.
#[derive(Debug, Clone, PartialEq)]
pub struct WtConvGrads<T: Element> {
    pub d_input: Tensor4<T>,
    pub d_w0: DepthwiseKernel<T>,
    pub d_w_levels: Vec<DepthwiseKernel<T>>,
    pub d_scale0: ChannelScale<T>,
    pub d_scale_levels: Vec<ChannelScale<T>>,
}

/// Backward of [`depthwise_conv`]: given upstream `d_out`, returns the
/// gradient with respect to the input (the transposed convolution of
/// `d_out` with `w`, restricted to the input extent) and with respect to
/// the kernel. Taps that fell outside the input in the forward pass
/// contribute nothing.
pub fn depthwise_conv_backward<T: Element>(
    x: &Tensor4<T>,
    w: &DepthwiseKernel<T>,
    d_out: &Tensor4<T>,
    stride: (usize, usize),
    padding: (usize, usize),
) -> Result<(Tensor4<T>, DepthwiseKernel<T>)> {
    let (n, c, h, width) = x.shape();
    if w.channels() != c {
        return Err(Error::Shape(format!(
            "kernel has {} channels, input has {c}",
            w.channels()
        )));
    }
    let (k_h, k_w) = w.extents();
    let (s_h, s_w) = stride;
    let (p_h, p_w) = padding;
    let out_h = (h + 2 * p_h - k_h) / s_h + 1;
    let out_w = (width + 2 * p_w - k_w) / s_w + 1;
    if d_out.shape() != (n, c, out_h, out_w) {
        return Err(Error::Shape(format!(
            "upstream gradient has shape {:?}, forward output is {:?}",
            d_out.shape(),
            (n, c, out_h, out_w)
        )));
    }

    let mut d_x = Tensor4::zeros(n, c, h, width)?;
    let mut d_w = DepthwiseKernel::zeros(c, k_h, k_w)?;
    // accumulation order is fixed: batch, channel, kernel tap, output row
    if (s_h, s_w) == (1, 1) {
        for bn in 0..n {
            for ch in 0..c {
                let g_plane = &d_out.data()[(bn * c + ch) * out_h * out_w..][..out_h * out_w];
                let x_plane = &x.data()[(bn * c + ch) * h * width..][..h * width];
                let dx_plane = &mut d_x.data_mut()[(bn * c + ch) * h * width..][..h * width];
                let w_slice = &w.weights()[ch * k_h * k_w..][..k_h * k_w];
                let dw_slice = &mut d_w.weights_mut()[ch * k_h * k_w..];
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
                        let mut dw_acc = T::zero();
                        for oy in oy_lo..oy_hi {
                            let iy = oy + u - p_h;
                            let span = ox_hi - ox_lo;
                            let g_row = &g_plane[oy * out_w + ox_lo..][..span];
                            let ix0 = iy * width + (ox_lo + v - p_w);
                            let x_row = &x_plane[ix0..][..span];
                            let dx_row = &mut dx_plane[ix0..][..span];
                            for ((&g, &xv), dx) in g_row.iter().zip(x_row).zip(dx_row) {
                                *dx = *dx + g * w_uv;
                                dw_acc = dw_acc + g * xv;
                            }
                        }
                        dw_slice[u * k_w + v] = dw_slice[u * k_w + v] + dw_acc;
                    }
                }
            }
        }
    } else {
        for bn in 0..n {
            for ch in 0..c {
                for oy in 0..out_h {
                    for ox in 0..out_w {
                        let g = d_out.get(bn, ch, oy, ox);
                        let iy0 = (oy * s_h) as isize - p_h as isize;
                        let ix0 = (ox * s_w) as isize - p_w as isize;
                        for u in 0..k_h {
                            for v in 0..k_w {
                                let iy = iy0 + u as isize;
                                let ix = ix0 + v as isize;
                                if iy >= 0 && ix >= 0 && (iy as usize) < h && (ix as usize) < width
                                {
                                    let (iy, ix) = (iy as usize, ix as usize);
                                    let dx_cur = d_x.get(bn, ch, iy, ix);
                                    d_x.set(bn, ch, iy, ix, dx_cur + g * w.get(ch, u, v));
                                    let dw_cur = d_w.get(ch, u, v);
                                    d_w.set(ch, u, v, dw_cur + g * x.get(bn, ch, iy, ix));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((d_x, d_w))
}

/// Backward of [`crate::conv::channel_scale`]: returns the gradient with
/// respect to the pre-scale input and to the per-channel factors.
pub fn channel_scale_backward<T: Element>(
    pre: &Tensor4<T>,
    scale: &ChannelScale<T>,
    d_out: &Tensor4<T>,
) -> Result<(Tensor4<T>, ChannelScale<T>)> {
    if !pre.same_shape(d_out) {
        return Err(Error::Shape(format!(
            "upstream gradient has shape {:?}, forward output is {:?}",
            d_out.shape(),
            pre.shape()
        )));
    }
    let (n, c, h, w) = pre.shape();
    if scale.channels() != c {
        return Err(Error::Shape(format!(
            "scale has {} channels, input has {c}",
            scale.channels()
        )));
    }
    let d_pre = channel_scale(d_out, scale)?;
    let mut d_scale = vec![T::zero(); c];
    let plane = h * w;
    for bn in 0..n {
        for (ch, slot) in d_scale.iter_mut().enumerate() {
            let g_plane = &d_out.data()[(bn * c + ch) * plane..][..plane];
            let p_plane = &pre.data()[(bn * c + ch) * plane..][..plane];
            let mut acc = T::zero();
            for (&g, &p) in g_plane.iter().zip(p_plane) {
                acc = acc + g * p;
            }
            *slot = *slot + acc;
        }
    }
    Ok((d_pre, ChannelScale::new(d_scale)?))
}

/// Backward of [`wt_forward`]. The bank is orthonormal, so the adjoint of
/// the analysis step is the synthesis step.
pub fn wt_backward<T: Element>(d_quad: &SubbandQuad<T>) -> Result<Tensor4<T>> {
    wt_inverse(d_quad)
}

/// Backward of [`wt_inverse`]: the adjoint of synthesis is analysis.
pub fn iwt_backward<T: Element>(d_x: &Tensor4<T>) -> Result<SubbandQuad<T>> {
    wt_forward(d_x)
}

/// Reverse-mode pass through one layer call: exact gradients of
/// `<forward(x, p), d_out>` with respect to the input and every parameter.
pub fn wtconv_backward<T: Element>(
    x: &Tensor4<T>,
    p: &WtConvParams<T>,
    d_out: &Tensor4<T>,
) -> Result<WtConvGrads<T>> {
    wtconv::check_input(x, p)?;
    if !x.same_shape(d_out) {
        return Err(Error::Shape(format!(
            "upstream gradient has shape {:?}, layer output is {:?}",
            d_out.shape(),
            x.shape()
        )));
    }
    let k = p.kernel_extent();
    let pad = ((k - 1) / 2, (k - 1) / 2);
    let levels = p.levels();
    let c = p.channels();

    // forward replay, keeping what the backward needs
    let pre0 = depthwise_conv(x, p.base_kernel(), (1, 1), pad)?;
    let mut packed_inputs = Vec::with_capacity(levels);
    let mut pre_levels = Vec::with_capacity(levels);
    let mut current_ll = x.clone();
    for i in 0..levels {
        let quad = wt_forward(&current_ll)?;
        current_ll = quad.ll.clone();
        let packed = pack_subbands(&quad)?;
        pre_levels.push(depthwise_conv(&packed, &p.level_kernels()[i], (1, 1), pad)?);
        packed_inputs.push(packed);
    }

    // base path
    let (d_pre0, d_scale0) = channel_scale_backward(&pre0, p.base_scale(), d_out)?;
    let (d_x_base, d_w0) = depthwise_conv_backward(x, p.base_kernel(), &d_pre0, (1, 1), pad)?;

    if levels == 0 {
        return Ok(WtConvGrads {
            d_input: d_x_base,
            d_w0,
            d_w_levels: Vec::new(),
            d_scale0,
            d_scale_levels: Vec::new(),
        });
    }

    // aggregation backward: each synthesis step's upstream gradient splits
    // into this level's band gradients, with the low band also feeding the
    // next-deeper aggregate
    let mut d_level_outputs = Vec::with_capacity(levels);
    let mut d_aggregate = d_out.clone();
    for _ in 0..levels {
        let d_quad = iwt_backward(&d_aggregate)?;
        d_aggregate = d_quad.ll.clone();
        d_level_outputs.push(d_quad);
    }

    // per-level conv/scale backward, deepest first; the gradient flowing
    // into each level's ll also carries everything from deeper levels
    let mut d_w_levels = vec![None; levels];
    let mut d_scale_levels = vec![None; levels];
    let mut d_deeper: Option<Tensor4<T>> = None;
    for i in (0..levels).rev() {
        let d_scaled = pack_subbands(&d_level_outputs[i])?;
        let (d_pre, d_scale) =
            channel_scale_backward(&pre_levels[i], &p.level_scales()[i], &d_scaled)?;
        let (d_packed, d_w) =
            depthwise_conv_backward(&packed_inputs[i], &p.level_kernels()[i], &d_pre, (1, 1), pad)?;
        let mut d_quad = unpack_subbands(&d_packed, c)?;
        if let Some(deeper) = d_deeper.take() {
            d_quad.ll = d_quad.ll.add(&deeper)?;
        }
        d_deeper = Some(wt_backward(&d_quad)?);
        d_w_levels[i] = Some(d_w);
        d_scale_levels[i] = Some(d_scale);
    }

    let d_input = d_x_base.add(&d_deeper.unwrap())?;
    Ok(WtConvGrads {
        d_input,
        d_w0,
        d_w_levels: d_w_levels.into_iter().map(Option::unwrap).collect(),
        d_scale0,
        d_scale_levels: d_scale_levels.into_iter().map(Option::unwrap).collect(),
    })
}

/// One plain gradient-descent step: `p' = p - lr * g` across every kernel
/// and scale.
pub fn sgd_step<T: Element>(
    p: &WtConvParams<T>,
    g: &WtConvGrads<T>,
    lr: T,
) -> Result<WtConvParams<T>> {
    if !lr.is_finite() {
        return Err(Error::Param(format!("learning rate must be finite, got {lr}")));
    }
    let mut next = p.clone();
    let step_kernel = |dst: &mut DepthwiseKernel<T>, src: &DepthwiseKernel<T>| {
        for (w, &g) in dst.weights_mut().iter_mut().zip(src.weights()) {
            *w = *w - lr * g;
        }
    };
    let step_scale = |dst: &mut ChannelScale<T>, src: &ChannelScale<T>| {
        for (s, &g) in dst.values_mut().iter_mut().zip(src.values()) {
            *s = *s - lr * g;
        }
    };
    step_kernel(&mut next.w0, &g.d_w0);
    for (dst, src) in next.w_levels.iter_mut().zip(&g.d_w_levels) {
        step_kernel(dst, src);
    }
    step_scale(&mut next.scale0, &g.d_scale0);
    for (dst, src) in next.scale_levels.iter_mut().zip(&g.d_scale_levels) {
        step_scale(dst, src);
    }
    Ok(next)
}

/// A shape-preserving depth-wise spatial mixer that can train itself: the
/// drop-in contract shared by the wavelet layer and a plain depth-wise
/// convolution. Swapping one mixer for another changes construction only.
pub trait Mixer<T: Element> {
    fn channels(&self) -> usize;
    /// Shape-preserving forward pass.
    fn forward(&self, x: &Tensor4<T>) -> Result<Tensor4<T>>;
    /// Gradient of `<forward(x), d_out>` with respect to `x`.
    fn input_gradient(&self, x: &Tensor4<T>, d_out: &Tensor4<T>) -> Result<Tensor4<T>>;
    /// Compute parameter gradients for this call and apply one SGD step.
    fn train_step(&mut self, x: &Tensor4<T>, d_out: &Tensor4<T>, lr: T) -> Result<()>;
    /// Canonical parameter form, used for checkpoints (a plain depth-wise
    /// mixer exports as a zero-level layer).
    fn export_params(&self) -> Result<WtConvParams<T>>;
}

impl<T: Element> Mixer<T> for WtConvParams<T> {
    fn channels(&self) -> usize {
        WtConvParams::channels(self)
    }

    fn forward(&self, x: &Tensor4<T>) -> Result<Tensor4<T>> {
        wtconv::forward(x, self)
    }

    fn input_gradient(&self, x: &Tensor4<T>, d_out: &Tensor4<T>) -> Result<Tensor4<T>> {
        Ok(wtconv_backward(x, self, d_out)?.d_input)
    }

    fn train_step(&mut self, x: &Tensor4<T>, d_out: &Tensor4<T>, lr: T) -> Result<()> {
        let grads = wtconv_backward(x, self, d_out)?;
        *self = sgd_step(self, &grads, lr)?;
        Ok(())
    }

    fn export_params(&self) -> Result<WtConvParams<T>> {
        Ok(self.clone())
    }
}

/// Plain same-padded depth-wise convolution with a per-channel scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainDepthwise<T: Element> {
    kernel: DepthwiseKernel<T>,
    scale: ChannelScale<T>,
}

impl<T: Element> PlainDepthwise<T> {
    pub fn new(kernel: DepthwiseKernel<T>, scale: ChannelScale<T>) -> Result<Self> {
        let (k_h, k_w) = kernel.extents();
        if k_h != k_w || k_h.is_multiple_of(2) {
            return Err(Error::Param(format!(
                "plain mixer needs a square odd kernel, got {k_h}x{k_w}"
            )));
        }
        if scale.channels() != kernel.channels() {
            return Err(Error::Shape(format!(
                "scale covers {} channels, kernel has {}",
                scale.channels(),
                kernel.channels()
            )));
        }
        Ok(PlainDepthwise { kernel, scale })
    }

    /// Same draw scheme as the zero-level layer initialization.
    pub fn init(c: usize, k: usize, seed: u64, scheme: crate::wtconv::InitScheme) -> Result<Self> {
        let p = WtConvParams::init(c, k, 0, seed, scheme)?;
        Self::new(p.base_kernel().clone(), p.base_scale().clone())
    }

    pub fn kernel(&self) -> &DepthwiseKernel<T> {
        &self.kernel
    }
    pub fn scale(&self) -> &ChannelScale<T> {
        &self.scale
    }

    fn pad(&self) -> (usize, usize) {
        let (k, _) = self.kernel.extents();
        ((k - 1) / 2, (k - 1) / 2)
    }
}

impl<T: Element> Mixer<T> for PlainDepthwise<T> {
    fn channels(&self) -> usize {
        self.kernel.channels()
    }

    fn forward(&self, x: &Tensor4<T>) -> Result<Tensor4<T>> {
        channel_scale(&depthwise_conv(x, &self.kernel, (1, 1), self.pad())?, &self.scale)
    }

    fn input_gradient(&self, x: &Tensor4<T>, d_out: &Tensor4<T>) -> Result<Tensor4<T>> {
        let d_pre = channel_scale(d_out, &self.scale)?;
        let (d_x, _) = depthwise_conv_backward(x, &self.kernel, &d_pre, (1, 1), self.pad())?;
        Ok(d_x)
    }

    fn train_step(&mut self, x: &Tensor4<T>, d_out: &Tensor4<T>, lr: T) -> Result<()> {
        let pre = depthwise_conv(x, &self.kernel, (1, 1), self.pad())?;
        let (d_pre, d_scale) = channel_scale_backward(&pre, &self.scale, d_out)?;
        let (_, d_w) = depthwise_conv_backward(x, &self.kernel, &d_pre, (1, 1), self.pad())?;
        for (w, &g) in self.kernel.weights_mut().iter_mut().zip(d_w.weights()) {
            *w = *w - lr * g;
        }
        for (s, &g) in self.scale.values_mut().iter_mut().zip(d_scale.values()) {
            *s = *s - lr * g;
        }
        Ok(())
    }

    fn export_params(&self) -> Result<WtConvParams<T>> {
        WtConvParams::new(
            self.kernel.channels(),
            self.kernel.extents().0,
            0,
            self.kernel.clone(),
            Vec::new(),
            self.scale.clone(),
            Vec::new(),
        )
    }
}
