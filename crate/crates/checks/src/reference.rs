//! Independent straight-line reference evaluator.
//!
//! Everything here recomputes the layer from scratch on flat f64 buffers
//! with its own index arithmetic: convolution materializes a zero-padded
//! copy and gathers, the transforms spell out the four 2x2 filters
//! literally, and the layer body is a line-by-line transcription of the
//! forward recurrence. Nothing below calls into `wtconv_core`'s kernels,
//! so agreement between the two paths is evidence, not tautology.

use wtconv_core::wtconv::WtConvParams;

/// Image plane set: `planes` channels of `h x w`, flat row-major.
#[derive(Debug, Clone)]
pub struct Planes {
    pub planes: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Planes {
    pub fn zeros(planes: usize, h: usize, w: usize) -> Self {
        Planes { planes, h, w, data: vec![0.0; planes * h * w] }
    }

    #[inline]
    pub fn at(&self, p: usize, y: usize, x: usize) -> f64 {
        self.data[(p * self.h + y) * self.w + x]
    }

    #[inline]
    pub fn at_mut(&mut self, p: usize, y: usize, x: usize) -> &mut f64 {
        &mut self.data[(p * self.h + y) * self.w + x]
    }
}

/// Layer parameters copied out to plain buffers.
#[derive(Debug, Clone)]
pub struct RefParams {
    pub c: usize,
    pub k: usize,
    pub levels: usize,
    /// `(c, k, k)` raster.
    pub w0: Vec<f64>,
    /// Per level, `(4c, k, k)` raster in LL, LH, HL, HH block order.
    pub w_levels: Vec<Vec<f64>>,
    pub scale0: Vec<f64>,
    pub scale_levels: Vec<Vec<f64>>,
}

impl RefParams {
    pub fn from_params(p: &WtConvParams<f64>) -> Self {
        RefParams {
            c: p.channels(),
            k: p.kernel_extent(),
            levels: p.levels(),
            w0: p.base_kernel().weights().to_vec(),
            w_levels: p.level_kernels().iter().map(|w| w.weights().to_vec()).collect(),
            scale0: p.base_scale().values().to_vec(),
            scale_levels: p.level_scales().iter().map(|s| s.values().to_vec()).collect(),
        }
    }
}

/// Same-padded stride-1 depth-wise correlation by pad-then-gather.
fn conv_same(x: &Planes, weights: &[f64], k: usize) -> Planes {
    let pad = (k - 1) / 2;
    let (ph, pw) = (x.h + 2 * pad, x.w + 2 * pad);
    let mut padded = Planes::zeros(x.planes, ph, pw);
    for p in 0..x.planes {
        for y in 0..x.h {
            for xx in 0..x.w {
                *padded.at_mut(p, y + pad, xx + pad) = x.at(p, y, xx);
            }
        }
    }
    let mut out = Planes::zeros(x.planes, x.h, x.w);
    for p in 0..x.planes {
        for y in 0..x.h {
            for xx in 0..x.w {
                let mut acc = 0.0;
                for u in 0..k {
                    for v in 0..k {
                        acc += padded.at(p, y + u, xx + v) * weights[(p * k + u) * k + v];
                    }
                }
                *out.at_mut(p, y, xx) = acc;
            }
        }
    }
    out
}

/// The four analysis filters, written out.
const FILTERS: [[[f64; 2]; 2]; 4] = [
    [[0.5, 0.5], [0.5, 0.5]],    // LL
    [[0.5, -0.5], [0.5, -0.5]],  // LH
    [[0.5, 0.5], [-0.5, -0.5]],  // HL
    [[0.5, -0.5], [-0.5, 0.5]],  // HH
];

/// One transform level: `c` planes in, `4c` planes out in LL, LH, HL, HH
/// block order at half the spatial extents.
fn wt(x: &Planes) -> Planes {
    let (oh, ow) = (x.h / 2, x.w / 2);
    let mut out = Planes::zeros(4 * x.planes, oh, ow);
    for (band, filter) in FILTERS.iter().enumerate() {
        for p in 0..x.planes {
            for y in 0..oh {
                for xx in 0..ow {
                    let mut acc = 0.0;
                    for (u, row) in filter.iter().enumerate() {
                        for (v, &f) in row.iter().enumerate() {
                            acc += f * x.at(p, 2 * y + u, 2 * xx + v);
                        }
                    }
                    *out.at_mut(band * x.planes + p, y, xx) = acc;
                }
            }
        }
    }
    out
}

/// One inverse level in gather form: output pixel `(y, x)` reads subband
/// pixel `(y/2, x/2)` weighted by each filter's `(y%2, x%2)` tap.
fn iwt(bands: &Planes, c: usize) -> Planes {
    let (oh, ow) = (bands.h * 2, bands.w * 2);
    let mut out = Planes::zeros(c, oh, ow);
    for p in 0..c {
        for y in 0..oh {
            for xx in 0..ow {
                let mut acc = 0.0;
                for (band, filter) in FILTERS.iter().enumerate() {
                    acc += filter[y % 2][xx % 2] * bands.at(band * c + p, y / 2, xx / 2);
                }
                *out.at_mut(p, y, xx) = acc;
            }
        }
    }
    out
}

fn scale_planes(x: &Planes, factors: &[f64]) -> Planes {
    let mut out = x.clone();
    for (p, &factor) in factors.iter().enumerate().take(x.planes) {
        for y in 0..x.h {
            for xx in 0..x.w {
                *out.at_mut(p, y, xx) *= factor;
            }
        }
    }
    out
}

fn add_planes(a: &Planes, b: &Planes) -> Planes {
    let mut out = a.clone();
    for (dst, src) in out.data.iter_mut().zip(&b.data) {
        *dst += src;
    }
    out
}

/// Straight-line transcription of the layer forward pass for one image
/// (`c` planes of `h x w`).
pub fn ref_forward(x: &Planes, params: &RefParams) -> Planes {
    let c = params.c;
    // base path
    let base = scale_planes(&conv_same(x, &params.w0, params.k), &params.scale0);
    if params.levels == 0 {
        return base;
    }

    // decompose and convolve every level
    let mut band_outputs: Vec<Planes> = Vec::with_capacity(params.levels);
    let mut current = x.clone();
    for i in 0..params.levels {
        let bands = wt(&current);
        // next level decomposes this level's LL block
        let mut ll = Planes::zeros(c, bands.h, bands.w);
        ll.data.copy_from_slice(&bands.data[..c * bands.h * bands.w]);
        current = ll;
        let convolved = conv_same(&bands, &params.w_levels[i], params.k);
        band_outputs.push(scale_planes(&convolved, &params.scale_levels[i]));
    }

    // aggregate bottom-up: add the deeper reconstruction into this level's
    // LL block, then invert
    let mut deeper: Option<Planes> = None;
    for i in (0..params.levels).rev() {
        let mut bands = band_outputs[i].clone();
        if let Some(d) = deeper {
            for p in 0..c {
                for y in 0..bands.h {
                    for xx in 0..bands.w {
                        *bands.at_mut(p, y, xx) += d.at(p, y, xx);
                    }
                }
            }
        }
        deeper = Some(iwt(&bands, c));
    }
    add_planes(&base, &deeper.unwrap())
}
