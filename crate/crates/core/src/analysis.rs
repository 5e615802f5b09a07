//! Cost model and effective-receptive-field probing.
//!
//! The FLOP functions are the closed multiply-accumulate formulas for
//! depth-wise convolution stacks: one MAC per kernel tap per output element,
//! padding taps included. [`measured_mac_count`] validates the model against
//! the implementation by running an instrumented forward pass and comparing
//! actually-executed MACs; the convolution portion must match the formulas
//! exactly, while the Haar fast path undercuts the naive transform cost
//! (one multiply per output element instead of four), so both transform
//! modes are reported.
//!
//! [`erf_map`] measures which input pixels influence the spatially central
//! output element of a (stack of) layer(s): it seeds a unit gradient at the
//! center of the final output, pulls it back through the stack, and
//! accumulates absolute input gradients over channels and probe images,
//! max-normalized to `[0, 1]`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grad::Mixer;
use crate::macs::{self, MacCounts};
use crate::tensor::{Element, Tensor4};
use crate::wtconv::{self, WtConvParams};

/// Itemized multiply-accumulate counts for one layer configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlopReport {
    /// All depth-wise convolution MACs (base level plus wavelet levels).
    pub conv_flops: u64,
    /// Naive-mode forward transform MACs.
    pub wt_flops: u64,
    /// Naive-mode inverse transform MACs.
    pub iwt_flops: u64,
    /// `conv_flops + wt_flops + iwt_flops`.
    pub total: u64,
    /// Convolution MACs per wavelet level (`levels` entries; the base-level
    /// share is `conv_flops` minus their sum).
    pub per_level: Vec<u64>,
}

impl FlopReport {
    pub fn base_conv_flops(&self) -> u64 {
        self.conv_flops - self.per_level.iter().sum::<u64>()
    }
}

fn product(terms: &[u64]) -> u64 {
    let value = terms.iter().fold(1u128, |acc, &t| acc * t as u128);
    u64::try_from(value).expect("flop count exceeds u64")
}

/// MACs of one depth-wise convolution:
/// `c * k_w * k_h * n_w * n_h / (s_w * s_h)`.
pub fn flops_depthwise(
    c: u64,
    k_w: u64,
    k_h: u64,
    n_w: u64,
    n_h: u64,
    s_w: u64,
    s_h: u64,
) -> u64 {
    product(&[c, k_w, k_h, n_w, n_h]) / (s_w * s_h)
}

/// MACs of the layer's full convolution set: the base `k x k` depth-wise
/// pass plus, per level `i`, four subband maps at `1/2^i` of each spatial
/// extent: `c * k^2 * (n_w*n_h + sum_i 4 * n_w/2^i * n_h/2^i)`.
pub fn flops_wtconv_convs(c: u64, k: u64, n_w: u64, n_h: u64, levels: u32) -> u64 {
    let mut area = product(&[n_w, n_h]);
    let mut total_area = area;
    for _ in 0..levels {
        area /= 4;
        total_area += 4 * area;
    }
    product(&[c, k, k, total_area])
}

/// Naive-mode MACs of the forward and inverse transform cascades: each is
/// `4c * sum_{i=0}^{levels-1} n_w/2^i * n_h/2^i` (four 2x2 kernels at
/// stride 2 per level), and the inverse costs the same as the forward.
pub fn flops_wt_iwt(c: u64, n_w: u64, n_h: u64, levels: u32) -> (u64, u64) {
    let mut area = product(&[n_w, n_h]);
    let mut sum = 0u64;
    for _ in 0..levels {
        sum += area;
        area /= 4;
    }
    let each = 4 * c * sum;
    (each, each)
}

/// Assemble the full itemized report for one configuration.
pub fn flop_report(c: u64, k: u64, n_w: u64, n_h: u64, levels: u32) -> FlopReport {
    let conv_flops = flops_wtconv_convs(c, k, n_w, n_h, levels);
    let (wt_flops, iwt_flops) = flops_wt_iwt(c, n_w, n_h, levels);
    let mut per_level = Vec::with_capacity(levels as usize);
    let mut area = product(&[n_w, n_h]);
    for _ in 0..levels {
        area /= 4;
        per_level.push(product(&[c, k, k, 4 * area]));
    }
    FlopReport {
        conv_flops,
        wt_flops,
        iwt_flops,
        total: conv_flops + wt_flops + iwt_flops,
        per_level,
    }
}

/// Human-readable millions: nearest tenth below 10M, floor to a tenth up to
/// 100M, nearest integer above.
pub fn approx_millions(flops: u64) -> String {
    let m = flops as f64 / 1e6;
    if m >= 100.0 {
        format!("{:.0}M", m.round())
    } else if m >= 10.0 {
        format!("{:.1}M", (m * 10.0).floor() / 10.0)
    } else {
        format!("{:.1}M", m)
    }
}

/// Which transform implementation an instrumented run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtMode {
    /// Add/subtract Haar fast path (default execution path).
    Fast,
    /// Transforms as literal strided convolutions, four MACs per output.
    Naive,
}

/// Run one forward pass with MAC counting enabled.
pub fn measured_forward<T: Element>(
    x: &Tensor4<T>,
    p: &WtConvParams<T>,
    mode: WtMode,
) -> Result<(Tensor4<T>, MacCounts)> {
    let (out, counts) = macs::counted(|| match mode {
        WtMode::Fast => wtconv::forward(x, p),
        WtMode::Naive => wtconv::forward_conv_wavelets(x, p),
    });
    Ok((out?, counts))
}

/// MACs actually executed by one forward pass.
pub fn measured_mac_count<T: Element>(
    x: &Tensor4<T>,
    p: &WtConvParams<T>,
    mode: WtMode,
) -> Result<MacCounts> {
    measured_forward(x, p, mode).map(|(_, counts)| counts)
}

/// Gradient-contribution map: nonnegative, max-normalized to 1, one value
/// per probe-image pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ErfMap {
    h: usize,
    w: usize,
    values: Vec<f64>,
}

impl ErfMap {
    pub fn extents(&self) -> (usize, usize) {
        (self.h, self.w)
    }

    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.w + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Tight bounding box `(y0, x0, y1, x1)` (inclusive) of the nonzero
    /// support.
    pub fn support_bbox(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.h {
            for x in 0..self.w {
                if self.get(y, x) > 0.0 {
                    bbox = Some(match bbox {
                        None => (y, x, y, x),
                        Some((y0, x0, y1, x1)) => (y0.min(y), x0.min(x), y1.max(y), x1.max(x)),
                    });
                }
            }
        }
        bbox
    }

    /// Plain-text grid: one CSV row per image row, full-precision values.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut text = String::new();
        for y in 0..self.h {
            for x in 0..self.w {
                if x > 0 {
                    text.push(',');
                }
                text.push_str(&format!("{}", self.get(y, x)));
            }
            text.push('\n');
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Binary 8-bit PGM ("P5"), values scaled to 0..=255.
    pub fn write_pgm(&self, out: &mut impl Write) -> Result<()> {
        let mut bytes = format!("P5\n{} {}\n255\n", self.w, self.h).into_bytes();
        bytes.extend(self.values.iter().map(|&v| (v * 255.0).round() as u8));
        out.write_all(&bytes)?;
        Ok(())
    }
}

/// Central output position: `(h/2, w/2)`, the lower-right of the two
/// central candidates when an extent is even.
pub fn center_of(h: usize, w: usize) -> (usize, usize) {
    (h / 2, w / 2)
}

/// Probe the effective receptive field of a stack of mixers.
///
/// For every image: push it through the stack, seed a unit gradient at the
/// central position of every channel of the final output, pull the gradient
/// back to the input, and accumulate absolute values over channels and
/// images. The result is max-normalized.
pub fn erf_map<T: Element>(
    stack: &[&dyn Mixer<T>],
    images: &[Tensor4<T>],
) -> Result<ErfMap> {
    if stack.is_empty() {
        return Err(Error::Param("empty layer stack".into()));
    }
    if images.is_empty() {
        return Err(Error::Param("empty image list".into()));
    }
    let (_, c, h, w) = images[0].shape();
    for img in images {
        if img.shape() != images[0].shape() {
            return Err(Error::Shape(format!(
                "probe images must share one shape, got {:?} and {:?}",
                images[0].shape(),
                img.shape()
            )));
        }
    }
    for layer in stack {
        if layer.channels() != c {
            return Err(Error::Shape(format!(
                "stack expects {} channels, images have {c}",
                layer.channels()
            )));
        }
    }

    let (cy, cx) = center_of(h, w);
    let mut grid = vec![0.0f64; h * w];
    for img in images {
        let n = img.batch();
        // forward through the stack, keeping each layer's input
        let mut inputs = Vec::with_capacity(stack.len());
        let mut current = img.clone();
        for layer in stack {
            let next = layer.forward(&current)?;
            inputs.push(current);
            current = next;
        }
        // unit gradient at the central position of all channels
        let mut d = Tensor4::zeros(n, c, h, w)?;
        for bn in 0..n {
            for ch in 0..c {
                d.set(bn, ch, cy, cx, T::one());
            }
        }
        for (layer, input) in stack.iter().zip(&inputs).rev() {
            d = layer.input_gradient(input, &d)?;
        }
        for bn in 0..n {
            for ch in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        grid[y * w + x] += d.get(bn, ch, y, x).to_f64().abs();
                    }
                }
            }
        }
    }

    let max = grid.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(Error::Param(
            "gradient map is identically zero; the stack does not reach the probe center".into(),
        ));
    }
    for v in &mut grid {
        *v /= max;
    }
    Ok(ErfMap { h, w, values: grid })
}
