//! Ingestion-side spatial adaptation. The core transforms reject extents
//! that are not divisible by `2^levels`; the CLI instead mirror-pads the
//! input once on the bottom/right edges (reflection without repeating the
//! edge row/column), runs the layer, and crops the output back. Mirroring
//! avoids the spurious high-frequency step a zero pad would inject at
//! every level.

use wtconv_core::tensor::{Element, Tensor4};
use wtconv_core::{Error, Result};

pub fn next_multiple(value: usize, multiple: usize) -> usize {
    value.div_ceil(multiple) * multiple
}

/// Mirror-pad bottom/right to the next multiple of `multiple`:
/// `padded(h + i) = x(h - 2 - i)`. The input must be large enough that the
/// reflection stays in range (`pad <= extent - 1`).
pub fn reflect_pad_to_multiple<T: Element>(
    x: &Tensor4<T>,
    multiple: usize,
) -> Result<Tensor4<T>> {
    let (n, c, h, w) = x.shape();
    let (target_h, target_w) = (next_multiple(h, multiple), next_multiple(w, multiple));
    if target_h == h && target_w == w {
        return Ok(x.clone());
    }
    if target_h - h > h - 1 || target_w - w > w - 1 {
        return Err(Error::Shape(format!(
            "cannot mirror-pad {h}x{w} up to {target_h}x{target_w}; the input is smaller than the padding"
        )));
    }
    let reflect = |idx: usize, extent: usize| {
        if idx < extent {
            idx
        } else {
            extent - 2 - (idx - extent)
        }
    };
    let mut out = Tensor4::zeros(n, c, target_h, target_w)?;
    for bn in 0..n {
        for ch in 0..c {
            for y in 0..target_h {
                for xx in 0..target_w {
                    out.set(bn, ch, y, xx, x.get(bn, ch, reflect(y, h), reflect(xx, w)));
                }
            }
        }
    }
    Ok(out)
}

/// Top-left crop back to the original extents.
pub fn crop<T: Element>(x: &Tensor4<T>, h: usize, w: usize) -> Result<Tensor4<T>> {
    let (n, c, full_h, full_w) = x.shape();
    if h > full_h || w > full_w {
        return Err(Error::Shape(format!(
            "cannot crop {full_h}x{full_w} down to {h}x{w}"
        )));
    }
    let mut out = Tensor4::zeros(n, c, h, w)?;
    for bn in 0..n {
        for ch in 0..c {
            for y in 0..h {
                for xx in 0..w {
                    out.set(bn, ch, y, xx, x.get(bn, ch, y, xx));
                }
            }
        }
    }
    Ok(out)
}
