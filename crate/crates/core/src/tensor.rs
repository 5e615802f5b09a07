//! Dense rank-4 tensors in batch-channel-height-width layout.
//!
//! The layout is row-major in exactly that order:
//! `index(n, c, y, x) = ((n*C + c)*H + y)*W + x`. Tensors own their data,
//! are immutable through the public operations, and carry one element type
//! throughout; mixing f32 and f64 operands in a single call is a compile
//! error by construction.

use std::fmt::{Debug, Display};
use std::io::{Read, Write};

use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::Rng64;

/// Scalar element of a tensor: f32 or f64.
pub trait Element: Float + Debug + Display + Send + Sync + 'static {
    /// Size of one encoded element in bytes.
    const BYTE_WIDTH: usize;
    /// Name used in file suffixes (`f32` / `f64`).
    const DTYPE: &'static str;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Map a raw 64-bit draw to `[0, 1)` at this type's precision.
    fn unit_from_u64(bits: u64) -> Self;
    /// Largest value strictly below `self` (finite, nonzero path only).
    fn step_down(self) -> Self;

    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

impl Element for f32 {
    const BYTE_WIDTH: usize = 4;
    const DTYPE: &'static str = "f32";

    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn unit_from_u64(bits: u64) -> Self {
        (bits >> 40) as f32 * (1.0 / (1u32 << 24) as f32)
    }
    fn step_down(self) -> Self {
        if self > 0.0 {
            f32::from_bits(self.to_bits() - 1)
        } else if self < 0.0 {
            f32::from_bits(self.to_bits() + 1)
        } else {
            -f32::MIN_POSITIVE
        }
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Element for f64 {
    const BYTE_WIDTH: usize = 8;
    const DTYPE: &'static str = "f64";

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn unit_from_u64(bits: u64) -> Self {
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
    fn step_down(self) -> Self {
        if self > 0.0 {
            f64::from_bits(self.to_bits() - 1)
        } else if self < 0.0 {
            f64::from_bits(self.to_bits() + 1)
        } else {
            -f64::MIN_POSITIVE
        }
    }
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}

/// Rank-4 tensor, shape `(n, c, h, w)`, dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T: Element> {
    n: usize,
    c: usize,
    h: usize,
    w: usize,
    data: Vec<T>,
}

fn checked_len(n: usize, c: usize, h: usize, w: usize) -> Result<usize> {
    if n == 0 || c == 0 || h == 0 || w == 0 {
        return Err(Error::Shape(format!(
            "tensor dimensions must be >= 1, got {n}x{c}x{h}x{w}"
        )));
    }
    n.checked_mul(c)
        .and_then(|v| v.checked_mul(h))
        .and_then(|v| v.checked_mul(w))
        .ok_or_else(|| Error::Shape(format!("tensor size {n}x{c}x{h}x{w} overflows usize")))
}

impl<T: Element> Tensor4<T> {
    /// Tensor with every element equal to `value`.
    pub fn new_filled(n: usize, c: usize, h: usize, w: usize, value: T) -> Result<Self> {
        let len = checked_len(n, c, h, w)?;
        Ok(Tensor4 { n, c, h, w, data: vec![value; len] })
    }

    pub fn zeros(n: usize, c: usize, h: usize, w: usize) -> Result<Self> {
        Self::new_filled(n, c, h, w, T::zero())
    }

    /// Wrap an existing buffer; its length must match the shape exactly.
    pub fn from_vec(n: usize, c: usize, h: usize, w: usize, data: Vec<T>) -> Result<Self> {
        let len = checked_len(n, c, h, w)?;
        if data.len() != len {
            return Err(Error::Shape(format!(
                "buffer of {} elements does not fill a {n}x{c}x{h}x{w} tensor ({len})",
                data.len()
            )));
        }
        Ok(Tensor4 { n, c, h, w, data })
    }

    /// Deterministic uniform fill over `[lo, hi)`; see [`crate::rng`] for the
    /// generator and the draw-to-float mapping. Elements are drawn in
    /// row-major index order.
    pub fn random_uniform(
        n: usize,
        c: usize,
        h: usize,
        w: usize,
        lo: T,
        hi: T,
        seed: u64,
    ) -> Result<Self> {
        // negated form so NaN bounds fail the check too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lo < hi) {
            return Err(Error::Param(format!("need lo < hi, got lo={lo}, hi={hi}")));
        }
        let len = checked_len(n, c, h, w)?;
        let mut rng = Rng64::new(seed);
        let span = hi - lo;
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let mut v = lo + span * T::unit_from_u64(rng.next_u64());
            // rounding in `lo + span*u` can reach hi; keep the range half-open
            if v >= hi {
                v = hi.step_down();
            }
            data.push(v);
        }
        Ok(Tensor4 { n, c, h, w, data })
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n, self.c, self.h, self.w)
    }
    pub fn batch(&self) -> usize {
        self.n
    }
    pub fn channels(&self) -> usize {
        self.c
    }
    pub fn height(&self) -> usize {
        self.h
    }
    pub fn width(&self) -> usize {
        self.w
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index_of(&self, n: usize, c: usize, y: usize, x: usize) -> usize {
        ((n * self.c + c) * self.h + y) * self.w + x
    }

    #[inline]
    pub fn get(&self, n: usize, c: usize, y: usize, x: usize) -> T {
        self.data[self.index_of(n, c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, n: usize, c: usize, y: usize, x: usize, value: T) {
        let idx = self.index_of(n, c, y, x);
        self.data[idx] = value;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    fn require_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{op} needs matching shapes, got {:?} vs {:?}",
                self.shape(),
                other.shape()
            )))
        }
    }

    /// Elementwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "add")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(Tensor4 { data, ..*self })
    }

    /// Elementwise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "sub")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Tensor4 { data, ..*self })
    }

    /// Every element multiplied by `s`.
    pub fn scalar_mul(&self, s: T) -> Self {
        let data = self.data.iter().map(|&a| a * s).collect();
        Tensor4 { data, ..*self }
    }

    /// Largest absolute elementwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.require_same_shape(other, "max_abs_diff")?;
        let mut m = T::zero();
        for (&a, &b) in self.data.iter().zip(&other.data) {
            let d = (a - b).abs();
            if d > m {
                m = d;
            }
        }
        Ok(m)
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    /// `sqrt(sum of squares)` accumulated in the element type.
    pub fn l2_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    /// Inner product `<self, other>`, accumulated in row-major order.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.require_same_shape(other, "dot")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b))
    }

    /// Convert every element (used to move between oracle and run precision).
    pub fn cast<U: Element>(&self) -> Tensor4<U> {
        Tensor4 {
            n: self.n,
            c: self.c,
            h: self.h,
            w: self.w,
            data: self.data.iter().map(|&v| U::from_f64(v.to_f64())).collect(),
        }
    }

    /// Serialize as the debug dump format: a 16-byte header of four
    /// little-endian u32 values `n, c, h, w`, then the raw little-endian
    /// elements in layout order. The element width is carried by the file
    /// suffix (`.f32t` / `.f64t`), not the stream.
    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + self.data.len() * T::BYTE_WIDTH);
        for dim in [self.n, self.c, self.h, self.w] {
            let v = u32::try_from(dim).map_err(|_| {
                Error::Format(format!("dimension {dim} exceeds the u32 header field"))
            })?;
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &v in &self.data {
            v.write_le(&mut buf);
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<Self> {
        let mut header = [0u8; 16];
        input.read_exact(&mut header)?;
        let dim = |i: usize| u32::from_le_bytes(header[4 * i..4 * i + 4].try_into().unwrap());
        let (n, c, h, w) = (dim(0) as usize, dim(1) as usize, dim(2) as usize, dim(3) as usize);
        let len = checked_len(n, c, h, w)?;
        let mut bytes = vec![0u8; len * T::BYTE_WIDTH];
        input.read_exact(&mut bytes).map_err(|e| {
            Error::Format(format!(
                "tensor payload truncated (want {} {}-byte elements): {e}",
                len,
                T::BYTE_WIDTH
            ))
        })?;
        let data = bytes
            .chunks_exact(T::BYTE_WIDTH)
            .map(T::read_le)
            .collect();
        Ok(Tensor4 { n, c, h, w, data })
    }
}

/// Expected file suffix for the dump format at element type `T`.
pub fn dump_suffix<T: Element>() -> String {
    format!("{}t", T::DTYPE)
}
