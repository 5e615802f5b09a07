//! Dense-operator oracle.
//!
//! The layer is linear, so pushing every standard basis vector through the
//! reference evaluator materializes it as an explicit matrix. Comparing the
//! production path against matrix-vector products (and its input gradient
//! against transpose-vector products) checks the whole composition at once.

use crate::reference::{ref_forward, Planes, RefParams};

/// Explicit matrix of one layer configuration over `c x h x w` inputs.
/// Column `j` is the image of basis vector `e_j`.
pub struct DenseOperator {
    dim: usize,
    cols: Vec<Vec<f64>>,
}

impl DenseOperator {
    /// Basis-probe the reference evaluator.
    pub fn build(params: &RefParams, h: usize, w: usize) -> Self {
        let dim = params.c * h * w;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut basis = Planes::zeros(params.c, h, w);
            basis.data[j] = 1.0;
            cols.push(ref_forward(&basis, params).data);
        }
        DenseOperator { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A x` by summing scaled columns.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for (o, &a) in out.iter_mut().zip(col) {
                    *o += xj * a;
                }
            }
        }
        out
    }

    /// `A^T y`: component `j` is `<col_j, y>`.
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim);
        self.cols
            .iter()
            .map(|col| col.iter().zip(y).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}
