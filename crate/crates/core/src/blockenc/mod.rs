//! Exact block encodings built from matrix-free operators.
//!
//! An encoding of an `N x N` matrix `L` with `c` ancilla qubits and scale `gamma`
//! is a unitary `V` on `2^c * N` states with `L = gamma <0^c| V |0^c>`. The
//! ancilla register is the most significant part of the index, so the
//! encoded block is the leading `N x N` corner.

mod construct;
mod efficient;
mod isometry;
pub mod op;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff_c, vec_dist, vec_norm, VecSampler, C64};
use op::{to_dense, LinearOp, OpRef};

pub use construct::{
    combine_two, compressed_hadamard_be, dense_unitary_encoding, hadamard_be, identity_encoding, lcu,
    left_multiply_unitary, pad_ancillas, pad_scale, permutation_encoding, prepare_unitary, reflectionize,
    select_unitary, svd_block_encoding, Reflectionized,
};
pub use efficient::{build_ancilla_efficient_q, logical_ancilla_count, paper_ancilla_count, AncillaEfficientQ};
pub use isometry::Isometry;

/// Largest total dimension for which an explicit unitary is materialized.
pub const DENSE_CAP: usize = 1 << 14;

/// Number of random vectors used for unitarity and reflection checks.
pub const RANDOM_PROBES: usize = 8;

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub sys_dim: usize,
    pub anc_qubits: u32,
    /// Ancilla count quoted for this construction in circuit form.
    pub paper_anc: u32,
    pub gamma: f64,
    pub op: OpRef,
}

impl BlockEncoding {
    pub fn new(sys_dim: usize, anc_qubits: u32, paper_anc: u32, gamma: f64, op: OpRef) -> Self {
        assert_eq!(op.dim(), sys_dim << anc_qubits, "operator dimension does not match 2^c * N");
        assert!(gamma > 0.0);
        Self { sys_dim, anc_qubits, paper_anc, gamma, op }
    }

    pub fn anc_dim(&self) -> usize {
        1 << self.anc_qubits
    }

    pub fn total_dim(&self) -> usize {
        self.sys_dim << self.anc_qubits
    }

    /// Explicit unitary, or `None` above [`DENSE_CAP`].
    pub fn dense(&self) -> Option<DMatrix<C64>> {
        (self.total_dim() <= DENSE_CAP).then(|| to_dense(self.op.as_ref()))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.op.apply(v)
    }

    pub fn adjoint_apply(&self, v: &[C64]) -> Vec<C64> {
        self.op.apply_adjoint(v)
    }

    pub(crate) fn with_op(&self, op: OpRef) -> Self {
        Self::new(self.sys_dim, self.anc_qubits, self.paper_anc, self.gamma, op)
    }
}

/// `gamma (<0^c| (x) I) V (|0^c> (x) I)`, computed column by column.
pub fn extract_block(be: &BlockEncoding) -> DMatrix<C64> {
    let n = be.sys_dim;
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        let col = be.op.apply(&crate::linalg::basis(be.total_dim(), x));
        for y in 0..n {
            m[(y, x)] = col[y] * be.gamma;
        }
    }
    m
}

/// Real part of the encoded matrix and the largest imaginary part discarded.
pub fn extract_block_real(be: &BlockEncoding) -> (DMatrix<f64>, f64) {
    crate::linalg::real_part(&extract_block(be))
}

/// Largest `| ||U v|| - ||v|| |` and `||U^dagger U v - v||` over seeded random vectors.
pub fn unitarity_defect(op: &dyn LinearOp, probes: usize, seed: u64) -> f64 {
    let mut s = VecSampler::new(seed);
    (0..probes)
        .map(|_| {
            let v = s.unit(op.dim());
            let u = op.apply(&v);
            let back = op.apply_adjoint(&u);
            (vec_norm(&u) - 1.0).abs().max(vec_dist(&back, &v))
        })
        .fold(0.0, f64::max)
}

/// Largest `||W W v - v||` over seeded random vectors.
pub fn reflection_defect(op: &dyn LinearOp, probes: usize, seed: u64) -> f64 {
    let mut s = VecSampler::new(seed);
    (0..probes)
        .map(|_| {
            let v = s.unit(op.dim());
            vec_dist(&op.apply(&op.apply(&v)), &v)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub max_abs_dev: f64,
    pub unitarity_dev: f64,
    pub pass: bool,
}

pub fn verify_encoding(be: &BlockEncoding, target: &DMatrix<C64>, tol: f64) -> Result<VerifyReport> {
    if target.nrows() != be.sys_dim || target.ncols() != be.sys_dim {
        return Err(Error::DimensionMismatch { expected: be.sys_dim, got: target.nrows().max(target.ncols()) });
    }
    let max_abs_dev = max_abs_diff_c(&extract_block(be), target);
    let unitarity_dev = unitarity_defect(be.op.as_ref(), RANDOM_PROBES, 0x5eed);
    Ok(VerifyReport {
        max_abs_dev,
        unitarity_dev,
        pass: max_abs_dev <= tol && unitarity_dev <= crate::markov::STRUCT_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    /// `sqrt(||X||_1 ||X||_inf)`
    pub bound: f64,
    pub spectral_norm: f64,
    pub holds: bool,
}

pub fn norm_bound(x: &DMatrix<f64>) -> NormBound {
    let col_max = x.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let row_max = x.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let bound = (col_max * row_max).sqrt();
    let spectral_norm = if x.is_empty() { 0.0 } else { x.clone().svd(false, false).singular_values.max() };
    NormBound { bound, spectral_norm, holds: spectral_norm <= bound * (1.0 + 1e-12) + 1e-12 }
}

pub(crate) fn arc<T: LinearOp + 'static>(op: T) -> OpRef {
    Arc::new(op)
}
