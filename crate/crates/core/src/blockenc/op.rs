//! Matrix-free operators on `C^d`.
//!
//! Composite spaces are described by a list of register sizes, most
//! significant first, so the flat index of `|r_0, r_1, ..>` is the mixed-radix
//! number with digits `r_0, r_1, ..`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::linalg::{C64, ZERO};
use crate::perm::Permutation;

pub trait LinearOp: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64>;
}

pub type OpRef = Arc<dyn LinearOp>;

/// Dense matrix of an operator, built column by column.
pub fn to_dense(op: &dyn LinearOp) -> DMatrix<C64> {
    let d = op.dim();
    let mut m = DMatrix::zeros(d, d);
    for c in 0..d {
        let col = op.apply(&crate::linalg::basis(d, c));
        m.column_mut(c).copy_from_slice(&col);
    }
    m
}

#[derive(Debug, Clone)]
pub struct Identity(pub usize);

impl LinearOp for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        v.to_vec()
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        v.to_vec()
    }
}

/// `|x> -> |perm(x)>`.
#[derive(Debug, Clone)]
pub struct PermutationOp(pub Permutation);

impl LinearOp for PermutationOp {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for (x, z) in v.iter().enumerate() {
            out[self.0.image(x)] = *z;
        }
        out
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for (y, z) in v.iter().enumerate() {
            out[self.0.preimage(y)] = *z;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DenseOp {
    m: DMatrix<C64>,
    adj: DMatrix<C64>,
}

impl DenseOp {
    pub fn new(m: DMatrix<C64>) -> Self {
        assert!(m.is_square());
        let adj = m.adjoint();
        Self { m, adj }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }
}

fn mat_vec(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; m.nrows()];
    for (c, &z) in v.iter().enumerate() {
        if z == ZERO {
            continue;
        }
        for (o, a) in out.iter_mut().zip(m.column(c).iter()) {
            *o += a * z;
        }
    }
    out
}

impl LinearOp for DenseOp {
    fn dim(&self) -> usize {
        self.m.nrows()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        mat_vec(&self.m, v)
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        mat_vec(&self.adj, v)
    }
}

/// `inner` acting on a subset of registers, identity on the rest.
#[derive(Debug, Clone)]
pub struct Embedded {
    inner: OpRef,
    dim: usize,
    local: Vec<usize>,
    bases: Vec<usize>,
}

impl Embedded {
    /// `targets` lists register positions in the inner operator's own order
    /// (first = most significant digit of its index).
    pub fn new(inner: OpRef, dims: &[usize], targets: &[usize]) -> Self {
        let dim: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for r in (0..dims.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        let inner_dim: usize = targets.iter().map(|&t| dims[t]).product();
        assert_eq!(inner.dim(), inner_dim, "embedded operator does not fit its registers");

        let local: Vec<usize> = (0..inner_dim)
            .map(|mut j| {
                let mut off = 0;
                for &t in targets.iter().rev() {
                    off += (j % dims[t]) * strides[t];
                    j /= dims[t];
                }
                off
            })
            .collect();

        let rest: Vec<usize> = (0..dims.len()).filter(|r| !targets.contains(r)).collect();
        let rest_dim: usize = rest.iter().map(|&r| dims[r]).product();
        let bases = (0..rest_dim)
            .map(|mut j| {
                let mut off = 0;
                for &r in rest.iter().rev() {
                    off += (j % dims[r]) * strides[r];
                    j /= dims[r];
                }
                off
            })
            .collect();
        Self { inner, dim, local, bases }
    }

    fn run(&self, v: &[C64], adjoint: bool) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        let mut buf = vec![ZERO; self.local.len()];
        for &b in &self.bases {
            for (slot, &l) in buf.iter_mut().zip(&self.local) {
                *slot = v[b + l];
            }
            let res = if adjoint { self.inner.apply_adjoint(&buf) } else { self.inner.apply(&buf) };
            for (z, &l) in res.into_iter().zip(&self.local) {
                out[b + l] = z;
            }
        }
        out
    }
}

impl LinearOp for Embedded {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.run(v, false)
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.run(v, true)
    }
}

/// Applies `factors[0]` first, then `factors[1]`, ...
#[derive(Debug, Clone)]
pub struct Product(pub Vec<OpRef>);

impl LinearOp for Product {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.0.iter().fold(v.to_vec(), |acc, f| f.apply(&acc))
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.0.iter().rev().fold(v.to_vec(), |acc, f| f.apply_adjoint(&acc))
    }
}

/// `sum_k |k><k| (x) U_k`; empty slots act as the identity.
#[derive(Debug, Clone)]
pub struct Select {
    branches: Vec<Option<OpRef>>,
    block: usize,
}

impl Select {
    pub fn new(branches: Vec<Option<OpRef>>, block: usize) -> Self {
        for b in branches.iter().flatten() {
            assert_eq!(b.dim(), block);
        }
        Self { branches, block }
    }

    fn run(&self, v: &[C64], adjoint: bool) -> Vec<C64> {
        let mut out = Vec::with_capacity(v.len());
        for (k, chunk) in v.chunks(self.block).enumerate() {
            match &self.branches[k] {
                Some(op) if adjoint => out.extend(op.apply_adjoint(chunk)),
                Some(op) => out.extend(op.apply(chunk)),
                None => out.extend_from_slice(chunk),
            }
        }
        out
    }
}

impl LinearOp for Select {
    fn dim(&self) -> usize {
        self.branches.len() * self.block
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.run(v, false)
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.run(v, true)
    }
}

/// `|0><1| (x) U + |1><0| (x) U^dagger`, hermitian and squaring to the identity.
#[derive(Debug, Clone)]
pub struct OffDiagonalReflection(pub OpRef);

impl LinearOp for OffDiagonalReflection {
    fn dim(&self) -> usize {
        2 * self.0.dim()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.0.dim();
        let mut out = self.0.apply(&v[d..]);
        out.extend(self.0.apply_adjoint(&v[..d]));
        out
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.apply(v)
    }
}
