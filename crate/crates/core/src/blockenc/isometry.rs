use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff_c, C64, ZERO};

/// Sparse isometry `C^N -> C^M` stored column by column as `(row, amplitude)` lists.
#[derive(Debug, Clone)]
pub struct Isometry {
    codomain: usize,
    columns: Vec<Vec<(usize, C64)>>,
}

impl Isometry {
    pub fn from_columns(codomain: usize, columns: Vec<Vec<(usize, C64)>>) -> Self {
        assert!(columns.iter().flatten().all(|&(r, _)| r < codomain));
        Self { codomain, columns }
    }

    /// `|x> -> |x>|x>` on `N x N` with the copy register most significant.
    pub fn copy(n: usize) -> Self {
        let cols = (0..n).map(|x| vec![(x * n + x, Complex::new(1.0, 0.0))]).collect();
        Self::from_columns(n * n, cols)
    }

    /// `|x> -> |E_x>|x>` with an energy register of dimension `levels`.
    pub fn energy(energies: &[u32], levels: usize) -> Result<Self> {
        let n = energies.len();
        let mut cols = Vec::with_capacity(n);
        for (x, &e) in energies.iter().enumerate() {
            if e as usize >= levels {
                return Err(Error::EnergyOutOfRange { state: x, energy: e, levels: levels as u32 });
            }
            cols.push(vec![(e as usize * n + x, Complex::new(1.0, 0.0))]);
        }
        Ok(Self::from_columns(levels * n, cols))
    }

    /// `|x> -> |+>|0^c>|x>` for an encoding with `anc_dim = 2^c` ancilla states.
    pub fn plus(anc_dim: usize, n: usize) -> Self {
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let half = anc_dim * n;
        let cols = (0..n).map(|x| vec![(x, h), (half + x, h)]).collect();
        Self::from_columns(2 * half, cols)
    }

    pub fn domain_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.codomain];
        for (col, &z) in self.columns.iter().zip(v) {
            for &(r, a) in col {
                out[r] += a * z;
            }
        }
        out
    }

    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.columns.iter().map(|col| col.iter().map(|&(r, a)| a.conj() * v[r]).sum()).collect()
    }

    pub fn dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.codomain, self.domain_dim());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                m[(r, c)] += a;
            }
        }
        m
    }

    /// `max |T^dagger T - I|`.
    pub fn isometry_defect(&self) -> f64 {
        let n = self.domain_dim();
        let gram = DMatrix::from_fn(n, n, |i, j| {
            let mut s = ZERO;
            for &(r, a) in &self.columns[i] {
                for &(q, b) in &self.columns[j] {
                    if r == q {
                        s += a.conj() * b;
                    }
                }
            }
            s
        });
        max_abs_diff_c(&gram, &DMatrix::identity(n, n))
    }

    /// `T^dagger X T` for an operator on the codomain.
    pub fn sandwich(&self, apply_x: impl Fn(&[C64]) -> Vec<C64>) -> DMatrix<C64> {
        let n = self.domain_dim();
        let mut m = DMatrix::zeros(n, n);
        for c in 0..n {
            let col = self.apply_adjoint(&apply_x(&self.apply(&crate::linalg::basis(n, c))));
            m.column_mut(c).copy_from_slice(&col);
        }
        m
    }
}
