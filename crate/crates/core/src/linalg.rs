//! Small dense helpers shared by the other modules.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub type C64 = Complex<f64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };

/// Number of qubits needed for a register of dimension `d` (0 for `d <= 1`).
pub fn ceil_log2(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs_diff_c(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    max_abs_diff(a, &a.transpose())
}

pub fn to_complex(a: &DMatrix<f64>) -> DMatrix<C64> {
    a.map(|x| Complex::new(x, 0.0))
}

/// Real part of a complex matrix together with the largest imaginary magnitude dropped.
pub fn real_part(a: &DMatrix<C64>) -> (DMatrix<f64>, f64) {
    let im = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (a.map(|z| z.re), im)
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Sorted (descending) eigenvalues and matching eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(q: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(q.clone());
    let mut order: Vec<usize> = (0..q.nrows()).collect();
    // stable sort keeps ties in solver order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Seeded source of random test vectors.
pub struct VecSampler {
    rng: SplitMix64,
}

impl VecSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed) }
    }

    /// Random complex vector with unit 2-norm.
    pub fn unit(&mut self, dim: usize) -> Vec<C64> {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| Complex::new(self.rng.random::<f64>() - 0.5, self.rng.random::<f64>() - 0.5))
            .collect();
        let n = vec_norm(&v);
        v.iter_mut().for_each(|z| *z /= n);
        v
    }
}

pub fn dvector(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_small_values() {
        let got: Vec<u32> = [1, 2, 3, 4, 5, 8, 9, 16, 20, 91].iter().map(|&d| ceil_log2(d)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 4, 5, 7]);
    }

    #[test]
    fn symmetric_eigen_is_descending() {
        let q = DMatrix::from_row_slice(2, 2, &[0.5, 0.5f64.sqrt(), 0.5f64.sqrt(), 0.0]);
        let (vals, vecs) = symmetric_eigen(&q);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] + 0.5).abs() < 1e-12);
        let recon = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals)) * vecs.transpose();
        assert!(max_abs_diff(&recon, &q) < 1e-12);
    }
}
