//! Reversible Markov chain basics: Gibbs distributions, column-stochastic
//! matrices, detailed balance, discriminant matrices and spectral gaps.
//!
//! Matrices are column-stochastic: entry `(y, x)` is the probability of the
//! move `x -> y`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs_diff, symmetric_eigen};

/// Column sums and probability totals must match 1 to this precision.
pub const PROB_TOL: f64 = 1e-12;
/// Tolerance for structural identities such as the entrywise discriminant formula.
pub const STRUCT_TOL: f64 = 1e-10;
/// Tolerance for eigenvalue range checks.
pub const EIG_TOL: f64 = 1e-9;

/// A column-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    entries: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotStochastic(format!("shape {:?} is not square", entries.shape())));
        }
        if let Some(v) = entries.iter().find(|v| !(-PROB_TOL..=1.0 + PROB_TOL).contains(*v)) {
            return Err(Error::NotStochastic(format!("entry {v} outside [0, 1]")));
        }
        for (x, col) in entries.column_iter().enumerate() {
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::NotStochastic(format!("column {x} sums to {sum}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Probability of moving from `x` to `y`.
    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.entries[(y, x)]
    }
}

/// A strictly positive probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: DVector<f64>,
}

impl Distribution {
    pub fn new(probs: DVector<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(**p > 0.0)) {
            return Err(Error::BadDistribution(format!("entry {p} is not strictly positive")));
        }
        let sum = probs.sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::BadDistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &DVector<f64> {
        &self.probs
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        (&self.probs - &other.probs).amax()
    }
}

/// Integer energy landscape with an inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    energies: Vec<u32>,
    levels: u32,
    beta: f64,
    partition: f64,
}

impl GibbsModel {
    /// `levels` is the energy bound `B`: every energy must lie in `0..levels`.
    pub fn new(energies: Vec<u32>, levels: u32, beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidModel("empty state space".into()));
        }
        if levels == 0 {
            return Err(Error::InvalidModel("energy bound must be at least 1".into()));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidModel(format!("inverse temperature {beta} must be finite and >= 0")));
        }
        if let Some((state, &energy)) = energies.iter().enumerate().find(|(_, &e)| e >= levels) {
            return Err(Error::EnergyOutOfRange { state, energy, levels });
        }
        let partition = energies.iter().map(|&e| (-beta * e as f64).exp()).sum();
        Ok(Self { energies, levels, beta, partition })
    }

    /// Accepts real energies only when every value is a non-negative integer.
    pub fn from_real_energies(energies: &[f64], levels: u32, beta: f64) -> Result<Self> {
        let ints = energies
            .iter()
            .map(|&e| {
                if e >= 0.0 && e.fract() == 0.0 && e < u32::MAX as f64 {
                    Ok(e as u32)
                } else {
                    Err(Error::InvalidModel(format!("energy {e} is not a non-negative integer")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ints, levels, beta)
    }

    pub fn n(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[u32] {
        &self.energies
    }

    pub fn energy(&self, x: usize) -> u32 {
        self.energies[x]
    }

    /// The energy bound `B`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn partition_function(&self) -> f64 {
        self.partition
    }

    /// Energy difference `E_y - E_x`.
    pub fn delta(&self, y: usize, x: usize) -> i64 {
        self.energies[y] as i64 - self.energies[x] as i64
    }
}

/// Eigenvalue summary of a discriminant matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Two-sided gap `1 - max(l2, |lN|)`.
    pub delta: f64,
    /// One-sided gap `1 - l2`.
    pub delta_plus: f64,
    /// Gap of the lazy chain, `(1 - l2) / 2`.
    pub lazy_delta: f64,
    /// Smallest eigenvalue sits at -1.
    pub periodic: bool,
}

pub fn gibbs_distribution(model: &GibbsModel) -> Distribution {
    let z = model.partition_function();
    let probs = DVector::from_iterator(
        model.n(),
        model.energies().iter().map(|&e| (-model.beta() * e as f64).exp() / z),
    );
    Distribution { probs }
}

/// Fixed point of `P`, read off the null space of `P - I`.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<Distribution> {
    let n = p.n();
    let shifted = p.matrix() - DMatrix::<f64>::identity(n, n);
    let svd = nalgebra::SVD::new(shifted, false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    if n > 1 && svd.singular_values[order[1]] < STRUCT_TOL {
        return Err(Error::NotErgodic("eigenvalue 1 is degenerate".into()));
    }
    let mut v: DVector<f64> = v_t.row(order[0]).transpose();
    if v.sum() < 0.0 {
        v = -v;
    }
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotErgodic("fixed point has non-positive entries".into()));
    }
    let total = v.sum();
    Distribution::new(v / total)
}

/// True iff `max |p_xy pi_y - p_yx pi_x| <= tol`.
pub fn check_detailed_balance(p: &StochasticMatrix, pi: &Distribution, tol: f64) -> Result<bool> {
    if p.n() != pi.len() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: pi.len() });
    }
    Ok(detailed_balance_deviation(p, pi) <= tol)
}

fn detailed_balance_deviation(p: &StochasticMatrix, pi: &Distribution) -> f64 {
    let pr = pi.probs();
    let mut worst = 0.0f64;
    for x in 0..p.n() {
        for y in 0..x {
            worst = worst.max((p.prob(x, y) * pr[y] - p.prob(y, x) * pr[x]).abs());
        }
    }
    worst
}

/// `Q = D^{-1/2} P D^{1/2}` with `D = diag(pi)`.
///
/// The result is cross-checked against the entrywise form `sqrt(p_xy p_yx)`
/// and against symmetry; either failing means `P` is not reversible w.r.t. `pi`.
pub fn discriminant(p: &StochasticMatrix, pi: &Distribution) -> Result<DMatrix<f64>> {
    if p.n() != pi.len() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: pi.len() });
    }
    let sq = pi.probs().map(f64::sqrt);
    let q = DMatrix::from_fn(p.n(), p.n(), |y, x| p.prob(y, x) * sq[x] / sq[y]);
    let entrywise = DMatrix::from_fn(p.n(), p.n(), |y, x| (p.prob(y, x) * p.prob(x, y)).sqrt());
    let deviation = max_abs_diff(&q, &entrywise).max(asymmetry(&q));
    if deviation > STRUCT_TOL {
        return Err(Error::NotReversible { deviation });
    }
    Ok(q)
}

pub fn spectral_gaps(q: &DMatrix<f64>) -> Result<SpectralReport> {
    if !q.is_square() || q.nrows() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: q.nrows().min(q.ncols()) });
    }
    let deviation = asymmetry(q);
    if deviation > STRUCT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let (eigenvalues, _) = symmetric_eigen(q);
    if let Some(&value) = eigenvalues.iter().find(|l| l.abs() > 1.0 + EIG_TOL) {
        return Err(Error::SpectrumOutOfRange { value });
    }
    let l2 = eigenvalues[1];
    let ln = *eigenvalues.last().unwrap();
    let delta = 1.0 - l2.max(ln.abs());
    let delta_plus = 1.0 - l2;
    debug_assert!(delta_plus >= delta);
    Ok(SpectralReport {
        delta,
        delta_plus,
        lazy_delta: 0.5 * (1.0 - l2),
        periodic: ln <= -1.0 + PROB_TOL,
        eigenvalues,
    })
}

/// `(I + P) / 2`.
pub fn lazy(p: &StochasticMatrix) -> StochasticMatrix {
    let n = p.n();
    StochasticMatrix { entries: (DMatrix::<f64>::identity(n, n) + p.matrix()) * 0.5 }
}

/// Unit vector with amplitudes `sqrt(pi_x)`.
pub fn qsample(pi: &Distribution) -> DVector<f64> {
    pi.probs().map(f64::sqrt)
}
