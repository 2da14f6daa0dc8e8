//! Spectra of walks `U = S (2 T T^dagger - I)` built from an isometry `T` and a
//! reflection `S` with `T^dagger S T = Q`.
//!
//! Each eigenvector `phi_j` of `Q` spans, together with its image under `S`, an
//! invariant plane on which `U` has eigenvalues `e^{+-i arccos lambda_j}`. The
//! union of these planes is the subspace `B`; on its complement `U = -S`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use crate::blockenc::op::{DenseOp, LinearOp, OpRef};
use crate::blockenc::BlockEncoding;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff_c, symmetric_eigen, to_complex, vec_dist, vec_norm, VecSampler, C64, ZERO};
use crate::markov::EIG_TOL;
use crate::szegedy::ReflectionWalk;

/// Phases closer to zero than this are treated as exactly zero.
pub const PHASE_SNAP: f64 = 1e-10;
/// Per-phase tolerance when matching against `+-arccos lambda`.
pub const PHASE_TOL: f64 = 1e-8;
/// Eigenvalues this close to `+-1` are taken to be exactly `+-1`; `arccos`
/// turns a rounding error `e` there into a phase error of `sqrt(2e)`.
pub const EIG_SNAP: f64 = 1e-14;

/// `arccos lambda` with `lambda` snapped onto `+-1` within [`EIG_SNAP`].
pub fn stable_acos(lambda: f64) -> f64 {
    if lambda >= 1.0 - EIG_SNAP {
        0.0
    } else if lambda <= -1.0 + EIG_SNAP {
        std::f64::consts::PI
    } else {
        lambda.acos()
    }
}
/// Below this norm `S chi - lambda chi` is taken to vanish.
const PLANE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatch {
    /// Index of the eigenvalue of `Q` (descending order).
    pub index: usize,
    pub lambda: f64,
    pub predicted: f64,
    pub measured: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpectrum {
    /// Eigenvalues of `Q`, descending.
    pub lambdas: Vec<f64>,
    /// Eigenphases of `U` on `B`, sorted, in `(-pi, pi]`.
    pub eigenphases: Vec<f64>,
    pub matches: Vec<PhaseMatch>,
    /// Smallest `|phase|` on `B` once the phase of the top eigenvalue is set aside.
    pub phase_gap: f64,
    pub b_dim: usize,
    pub b_perp_dim: usize,
    /// Largest `||U v - mu v||` over the predicted eigenvectors `chi - mu S chi`.
    pub eigvec_residual: f64,
    /// Largest `||U^2 v - v||` over random vectors in `B-perp`.
    pub b_perp_residual: f64,
    /// Largest `|<v_+|v_->|` between the two eigenvectors of each plane.
    pub pair_overlap: f64,
}

impl WalkSpectrum {
    pub fn max_phase_error(&self) -> f64 {
        self.matches.iter().map(|m| m.abs_err).fold(0.0, f64::max)
    }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Maps an angle into `(-pi, pi]`, snapping tiny values to zero.
fn normalize_phase(p: f64) -> f64 {
    let mut p = p;
    if p <= -PI {
        p += 2.0 * PI;
    }
    if p > PI {
        p -= 2.0 * PI;
    }
    if p.abs() < PHASE_SNAP {
        0.0
    } else {
        p
    }
}

fn col(m: &DMatrix<C64>, j: usize) -> Vec<C64> {
    m.column(j).iter().copied().collect()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Phases of `U` on `B`, matched against `{+-arccos lambda_j}`.
pub fn walk_spectrum(walk: &dyn ReflectionWalk, q: &DMatrix<f64>) -> Result<WalkSpectrum> {
    let t = walk.isometry();
    let s = walk.reflection();
    let (m, n) = t.shape();
    if q.shape() != (n, n) || s.dim() != m {
        return Err(Error::DimensionMismatch { expected: n, got: q.nrows() });
    }
    let (lambdas, phis) = symmetric_eigen(q);
    if let Some(&value) = lambdas.iter().find(|l| l.abs() > 1.0 + EIG_TOL) {
        return Err(Error::SpectrumOutOfRange { value });
    }

    // basis of B: chi_j and the normalized part of S chi_j orthogonal to it
    let chi = t * to_complex(&phis);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(2 * n);
    let mut planes: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut s_chi = Vec::with_capacity(n);
    for (j, &lambda) in lambdas.iter().enumerate() {
        let c = col(&chi, j);
        let sc = s.apply(&c);
        let orth: Vec<C64> = sc.iter().zip(&c).map(|(a, b)| a - b * lambda).collect();
        let norm = vec_norm(&orth);
        basis.push(c);
        if norm > PLANE_TOL {
            basis.push(orth.into_iter().map(|z| z / norm).collect());
            planes.push((j, Some(basis.len() - 1)));
        } else {
            planes.push((j, None));
        }
        s_chi.push(sc);
    }
    let k = basis.len();

    let u = |v: &[C64]| apply_walk(t, s, v);
    let images: Vec<Vec<C64>> = basis.iter().map(|b| u(b)).collect();
    let ub = DMatrix::from_fn(k, k, |r, c| inner(&basis[r], &images[c]));
    let eig = ub.clone().try_schur(1e-15, 20_000).and_then(|s| s.eigenvalues()).ok_or_else(|| Error::IdentityFailed {
        what: "Schur decomposition of the walk on B".into(),
        deviation: f64::NAN,
    })?;
    let mut measured: Vec<f64> = eig.iter().map(|z| normalize_phase(z.arg())).collect();
    measured.sort_by(f64::total_cmp);

    // predicted phases in the order of the eigenvalues of Q
    let mut predicted: Vec<(usize, f64, f64)> = Vec::with_capacity(k);
    for &(j, other) in &planes {
        let lambda = lambdas[j];
        match other {
            Some(_) => {
                let theta = stable_acos(lambda);
                predicted.push((j, lambda, theta));
                predicted.push((j, lambda, -theta));
            }
            None if lambda > 0.0 => predicted.push((j, lambda, 0.0)),
            None => predicted.push((j, lambda, PI)),
        }
    }

    // greedy nearest-neighbour pairing on the circle
    let mut used = vec![false; measured.len()];
    let mut matches = Vec::with_capacity(k);
    let mut unmatched = Vec::new();
    for (index, lambda, pred) in predicted {
        let best = (0..measured.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| circ_dist(measured[a], pred).total_cmp(&circ_dist(measured[b], pred)));
        match best {
            Some(i) if circ_dist(measured[i], pred) <= PHASE_TOL => {
                used[i] = true;
                let abs_err = circ_dist(measured[i], pred);
                matches.push(PhaseMatch { index, lambda, predicted: pred, measured: measured[i], abs_err });
            }
            _ => unmatched.push(pred),
        }
    }
    unmatched.extend(measured.iter().zip(&used).filter(|(_, &u)| !u).map(|(p, _)| *p));
    if !unmatched.is_empty() {
        return Err(Error::SpectrumMismatch { unmatched });
    }

    // eigenvectors chi - mu S chi of each plane
    let mut eigvec_residual = 0.0f64;
    let mut pair_overlap = 0.0f64;
    for &(j, other) in &planes {
        if other.is_none() {
            continue;
        }
        let theta = stable_acos(lambdas[j]);
        let c = &col(&chi, j);
        let mut vs = Vec::new();
        for sign in [1.0, -1.0] {
            let mu = Complex::from_polar(1.0, sign * theta);
            let v: Vec<C64> = c.iter().zip(&s_chi[j]).map(|(a, b)| a - mu * b).collect();
            let nv = vec_norm(&v);
            let uv = u(&v);
            let muv: Vec<C64> = v.iter().map(|z| z * mu).collect();
            eigvec_residual = eigvec_residual.max(vec_dist(&uv, &muv) / nv);
            vs.push(v.into_iter().map(|z| z / nv).collect::<Vec<_>>());
        }
        pair_overlap = pair_overlap.max(inner(&vs[0], &vs[1]).norm());
    }

    // U^2 = I on the complement of B
    let mut sampler = VecSampler::new(0xb9e7);
    let mut b_perp_residual = 0.0f64;
    if k < m {
        for _ in 0..4 {
            let mut v = sampler.unit(m);
            for b in &basis {
                let c = inner(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let nv = vec_norm(&v);
            if nv < 1e-6 {
                continue;
            }
            let uu = u(&u(&v));
            b_perp_residual = b_perp_residual.max(vec_dist(&uu, &v) / nv);
        }
    }

    let phase_gap = phase_gap(&measured);
    Ok(WalkSpectrum {
        lambdas,
        eigenphases: measured,
        matches,
        phase_gap,
        b_dim: k,
        b_perp_dim: m - k,
        eigvec_residual,
        b_perp_residual,
        pair_overlap,
    })
}

/// Smallest `|phase|` after setting aside one zero phase (the fixed point).
fn phase_gap(phases: &[f64]) -> f64 {
    let mut mags: Vec<f64> = phases.iter().map(|p| p.abs()).collect();
    mags.sort_by(f64::total_cmp);
    if mags.first() == Some(&0.0) {
        mags.remove(0);
    }
    mags.first().copied().unwrap_or(0.0)
}

/// `S (2 T T^dagger - I) v`
fn apply_walk(t: &DMatrix<C64>, s: &dyn LinearOp, v: &[C64]) -> Vec<C64> {
    let proj = t * t.ad_mul(&DVector::from_column_slice(v));
    let r: Vec<C64> = proj.iter().zip(v).map(|(p, x)| p * 2.0 - x).collect();
    s.apply(&r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub phase_gap: f64,
    /// `arccos(1 - delta_plus)`
    pub expected: f64,
    /// `sqrt(2 delta_plus)`
    pub lower_bound: f64,
}

pub fn phase_gap_check(spec: &WalkSpectrum, delta_plus: f64) -> Result<GapReport> {
    if !(delta_plus >= 0.0) {
        return Err(Error::BoundViolated(format!("one-sided gap {delta_plus} is negative")));
    }
    let expected = stable_acos(1.0 - delta_plus);
    let lower_bound = (2.0 * delta_plus).sqrt();
    let report = GapReport { phase_gap: spec.phase_gap, expected, lower_bound };
    if (spec.phase_gap - expected).abs() > PHASE_TOL {
        return Err(Error::BoundViolated(format!(
            "phase gap {} differs from arccos(1 - {delta_plus}) = {expected}",
            spec.phase_gap
        )));
    }
    if spec.phase_gap < lower_bound - 1e-12 {
        return Err(Error::BoundViolated(format!(
            "phase gap {} below sqrt(2 * {delta_plus}) = {lower_bound}",
            spec.phase_gap
        )));
    }
    Ok(report)
}

/// Two-dimensional embedding of each eigenvector of `Q`: index `2j + b`.
#[derive(Debug, Clone)]
pub struct EigenbasisEmbedding {
    pub thetas: Vec<f64>,
    t: DMatrix<C64>,
    s: OpRef,
    pub deviation: f64,
}

impl ReflectionWalk for EigenbasisEmbedding {
    fn isometry(&self) -> &DMatrix<C64> {
        &self.t
    }
    fn reflection(&self) -> &dyn LinearOp {
        self.s.as_ref()
    }
}

/// `T |phi_j> = |j> (x) (cos(theta_j/2)|0> + sin(theta_j/2)|1>)` with
/// `theta_j = arccos lambda_j`, and `S = I (x) Z`.
pub fn eigenbasis_embedding(q: &DMatrix<f64>) -> Result<EigenbasisEmbedding> {
    let n = q.nrows();
    let deviation = crate::linalg::asymmetry(q);
    if deviation > crate::markov::STRUCT_TOL {
        return Err(Error::NotSymmetric { deviation });
    }
    let (lambdas, phis) = symmetric_eigen(q);
    if let Some(&value) = lambdas.iter().find(|l| **l > 1.0 + EIG_TOL || **l <= -1.0 - EIG_TOL) {
        return Err(Error::SpectrumOutOfRange { value });
    }
    let thetas: Vec<f64> = lambdas.iter().map(|l| stable_acos(*l)).collect();
    let mut chi = DMatrix::<f64>::zeros(2 * n, n);
    for (j, th) in thetas.iter().enumerate() {
        chi[(2 * j, j)] = (th / 2.0).cos();
        chi[(2 * j + 1, j)] = (th / 2.0).sin();
    }
    let t = to_complex(&(chi * phis.transpose()));
    let z = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 }));
    let s = to_complex(&z);
    let deviation = max_abs_diff_c(&(t.adjoint() * &s * &t), &to_complex(q));
    if deviation > EIG_TOL {
        return Err(Error::IdentityFailed { what: "T^dagger S T = Q".into(), deviation });
    }
    Ok(EigenbasisEmbedding { thetas, t, s: Arc::new(DenseOp::new(s)), deviation })
}

/// A reflection encoding `V` of `L / gamma` read as a walk: `T` embeds into the
/// ancilla-zero block and `T^dagger V T = L / gamma`.
#[derive(Debug, Clone)]
pub struct EncodingWalk {
    t: DMatrix<C64>,
    s: OpRef,
}

impl EncodingWalk {
    pub fn new(be: &BlockEncoding) -> Self {
        let mut t = DMatrix::from_element(be.total_dim(), be.sys_dim, ZERO);
        for x in 0..be.sys_dim {
            t[(x, x)] = Complex::new(1.0, 0.0);
        }
        Self { t, s: be.op.clone() }
    }
}

impl ReflectionWalk for EncodingWalk {
    fn isometry(&self) -> &DMatrix<C64> {
        &self.t
    }
    fn reflection(&self) -> &dyn LinearOp {
        self.s.as_ref()
    }
}
