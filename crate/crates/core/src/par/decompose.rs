use nalgebra::DMatrix;

use super::acceptance::{acceptance_matrix, AcceptanceRule};
use super::proposal::ProposalDecomposition;
use crate::blockenc::norm_bound;
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs_diff};
use crate::markov::{gibbs_distribution, GibbsModel, StochasticMatrix, PROB_TOL, STRUCT_TOL};

/// An `N x N` matrix whose `(y, x)` entry depends only on `(E_y, E_x)`,
/// stored as its `B x B` compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDependentMatrix {
    compressed: DMatrix<f64>,
}

impl EnergyDependentMatrix {
    pub fn from_fn(levels: u32, f: impl Fn(u32, u32) -> f64) -> Self {
        let b = levels as usize;
        Self { compressed: DMatrix::from_fn(b, b, |r, c| f(r as u32, c as u32)) }
    }

    pub fn levels(&self) -> u32 {
        self.compressed.nrows() as u32
    }

    /// Entry `g(E', E)`.
    pub fn entry(&self, e_row: u32, e_col: u32) -> f64 {
        self.compressed[(e_row as usize, e_col as usize)]
    }

    /// Full matrix on the state space: `(y, x) -> g(E_y, E_x)`.
    pub fn expand(&self, energies: &[u32]) -> DMatrix<f64> {
        let n = energies.len();
        DMatrix::from_fn(n, n, |y, x| self.entry(energies[y], energies[x]))
    }
}

/// The compressed matrix `L-hat`.
pub fn compress(mat: &EnergyDependentMatrix) -> DMatrix<f64> {
    mat.compressed.clone()
}

/// Recovers `L-hat` from an expanded matrix, checking that it really is
/// energy-dependent. Unoccupied energy levels come back as zero rows/columns.
pub fn compress_expanded(l: &DMatrix<f64>, energies: &[u32], levels: u32) -> Result<EnergyDependentMatrix> {
    let n = energies.len();
    if l.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: l.nrows() });
    }
    let b = levels as usize;
    let mut hat = DMatrix::<f64>::zeros(b, b);
    let mut seen = DMatrix::from_element(b, b, false);
    for y in 0..n {
        for x in 0..n {
            let (ey, ex) = (energies[y] as usize, energies[x] as usize);
            if ey >= b || ex >= b {
                return Err(Error::EnergyOutOfRange { state: y.max(x), energy: ey.max(ex) as u32, levels });
            }
            if seen[(ey, ex)] {
                let deviation = (hat[(ey, ex)] - l[(y, x)]).abs();
                if deviation > PROB_TOL {
                    return Err(Error::DecompositionMismatch { what: "not energy-dependent".into(), deviation });
                }
            } else {
                hat[(ey, ex)] = l[(y, x)];
                seen[(ey, ex)] = true;
            }
        }
    }
    Ok(EnergyDependentMatrix { compressed: hat })
}

/// Builds `P` from a dense symmetric proposal: `p_yx = a_yx s_yx` off the
/// diagonal, rejected mass stays on the diagonal.
pub fn transition_from_proposal(s: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<StochasticMatrix> {
    if s.shape() != a.shape() {
        return Err(Error::DimensionMismatch { expected: s.nrows(), got: a.nrows() });
    }
    let n = s.nrows();
    let mut p = a.component_mul(s);
    for x in 0..n {
        let moved: f64 = (0..n).filter(|&y| y != x).map(|y| p[(y, x)]).sum();
        let stay = 1.0 - moved;
        if stay < -PROB_TOL {
            return Err(Error::NegativeDiagonal { state: x, value: stay });
        }
        p[(x, x)] = stay.max(0.0);
    }
    StochasticMatrix::new(p)
}

pub fn transition_matrix(prop: &ProposalDecomposition, a: &DMatrix<f64>) -> Result<StochasticMatrix> {
    transition_from_proposal(&prop.assemble(), a)
}

/// `g_yx = e^{beta (E_y - E_x) / 2}` in compressed form.
pub fn g_matrix(model: &GibbsModel) -> EnergyDependentMatrix {
    let beta = model.beta();
    EnergyDependentMatrix::from_fn(model.levels(), |ey, ex| (0.5 * beta * (ey as f64 - ex as f64)).exp())
}

/// Compressed `G (.) A`: `g(E', E) f(E' - E)`.
pub fn ga_hat(model: &GibbsModel, rule: &AcceptanceRule) -> EnergyDependentMatrix {
    let beta = model.beta();
    EnergyDependentMatrix::from_fn(model.levels(), |ey, ex| {
        let d = ey as i64 - ex as i64;
        (0.5 * beta * d as f64).exp() * rule.eval(d, beta)
    })
}

/// Compressed `J - A`: `1 - f(E' - E)`.
pub fn ja_hat(model: &GibbsModel, rule: &AcceptanceRule) -> EnergyDependentMatrix {
    let beta = model.beta();
    EnergyDependentMatrix::from_fn(model.levels(), |ey, ex| 1.0 - rule.eval(ey as i64 - ex as i64, beta))
}

/// Checks `||L-hat|| <= sqrt(||L-hat||_1 ||L-hat||_inf) <= B` for both compressed factors.
pub fn compressed_factors(model: &GibbsModel, rule: &AcceptanceRule) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    rule.validate(model.beta(), model.levels())?;
    let ga = compress(&ga_hat(model, rule));
    let ja = compress(&ja_hat(model, rule));
    let b = model.levels() as f64;
    for (name, m) in [("G.A", &ga), ("J-A", &ja)] {
        let nb = norm_bound(m);
        if !nb.holds || nb.bound > b * (1.0 + PROB_TOL) {
            return Err(Error::BoundViolated(format!(
                "{name}: norm {} bound {} energy bound {b}",
                nb.spectral_norm, nb.bound
            )));
        }
    }
    Ok((ga, ja))
}

/// `R = sum_k w_k P_k^T ((J - A) (.) P_k)`, computed term by term.
pub fn r_matrix(prop: &ProposalDecomposition, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = prop.n();
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
    }
    let reject = a.map(|v| 1.0 - v);
    let mut r = DMatrix::zeros(n, n);
    for (w, p) in prop.terms() {
        let pm = p.matrix();
        r += (pm.transpose() * reject.component_mul(&pm)) * w;
    }
    let mut off = r.clone();
    off.fill_diagonal(0.0);
    let deviation = off.amax();
    if deviation > 0.0 {
        return Err(Error::NotDiagonal { deviation });
    }
    Ok(r)
}

/// Factors of `Q = (G (.) A) (.) S + R` together with the chain they came from.
#[derive(Debug, Clone)]
pub struct DiscriminantDecomposition {
    pub a: DMatrix<f64>,
    pub g: DMatrix<f64>,
    /// `G (.) A`
    pub ga: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub p: StochasticMatrix,
    /// `D^{-1/2} P D^{1/2}` with the Gibbs distribution.
    pub q: DMatrix<f64>,
    /// Largest entrywise deviation of `(G (.) A) (.) S + R` from `q`.
    pub deviation: f64,
}

pub fn decompose_discriminant(
    model: &GibbsModel,
    prop: &ProposalDecomposition,
    rule: &AcceptanceRule,
) -> Result<DiscriminantDecomposition> {
    let a = acceptance_matrix(model, rule)?;
    decompose_with_acceptance(model, prop, a)
}

/// Same as [`decompose_discriminant`] with an explicit acceptance matrix.
/// No functional-equation check is done on `a`; a corrupted matrix surfaces
/// as a [`Error::DecompositionMismatch`].
pub fn decompose_with_acceptance(
    model: &GibbsModel,
    prop: &ProposalDecomposition,
    a: DMatrix<f64>,
) -> Result<DiscriminantDecomposition> {
    let n = model.n();
    if prop.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: prop.n() });
    }
    let s = prop.assemble();
    let p = transition_from_proposal(&s, &a)?;
    let r = r_matrix(prop, &a)?;

    let dev = max_abs_diff(&(a.component_mul(&s) + &r), p.matrix());
    if dev > STRUCT_TOL {
        return Err(Error::DecompositionMismatch { what: "P = A.S + R".into(), deviation: dev });
    }

    let g = g_matrix(model).expand(model.energies());
    let ga = g.component_mul(&a);
    let decomposed = ga.component_mul(&s) + &r;

    let sq = gibbs_distribution(model).probs().map(f64::sqrt);
    let q = DMatrix::from_fn(n, n, |y, x| p.prob(y, x) * sq[x] / sq[y]);
    let entrywise = DMatrix::from_fn(n, n, |y, x| (p.prob(y, x) * p.prob(x, y)).sqrt());
    let deviation = max_abs_diff(&decomposed, &q).max(max_abs_diff(&decomposed, &entrywise));
    if deviation > STRUCT_TOL {
        return Err(Error::DecompositionMismatch { what: "Q = (G.A).S + R".into(), deviation });
    }

    let dev = max_abs_diff(&q, &g.component_mul(p.matrix()));
    if dev > PROB_TOL {
        return Err(Error::DecompositionMismatch { what: "Q = G.P".into(), deviation: dev });
    }
    let dev = asymmetry(&ga);
    if dev > PROB_TOL {
        return Err(Error::DecompositionMismatch { what: "G.A symmetric".into(), deviation: dev });
    }
    if let Some(v) = ga.iter().find(|v| !(0.0..=1.0 + PROB_TOL).contains(*v)) {
        return Err(Error::DecompositionMismatch { what: "G.A entries in [0, 1]".into(), deviation: *v });
    }

    Ok(DiscriminantDecomposition { a, g, ga, s, r, p, q, deviation })
}
