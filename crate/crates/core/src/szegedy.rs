//! Dense Szegedy walks on a doubled state space, used as oracles.
//!
//! States of `C^N (x) C^N` are indexed `x * N + y`; the propose-accept/reject
//! variants append a flag qubit, `(x * N + y) * 2 + b`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::blockenc::op::{to_dense, LinearOp, OpRef, PermutationOp};
use crate::blockenc::{logical_ancilla_count, paper_ancilla_count};
use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, max_abs_diff_c, to_complex, C64, ZERO};
use crate::markov::{discriminant, stationary_distribution, Distribution, GibbsModel, StochasticMatrix, PROB_TOL, STRUCT_TOL};
use crate::par::{AcceptanceRule, ProposalDecomposition};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkVariant {
    Standard,
    Par,
    QuantumEnhanced,
}

/// An isometry `T` and a reflection `S` with `T^dagger S T = q`.
pub trait ReflectionWalk {
    fn isometry(&self) -> &DMatrix<C64>;
    fn reflection(&self) -> &dyn LinearOp;
}

/// `S (2 T T^dagger - I)`, applied without forming the projector.
#[derive(Debug, Clone)]
pub struct WalkOp {
    t: DMatrix<C64>,
    s: OpRef,
}

impl WalkOp {
    pub fn new(t: DMatrix<C64>, s: OpRef) -> Self {
        assert_eq!(t.nrows(), s.dim());
        Self { t, s }
    }

    fn reflect(&self, v: &[C64]) -> Vec<C64> {
        let tv = self.t.ad_mul(&DVector::from_column_slice(v));
        let proj = &self.t * tv;
        proj.iter().zip(v).map(|(p, x)| p * 2.0 - x).collect()
    }
}

impl LinearOp for WalkOp {
    fn dim(&self) -> usize {
        self.t.nrows()
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.s.apply(&self.reflect(v))
    }
    fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.reflect(&self.s.apply_adjoint(v))
    }
}

#[derive(Debug, Clone)]
pub struct SzegedyWalk {
    pub variant: WalkVariant,
    pub n: usize,
    t: DMatrix<C64>,
    reflection: OpRef,
    /// `T^dagger S T` (or `T^dagger R T`), real part.
    pub q: DMatrix<f64>,
    /// Largest deviation over the checks `T^dagger T = I`, `Pi^2 = Pi = Pi^dagger`
    /// and `T^dagger S T = Q`.
    pub identity_deviation: f64,
}

impl ReflectionWalk for SzegedyWalk {
    fn isometry(&self) -> &DMatrix<C64> {
        &self.t
    }
    fn reflection(&self) -> &dyn LinearOp {
        self.reflection.as_ref()
    }
}

impl SzegedyWalk {
    pub fn total_dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn reflection_op(&self) -> OpRef {
        self.reflection.clone()
    }

    /// `Pi = T T^dagger`.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.t * self.t.adjoint()
    }

    pub fn walk(&self) -> WalkOp {
        WalkOp::new(self.t.clone(), self.reflection.clone())
    }

    pub fn walk_dense(&self) -> DMatrix<C64> {
        to_dense(&self.walk())
    }

    /// `|psi_pi> = T sum_x sqrt(pi_x) |x>`.
    pub fn psi_pi(&self, pi: &Distribution) -> Vec<C64> {
        let qs = crate::markov::qsample(pi).map(|v| Complex::new(v, 0.0));
        (&self.t * qs).iter().copied().collect()
    }
}

fn swap_perm(n: usize) -> Permutation {
    Permutation::new((0..n * n).map(|i| (i % n) * n + i / n).collect()).expect("swap is a bijection")
}

/// Swap on the first two registers when the flag is 0, identity when it is 1.
fn controlled_swap_perm(n: usize) -> Permutation {
    Permutation::new(
        (0..2 * n * n)
            .map(|i| {
                let (xy, b) = (i / 2, i % 2);
                if b == 0 {
                    ((xy % n) * n + xy / n) * 2
                } else {
                    i
                }
            })
            .collect(),
    )
    .expect("controlled swap is a bijection")
}

fn finish(
    variant: WalkVariant,
    n: usize,
    t: DMatrix<C64>,
    perm: Permutation,
    oracle: &DMatrix<C64>,
) -> Result<SzegedyWalk> {
    let reflection: OpRef = std::sync::Arc::new(PermutationOp(perm));
    let gram = t.ad_mul(&t);
    let dev_iso = max_abs_diff_c(&gram, &DMatrix::identity(n, n));
    if dev_iso > STRUCT_TOL {
        return Err(Error::IdentityFailed { what: "T^dagger T = I".into(), deviation: dev_iso });
    }
    let pi = &t * t.adjoint();
    let dev_proj = max_abs_diff_c(&(&pi * &pi), &pi).max(max_abs_diff_c(&pi, &pi.adjoint()));
    if dev_proj > STRUCT_TOL {
        return Err(Error::IdentityFailed { what: "T T^dagger is a projector".into(), deviation: dev_proj });
    }
    let mut st = DMatrix::zeros(t.nrows(), n);
    for x in 0..n {
        let col: Vec<C64> = t.column(x).iter().copied().collect();
        st.column_mut(x).copy_from_slice(&reflection.apply(&col));
    }
    let tst = t.ad_mul(&st);
    let dev_q = max_abs_diff_c(&tst, oracle);
    if dev_q > STRUCT_TOL {
        return Err(Error::IdentityFailed { what: "T^dagger S T = Q".into(), deviation: dev_q });
    }
    Ok(SzegedyWalk {
        variant,
        n,
        t,
        reflection,
        q: tst.map(|z| z.re),
        identity_deviation: dev_iso.max(dev_proj).max(dev_q),
    })
}

/// `|psi_x> = |x> (x) sum_y sqrt(p_yx) |y>`, `W = S (2 Pi - I)`.
///
/// Reversibility is checked against the stationary distribution when the
/// chain is ergodic; otherwise `Q` is taken entrywise as `sqrt(p_xy p_yx)`.
pub fn standard_walk(p: &StochasticMatrix) -> Result<SzegedyWalk> {
    let n = p.n();
    let q = match stationary_distribution(p) {
        Ok(pi) => discriminant(p, &pi)?,
        Err(Error::NotErgodic(_)) => DMatrix::from_fn(n, n, |y, x| (p.prob(y, x) * p.prob(x, y)).sqrt()),
        Err(e) => return Err(e),
    };
    let mut t = DMatrix::from_element(n * n, n, ZERO);
    for x in 0..n {
        for y in 0..n {
            t[(x * n + y, x)] = Complex::new(p.prob(y, x).max(0.0).sqrt(), 0.0);
        }
    }
    finish(WalkVariant::Standard, n, t, swap_perm(n), &to_complex(&q))
}

/// Discriminant of the chain with proposal `s` and acceptance `a`:
/// `sqrt(a_yx a_xy) s_yx` off the diagonal, `1 - sum_{y != x} a_yx s_yx` on it.
pub fn par_discriminant(s: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = s.nrows();
    let mut q = DMatrix::from_fn(n, n, |y, x| if y == x { 0.0 } else { (a[(y, x)] * a[(x, y)]).sqrt() * s[(y, x)] });
    for x in 0..n {
        q[(x, x)] = 1.0 - (0..n).filter(|&y| y != x).map(|y| a[(y, x)] * s[(y, x)]).sum::<f64>();
    }
    q
}

fn check_acceptance(a: &DMatrix<f64>, n: usize) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
    }
    if let Some(v) = a.iter().find(|v| !(-PROB_TOL..=1.0 + PROB_TOL).contains(*v)) {
        return Err(Error::NotStochastic(format!("acceptance value {v} outside [0, 1]")));
    }
    Ok(())
}

fn par_isometry(n: usize, amp: impl Fn(usize, usize) -> C64, a: &DMatrix<f64>) -> DMatrix<C64> {
    let mut t = DMatrix::from_element(2 * n * n, n, ZERO);
    for x in 0..n {
        for y in 0..n {
            let acc = a[(y, x)].clamp(0.0, 1.0);
            let base = (x * n + y) * 2;
            t[(base, x)] = amp(y, x) * acc.sqrt();
            t[(base + 1, x)] = amp(y, x) * (1.0 - acc).sqrt();
        }
    }
    t
}

/// Walk for a chain given by a dense symmetric proposal matrix.
pub fn par_walk_from_matrix(s: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<SzegedyWalk> {
    let n = s.nrows();
    let deviation = crate::linalg::asymmetry(s);
    if deviation > PROB_TOL {
        return Err(Error::NotSymmetric { deviation });
    }
    StochasticMatrix::new(s.clone())?;
    check_acceptance(a, n)?;
    let t = par_isometry(n, |y, x| Complex::new(s[(y, x)].max(0.0).sqrt(), 0.0), a);
    finish(WalkVariant::Par, n, t, controlled_swap_perm(n), &to_complex(&par_discriminant(s, a)))
}

/// `|psi_x> = |x> (x) sum_y sqrt(s_yx) |y> (sqrt(a_yx)|0> + sqrt(1-a_yx)|1>)`,
/// reflected by the swap controlled on the flag being 0.
pub fn par_walk(prop: &ProposalDecomposition, a: &DMatrix<f64>) -> Result<SzegedyWalk> {
    par_walk_from_matrix(&prop.assemble(), a)
}

/// PAR walk whose proposal amplitudes come from a symmetric unitary `u`;
/// the induced chain has `s_yx = |u_yx|^2`.
pub fn quantum_enhanced_walk(u: &DMatrix<C64>, a: &DMatrix<f64>) -> Result<SzegedyWalk> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let n = u.nrows();
    let deviation = max_abs_diff_c(&u.ad_mul(u), &DMatrix::identity(n, n)).max(max_abs_diff_c(u, &u.transpose()));
    if deviation > STRUCT_TOL {
        return Err(Error::NotSymmetricUnitary { deviation });
    }
    check_acceptance(a, n)?;
    let s = u.map(|z| z.norm_sqr());
    let t = par_isometry(n, |y, x| u[(y, x)], a);
    finish(WalkVariant::QuantumEnhanced, n, t, controlled_swap_perm(n), &to_complex(&par_discriminant(&s, a)))
}

/// Register counts of the doubled-space walk against the compressed encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaComparison {
    pub n_states: usize,
    pub kappa: usize,
    pub levels: u32,
    /// Qubits beyond the system register for the PAR Szegedy walk: `ceil(log N) + 1`.
    pub szegedy: u32,
    /// `2 ceil(log kappa) + ceil(log B) + 2`.
    pub paper: u32,
    /// Qubits used by the implemented encoding.
    pub logical: u32,
    pub gamma_szegedy: f64,
    pub gamma_efficient: f64,
}

/// Counts from sizes alone; no matrix is built.
pub fn ancilla_counts(n_states: usize, kappa: usize, levels: u32) -> AncillaComparison {
    AncillaComparison {
        n_states,
        kappa,
        levels,
        szegedy: ceil_log2(n_states) + 1,
        paper: paper_ancilla_count(kappa, levels),
        logical: logical_ancilla_count(kappa, levels),
        gamma_szegedy: 1.0,
        gamma_efficient: 4.0 * levels as f64,
    }
}

pub fn ancilla_comparison(model: &GibbsModel, prop: &ProposalDecomposition, rule: &AcceptanceRule) -> Result<AncillaComparison> {
    if prop.n() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), got: prop.n() });
    }
    rule.validate(model.beta(), model.levels())?;
    Ok(ancilla_counts(model.n(), prop.kappa(), model.levels()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, symmetric_eigen, vec_dist};
    use crate::markov::gibbs_distribution;
    use crate::par::{acceptance_matrix, decompose_discriminant, hypercube_proposal, transition_matrix};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn two_state_p() -> StochasticMatrix {
        StochasticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.5, 0.0])).unwrap()
    }

    fn hamming(n: u32, beta: f64) -> GibbsModel {
        GibbsModel::new((0..1u32 << n).map(|x| x.count_ones()).collect(), n + 1, beta).unwrap()
    }

    #[test]
    fn standard_walk_examples() {
        let id = StochasticMatrix::new(DMatrix::identity(3, 3)).unwrap();
        let w = standard_walk(&id).unwrap();
        assert_eq!(w.total_dim(), 9);
        assert!(max_abs_diff(&w.q, &DMatrix::identity(3, 3)) < 1e-15);
        assert_eq!(w.isometry()[(4, 1)], Complex::new(1.0, 0.0));

        let p = two_state_p();
        let w = standard_walk(&p).unwrap();
        assert!((w.q[(0, 1)] - FRAC_1_SQRT_2).abs() < 1e-12);
        let pi = stationary_distribution(&p).unwrap();
        let psi = w.psi_pi(&pi);
        assert!(vec_dist(&w.walk().apply(&psi), &psi) < 1e-9);
        assert!(vec_dist(&w.reflection().apply(&psi), &psi) < 1e-9);

        let skew = StochasticMatrix::new(DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]))
            .unwrap();
        assert!(matches!(standard_walk(&skew), Err(Error::NotReversible { .. })));
    }

    #[test]
    fn standard_walk_is_isospectral_with_p() {
        let m = hamming(3, 0.8);
        let prop = hypercube_proposal(3);
        let a = acceptance_matrix(&m, &AcceptanceRule::Glauber).unwrap();
        let p = transition_matrix(&prop, &a).unwrap();
        let w = standard_walk(&p).unwrap();
        let (ev_q, _) = symmetric_eigen(&w.q);
        let mut ev_p: Vec<f64> = p.matrix().complex_eigenvalues().iter().map(|z| z.re).collect();
        ev_p.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in ev_q.iter().zip(&ev_p) {
            assert!((x - y).abs() < 1e-9);
        }
        let walk = w.walk_dense();
        assert!(max_abs_diff_c(&walk.ad_mul(&walk), &DMatrix::identity(64, 64)) < 1e-10);
    }

    #[test]
    fn par_walk_examples() {
        let prop = hypercube_proposal(2);
        let ones = DMatrix::from_element(4, 4, 1.0);
        let w = par_walk(&prop, &ones).unwrap();
        assert!(max_abs_diff(&w.q, &prop.assemble()) < 1e-12);
        assert_eq!(w.total_dim(), 32);

        let m = GibbsModel::new(vec![0, 1], 2, LN_2).unwrap();
        let a = acceptance_matrix(&m, &AcceptanceRule::Metropolis).unwrap();
        let w = par_walk(&hypercube_proposal(1), &a).unwrap();
        assert!((w.q[(0, 1)] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((w.q[(0, 0)] - 0.5).abs() < 1e-12);

        for rule in [AcceptanceRule::Metropolis, AcceptanceRule::Glauber] {
            let m = hamming(3, 0.6);
            let prop = hypercube_proposal(3);
            let d = decompose_discriminant(&m, &prop, &rule).unwrap();
            let w = par_walk(&prop, &d.a).unwrap();
            assert!(max_abs_diff(&w.q, &d.q) < 1e-10);
            let pi = gibbs_distribution(&m);
            let psi = w.psi_pi(&pi);
            assert!(vec_dist(&w.walk().apply(&psi), &psi) < 1e-9);
            assert!(vec_dist(&w.reflection().apply(&psi), &psi) < 1e-9);
        }

        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 1.0, 0.5]);
        assert!(matches!(par_walk_from_matrix(&bad, &DMatrix::from_element(2, 2, 1.0)), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn quantum_enhanced_examples() {
        let m = GibbsModel::new(vec![0, 1], 2, LN_2).unwrap();
        let a = acceptance_matrix(&m, &AcceptanceRule::Metropolis).unwrap();
        let x = to_complex(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let qe = quantum_enhanced_walk(&x, &a).unwrap();
        let classical = par_walk(&hypercube_proposal(1), &a).unwrap();
        assert!(max_abs_diff(&qe.q, &classical.q) < 1e-15);
        assert_eq!(qe.isometry(), classical.isometry());

        let h = to_complex(&DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0])) * Complex::new(FRAC_1_SQRT_2, 0.0);
        let qe = quantum_enhanced_walk(&h, &a).unwrap();
        let half = DMatrix::from_element(2, 2, 0.5);
        assert!(max_abs_diff(&qe.q, &par_discriminant(&half, &a)) < 1e-12);
        let phased = &h * Complex::from_polar(1.0, 0.9);
        assert!(max_abs_diff(&quantum_enhanced_walk(&phased, &a).unwrap().q, &qe.q) < 1e-12);

        let not_sym = to_complex(&DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]));
        assert!(matches!(
            quantum_enhanced_walk(&not_sym, &DMatrix::from_element(3, 3, 1.0)),
            Err(Error::NotSymmetricUnitary { .. })
        ));
    }

    #[test]
    fn count_formulas() {
        let c = ancilla_counts(2, 1, 2);
        assert_eq!((c.szegedy, c.paper), (2, 3));
        let c = ancilla_counts(256, 8, 9);
        assert_eq!((c.szegedy, c.paper), (9, 12));
        let c = ancilla_counts(1 << 20, 20, 91);
        assert_eq!((c.szegedy, c.paper), (21, 19));
        assert_eq!(c.gamma_efficient, 364.0);
        let m = hamming(2, 1.0);
        let c = ancilla_comparison(&m, &hypercube_proposal(2), &AcceptanceRule::Metropolis).unwrap();
        assert_eq!((c.szegedy, c.paper, c.logical), (3, 6, 6));
    }
}
