use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use super::isometry::Isometry;
use super::op::{DenseOp, Embedded, Identity, OffDiagonalReflection, OpRef, PermutationOp, Product, Select};
use super::{arc, extract_block, BlockEncoding};
use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, max_abs_diff_c, to_complex, C64};
use crate::markov::{PROB_TOL, STRUCT_TOL};
use crate::perm::Permutation;

/// Angle of the tilted ancilla state used by [`reflectionize`]; `sin(2t) = 1/2`.
const TILT: f64 = PI / 12.0;

pub fn identity_encoding(n: usize) -> BlockEncoding {
    BlockEncoding::new(n, 0, 0, 1.0, arc(Identity(n)))
}

pub fn permutation_encoding(p: &Permutation) -> BlockEncoding {
    BlockEncoding::new(p.len(), 0, 0, 1.0, arc(PermutationOp(p.clone())))
}

/// A unitary viewed as an ancilla-free encoding of itself.
pub fn dense_unitary_encoding(u: DMatrix<C64>) -> Result<BlockEncoding> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let n = u.nrows();
    let deviation = max_abs_diff_c(&(u.adjoint() * &u), &DMatrix::identity(n, n));
    if deviation > STRUCT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(BlockEncoding::new(n, 0, 0, 1.0, arc(DenseOp::new(u))))
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::BadWeights("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::BadWeights(format!("negative weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Real orthogonal matrix whose first column is `sqrt(w)` padded with zeros to
/// the next power of two; completed by a Householder reflection.
pub fn prepare_unitary(weights: &[f64]) -> Result<DMatrix<f64>> {
    check_weights(weights)?;
    let dim = 1usize << ceil_log2(weights.len());
    let mut v = DMatrix::zeros(dim, 1);
    v[0] = 1.0;
    for (i, w) in weights.iter().enumerate() {
        v[i] -= w.sqrt();
    }
    let nsq = v.norm_squared();
    let id = DMatrix::identity(dim, dim);
    if nsq < 1e-30 {
        return Ok(id);
    }
    Ok(id - (&v * v.transpose()) * (2.0 / nsq))
}

/// `sum_k |k><k| (x) Pi_k`, padded with identities to a power-of-two control register.
pub fn select_unitary(perms: &[Permutation]) -> Select {
    assert!(!perms.is_empty());
    let n = perms[0].len();
    assert!(perms.iter().all(|p| p.len() == n), "permutations differ in size");
    let slots = 1usize << ceil_log2(perms.len());
    let mut branches: Vec<Option<OpRef>> = perms.iter().map(|p| Some(arc(PermutationOp(p.clone())))).collect();
    branches.resize(slots, None);
    Select::new(branches, n)
}

/// Adds idle ancilla qubits on top so the encoding uses `anc` qubits.
pub fn pad_ancillas(be: &BlockEncoding, anc: u32) -> BlockEncoding {
    assert!(anc >= be.anc_qubits);
    if anc == be.anc_qubits {
        return be.clone();
    }
    let extra = 1usize << (anc - be.anc_qubits);
    let op = Embedded::new(be.op.clone(), &[extra, be.total_dim()], &[1]);
    BlockEncoding::new(be.sys_dim, anc, be.paper_anc, be.gamma, arc(op))
}

fn same_gamma(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.max(b)
}

/// Linear combination `sum_k w_k L_k` of encodings sharing one scale.
pub fn lcu(weights: &[f64], encodings: &[BlockEncoding]) -> Result<BlockEncoding> {
    if weights.len() != encodings.len() || encodings.is_empty() {
        return Err(Error::WeightMismatch(format!("{} weights for {} encodings", weights.len(), encodings.len())));
    }
    let c = prepare_unitary(weights)?;
    let n = encodings[0].sys_dim;
    let gamma = encodings[0].gamma;
    for e in encodings {
        if e.sys_dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: e.sys_dim });
        }
        if !same_gamma(e.gamma, gamma) {
            return Err(Error::ScaleMismatch(gamma, e.gamma));
        }
    }
    let c_op = encodings.iter().map(|e| e.anc_qubits).max().unwrap();
    let paper_op = encodings.iter().map(|e| e.paper_anc).max().unwrap();
    let lk = ceil_log2(weights.len());
    let block = n << c_op;
    let dims = [1usize << lk, block];

    let mut branches: Vec<Option<OpRef>> = encodings.iter().map(|e| Some(pad_ancillas(e, c_op).op)).collect();
    branches.resize(1 << lk, None);

    let c = to_complex(&c);
    let op = Product(vec![
        arc(Embedded::new(arc(DenseOp::new(c.clone())), &dims, &[0])),
        arc(Select::new(branches, block)),
        arc(Embedded::new(arc(DenseOp::new(c.adjoint())), &dims, &[0])),
    ]);
    let paper_anc = (2 * lk).saturating_sub(1) + paper_op;
    Ok(BlockEncoding::new(n, lk + c_op, paper_anc, gamma, arc(op)))
}

/// Encodes `L (.) M` through the copy isometry `|x> -> |x>|x>`.
pub fn hadamard_be(be_l: &BlockEncoding, be_m: &BlockEncoding) -> Result<BlockEncoding> {
    let n = be_l.sys_dim;
    if be_m.sys_dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: be_m.sys_dim });
    }
    if !n.is_power_of_two() {
        return Err(Error::NonPowerOfTwoDim(n));
    }
    // registers: [anc L, anc M, copy, system]
    let dims = [be_l.anc_dim(), be_m.anc_dim(), n, n];
    let cpy = Permutation::new((0..n * n).map(|i| ((i / n) ^ (i % n)) * n + i % n).collect())?;
    let cpy: OpRef = arc(Embedded::new(arc(PermutationOp(cpy)), &dims, &[2, 3]));
    let op = Product(vec![
        cpy.clone(),
        arc(Embedded::new(be_l.op.clone(), &dims, &[0, 3])),
        arc(Embedded::new(be_m.op.clone(), &dims, &[1, 2])),
        cpy,
    ]);
    let logn = ceil_log2(n);
    Ok(BlockEncoding::new(
        n,
        logn + be_l.anc_qubits + be_m.anc_qubits,
        logn + be_l.paper_anc + be_m.paper_anc,
        be_l.gamma * be_m.gamma,
        arc(op),
    ))
}

/// Encodes `L (.) M` for an energy-dependent `L` given by its compressed form `L^`.
pub fn compressed_hadamard_be(be_lhat: &BlockEncoding, be_m: &BlockEncoding, energies: &[u32]) -> Result<BlockEncoding> {
    let bp = be_lhat.sys_dim;
    if !bp.is_power_of_two() {
        return Err(Error::NonPowerOfTwoDim(bp));
    }
    let n = be_m.sys_dim;
    if energies.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: energies.len() });
    }
    if let Some((x, &e)) = energies.iter().enumerate().find(|(_, &e)| e as usize >= bp) {
        return Err(Error::EnergyOutOfRange { state: x, energy: e, levels: bp as u32 });
    }
    // registers: [anc L^, energy, anc M, system]
    let dims = [be_lhat.anc_dim(), bp, be_m.anc_dim(), n];
    let enc = Permutation::new(
        (0..bp * n)
            .map(|i| {
                let (e, x) = (i / n, i % n);
                (e ^ energies[x] as usize) * n + x
            })
            .collect(),
    )?;
    let enc: OpRef = arc(Embedded::new(arc(PermutationOp(enc)), &dims, &[1, 3]));
    let op = Product(vec![
        enc.clone(),
        arc(Embedded::new(be_lhat.op.clone(), &dims, &[0, 1])),
        arc(Embedded::new(be_m.op.clone(), &dims, &[2, 3])),
        enc,
    ]);
    let logb = ceil_log2(bp);
    Ok(BlockEncoding::new(
        n,
        be_lhat.anc_qubits + logb + be_m.anc_qubits,
        logb + be_lhat.paper_anc + be_m.paper_anc,
        be_lhat.gamma * be_m.gamma,
        arc(op),
    ))
}

/// `[[s, sqrt(1-s^2)], [sqrt(1-s^2), -s]]`
fn r_block(s: f64) -> [[f64; 2]; 2] {
    let c = (1.0 - s * s).max(0.0).sqrt();
    [[s, c], [c, -s]]
}

/// One-ancilla encoding of a `B x B` matrix with scale `B`, built from the
/// singular value decomposition of `lhat / B`. The system register is padded
/// to the next power of two with zero rows and columns.
pub fn svd_block_encoding(lhat: &DMatrix<f64>) -> Result<BlockEncoding> {
    if !lhat.is_square() || lhat.is_empty() {
        return Err(Error::DimensionMismatch { expected: lhat.nrows(), got: lhat.ncols() });
    }
    let b = lhat.nrows();
    let bp = b.next_power_of_two();
    let mut m = DMatrix::zeros(bp, bp);
    m.view_mut((0, 0), (b, b)).copy_from(&(lhat / b as f64));
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut mid = DMatrix::<f64>::zeros(2 * bp, 2 * bp);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1.0 + 1e-12 {
            return Err(Error::NormTooLarge(s * b as f64));
        }
        let r = r_block(s.min(1.0));
        for (i, row) in r.iter().enumerate() {
            for (j, &val) in row.iter().enumerate() {
                mid[(i * bp + k, j * bp + k)] = val;
            }
        }
    }
    let id2 = DMatrix::<f64>::identity(2, 2);
    let lam = id2.kronecker(&u) * mid * id2.kronecker(&vt);
    Ok(BlockEncoding::new(bp, 1, 1, b as f64, arc(DenseOp::new(to_complex(&lam)))))
}

/// Encodes `u L` with unchanged parameters.
pub fn left_multiply_unitary(be: &BlockEncoding, u: &Permutation) -> Result<BlockEncoding> {
    if u.len() != be.sys_dim {
        return Err(Error::DimensionMismatch { expected: be.sys_dim, got: u.len() });
    }
    let perm = Embedded::new(arc(PermutationOp(u.clone())), &[be.anc_dim(), be.sys_dim], &[1]);
    Ok(be.with_op(arc(Product(vec![be.op.clone(), arc(perm)]))))
}

/// Re-expresses an encoding at a larger scale `gamma` with one extra ancilla
/// carrying the factor `be.gamma / gamma`.
pub fn pad_scale(be: &BlockEncoding, gamma: f64) -> Result<BlockEncoding> {
    if same_gamma(be.gamma, gamma) {
        return Ok(be.clone());
    }
    if gamma < be.gamma {
        return Err(Error::ScaleMismatch(be.gamma, gamma));
    }
    let r = r_block(be.gamma / gamma);
    let r = DMatrix::from_fn(2, 2, |i, j| Complex::new(r[i][j], 0.0));
    let dims = [2, be.total_dim()];
    let op = Product(vec![
        arc(Embedded::new(be.op.clone(), &dims, &[1])),
        arc(Embedded::new(arc(DenseOp::new(r)), &dims, &[0])),
    ]);
    Ok(BlockEncoding::new(be.sys_dim, be.anc_qubits + 1, be.paper_anc + 1, gamma, arc(op)))
}

/// Encodes `L_A + L_B`: one more ancilla, twice the common scale.
pub fn combine_two(a: &BlockEncoding, b: &BlockEncoding) -> Result<BlockEncoding> {
    if a.sys_dim != b.sys_dim {
        return Err(Error::DimensionMismatch { expected: a.sys_dim, got: b.sys_dim });
    }
    let gamma = a.gamma.max(b.gamma);
    let (a, b) = (pad_scale(a, gamma)?, pad_scale(b, gamma)?);
    let mut sum = lcu(&[0.5, 0.5], &[a, b])?;
    sum.gamma = 2.0 * gamma;
    Ok(sum)
}

#[derive(Debug, Clone)]
pub struct Reflectionized {
    /// Reflection whose top-left block is `L / (2 gamma)`.
    pub encoding: BlockEncoding,
    /// `W = |0><1| (x) U + |1><0| (x) U^dagger` on the untilted ancilla.
    pub reflection: OpRef,
    /// `|x> -> |+>|0^c>|x>`, with `T+^dagger W T+ = L / gamma`.
    pub plus: Isometry,
}

/// Turns an encoding of a hermitian matrix into one by a reflection.
///
/// `W` has `<+|W|+> = L/gamma`; the returned encoding reads `W` between copies
/// of the tilted state `cos t|0> + sin t|1>` with `sin 2t = 1/2`, which puts
/// `L / (2 gamma)` in the `|0>` block while keeping the operator a reflection.
pub fn reflectionize(be: &BlockEncoding) -> Result<Reflectionized> {
    let l = extract_block(be);
    let deviation = max_abs_diff_c(&l, &l.adjoint());
    if deviation > 1e-9 {
        return Err(Error::NotHermitian { deviation });
    }
    let w: OpRef = arc(OffDiagonalReflection(be.op.clone()));
    let (c, s) = (TILT.cos(), TILT.sin());
    let rt = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let dims = [2, be.total_dim()];
    let op = Product(vec![
        arc(Embedded::new(arc(DenseOp::new(to_complex(&rt))), &dims, &[0])),
        w.clone(),
        arc(Embedded::new(arc(DenseOp::new(to_complex(&rt.transpose()))), &dims, &[0])),
    ]);
    Ok(Reflectionized {
        encoding: BlockEncoding::new(be.sys_dim, be.anc_qubits + 1, be.paper_anc + 1, 2.0 * be.gamma, arc(op)),
        reflection: w,
        plus: Isometry::plus(be.anc_dim(), be.sys_dim),
    })
}
