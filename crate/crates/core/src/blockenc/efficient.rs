use super::construct::{
    combine_two, compressed_hadamard_be, lcu, left_multiply_unitary, permutation_encoding, reflectionize,
    svd_block_encoding,
};
use super::isometry::Isometry;
use super::op::OpRef;
use super::BlockEncoding;
use crate::error::{Error, Result};
use crate::linalg::ceil_log2;
use crate::markov::GibbsModel;
use crate::par::{compressed_factors, AcceptanceRule, ProposalDecomposition};

/// `2 ceil(log kappa) + ceil(log B) + 2`, the ancilla count claimed for the
/// reflection encoding of `Q`.
pub fn paper_ancilla_count(kappa: usize, levels: u32) -> u32 {
    2 * ceil_log2(kappa) + ceil_log2(levels as usize) + 2
}

/// Ancilla qubits actually used by [`build_ancilla_efficient_q`]:
/// one control register of `ceil(log kappa)` qubits shared by both terms,
/// the energy register, one qubit each for the SVD encodings, the sum and the
/// reflection.
pub fn logical_ancilla_count(kappa: usize, levels: u32) -> u32 {
    ceil_log2(kappa) + ceil_log2(levels as usize) + 3
}

#[derive(Debug, Clone)]
pub struct AncillaEfficientQ {
    /// Reflection encoding of `Q` with scale `4B`.
    pub encoding: BlockEncoding,
    /// Encoding of `Q` with scale `2B` before reflectionization.
    pub pre_reflection: BlockEncoding,
    /// `W = |0><1| (x) U + |1><0| (x) U^dagger`.
    pub reflection: OpRef,
    pub plus: Isometry,
}

/// Reflection block encoding of the discriminant matrix from
/// `Q = T_E^dagger (GA^ (x) S) T_E + sum_k w_k Pi_k^T T_E^dagger ((J-A)^ (x) Pi_k) T_E`.
pub fn build_ancilla_efficient_q(
    model: &GibbsModel,
    prop: &ProposalDecomposition,
    rule: &AcceptanceRule,
) -> Result<AncillaEfficientQ> {
    if prop.n() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), got: prop.n() });
    }
    let (ga, ja) = compressed_factors(model, rule)?;
    let be_ga = svd_block_encoding(&ga)?;
    let be_ja = svd_block_encoding(&ja)?;
    let energies = model.energies();

    let perm_encs: Vec<_> = prop.perms().iter().map(permutation_encoding).collect();
    let be_s = lcu(prop.weights(), &perm_encs)?;
    let term1 = compressed_hadamard_be(&be_ga, &be_s, energies)?;

    let reject_terms = prop
        .perms()
        .iter()
        .zip(&perm_encs)
        .map(|(p, e)| left_multiply_unitary(&compressed_hadamard_be(&be_ja, e, energies)?, &p.inverse()))
        .collect::<Result<Vec<_>>>()?;
    let term2 = lcu(prop.weights(), &reject_terms)?;

    let u = combine_two(&term1, &term2)?;
    let r = reflectionize(&u)?;
    let mut encoding = r.encoding;
    debug_assert_eq!(encoding.anc_qubits, logical_ancilla_count(prop.kappa(), model.levels()));
    encoding.paper_anc = paper_ancilla_count(prop.kappa(), model.levels());
    Ok(AncillaEfficientQ { encoding, pre_reflection: u, reflection: r.reflection, plus: r.plus })
}
