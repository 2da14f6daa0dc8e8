use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::asymmetry;
use crate::markov::PROB_TOL;
use crate::perm::Permutation;

/// Symmetric proposal `S = sum_k w_k P_k` given as a convex combination of permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalDecomposition {
    weights: Vec<f64>,
    perms: Vec<Permutation>,
}

impl ProposalDecomposition {
    pub fn kappa(&self) -> usize {
        self.weights.len()
    }

    /// Number of states the permutations act on.
    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &Permutation)> {
        self.weights.iter().copied().zip(self.perms.iter())
    }

    /// Proposal of the lazy chain `(I + P) / 2`: the identity joins with weight
    /// one half and the other weights are halved. Staying put is always accepted,
    /// so the chain built from it is the lazy version of the original.
    pub fn lazy(&self) -> ProposalDecomposition {
        let mut weights = vec![0.5];
        weights.extend(self.weights.iter().map(|w| 0.5 * w));
        let mut perms = vec![Permutation::identity(self.n())];
        perms.extend(self.perms.iter().cloned());
        ProposalDecomposition { weights, perms }
    }

    /// Dense `S`.
    pub fn assemble(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut s = DMatrix::zeros(n, n);
        for (w, p) in self.terms() {
            for x in 0..n {
                s[(p.image(x), x)] += w;
            }
        }
        s
    }
}

/// Uniform single-bit-flip proposal on the `bits`-dimensional Boolean cube.
/// Term `k` flips bit `k` (bit 0 is the least significant).
pub fn hypercube_proposal(bits: u32) -> ProposalDecomposition {
    assert!(bits >= 1, "hypercube needs at least one bit");
    let w = 1.0 / bits as f64;
    ProposalDecomposition {
        weights: vec![w; bits as usize],
        perms: (0..bits).map(|k| Permutation::bit_flip(bits, k)).collect(),
    }
}

pub fn proposal_from_permutations(weights: Vec<f64>, perms: Vec<Permutation>) -> Result<ProposalDecomposition> {
    if weights.is_empty() || weights.len() != perms.len() {
        return Err(Error::BadWeights(format!("{} weights for {} permutations", weights.len(), perms.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::BadWeights(format!("weight {w} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let n = perms[0].len();
    if let Some(p) = perms.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    let prop = ProposalDecomposition { weights, perms };
    let deviation = asymmetry(&prop.assemble());
    if deviation > PROB_TOL {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(prop)
}
