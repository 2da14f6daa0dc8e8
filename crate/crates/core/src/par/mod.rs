//! Propose-accept/reject chains and the decomposition of their discriminant.

mod acceptance;
mod decompose;
mod proposal;

pub use acceptance::{acceptance_matrix, AcceptanceRule, CustomAcceptance};
pub use decompose::*;
pub use proposal::{hypercube_proposal, proposal_from_permutations, ProposalDecomposition};
