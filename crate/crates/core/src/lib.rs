//! Block encodings and quantum walks for propose-accept/reject Markov chains.

// `!(x >= 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockenc;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod par;
pub mod perm;
pub mod spectra;
pub mod szegedy;

pub use error::{Error, Result};
