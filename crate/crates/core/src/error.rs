use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid stochastic matrix: {0}")]
    NotStochastic(String),

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("chain is not reversible (max deviation {deviation:e})")]
    NotReversible { deviation: f64 },

    #[error("eigenvalue {value} outside [-1, 1]")]
    SpectrumOutOfRange { value: f64 },

    #[error("proposal matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("bad weights: {0}")]
    BadWeights(String),

    #[error("invalid permutation: {0}")]
    BadPermutation(String),

    #[error("acceptance function violates f(d) = exp(-beta d) f(-d) at d = {delta} (deviation {deviation:e})")]
    FunctionalEquationViolated { delta: i64, deviation: f64 },

    #[error("transition matrix has negative diagonal entry {value} at state {state}")]
    NegativeDiagonal { state: usize, value: f64 },

    #[error("remainder term is not diagonal (max off-diagonal {deviation:e})")]
    NotDiagonal { deviation: f64 },

    #[error("decomposition mismatch ({what}): max deviation {deviation:e}")]
    DecompositionMismatch { what: String, deviation: f64 },

    #[error("dimension {0} is not a power of two")]
    NonPowerOfTwoDim(usize),

    #[error("energy {energy} of state {state} outside 0..{levels}")]
    EnergyOutOfRange { state: usize, energy: u32, levels: u32 },

    #[error("singular value {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(f64, f64),

    #[error("weights do not match operands: {0}")]
    WeightMismatch(String),

    #[error("encoded matrix is not hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("proposal unitary is not symmetric (max deviation {deviation:e})")]
    NotSymmetricUnitary { deviation: f64 },

    #[error("walk identity failed ({what}): max deviation {deviation:e}")]
    IdentityFailed { what: String, deviation: f64 },

    #[error("walk spectrum mismatch: unmatched phases {unmatched:?}")]
    SpectrumMismatch { unmatched: Vec<f64> },

    #[error("gap bound violated: {0}")]
    BoundViolated(String),
}

impl Error {
    /// Variant name, e.g. `"DecompositionMismatch"`.
    pub fn kind(&self) -> String {
        let dbg = format!("{self:?}");
        dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
    }
}
