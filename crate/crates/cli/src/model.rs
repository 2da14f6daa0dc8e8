use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use parwalk::markov::GibbsModel;
use parwalk::par::{hypercube_proposal, AcceptanceRule, ProposalDecomposition};

use crate::cnf::{parse_cnf, read_header};
use crate::CliError;

/// Largest number of bits for commands that build dense matrices.
pub const DEFAULT_CAP: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnergySpec {
    Hamming,
    Random { levels: u32, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Hypercube { n: u32, energy: EnergySpec },
    Cnf { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceKind {
    Metropolis,
    Glauber,
}

impl AcceptanceKind {
    pub fn rule(self) -> AcceptanceRule {
        match self {
            AcceptanceKind::Metropolis => AcceptanceRule::Metropolis,
            AcceptanceKind::Glauber => AcceptanceRule::Glauber,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub source: Source,
    pub beta: f64,
    pub acceptance: AcceptanceKind,
    /// Use the lazy chain `(I + P) / 2`.
    pub lazy: bool,
}

/// A model ready for the library: energies, proposal and acceptance rule.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub model: GibbsModel,
    pub prop: ProposalDecomposition,
    pub rule: AcceptanceRule,
}

/// Sizes needed for ancilla counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelSizes {
    pub bits: u32,
    pub kappa: usize,
    pub levels: u32,
}

/// `levels` values uniform over `0..levels` from a seeded SplitMix64 stream.
pub fn random_energies(bits: u32, levels: u32, seed: u64) -> Vec<u32> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..1usize << bits).map(|_| rng.random_range(0..levels)).collect()
}

impl ModelSpec {
    pub fn hypercube(n: u32, energy: EnergySpec, beta: f64, acceptance: AcceptanceKind) -> Self {
        Self { source: Source::Hypercube { n, energy }, beta, acceptance, lazy: false }
    }

    /// Counts from the description alone; a CNF file is read up to its header.
    pub fn sizes(&self) -> Result<ModelSizes, CliError> {
        let (bits, levels) = match &self.source {
            Source::Hypercube { n, energy: EnergySpec::Hamming } => (*n, n + 1),
            Source::Hypercube { n, energy: EnergySpec::Random { levels, .. } } => (*n, *levels),
            Source::Cnf { path } => {
                let h = read_header(path)?;
                (h.vars, h.clauses as u32 + 1)
            }
        };
        if bits == 0 {
            return Err(CliError::Input("the model needs at least one bit".into()));
        }
        let kappa = bits as usize + usize::from(self.lazy);
        Ok(ModelSizes { bits, kappa, levels })
    }

    pub fn build(&self, cap: u32) -> Result<BuiltModel, CliError> {
        let sizes = self.sizes()?;
        if sizes.bits > cap {
            return Err(match self.source {
                Source::Cnf { .. } => CliError::TooManyVariables { vars: sizes.bits, cap },
                _ => CliError::Input(format!("n = {} exceeds the dense cap {cap} (raise it with --max-n)", sizes.bits)),
            });
        }
        let bits = sizes.bits;
        let energies = match &self.source {
            Source::Hypercube { n, energy: EnergySpec::Hamming } => (0..1u32 << n).map(u32::count_ones).collect(),
            Source::Hypercube { n, energy: EnergySpec::Random { levels, seed } } => {
                if *levels == 0 {
                    return Err(CliError::Input("--B must be at least 1".into()));
                }
                random_energies(*n, *levels, *seed)
            }
            Source::Cnf { path } => parse_cnf(path)?.energies(),
        };
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(CliError::Input(format!("beta must be finite and non-negative, got {}", self.beta)));
        }
        let model = GibbsModel::new(energies, sizes.levels, self.beta).map_err(|e| CliError::Input(e.to_string()))?;
        let prop = hypercube_proposal(bits);
        let prop = if self.lazy { prop.lazy() } else { prop };
        Ok(BuiltModel { model, prop, rule: self.acceptance.rule() })
    }
}
