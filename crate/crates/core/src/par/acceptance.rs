use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::markov::{GibbsModel, PROB_TOL};

/// Acceptance probability as a function of the energy difference `E_y - E_x`.
#[derive(Debug, Clone, PartialEq)]
pub enum AcceptanceRule {
    /// `min(1, e^{-beta d})`
    Metropolis,
    /// `e^{-beta d} / (1 + e^{-beta d})`
    Glauber,
    Custom(CustomAcceptance),
}

/// Tabulated acceptance values for `d` in `-(B-1)..=(B-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomAcceptance {
    levels: u32,
    values: Vec<f64>,
}

impl AcceptanceRule {
    /// Builds a tabulated rule; `values[i]` is `f(i - (levels - 1))`.
    /// The functional equation is checked here for `beta`.
    pub fn custom(values: Vec<f64>, levels: u32, beta: f64) -> Result<Self> {
        if levels == 0 || values.len() != 2 * levels as usize - 1 {
            return Err(Error::InvalidModel(format!(
                "custom acceptance needs {} values, got {}",
                (2 * levels as usize).saturating_sub(1),
                values.len()
            )));
        }
        let rule = AcceptanceRule::Custom(CustomAcceptance { levels, values });
        rule.validate(beta, levels)?;
        Ok(rule)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AcceptanceRule::Metropolis => "metropolis",
            AcceptanceRule::Glauber => "glauber",
            AcceptanceRule::Custom(_) => "custom",
        }
    }

    pub fn eval(&self, delta: i64, beta: f64) -> f64 {
        match self {
            AcceptanceRule::Metropolis => (-beta * delta as f64).exp().min(1.0),
            AcceptanceRule::Glauber => {
                // written to stay finite for large |beta d|
                let t = beta * delta as f64;
                if t >= 0.0 {
                    let e = (-t).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + t.exp())
                }
            }
            AcceptanceRule::Custom(c) => {
                let idx = delta + c.levels as i64 - 1;
                assert!(
                    (0..c.values.len() as i64).contains(&idx),
                    "energy difference {delta} outside the tabulated range"
                );
                c.values[idx as usize]
            }
        }
    }

    /// Checks `f(d) in (0, 1]` and `f(d) = e^{-beta d} f(-d)` for `|d| < levels`.
    pub fn validate(&self, beta: f64, levels: u32) -> Result<()> {
        if let AcceptanceRule::Custom(c) = self {
            if c.levels < levels {
                return Err(Error::InvalidModel(format!(
                    "custom acceptance covers {} levels, model needs {levels}",
                    c.levels
                )));
            }
        }
        let span = levels as i64 - 1;
        for d in -span..=span {
            let f = self.eval(d, beta);
            if !(f > 0.0 && f <= 1.0 + PROB_TOL) {
                return Err(Error::FunctionalEquationViolated { delta: d, deviation: f });
            }
            let deviation = (f - (-beta * d as f64).exp() * self.eval(-d, beta)).abs();
            if deviation > PROB_TOL {
                return Err(Error::FunctionalEquationViolated { delta: d, deviation });
            }
        }
        Ok(())
    }
}

/// `a_yx = f(E_y - E_x)` off the diagonal, `a_xx = 1`.
pub fn acceptance_matrix(model: &GibbsModel, rule: &AcceptanceRule) -> Result<DMatrix<f64>> {
    rule.validate(model.beta(), model.levels())?;
    let n = model.n();
    let a = DMatrix::from_fn(n, n, |y, x| if y == x { 1.0 } else { rule.eval(model.delta(y, x), model.beta()) });
    for x in 0..n {
        for y in 0..x {
            let d = model.delta(y, x);
            let expect = (-model.beta() * d as f64).exp();
            let rel = (a[(y, x)] / a[(x, y)] / expect - 1.0).abs();
            if rel > PROB_TOL {
                return Err(Error::FunctionalEquationViolated { delta: d, deviation: rel });
            }
        }
    }
    Ok(a)
}
