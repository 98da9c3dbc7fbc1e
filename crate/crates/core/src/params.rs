use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dissipation exponent `beta` and adiabatic exponent `gamma`; the pressure
/// law is `P(rho) = rho^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    beta: f64,
    gamma: f64,
}

impl PhysParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!(
                "beta = {beta} outside [1/2, 1)"
            )));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} must be >= 1"
            )));
        }
        Ok(PhysParams { beta, gamma })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Time-weight exponent `2 - 1/beta`, in `[0, 1)`.
    pub fn time_weight(&self) -> f64 {
        2.0 - 1.0 / self.beta
    }

    /// Theoretical decay exponent of `||Lambda^{s1}(a, u)||_{L2}`.
    pub fn decay_exponent(&self, s1: f64) -> f64 {
        -(s1 + 1.0) / (2.0 * self.beta)
    }
}
