//! Pseudo-spectral simulation and spectral analysis of the 2D isentropic
//! compressible Navier-Stokes system with fractional dissipation
//!
//! ```text
//! d_t a + div u = -div(a u)
//! d_t u + (-Delta)^beta u + gamma grad a = K(a) grad a + G
//! ```
//!
//! in perturbation variables `rho = 1 + a`, on a periodic box, together with
//! the exact linear theory on the plane used to check algebraic decay rates.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod linear;
pub mod littlewood_paley;
pub mod params;
pub mod solver;
pub mod spectral;
pub mod state;

pub use diagnostics::{FunctionalConfig, NormTrajectory, Recorder};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, FitResult, Report};
pub use params::PhysParams;
pub use solver::SolverConfig;
pub use spectral::{Grid, SpectralField};
pub use state::State;
