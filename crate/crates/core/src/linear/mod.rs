//! Exact theory for the linearized system: per-mode propagators, radial
//! norm trajectories on the whole plane and the lower-bound constant.

mod eigen;
mod propagator;
pub mod quadrature;
mod radial;

pub use eigen::compressible_eigen;
pub use propagator::{evolve_linear, mode_propagator, Mat3, ModeSymbol};
pub(crate) use propagator::{exp_op, phi_op, ModeOp};
pub use radial::{lower_bound_constant, r2_norm_trajectory, RadialProfile};
