use num_complex::Complex64;

use crate::params::PhysParams;

/// Roots of `lambda^2 + d lambda + gamma q^2 = 0`, the characteristic
/// polynomial of the coupled (density, longitudinal velocity) block with
/// coupling wavenumber `q` and damping rate `d`.
///
/// Ordered by descending real part, ties by ascending imaginary part.
pub(crate) fn block_roots(q: f64, d: f64, gamma: f64) -> (Complex64, Complex64) {
    let half = -0.5 * d;
    let disc = 0.25 * d * d - gamma * q * q;
    if disc < 0.0 {
        let w = (-disc).sqrt();
        (Complex64::new(half, -w), Complex64::new(half, w))
    } else {
        let lower = half - disc.sqrt();
        let upper = if lower != 0.0 {
            gamma * q * q / lower
        } else {
            0.0
        };
        (Complex64::new(upper, 0.0), Complex64::new(lower, 0.0))
    }
}

/// Eigenvalues of the acoustic block at wavenumber magnitude `rho`:
/// roots of `lambda^2 + rho^{2 beta} lambda + gamma rho^2 = 0`.
pub fn compressible_eigen(rho: f64, params: &PhysParams) -> (Complex64, Complex64) {
    block_roots(rho, rho.powf(2.0 * params.beta()), params.gamma())
}
