//! Closed-form exponentials (and the related phi-functions) of the per-mode
//! generator of the linearized system
//!
//! ```text
//! d/dt a^ + i xi . u^            = 0
//! d/dt u^ + |xi|^{2 beta} u^ + i gamma xi a^ = 0
//! ```
//!
//! Splitting `u^` into the components along and across `xi` leaves a scalar
//! heat factor on the transverse part and a 2x2 block
//! `M = [[0, -i q], [-i gamma q, -d]]` on `(a^, u^_par)`. Writing
//! `M = c I + N` with `c = -d/2` gives `N^2 = delta^2 I`, so every analytic
//! function of `M` is `g0 I + g1 N` with scalar `g0`, `g1`.

use num_complex::Complex64;

use super::eigen::block_roots;
use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::state::State;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 3x3 complex matrix acting on `(a^, u^_1, u^_2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[Complex64; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        let mut m = [[Complex64::default(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        Mat3(m)
    }

    pub fn apply(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut out = [[Complex64::default(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Mat3(out)
    }

    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

/// Generator `A(xi)` with `d/dt (a^, u^) = -A (a^, u^)`.
#[derive(Clone, Copy, Debug)]
pub struct ModeSymbol {
    pub xi: [f64; 2],
    pub params: PhysParams,
}

impl ModeSymbol {
    pub fn matrix(&self) -> Mat3 {
        let [x1, x2] = self.xi;
        let d = x1.hypot(x2).powf(2.0 * self.params.beta());
        let g = self.params.gamma();
        let z = Complex64::default();
        let dd = Complex64::new(d, 0.0);
        Mat3([
            [z, I * x1, I * x2],
            [I * g * x1, dd, z],
            [I * g * x2, z, dd],
        ])
    }
}

/// A function of the mode generator in split form: 2x2 block on
/// `(a^, u^_par)` and a scalar on `u^_perp`, with `e` the unit vector
/// defining the split.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ModeOp {
    block: [[Complex64; 2]; 2],
    perp: f64,
    e: [f64; 2],
}

impl ModeOp {
    /// `g0 I + g1 N` on the block, `perp` on the transverse component.
    fn new(q_vec: [f64; 2], d: f64, gamma: f64, (g0, g1): (f64, f64), perp: f64) -> Self {
        let q = q_vec[0].hypot(q_vec[1]);
        let e = if q > 0.0 {
            [q_vec[0] / q, q_vec[1] / q]
        } else {
            [1.0, 0.0]
        };
        let block = [
            [
                Complex64::new(g0 + 0.5 * d * g1, 0.0),
                Complex64::new(0.0, -q * g1),
            ],
            [
                Complex64::new(0.0, -gamma * q * g1),
                Complex64::new(g0 - 0.5 * d * g1, 0.0),
            ],
        ];
        ModeOp { block, perp, e }
    }

    #[inline]
    pub(crate) fn apply(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        let [e1, e2] = self.e;
        let par = v[1] * e1 + v[2] * e2;
        let perp = v[2] * e1 - v[1] * e2;
        let a = self.block[0][0] * v[0] + self.block[0][1] * par;
        let p = self.block[1][0] * v[0] + self.block[1][1] * par;
        let t = perp * self.perp;
        [a, p * e1 - t * e2, p * e2 + t * e1]
    }

    pub(crate) fn to_mat3(self) -> Mat3 {
        let mut m = [[Complex64::default(); 3]; 3];
        for col in 0..3 {
            let mut v = [Complex64::default(); 3];
            v[col] = Complex64::new(1.0, 0.0);
            let out = self.apply(v);
            for (row, x) in out.into_iter().enumerate() {
                m[row][col] = x;
            }
        }
        Mat3(m)
    }
}

/// Coefficients `(g0, g1)` of `exp(t M)` for the block with coupling `q`,
/// damping `d`.
pub(crate) fn exp_coeffs(q: f64, d: f64, gamma: f64, t: f64) -> (f64, f64) {
    let c = -0.5 * d;
    let delta_sq = 0.25 * d * d - gamma * q * q;
    let (lp, lm) = block_roots(q, d, gamma);
    let ect = (c * t).exp();
    if (lp - lm).norm() < 1e-8 * lp.norm().max(1.0) {
        // confluent limit: e^{ct} (I + t N)
        return (ect, t * ect);
    }
    if delta_sq < 0.0 {
        let w = (-delta_sq).sqrt();
        (ect * (w * t).cos(), ect * (w * t).sin() / w)
    } else {
        let delta = delta_sq.sqrt();
        let (up, low) = (lp.re, lm.re);
        let g0 = 0.5 * ((up * t).exp() + (low * t).exp());
        let g1 = if 2.0 * delta * t < 50.0 {
            (low * t).exp() * (2.0 * delta * t).exp_m1() / (2.0 * delta)
        } else {
            ((up * t).exp() - (low * t).exp()) / (2.0 * delta)
        };
        (g0, g1)
    }
}

const FACTORIAL_INV: [f64; 34] = {
    let mut out = [1.0; 34];
    let mut i = 1;
    while i < 34 {
        out[i] = out[i - 1] / i as f64;
        i += 1;
    }
    out
};

/// `phi_k(z) = sum_j z^j / (j + k)!`, `k >= 1`.
pub(crate) fn phi_k(k: usize, z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        let mut sum = Complex64::default();
        let mut pow = Complex64::new(1.0, 0.0);
        for j in 0..(34 - k) {
            sum += pow * FACTORIAL_INV[j + k];
            pow *= z;
        }
        sum
    } else {
        let mut phi = z.exp();
        for j in 1..=k {
            phi = (phi - FACTORIAL_INV[j - 1]) / z;
        }
        phi
    }
}

/// Derivative of `phi_k`.
fn phi_k_prime(k: usize, z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        let mut sum = Complex64::default();
        let mut pow = Complex64::new(1.0, 0.0);
        for j in 1..(34 - k) {
            sum += pow * (j as f64 * FACTORIAL_INV[j + k]);
            pow *= z;
        }
        sum
    } else {
        let lower = if k == 1 { z.exp() } else { phi_k(k - 1, z) };
        (lower - phi_k(k, z) * k as f64) / z
    }
}

/// Coefficients `(g0, g1)` of `phi_k(h M)` in the form `g0 I + g1 N`.
pub(crate) fn phi_coeffs(k: usize, q: f64, d: f64, gamma: f64, h: f64) -> (f64, f64) {
    let hc = Complex64::new(-0.5 * d * h, 0.0);
    let delta_sq = 0.25 * d * d - gamma * q * q;
    let hd = h * delta_sq.abs().sqrt();
    if hd < 1e-5 {
        (phi_k(k, hc).re, h * phi_k_prime(k, hc).re)
    } else if delta_sq < 0.0 {
        let f = phi_k(k, hc + I * hd);
        (f.re, h * f.im / hd)
    } else {
        let fp = phi_k(k, hc + hd);
        let fm = phi_k(k, hc - hd);
        (0.5 * (fp + fm).re, h * (fp - fm).re / (2.0 * hd))
    }
}

/// Propagator over time `t` of the mode with coupling wavevector `q_vec`
/// and damping rate `d`.
pub(crate) fn exp_op(q_vec: [f64; 2], d: f64, gamma: f64, t: f64) -> ModeOp {
    let q = q_vec[0].hypot(q_vec[1]);
    ModeOp::new(q_vec, d, gamma, exp_coeffs(q, d, gamma, t), (-d * t).exp())
}

/// `phi_k(h M)` for the same mode.
pub(crate) fn phi_op(k: usize, q_vec: [f64; 2], d: f64, gamma: f64, h: f64) -> ModeOp {
    let q = q_vec[0].hypot(q_vec[1]);
    let perp = phi_k(k, Complex64::new(-d * h, 0.0)).re;
    ModeOp::new(q_vec, d, gamma, phi_coeffs(k, q, d, gamma, h), perp)
}

/// `exp(-t A(xi))` in the `(a^, u^_1, u^_2)` basis.
pub fn mode_propagator(xi: [f64; 2], t: f64, params: &PhysParams) -> Result<Mat3> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let d = xi[0].hypot(xi[1]).powf(2.0 * params.beta());
    Ok(exp_op(xi, d, params.gamma(), t).to_mat3())
}

/// Exact solution of the linearized system at time `t`, mode by mode.
pub fn evolve_linear(state: &State, t: f64, params: &PhysParams) -> Result<State> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let grid = state.grid().clone();
    let mut out = state.clone();
    let two_beta = 2.0 * params.beta();
    let n = grid.n();
    for i in 0..n {
        for j in 0..n {
            let op = exp_op(
                grid.xi_odd(i, j),
                grid.xi_norm(i, j).powf(two_beta),
                params.gamma(),
                t,
            );
            let v = [
                state.a.coeffs()[[i, j]],
                state.u[0].coeffs()[[i, j]],
                state.u[1].coeffs()[[i, j]],
            ];
            let [a, u1, u2] = op.apply(v);
            out.a.coeffs_mut()[[i, j]] = a;
            out.u[0].coeffs_mut()[[i, j]] = u1;
            out.u[1].coeffs_mut()[[i, j]] = u2;
        }
    }
    Ok(out)
}
