use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::propagator::exp_coeffs;
use super::quadrature::{integrate_adaptive, GaussRule};
use crate::error::{Error, Result};
use crate::params::PhysParams;

type Profile = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radially symmetric initial data on the plane, in Fourier variables:
/// `a^_0(xi) = a_hat(|xi|)` and `u^_0(xi) = u_par(|xi|) e + u_perp(|xi|) e_perp`
/// with `e = xi / |xi|`. The profiles are treated as zero beyond `r_max`.
pub struct RadialProfile {
    pub a_hat: Profile,
    pub u_par_hat: Profile,
    pub u_perp_hat: Profile,
    pub r_max: f64,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("c0", &self.c0())
            .field("r_max", &self.r_max)
            .finish()
    }
}

/// Radius beyond which `exp(-sigma^2 r^2)` is below 1e-17.
fn gaussian_cutoff(sigma: f64) -> f64 {
    (17.0 * 10f64.ln()).sqrt() / sigma
}

impl RadialProfile {
    /// Pure density pulse `a^_0 = c0 exp(-sigma^2 r^2 / 2)`.
    pub fn gaussian_density(c0: f64, sigma: f64) -> Self {
        RadialProfile {
            a_hat: Box::new(move |r| c0 * (-0.5 * sigma * sigma * r * r).exp()),
            u_par_hat: Box::new(|_| 0.0),
            u_perp_hat: Box::new(|_| 0.0),
            r_max: gaussian_cutoff(sigma),
        }
    }

    /// Divergence-free velocity pulse `u^_perp = c0 exp(-sigma^2 r^2 / 2)`.
    pub fn gaussian_incompressible(c0: f64, sigma: f64) -> Self {
        RadialProfile {
            a_hat: Box::new(|_| 0.0),
            u_par_hat: Box::new(|_| 0.0),
            u_perp_hat: Box::new(move |r| c0 * (-0.5 * sigma * sigma * r * r).exp()),
            r_max: gaussian_cutoff(sigma),
        }
    }

    fn amplitude(&self, r: f64) -> f64 {
        let a = (self.a_hat)(r);
        let p = (self.u_par_hat)(r);
        let q = (self.u_perp_hat)(r);
        (a * a + p * p + q * q).sqrt()
    }

    /// `|(a^_0(0), u^_0(0))|`.
    pub fn c0(&self) -> f64 {
        self.amplitude(0.0)
    }

    /// Largest `eta` with `|(a^_0, u^_0)| >= c0 / 2` on `[0, eta]`, located
    /// by a scan refined with bisection.
    pub fn half_amplitude_radius(&self) -> f64 {
        let target = 0.5 * self.c0();
        if target == 0.0 {
            return 0.0;
        }
        let steps = 4096;
        let h = self.r_max / steps as f64;
        let mut lo = 0.0;
        for s in 1..=steps {
            let r = s as f64 * h;
            if self.amplitude(r) < target {
                let mut hi = r;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.amplitude(mid) >= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return lo;
            }
            lo = r;
        }
        self.r_max
    }

    /// `gamma |a^(t)|^2 + |u^(t)|^2` at radius `r` under the linear flow.
    fn energy_density(&self, r: f64, t: f64, params: &PhysParams) -> f64 {
        let gamma = params.gamma();
        let d = r.powf(2.0 * params.beta());
        let (g0, g1) = exp_coeffs(r, d, gamma, t);
        let a0 = Complex64::new((self.a_hat)(r), 0.0);
        let p0 = Complex64::new((self.u_par_hat)(r), 0.0);
        let i = Complex64::new(0.0, 1.0);
        let a = (g0 + 0.5 * d * g1) * a0 - i * r * g1 * p0;
        let p = -i * gamma * r * g1 * a0 + (g0 - 0.5 * d * g1) * p0;
        let q = (-d * t).exp() * (self.u_perp_hat)(r);
        gamma * a.norm_sqr() + p.norm_sqr() + q * q
    }
}

/// Panel edges for the radial integral at time `t`: geometric refinement
/// from the diffusive scale `min(1, t^{-1/(2 beta)})`, cut where the
/// dissipation factor is negligible, and split so that no panel spans more
/// than a few acoustic oscillations.
fn panel_edges(t: f64, beta: f64, gamma: f64, r_max: f64) -> Vec<f64> {
    let scale = if t > 0.0 {
        t.powf(-1.0 / (2.0 * beta)).min(1.0)
    } else {
        1.0
    };
    let r_decay = if t > 0.0 {
        (40.0 / t).powf(1.0 / (2.0 * beta))
    } else {
        f64::INFINITY
    };
    let upper = r_max.min(r_decay);
    let mut coarse = vec![0.0];
    let mut edge = scale.min(upper);
    coarse.push(edge);
    while edge < upper {
        edge = (2.0 * edge).min(upper);
        coarse.push(edge);
    }
    let max_width = if t > 0.0 {
        4.0 * PI / (gamma.sqrt() * t)
    } else {
        f64::INFINITY
    };
    let mut edges = vec![0.0];
    for w in coarse.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for p in 1..=pieces {
            edges.push(w[0] + (w[1] - w[0]) * p as f64 / pieces as f64);
        }
    }
    edges
}

fn radial_integral(
    profile: &RadialProfile,
    s1: f64,
    t: f64,
    params: &PhysParams,
    rule: &GaussRule,
    edges: &[f64],
) -> f64 {
    let mut f = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        r.powf(2.0 * s1 + 1.0) * profile.energy_density(r, t, params)
    };
    2.0 * PI
        * edges
            .windows(2)
            .map(|w| rule.integrate(&mut f, w[0], w[1]))
            .sum::<f64>()
}

/// `||Lambda^{s1}(sqrt(gamma) a_L, u_L)(t)||^2_{L2(R^2)}` for each time, by
/// panel Gauss-Legendre quadrature in the radius. Each value is checked
/// against a rule with twice the nodes.
pub fn r2_norm_trajectory(
    profile: &RadialProfile,
    s1: f64,
    times: &[f64],
    params: &PhysParams,
) -> Result<Vec<f64>> {
    if s1 < 0.0 {
        return Err(Error::InvalidNorm(format!("s1 = {s1} must be nonnegative")));
    }
    let base = GaussRule::new(32);
    let doubled = GaussRule::new(64);
    let mut prev = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t < prev {
            return Err(Error::NonMonotoneTime { prev, t });
        }
        prev = t;
        let edges = panel_edges(t, params.beta(), params.gamma(), profile.r_max);
        let v1 = radial_integral(profile, s1, t, params, &base, &edges);
        let v2 = radial_integral(profile, s1, t, params, &doubled, &edges);
        let rel_change = if v2 != 0.0 {
            ((v2 - v1) / v2).abs()
        } else {
            v1.abs()
        };
        if rel_change > 1e-8 {
            return Err(Error::QuadratureNotConverged { t, rel_change });
        }
        out.push(v2);
    }
    Ok(out)
}

/// `C_beta = sqrt( c0^2 / 4 * int_{|y| <= eta} |y|^{2 s1} exp(-2 |y|^{2 beta}) dy )`.
pub fn lower_bound_constant(c0: f64, eta: f64, s1: f64, beta: f64) -> f64 {
    if c0 == 0.0 || eta <= 0.0 {
        return 0.0;
    }
    let radial = integrate_adaptive(
        |r| r.powf(2.0 * s1 + 1.0) * (-2.0 * r.powf(2.0 * beta)).exp(),
        0.0,
        eta,
        1e-14,
    );
    (0.25 * c0 * c0 * 2.0 * PI * radial).sqrt()
}
