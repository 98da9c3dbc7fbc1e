//! Time integration of the nonlinear perturbation system with the linear
//! part treated exactly per mode (second-order exponential time
//! differencing, ETD2RK).

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linear::{exp_op, phi_op, ModeOp};
use crate::params::PhysParams;
use crate::spectral::{pointwise_map, truncate_2_3, Grid, SpectralField};
use crate::state::State;

/// Runs abort when `min(1 + a)` falls to this level.
pub const VACUUM_FLOOR: f64 = 0.1;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub params: PhysParams,
    pub dt: f64,
    pub t_end: f64,
    pub cfl_limit: f64,
    pub dealias: bool,
    pub record_every: usize,
}

impl SolverConfig {
    pub fn new(params: PhysParams, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = SolverConfig {
            params,
            dt,
            t_end,
            cfl_limit: 0.5,
            dealias: true,
            record_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end = {} is negative",
                self.t_end
            )));
        }
        if !(self.cfl_limit > 0.0 && self.cfl_limit <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl_limit = {} outside (0, 1]",
                self.cfl_limit
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig(
                "record_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Nonlinear forcing `(F, H)` of the perturbation system.
#[derive(Clone, Debug)]
pub struct RhsPair {
    pub f: SpectralField,
    pub h: [SpectralField; 2],
}

/// `K(a) = gamma a/(1+a) + (P'(1) - P'(1+a))/(1+a)` with `P(rho) = rho^gamma`.
pub fn k_function(x: f64, gamma: f64) -> f64 {
    let rho = 1.0 + x;
    gamma * x / rho + gamma * (1.0 - rho.powf(gamma - 1.0)) / rho
}

pub fn k_of_a(a: &SpectralField, gamma: f64) -> Result<SpectralField> {
    let values = a.to_physical();
    if let Some(v) = values.iter().find(|v| 1.0 + **v <= 0.0) {
        return Err(Error::DomainViolation(format!(
            "vacuum: 1 + a = {}",
            1.0 + v
        )));
    }
    pointwise_map(a, |x| k_function(x, gamma))
}

/// Per-mode symbols shared by the forcing evaluation.
struct Symbols {
    grid: Grid,
    xi_odd: Array2<[f64; 2]>,
    damping: Array2<f64>,
}

impl Symbols {
    fn new(grid: &Grid, params: &PhysParams) -> Self {
        let n = grid.n();
        let two_beta = 2.0 * params.beta();
        Symbols {
            grid: grid.clone(),
            xi_odd: Array2::from_shape_fn((n, n), |(i, j)| grid.xi_odd(i, j)),
            damping: Array2::from_shape_fn((n, n), |(i, j)| {
                if i == 0 && j == 0 {
                    0.0
                } else {
                    grid.xi_norm(i, j).powf(two_beta)
                }
            }),
        }
    }

    fn physical(&self, mut coeffs: Array2<Complex64>) -> Array2<f64> {
        self.grid.fft_inverse(&mut coeffs);
        coeffs.mapv(|c| c.re)
    }

    /// Two real fields from one complex transform of `c1 + i c2`; both
    /// spectra are Hermitian so the real and imaginary parts separate.
    fn physical_pair(&self, c1: &Array2<Complex64>, c2: &Array2<Complex64>) -> [Array2<f64>; 2] {
        let mut z = c1.clone();
        Zip::from(&mut z).and(c2).for_each(|z, b| *z += I * b);
        self.grid.fft_inverse(&mut z);
        [z.mapv(|c| c.re), z.mapv(|c| c.im)]
    }

    /// Spectra of two real fields from one forward transform of `v1 + i v2`.
    fn spectral_pair(
        &self,
        v1: &Array2<f64>,
        v2: &Array2<f64>,
        dealias: bool,
    ) -> [Array2<Complex64>; 2] {
        let n = self.grid.n();
        let norm = 1.0 / (n * n) as f64;
        let mut z = Array2::<Complex64>::zeros((n, n));
        Zip::from(&mut z)
            .and(v1)
            .and(v2)
            .for_each(|z, x, y| *z = Complex64::new(x * norm, y * norm));
        self.grid.fft_forward(&mut z);
        let mirror = |i: usize| (n - i) % n;
        let mut a = Array2::<Complex64>::zeros((n, n));
        let mut b = Array2::<Complex64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let zk = z[[i, j]];
                let zm = z[[mirror(i), mirror(j)]].conj();
                a[[i, j]] = 0.5 * (zk + zm);
                b[[i, j]] = -0.5 * I * (zk - zm);
            }
        }
        if dealias {
            truncate_2_3(&self.grid, &mut a);
            truncate_2_3(&self.grid, &mut b);
        }
        [a, b]
    }

    fn derivative(&self, c: &Array2<Complex64>, axis: usize) -> Array2<Complex64> {
        let mut out = c.clone();
        Zip::from(&mut out)
            .and(&self.xi_odd)
            .for_each(|o, xi| *o *= I * xi[axis]);
        out
    }

    fn dissipation(&self, c: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = c.clone();
        Zip::from(&mut out)
            .and(&self.damping)
            .for_each(|o, d| *o *= *d);
        out
    }

    /// Forcing `(F, H1, H2)` and the sampled `max |u|`.
    fn forcing(
        &self,
        fields: [&Array2<Complex64>; 3],
        gamma: f64,
        dealias: bool,
    ) -> Result<([Array2<Complex64>; 3], f64)> {
        let trunc = |c: &Array2<Complex64>| {
            let mut c = c.clone();
            if dealias {
                truncate_2_3(&self.grid, &mut c);
            }
            c
        };
        let [a, u1, u2] = fields.map(trunc);
        let pa = self.physical(a.clone());
        let min_density = 1.0 + pa.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_density <= VACUUM_FLOOR {
            return Err(Error::DomainViolation(format!(
                "min(1 + a) = {min_density} at or below {VACUUM_FLOOR}"
            )));
        }
        let pu = self.physical_pair(&u1, &u2);
        let grad_a = self.physical_pair(&self.derivative(&a, 0), &self.derivative(&a, 1));
        let grad_u =
            [&u1, &u2].map(|u| self.physical_pair(&self.derivative(u, 0), &self.derivative(u, 1)));
        let diss_u = self.physical_pair(&self.dissipation(&u1), &self.dissipation(&u2));

        let max_speed = Zip::from(&pu[0])
            .and(&pu[1])
            .fold(0.0f64, |m, x, y| m.max(x.hypot(*y)));

        let flux = self.spectral_pair(&(&pa * &pu[0]), &(&pa * &pu[1]), dealias);
        let mut f = Array2::<Complex64>::zeros(pa.dim());
        Zip::from(&mut f)
            .and(&self.xi_odd)
            .and(&flux[0])
            .and(&flux[1])
            .for_each(|o, xi, f1, f2| *o = -I * (xi[0] * f1 + xi[1] * f2));

        let kk = pa.mapv(|x| k_function(x, gamma));
        let w = pa.mapv(|x| x / (1.0 + x));
        let h = [0, 1].map(|j| {
            let mut hj = Array2::<f64>::zeros(pa.dim());
            Zip::from(&mut hj)
                .and(&kk)
                .and(&grad_a[j])
                .and(&w)
                .and(&diss_u[j])
                .for_each(|o, k, ga, w, l| *o = k * ga + w * l);
            Zip::from(&mut hj)
                .and(&pu[0])
                .and(&grad_u[j][0])
                .and(&pu[1])
                .and(&grad_u[j][1])
                .for_each(|o, v1, d1, v2, d2| *o -= v1 * d1 + v2 * d2);
            hj
        });
        let [h1, h2] = self.spectral_pair(&h[0], &h[1], dealias);
        Ok(([f, h1, h2], max_speed))
    }
}

/// `F = -div(a u)` and `H = K(a) grad a - (u . grad) u + a/(1+a) (-Delta)^beta u`.
pub fn nonlinear_rhs(state: &State, params: &PhysParams, dealias: bool) -> Result<RhsPair> {
    let grid = state.grid();
    let sym = Symbols::new(grid, params);
    let fields = [state.a.coeffs(), state.u[0].coeffs(), state.u[1].coeffs()];
    let ([f, h1, h2], _) = sym.forcing(fields, params.gamma(), dealias)?;
    Ok(RhsPair {
        f: SpectralField::from_coeffs(grid, f)?,
        h: [
            SpectralField::from_coeffs(grid, h1)?,
            SpectralField::from_coeffs(grid, h2)?,
        ],
    })
}

/// Whether the nonlinear forcing is evaluated; `Off` reduces a step to the
/// exact linear propagator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forcing {
    Nonlinear,
    Off,
}

/// Fixed-step ETD2RK integrator with precomputed per-mode coefficients.
pub struct Integrator {
    sym: Symbols,
    params: PhysParams,
    dt: f64,
    cfl_limit: f64,
    dealias: bool,
    forcing: Forcing,
    exp: Vec<ModeOp>,
    phi1: Vec<ModeOp>,
    phi2: Vec<ModeOp>,
}

impl Integrator {
    pub fn new(grid: &Grid, cfg: &SolverConfig, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt = {dt} must be positive")));
        }
        let sym = Symbols::new(grid, &cfg.params);
        let gamma = cfg.params.gamma();
        let n = grid.n();
        let mut exp = Vec::with_capacity(n * n);
        let mut phi1 = Vec::with_capacity(n * n);
        let mut phi2 = Vec::with_capacity(n * n);
        for ((i, j), q) in sym.xi_odd.indexed_iter() {
            let d = sym.damping[[i, j]];
            exp.push(exp_op(*q, d, gamma, dt));
            phi1.push(phi_op(1, *q, d, gamma, dt));
            phi2.push(phi_op(2, *q, d, gamma, dt));
        }
        Ok(Integrator {
            sym,
            params: cfg.params,
            dt,
            cfl_limit: cfg.cfl_limit,
            dealias: cfg.dealias,
            forcing: Forcing::Nonlinear,
            exp,
            phi1,
            phi2,
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Largest step allowed by the advective CFL condition at speed `speed`.
    pub fn cfl_bound(&self, speed: f64) -> f64 {
        self.cfl_limit * self.sym.grid.dx() / speed.max(1e-12)
    }

    fn forcing_of(&self, s: [&Array2<Complex64>; 3]) -> Result<([Array2<Complex64>; 3], f64)> {
        match self.forcing {
            Forcing::Nonlinear => self.sym.forcing(s, self.params.gamma(), self.dealias),
            Forcing::Off => {
                let z = Array2::zeros(s[0].dim());
                Ok(([z.clone(), z.clone(), z], 0.0))
            }
        }
    }

    /// One ETD2RK step:
    /// `s* = E s + h phi1 N(s)`, `s' = s* + h phi2 (N(s*) - N(s))`.
    pub fn step(&self, state: &State) -> Result<State> {
        if state.grid() != &self.sym.grid {
            return Err(Error::GridMismatch);
        }
        let s = [state.a.coeffs(), state.u[0].coeffs(), state.u[1].coeffs()];
        let (n0, speed) = self.forcing_of(s)?;
        let limit = self.cfl_bound(speed);
        if self.forcing == Forcing::Nonlinear && self.dt > limit {
            return Err(Error::CflViolation { dt: self.dt, limit });
        }
        let h = self.dt;
        let mut mid = [s[0].clone(), s[1].clone(), s[2].clone()];
        let n = self.sym.grid.n();
        for idx in 0..n * n {
            let ij = [idx / n, idx % n];
            let v = [s[0][ij], s[1][ij], s[2][ij]];
            let f = [n0[0][ij], n0[1][ij], n0[2][ij]];
            let e = self.exp[idx].apply(v);
            let p = self.phi1[idx].apply(f);
            for c in 0..3 {
                mid[c][ij] = e[c] + p[c] * h;
            }
        }
        let mut out = mid.clone();
        if self.forcing == Forcing::Nonlinear {
            let (n1, _) = self.forcing_of([&mid[0], &mid[1], &mid[2]])?;
            for idx in 0..n * n {
                let ij = [idx / n, idx % n];
                let diff = [
                    n1[0][ij] - n0[0][ij],
                    n1[1][ij] - n0[1][ij],
                    n1[2][ij] - n0[2][ij],
                ];
                let p = self.phi2[idx].apply(diff);
                for c in 0..3 {
                    out[c][ij] += p[c] * h;
                }
            }
        }
        let grid = &self.sym.grid;
        let [a, u1, u2] = out;
        State::new(
            SpectralField::from_coeffs(grid, a)?,
            [
                SpectralField::from_coeffs(grid, u1)?,
                SpectralField::from_coeffs(grid, u2)?,
            ],
        )
    }
}

/// Single step of size `dt` (builds the coefficient tables on the fly).
pub fn step(state: &State, dt: f64, cfg: &SolverConfig) -> Result<State> {
    Integrator::new(state.grid(), cfg, dt)?.step(state)
}

/// Result of [`simulate`]: the last state reached and, for runs that
/// stopped early, the reason.
#[derive(Debug)]
pub struct RunOutcome {
    pub state: State,
    pub t: f64,
    pub steps: usize,
    pub aborted: Option<Error>,
}

/// Steps from `t = 0` to `cfg.t_end`, calling `recorder(t, state)` at the
/// start, every `record_every` steps and at the end. Admissibility or CFL
/// failures stop the run and are reported in [`RunOutcome::aborted`];
/// recorder errors propagate.
pub fn simulate<R>(state0: &State, cfg: &SolverConfig, mut recorder: R) -> Result<RunOutcome>
where
    R: FnMut(f64, &State) -> Result<()>,
{
    cfg.validate()?;
    state0.check_admissible(VACUUM_FLOOR)?;
    let full_steps = (cfg.t_end / cfg.dt * (1.0 + 1e-12)).floor() as usize;
    let remainder = cfg.t_end - full_steps as f64 * cfg.dt;
    let main = Integrator::new(state0.grid(), cfg, cfg.dt)?;
    let tail = if remainder > 1e-12 * cfg.dt.max(cfg.t_end) {
        Some(Integrator::new(state0.grid(), cfg, remainder)?)
    } else {
        None
    };
    let total = full_steps + tail.is_some() as usize;

    let mut state = state0.clone();
    let mut t = 0.0;
    recorder(t, &state)?;
    let mut last_recorded = 0;
    for k in 1..=total {
        let integ = if k <= full_steps {
            &main
        } else {
            tail.as_ref().expect("tail step exists")
        };
        match integ.step(&state) {
            Ok(next) => state = next,
            Err(e @ (Error::DomainViolation(_) | Error::CflViolation { .. })) => {
                return Ok(RunOutcome {
                    state,
                    t,
                    steps: k - 1,
                    aborted: Some(e),
                });
            }
            Err(e) => return Err(e),
        }
        t = if k <= full_steps {
            k as f64 * cfg.dt
        } else {
            cfg.t_end
        };
        if k % cfg.record_every == 0 || k == total {
            recorder(t, &state)?;
            last_recorded = k;
        }
    }
    debug_assert!(total == 0 || last_recorded == total);
    Ok(RunOutcome {
        state,
        t,
        steps: total,
        aborted: None,
    })
}
