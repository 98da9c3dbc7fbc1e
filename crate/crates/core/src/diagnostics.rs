//! Energy and dissipation functionals, Fourier-splitting ball energy and
//! the norm trajectories recorded along runs.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{build_partition, norm_of, DyadicPartition, NormRequest, SumIndex};
use crate::params::PhysParams;
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalConfig {
    /// Sobolev regularity, `s > 1`.
    pub s: f64,
    /// Cross-term coupling.
    pub k: f64,
    /// Fourier-splitting ball constant.
    pub c2: f64,
}

impl Default for FunctionalConfig {
    fn default() -> Self {
        FunctionalConfig {
            s: 1.5,
            k: 0.01,
            c2: 100.0,
        }
    }
}

impl FunctionalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "s = {} must exceed 1",
                self.s
            )));
        }
        if !(self.k > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "k = {} must be positive",
                self.k
            )));
        }
        if !(self.c2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "C2 = {} must be positive",
                self.c2
            )));
        }
        Ok(())
    }
}

/// Visits every mode with `(xi_odd, |xi|, a^, u^_1, u^_2)` and sums
/// `L^2 * term`.
fn mode_sum(state: &State, mut term: impl FnMut([f64; 2], f64, [Complex64; 3]) -> f64) -> f64 {
    let grid = state.grid();
    let l = grid.box_len();
    let (a, u1, u2) = (state.a.coeffs(), state.u[0].coeffs(), state.u[1].coeffs());
    let n = grid.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = [a[[i, j]], u1[[i, j]], u2[[i, j]]];
            sum += term(grid.xi_odd(i, j), grid.xi_norm(i, j), v);
        }
    }
    l * l * sum
}

/// `Re (i xi a^) . conj(u^)`.
fn grad_a_dot_u(xi: [f64; 2], v: [Complex64; 3]) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    (i * v[0] * (xi[0] * v[1].conj() + xi[1] * v[2].conj())).re
}

/// `2k <Lambda^{beta-1} grad a, Lambda^{beta-1} u>_{H^{s-2beta+1}}`.
pub fn cross_term(state: &State, cfg: &FunctionalConfig, beta: f64) -> f64 {
    let sigma = cfg.s - 2.0 * beta + 1.0;
    2.0 * cfg.k
        * mode_sum(state, |xi, r, v| {
            if r == 0.0 {
                return 0.0;
            }
            (1.0 + r * r).powf(sigma) * r.powf(2.0 * beta - 2.0) * grad_a_dot_u(xi, v)
        })
}

/// `||(sqrt(gamma) a, u)||^2_{H^s}`.
pub fn hs_energy(state: &State, s: f64, gamma: f64) -> f64 {
    mode_sum(state, |_, r, v| {
        (1.0 + r * r).powf(s) * (gamma * v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr())
    })
}

/// `E0 = ||(sqrt(gamma) a, u)||^2_{H^s} + cross term`.
pub fn energy_e0(state: &State, cfg: &FunctionalConfig, params: &PhysParams) -> f64 {
    hs_energy(state, cfg.s, params.gamma()) + cross_term(state, cfg, params.beta())
}

/// `D0 = k gamma ||Lambda^beta a||^2_{H^{s+1-2beta}} + ||Lambda^beta u||^2_{H^s}`.
pub fn dissipation_d0(state: &State, cfg: &FunctionalConfig, params: &PhysParams) -> f64 {
    let beta = params.beta();
    let sa = cfg.s + 1.0 - 2.0 * beta;
    let kg = cfg.k * params.gamma();
    mode_sum(state, |_, r, v| {
        if r == 0.0 {
            return 0.0;
        }
        let w = 1.0 + r * r;
        let lb = r.powf(2.0 * beta);
        kg * w.powf(sa) * lb * v[0].norm_sqr()
            + w.powf(cfg.s) * lb * (v[1].norm_sqr() + v[2].norm_sqr())
    })
}

/// Energy `||a||^2 + ||u||^2` carried by the modes of the shrinking ball
/// `|xi|^{2 beta} <= C2 / (1 + t)` (the mean mode always belongs to it).
pub fn ball_energy(state: &State, t: f64, cfg: &FunctionalConfig, beta: f64) -> f64 {
    let bound = cfg.c2 / (1.0 + t);
    mode_sum(state, |_, r, v| {
        if r.powf(2.0 * beta) <= bound {
            v.iter().map(|c| c.norm_sqr()).sum()
        } else {
            0.0
        }
    })
}

/// `(1+t)^b ||Lambda^s (sqrt(gamma) a, u)||^2 + k <Lambda^{s-beta} grad a, Lambda^{s-beta} u>`
/// with `b = 2 - 1/beta`.
pub fn weighted_es(state: &State, t: f64, cfg: &FunctionalConfig, params: &PhysParams) -> f64 {
    let (beta, gamma, s) = (params.beta(), params.gamma(), cfg.s);
    let weight = (1.0 + t).powf(params.time_weight());
    mode_sum(state, |xi, r, v| {
        if r == 0.0 {
            return 0.0;
        }
        let energy = gamma * v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr();
        weight * r.powf(2.0 * s) * energy + cfg.k * r.powf(2.0 * (s - beta)) * grad_a_dot_u(xi, v)
    })
}

/// `(1+t)^b ||Lambda^{s+beta} u||^2 + (k gamma / 2) ||grad Lambda^{s-beta} a||^2`.
pub fn weighted_ds(state: &State, t: f64, cfg: &FunctionalConfig, params: &PhysParams) -> f64 {
    let (beta, gamma, s) = (params.beta(), params.gamma(), cfg.s);
    let weight = (1.0 + t).powf(params.time_weight());
    mode_sum(state, |xi, r, v| {
        if r == 0.0 {
            return 0.0;
        }
        let q2 = xi[0] * xi[0] + xi[1] * xi[1];
        weight * r.powf(2.0 * (s + beta)) * (v[1].norm_sqr() + v[2].norm_sqr())
            + 0.5 * cfg.k * gamma * q2 * r.powf(2.0 * (s - beta)) * v[0].norm_sqr()
    })
}

/// `||Lambda^{s1} (a, u)||_{L2}`.
pub fn lambda_norm(state: &State, s1: f64) -> f64 {
    mode_sum(state, |_, r, v| {
        let w = if s1 == 0.0 {
            1.0
        } else if r == 0.0 {
            0.0
        } else {
            r.powf(2.0 * s1)
        };
        w * v.iter().map(|c| c.norm_sqr()).sum::<f64>()
    })
    .sqrt()
}

/// `||(a, u)||_{B^{-1}_{2,inf}}` of the mean-free part.
pub fn besov_minus_one(state: &State, part: &DyadicPartition) -> Result<f64> {
    let s = state.without_mean();
    norm_of(
        &[&s.a, &s.u[0], &s.u[1]],
        NormRequest::Besov(-1.0, SumIndex::Infinity),
        part,
    )
}

/// Column name of `||Lambda^{s1}(a, u)||_{L2}` in trajectories.
pub fn lambda_column(s1: f64) -> String {
    format!("lam_{s1}")
}

/// Named time series sharing one time axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormTrajectory {
    times: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
}

impl NormTrajectory {
    pub fn new(names: &[String]) -> Self {
        NormTrajectory {
            times: Vec::new(),
            columns: names.iter().map(|n| (n.clone(), Vec::new())).collect(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Appends one row; `values` must follow the column order.
    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if let Some(&prev) = self.times.last() {
            if !(t > prev) {
                return Err(Error::NonMonotoneTime { prev, t });
            }
        }
        if values.len() != self.columns.len() {
            return Err(Error::InvalidConfig(format!(
                "row has {} values for {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        self.times.push(t);
        for ((_, col), v) in self.columns.iter_mut().zip(values) {
            col.push(*v);
        }
        Ok(())
    }

    /// CSV with a `t` column first, 17 significant digits, `\n` line ends.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (row, t) in self.times.iter().enumerate() {
            write!(out, "{t:.16e}").unwrap();
            for (_, col) in &self.columns {
                write!(out, ",{:.16e}", col[row]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty CSV".into()))?;
        let mut names = header.split(',');
        if names.next() != Some("t") {
            return Err(Error::InvalidConfig(
                "CSV must start with a t column".into(),
            ));
        }
        let names: Vec<String> = names.map(str::to_string).collect();
        let mut traj = NormTrajectory::new(&names);
        for line in lines.filter(|l| !l.is_empty()) {
            let values = line
                .split(',')
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|e| Error::InvalidConfig(format!("bad CSV value {v}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let (t, rest) = values
                .split_first()
                .ok_or_else(|| Error::InvalidConfig("empty CSV row".into()))?;
            traj.push(*t, rest)?;
        }
        Ok(traj)
    }
}

/// Computes the standard trajectory columns
/// `L2_a, L2_u, Hs, E0, D0, ball_energy, besov_minus1, lam_<s1>...`.
pub struct Recorder {
    pub fcfg: FunctionalConfig,
    pub params: PhysParams,
    pub s1_list: Vec<f64>,
    partition: DyadicPartition,
    traj: NormTrajectory,
}

pub const BASE_COLUMNS: [&str; 7] = [
    "L2_a",
    "L2_u",
    "Hs",
    "E0",
    "D0",
    "ball_energy",
    "besov_minus1",
];

impl Recorder {
    pub fn new(
        grid: &crate::Grid,
        fcfg: FunctionalConfig,
        params: PhysParams,
        s1_list: &[f64],
    ) -> Self {
        Self::with_extra_columns(grid, fcfg, params, s1_list, &[])
    }

    /// Like [`Recorder::new`], with caller-provided columns appended after
    /// the standard ones (filled through [`Recorder::record_with`]).
    pub fn with_extra_columns(
        grid: &crate::Grid,
        fcfg: FunctionalConfig,
        params: PhysParams,
        s1_list: &[f64],
        extra: &[&str],
    ) -> Self {
        let mut names: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
        names.extend(s1_list.iter().map(|s1| lambda_column(*s1)));
        names.extend(extra.iter().map(|s| s.to_string()));
        Recorder {
            fcfg,
            params,
            s1_list: s1_list.to_vec(),
            partition: build_partition(grid),
            traj: NormTrajectory::new(&names),
        }
    }

    /// Values of the standard columns for `state` at time `t`.
    pub fn row(&self, state: &State, t: f64) -> Result<Vec<f64>> {
        let (fcfg, params) = (&self.fcfg, &self.params);
        let mut row = vec![
            state.a.l2_norm(),
            (state.u[0].l2_norm_sq() + state.u[1].l2_norm_sq()).sqrt(),
            hs_energy(state, fcfg.s, 1.0).sqrt(),
            energy_e0(state, fcfg, params),
            dissipation_d0(state, fcfg, params),
            ball_energy(state, t, fcfg, params.beta()),
            besov_minus_one(state, &self.partition)?,
        ];
        row.extend(self.s1_list.iter().map(|s1| lambda_norm(state, *s1)));
        Ok(row)
    }

    pub fn record(&mut self, state: &State, t: f64) -> Result<()> {
        self.record_with(state, t, &[])
    }

    pub fn record_with(&mut self, state: &State, t: f64, extra: &[f64]) -> Result<()> {
        if let Some(&prev) = self.traj.times().last() {
            if !(t > prev) {
                return Err(Error::NonMonotoneTime { prev, t });
            }
        }
        let mut row = self.row(state, t)?;
        row.extend_from_slice(extra);
        self.traj.push(t, &row)
    }

    pub fn trajectory(&self) -> &NormTrajectory {
        &self.traj
    }

    pub fn into_trajectory(self) -> NormTrajectory {
        self.traj
    }
}
