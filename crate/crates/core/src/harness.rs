//! Experiment orchestration: initial data, linear and nonlinear decay runs,
//! power-law fits and pass/fail reports.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{lambda_column, FunctionalConfig, NormTrajectory, Recorder};
use crate::error::{Error, Result};
use crate::linear::{evolve_linear, lower_bound_constant, r2_norm_trajectory, RadialProfile};
use crate::params::PhysParams;
use crate::solver::{simulate, SolverConfig};
use crate::spectral::{Grid, SpectralField};
use crate::state::State;

/// Minimum number of in-window samples accepted by [`fit_power_law`].
pub const MIN_FIT_SAMPLES: usize = 8;
/// Minimum coefficient of determination for a passing fit.
pub const MIN_R_SQUARED: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact linear evolution on the plane by radial quadrature.
    LinearR2,
    /// Exact linear evolution on the periodic grid.
    LinearTorus,
    /// Full nonlinear simulation.
    Nonlinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    GaussianBump,
    MeanZeroBump,
    IncompressibleMode,
    RandomBand,
}

/// Flat experiment description, read from JSON. Missing keys take the
/// defaults of [`ExperimentConfig::default`]; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub box_len: f64,
    pub beta: f64,
    pub gamma: f64,
    pub init: InitKind,
    pub amplitude: f64,
    pub sigma: f64,
    pub seed: u64,
    pub s1_list: Vec<f64>,
    /// `[t0, t1]`; `None` picks the per-mode default.
    pub fit_window: Option<[f64; 2]>,
    pub s: f64,
    pub k: f64,
    pub c2: f64,
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
    /// Number of log-spaced sample times in the linear modes.
    pub samples: usize,
    /// Exponent tolerance; `None` picks the per-mode default.
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let f = FunctionalConfig::default();
        ExperimentConfig {
            mode: Mode::Nonlinear,
            n: 512,
            box_len: 200.0 * PI,
            beta: 0.5,
            gamma: 1.0,
            init: InitKind::MeanZeroBump,
            amplitude: 1e-2,
            sigma: 2.0,
            seed: 0,
            s1_list: vec![0.0],
            fit_window: None,
            s: f.s,
            k: f.k,
            c2: f.c2,
            t_end: 100.0,
            dt: 0.5,
            record_every: 2,
            samples: 64,
            tolerance: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Defaults suited to `mode`: the plane runs use a unit Gaussian
    /// density pulse observed up to `t = 1e4`.
    pub fn for_mode(mode: Mode) -> Self {
        let base = ExperimentConfig {
            mode,
            ..Default::default()
        };
        match mode {
            Mode::LinearR2 => ExperimentConfig {
                init: InitKind::GaussianBump,
                amplitude: 1.0,
                sigma: 1.0,
                t_end: 1e4,
                ..base
            },
            Mode::LinearTorus | Mode::Nonlinear => base,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self) -> Result<PhysParams> {
        PhysParams::new(self.beta, self.gamma)
    }

    pub fn functional(&self) -> FunctionalConfig {
        FunctionalConfig {
            s: self.s,
            k: self.k,
            c2: self.c2,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.box_len)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.mode {
            Mode::LinearR2 => 0.05,
            Mode::LinearTorus | Mode::Nonlinear => 0.15,
        })
    }

    /// Last time at which `(C2 / (1+t))^{1/(2 beta)} >= 10 * 2 pi / L`, i.e.
    /// the shrinking ball still holds ten lattice shells.
    pub fn validity_limit(&self) -> f64 {
        let shell = 10.0 * 2.0 * PI / self.box_len;
        self.c2 * shell.powf(-2.0 * self.beta) - 1.0
    }

    /// Fit window after defaults and, on the torus, clipping to the
    /// validity limit.
    pub fn effective_window(&self) -> Result<[f64; 2]> {
        let [t0, t1] = self.fit_window.unwrap_or(match self.mode {
            Mode::LinearR2 => [1e2, 1e4],
            Mode::LinearTorus | Mode::Nonlinear => [10.0, self.t_end],
        });
        let t1 = match self.mode {
            Mode::LinearR2 => t1,
            _ => t1.min(self.validity_limit()),
        };
        if !(t0 >= 0.0 && t0 < t1) {
            return Err(Error::InvalidConfig(format!(
                "fit window [{t0}, {t1}] is empty or outside the validity limit {}",
                self.validity_limit()
            )));
        }
        Ok([t0, t1])
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        self.functional().validate()?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "amplitude = {} must be finite and nonnegative",
                self.amplitude
            )));
        }
        if self.s1_list.is_empty() || self.s1_list.iter().any(|s1| !(*s1 >= 0.0)) {
            return Err(Error::InvalidConfig(
                "s1_list must hold at least one nonnegative order".into(),
            ));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end = {} must be positive",
                self.t_end
            )));
        }
        if self.mode != Mode::Nonlinear && self.samples < MIN_FIT_SAMPLES {
            return Err(Error::InvalidConfig(format!(
                "samples = {} is below {MIN_FIT_SAMPLES}",
                self.samples
            )));
        }
        let [_, t1] = self.effective_window()?;
        if t1 > self.t_end * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "fit window ends at {t1}, after t_end = {}",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Physical samples of a state, row-major, as stored in JSON state files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub box_len: f64,
    pub a: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        let flat = |f: &SpectralField| f.to_physical().iter().copied().collect();
        let grid = state.grid();
        StateFile {
            n: grid.n(),
            box_len: grid.box_len(),
            a: flat(&state.a),
            u1: flat(&state.u[0]),
            u2: flat(&state.u[1]),
        }
    }

    pub fn to_state(&self) -> Result<State> {
        let grid = Grid::new(self.n, self.box_len)?;
        let field = |v: &[f64]| -> Result<SpectralField> {
            let arr = ndarray::Array2::from_shape_vec((self.n, self.n), v.to_vec())
                .map_err(|e| Error::InvalidConfig(format!("state samples: {e}")))?;
            SpectralField::from_physical(&grid, &arr)
        };
        State::new(field(&self.a)?, [field(&self.u1)?, field(&self.u2)?])
    }
}

/// Builds initial data on `grid`. Bumps are centred in the box; the
/// incompressible datum is the divergence-free mode with wavenumber `(1, 2)`;
/// the random band draws wavenumbers `1 <= |k| <= 4` from a ChaCha stream
/// and is scaled to sup norm `amplitude`.
pub fn make_initial(
    kind: InitKind,
    amplitude: f64,
    sigma: f64,
    grid: &Grid,
    seed: u64,
) -> Result<State> {
    let l = grid.box_len();
    match kind {
        InitKind::GaussianBump | InitKind::MeanZeroBump => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "sigma = {sigma} must be positive"
                )));
            }
            if sigma >= l / 8.0 {
                return Err(Error::SigmaTooLarge { sigma, box_len: l });
            }
            let c = 0.5 * l;
            let bump = SpectralField::from_fn(grid, |x, y| {
                let r2 = (x - c).powi(2) + (y - c).powi(2);
                amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
            });
            let bump = if kind == InitKind::MeanZeroBump {
                bump.without_mean()
            } else {
                bump
            };
            State::new(bump.clone(), [bump.clone(), bump])
        }
        InitKind::IncompressibleMode => {
            let (k1, k2) = (1.0f64, 2.0f64);
            let dk = grid.dk();
            let norm = (k1 * k1 + k2 * k2).sqrt();
            let v = [-k2 / norm, k1 / norm];
            let wave = |x: f64, y: f64| amplitude * (dk * (k1 * x + k2 * y)).cos();
            State::new(
                SpectralField::zeros(grid),
                [
                    SpectralField::from_fn(grid, |x, y| v[0] * wave(x, y)),
                    SpectralField::from_fn(grid, |x, y| v[1] * wave(x, y)),
                ],
            )
        }
        InitKind::RandomBand => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = grid.n();
            let draw = |rng: &mut ChaCha8Rng| -> Result<SpectralField> {
                let mut coeffs = ndarray::Array2::<Complex64>::zeros((n, n));
                for i in 0..n {
                    for j in 0..n {
                        let k2 = grid.wavenumber(i).pow(2) + grid.wavenumber(j).pow(2);
                        if (1..=16).contains(&k2) {
                            coeffs[[i, j]] = Complex64::new(
                                rng.random_range(-1.0..1.0),
                                rng.random_range(-1.0..1.0),
                            );
                        }
                    }
                }
                // Taking the real part in physical space symmetrizes the spectrum.
                let raw = SpectralField::from_coeffs(grid, coeffs)?;
                let phys = raw.to_physical();
                let sup = phys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let field = SpectralField::from_physical(grid, &phys)?;
                Ok(if sup > 0.0 {
                    field.scaled(amplitude / sup)
                } else {
                    field
                })
            };
            let a = draw(&mut rng)?;
            let u1 = draw(&mut rng)?;
            let u2 = draw(&mut rng)?;
            State::new(a, [u1, u2])
        }
    }
}

/// Least-squares line through `(ln(1+t), ln value)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: [f64; 2],
    pub samples: usize,
}

pub fn fit_power_law(traj: &NormTrajectory, series: &str, window: [f64; 2]) -> Result<PowerLaw> {
    let values = traj
        .series(series)
        .ok_or_else(|| Error::UnknownSeries(series.to_string()))?;
    let mut pts = Vec::new();
    for (&t, &v) in traj.times().iter().zip(values) {
        if t < window[0] || t > window[1] {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::NonPositiveValue {
                series: series.to_string(),
                t,
                value: v,
            });
        }
        pts.push((t.ln_1p(), v.ln()));
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: pts.len(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    let m = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x / m, sy + y / m));
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pts {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(PowerLaw {
        exponent,
        intercept,
        r_squared,
        window,
        samples: pts.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub series: String,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: [f64; 2],
    pub samples: usize,
    pub theory_exponent: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl FitResult {
    pub fn judge(series: &str, fit: PowerLaw, theory_exponent: f64, tolerance: f64) -> Self {
        let pass =
            (fit.exponent - theory_exponent).abs() <= tolerance && fit.r_squared >= MIN_R_SQUARED;
        FitResult {
            series: series.to_string(),
            exponent: fit.exponent,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            window: fit.window,
            samples: fit.samples,
            theory_exponent,
            tolerance,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

/// A named yes/no property of a run. Informational checks never affect
/// the exit code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub fits: Vec<FitResult>,
    pub checks: Vec<Check>,
    /// Set when no fit could be made because a series vanished.
    pub degenerate: bool,
    /// Set when the run stopped before `t_end`.
    pub partial: bool,
    pub notes: Vec<String>,
}

impl Report {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub struct ExperimentOutput {
    pub trajectory: NormTrajectory,
    pub report: Report,
    /// Last state of grid runs; `None` on the plane.
    pub final_state: Option<State>,
}

/// Name of the squared-norm series of the plane runs.
pub fn squared_column(s1: f64) -> String {
    format!("lam2_{s1}")
}

fn log_times(t_end: f64, samples: usize) -> Vec<f64> {
    let (lo, hi) = (0.0f64, t_end.ln_1p());
    (0..=samples)
        .map(|i| (lo + (hi - lo) * i as f64 / samples as f64).exp_m1())
        .collect()
}

/// Runs the configured experiment and, when `cfg.out` is set, writes
/// `trajectory.csv` and `report.json` there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let out = match cfg.mode {
        Mode::LinearR2 => run_linear_r2(cfg)?,
        Mode::LinearTorus => run_linear_torus(cfg)?,
        Mode::Nonlinear => run_nonlinear(cfg)?,
    };
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &out)?;
    }
    Ok(out)
}

fn new_report(cfg: &ExperimentConfig) -> Report {
    let mut notes = Vec::new();
    if cfg.mode != Mode::LinearR2 {
        notes.push(format!(
            "validity limit t <= {:.6e} for C2 = {}",
            cfg.validity_limit(),
            cfg.c2
        ));
    }
    notes.push("cross term of the weighted energy uses the coefficient k".into());
    Report {
        config: cfg.clone(),
        seed: cfg.seed,
        fits: Vec::new(),
        checks: Vec::new(),
        degenerate: false,
        partial: false,
        notes,
    }
}

/// Fits each `(series, theory)` pair; vanishing series flag the report
/// degenerate instead of failing the run.
fn fit_all(
    report: &mut Report,
    traj: &NormTrajectory,
    targets: &[(String, f64)],
    window: [f64; 2],
    tol: f64,
) -> Result<()> {
    for (name, theory) in targets {
        match fit_power_law(traj, name, window) {
            Ok(fit) => report.fits.push(FitResult::judge(name, fit, *theory, tol)),
            Err(e @ Error::NonPositiveValue { .. }) => {
                report.degenerate = true;
                report.notes.push(format!("{name}: {e}"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn radial_profile(cfg: &ExperimentConfig) -> Result<RadialProfile> {
    match cfg.init {
        InitKind::GaussianBump | InitKind::MeanZeroBump => {
            Ok(RadialProfile::gaussian_density(cfg.amplitude, cfg.sigma))
        }
        InitKind::IncompressibleMode => Ok(RadialProfile::gaussian_incompressible(
            cfg.amplitude,
            cfg.sigma,
        )),
        InitKind::RandomBand => Err(Error::InvalidConfig(
            "random_band data has no radial profile on the plane".into(),
        )),
    }
}

fn run_linear_r2(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.params()?;
    let profile = radial_profile(cfg)?;
    let times = log_times(cfg.t_end, cfg.samples);
    let names: Vec<String> = cfg.s1_list.iter().map(|s1| squared_column(*s1)).collect();
    let columns = cfg
        .s1_list
        .iter()
        .map(|s1| r2_norm_trajectory(&profile, *s1, &times, &params))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = NormTrajectory::new(&names);
    for (row, t) in times.iter().enumerate() {
        let values: Vec<f64> = columns.iter().map(|c| c[row]).collect();
        traj.push(*t, &values)?;
    }

    let mut report = new_report(cfg);
    let window = cfg.effective_window()?;
    let targets: Vec<(String, f64)> = cfg
        .s1_list
        .iter()
        .map(|s1| (squared_column(*s1), 2.0 * params.decay_exponent(*s1)))
        .collect();
    fit_all(&mut report, &traj, &targets, window, cfg.tolerance())?;

    let c0 = profile.c0();
    if c0 > 0.0 {
        let eta = profile.half_amplitude_radius();
        for s1 in &cfg.s1_list {
            let c_beta = lower_bound_constant(c0, eta, *s1, params.beta());
            let series = traj.series(&squared_column(*s1)).expect("column exists");
            let (mut passed, mut worst) = (true, f64::INFINITY);
            for (t, v) in traj.times().iter().zip(series) {
                if *t < window[0] || *t > window[1] {
                    continue;
                }
                let bound =
                    (0.5 * c_beta).powi(2) * (1.0 + t).powf(2.0 * params.decay_exponent(*s1));
                worst = worst.min(v / bound);
                passed &= *v >= bound;
            }
            report.checks.push(Check {
                name: format!("lower_bound_{s1}"),
                passed,
                informational: false,
                detail: format!("C_beta = {c_beta:.6e}, min value/bound = {worst:.6e}"),
            });
        }
    }
    Ok(ExperimentOutput {
        trajectory: traj,
        report,
        final_state: None,
    })
}

fn torus_targets(cfg: &ExperimentConfig, params: &PhysParams) -> Vec<(String, f64)> {
    cfg.s1_list
        .iter()
        .map(|s1| (lambda_column(*s1), params.decay_exponent(*s1)))
        .collect()
}

fn run_linear_torus(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.params()?;
    let grid = cfg.grid()?;
    let state0 = make_initial(cfg.init, cfg.amplitude, cfg.sigma, &grid, cfg.seed)?;
    let mut rec = Recorder::new(&grid, cfg.functional(), params, &cfg.s1_list);
    let mut last = state0.clone();
    for t in log_times(cfg.t_end, cfg.samples) {
        last = evolve_linear(&state0, t, &params)?;
        rec.record(&last, t)?;
    }
    let traj = rec.into_trajectory();
    let mut report = new_report(cfg);
    fit_all(
        &mut report,
        &traj,
        &torus_targets(cfg, &params),
        cfg.effective_window()?,
        cfg.tolerance(),
    )?;
    Ok(ExperimentOutput {
        trajectory: traj,
        report,
        final_state: Some(last),
    })
}

/// Extra trajectory columns of nonlinear runs: the mass of `a` and the
/// norm of the nonlinear remainder `(a - a_L, u - u_L)`.
pub const NONLINEAR_EXTRA: [&str; 2] = ["mass_a", "L2_N"];

fn run_nonlinear(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.params()?;
    let grid = cfg.grid()?;
    let state0 = make_initial(cfg.init, cfg.amplitude, cfg.sigma, &grid, cfg.seed)?;
    let mut solver_cfg = SolverConfig::new(params, cfg.dt, cfg.t_end)?;
    solver_cfg.record_every = cfg.record_every.max(1);
    let area = cfg.box_len * cfg.box_len;
    let mut rec = Recorder::with_extra_columns(
        &grid,
        cfg.functional(),
        params,
        &cfg.s1_list,
        &NONLINEAR_EXTRA,
    );
    let outcome = simulate(&state0, &solver_cfg, |t, state| {
        let linear = evolve_linear(&state0, t, &params)?;
        let remainder = state.try_sub(&linear)?.l2_energy().sqrt();
        rec.record_with(state, t, &[area * state.a.mean().re, remainder])
    })?;
    let traj = rec.into_trajectory();

    let mut report = new_report(cfg);
    if let Some(e) = &outcome.aborted {
        report.partial = true;
        report
            .notes
            .push(format!("run stopped at t = {}: {e}", outcome.t));
    }
    fit_all(
        &mut report,
        &traj,
        &torus_targets(cfg, &params),
        cfg.effective_window()?,
        cfg.tolerance(),
    )?;
    report
        .checks
        .extend(nonlinear_checks(&traj, cfg.box_len * state0.a.l2_norm()));
    Ok(ExperimentOutput {
        trajectory: traj,
        report,
        final_state: Some(outcome.state),
    })
}

/// Lyapunov, mass and splitting checks on a recorded nonlinear trajectory.
/// `mass_scale` bounds `|mass|` from above (by Cauchy-Schwarz) and sets the
/// scale of the mass drift.
pub fn nonlinear_checks(traj: &NormTrajectory, mass_scale: f64) -> Vec<Check> {
    let t = traj.times();
    let series = |name: &str| traj.series(name).expect("standard column");
    let (e0, d0) = (series("E0"), series("D0"));
    let mut checks = Vec::new();
    if t.is_empty() {
        return checks;
    }

    let slack = 1e-10 * e0[0];
    let worst_rise = e0
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check {
        name: "E0_nonincreasing".into(),
        passed: e0.windows(2).all(|w| w[1] <= w[0] + slack),
        informational: false,
        detail: format!("largest increment {worst_rise:.3e}, slack {slack:.3e}"),
    });

    let integral: f64 = (1..t.len())
        .map(|i| 0.5 * (d0[i] + d0[i - 1]) * (t[i] - t[i - 1]))
        .sum();
    checks.push(Check {
        name: "D0_integral".into(),
        passed: integral <= 1.05 * e0[0],
        informational: false,
        detail: format!("int D0 dt = {integral:.6e}, E0(0) = {:.6e}", e0[0]),
    });

    if let Some(mass) = traj.series("mass_a") {
        let drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max);
        let scale = mass_scale.max(mass[0].abs());
        checks.push(Check {
            name: "mass_conservation".into(),
            passed: drift <= 1e-12 * scale,
            informational: false,
            detail: format!("max drift {drift:.3e} against scale {scale:.3e}"),
        });
    }

    if let (Some(rem), Some(total)) = (traj.series("L2_N"), traj.series("lam_0")) {
        let below = rem.iter().zip(total).skip(1).all(|(r, v)| r < v);
        checks.push(Check {
            name: "nonlinear_remainder_below_total".into(),
            passed: below,
            informational: true,
            detail: format!(
                "max ratio {:.3e}",
                rem.iter()
                    .zip(total)
                    .skip(1)
                    .map(|(r, v)| r / v)
                    .fold(0.0, f64::max)
            ),
        });
    }
    checks
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn write_outputs(dir: &Path, out: &ExperimentOutput) -> Result<()> {
    write_atomic(&dir.join("trajectory.csv"), &out.trajectory.to_csv())?;
    write_atomic(&dir.join("report.json"), &out.report.to_json()?)
}

/// Outcome of [`compare_rates`]: one summary line per fit and check.
#[derive(Clone, Debug, PartialEq)]
pub struct RateSummary {
    pub lines: Vec<String>,
    pub failing: Vec<String>,
}

impl RateSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failing.is_empty() {
            0
        } else {
            1
        }
    }
}

pub fn compare_rates(report: &Report) -> Result<RateSummary> {
    if report.fits.is_empty() {
        return Err(Error::MalformedReport(
            "report lists no fitted series".into(),
        ));
    }
    let mut lines = Vec::new();
    let mut failing = Vec::new();
    for f in &report.fits {
        let tag = match f.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                failing.push(f.series.clone());
                "FAIL"
            }
        };
        lines.push(format!(
            "{tag} {}: exponent {:.4} (theory {:.4} +/- {}), r^2 {:.5}",
            f.series, f.exponent, f.theory_exponent, f.tolerance, f.r_squared
        ));
    }
    for c in &report.checks {
        let tag = match (c.passed, c.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => {
                failing.push(c.name.clone());
                "FAIL"
            }
        };
        lines.push(format!("{tag} {}: {}", c.name, c.detail));
    }
    Ok(RateSummary { lines, failing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ExperimentConfig::from_json(r#"{"n": 64, "bogus": 1}"#).is_err());
        let cfg = ExperimentConfig::from_json(r#"{"mode": "linear_r2", "beta": 0.75}"#).unwrap();
        assert_eq!(cfg.mode, Mode::LinearR2);
        assert_eq!(cfg.n, 512);
    }

    #[test]
    fn validity_limit_of_default_box() {
        let cfg = ExperimentConfig::default();
        assert!((cfg.validity_limit() - 999.0).abs() < 1e-9);
        assert_eq!(cfg.effective_window().unwrap(), [10.0, 100.0]);
    }

    #[test]
    fn log_times_span() {
        let t = log_times(1e4, 10);
        assert_eq!(t.len(), 11);
        assert_eq!(t[0], 0.0);
        assert!((t[10] - 1e4).abs() < 1e-8);
    }
}
