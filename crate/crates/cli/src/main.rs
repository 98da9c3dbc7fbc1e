use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fcns_core::diagnostics::{lambda_column, Recorder, BASE_COLUMNS};
use fcns_core::harness::{
    compare_rates, run_experiment, ExperimentConfig, InitKind, Mode, Report, StateFile,
};
use fcns_core::{Error, FunctionalConfig, PhysParams};

#[derive(Parser)]
#[command(
    name = "fcns",
    version,
    about = "Decay experiments for compressible flow with fractional dissipation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact linear evolution, on the plane or on the periodic grid.
    Linear {
        #[arg(long, value_enum, default_value = "linear_r2")]
        mode: LinearMode,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Nonlinear pseudo-spectral simulation.
    Simulate {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Evaluate the recorded norms of a JSON state file.
    Norms {
        state: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        s1: Vec<f64>,
        /// Time used by the shrinking-ball energy.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Summarize a report and exit nonzero unless every verdict passes.
    Report { report: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum LinearMode {
    #[value(name = "linear_r2", alias = "linear-r2")]
    LinearR2,
    #[value(name = "linear_torus", alias = "linear-torus")]
    LinearTorus,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    GaussianBump,
    MeanZeroBump,
    IncompressibleMode,
    RandomBand,
}

impl From<InitArg> for InitKind {
    fn from(k: InitArg) -> Self {
        match k {
            InitArg::GaussianBump => InitKind::GaussianBump,
            InitArg::MeanZeroBump => InitKind::MeanZeroBump,
            InitArg::IncompressibleMode => InitKind::IncompressibleMode,
            InitArg::RandomBand => InitKind::RandomBand,
        }
    }
}

/// Flags that override the config file (or the mode defaults).
#[derive(Args)]
struct RunOpts {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    box_len: Option<f64>,
    #[arg(long = "s1", value_delimiter = ',')]
    s1_list: Option<Vec<f64>>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunOpts {
    fn resolve(self, mode: Mode) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => ExperimentConfig::for_mode(mode),
        };
        cfg.mode = mode;
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        set!(beta, gamma, n, box_len, s1_list, t_end, dt, amplitude, sigma, c2, seed);
        if let Some(init) = self.init {
            cfg.init = init.into();
        }
        if self.tolerance.is_some() {
            cfg.tolerance = self.tolerance;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        Ok(cfg)
    }
}

fn summarize(report: &Report) -> ExitCode {
    match compare_rates(report) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            if summary.failing.is_empty() {
                ExitCode::SUCCESS
            } else {
                println!("failing: {}", summary.failing.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cfg: ExperimentConfig) -> anyhow::Result<ExitCode> {
    let out = run_experiment(&cfg)?;
    if let Some(dir) = &cfg.out {
        eprintln!("wrote {}", dir.display());
    }
    Ok(summarize(&out.report))
}

fn norms(
    state: PathBuf,
    params: PhysParams,
    s1: &[f64],
    t: f64,
    c2: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let text =
        std::fs::read_to_string(&state).with_context(|| format!("reading {}", state.display()))?;
    let file: StateFile = serde_json::from_str(&text).context("parsing state file")?;
    let state = file.to_state()?;
    let mut fcfg = FunctionalConfig::default();
    if let Some(c2) = c2 {
        fcfg.c2 = c2;
    }
    fcfg.validate()?;
    let rec = Recorder::new(state.grid(), fcfg, params, s1);
    let row = rec.row(&state, t)?;
    let names = BASE_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(s1.iter().map(|s| lambda_column(*s)));
    let map: serde_json::Map<String, serde_json::Value> = names
        .zip(row)
        .map(|(k, v)| (k, serde_json::json!(v)))
        .collect();
    println!("{}", serde_json::to_string_pretty(&map)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Linear { mode, opts } => {
            let mode = match mode {
                LinearMode::LinearR2 => Mode::LinearR2,
                LinearMode::LinearTorus => Mode::LinearTorus,
            };
            opts.resolve(mode).and_then(run)
        }
        Command::Simulate { opts } => opts.resolve(Mode::Nonlinear).and_then(run),
        Command::Norms {
            state,
            beta,
            gamma,
            s1,
            t,
            c2,
        } => PhysParams::new(beta, gamma)
            .map_err(anyhow::Error::from)
            .and_then(|p| norms(state, p, &s1, t, c2)),
        Command::Report { report } => std::fs::read_to_string(&report)
            .with_context(|| format!("reading {}", report.display()))
            .and_then(|text| Ok(Report::from_json(&text)?))
            .map(|r| summarize(&r)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::MalformedReport(_)) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
