use std::path::PathBuf;

use clap::{Args, ValueEnum};

use nk_flow_core::ode::Method;

use crate::error::{AppError, AppResult};
use crate::source::{Preset, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    #[default]
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Euler => Method::Euler,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Built-in model.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Model file: an initial value problem or a single level of reduced data.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Heisenberg preset constant (h = C/s).
    #[arg(long = "C", default_value_t = 2.0)]
    pub c: f64,
    /// Heisenberg preset initial level.
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    /// Number of levels (or trajectory nodes) to evaluate.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// First level; defaults to s0 and must equal it for integrations.
    #[arg(long)]
    pub s_start: Option<f64>,
    /// Last level; defaults depend on the subcommand (1.35·s0 for grids,
    /// 1.3·s0 for integrations, 1.1·s0 for verifying a model file).
    #[arg(long)]
    pub s_end: Option<f64>,
    /// Fixed integration steps.
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4)]
    pub method: MethodArg,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format; JSON for reports, CSV for tables by default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Absolute bound on every structural residual.
    #[arg(long, default_value_t = 1e-9)]
    pub threshold_structural: f64,
    /// Bound on |Δs − 24s| / |24s|.
    #[arg(long, default_value_t = 1e-8)]
    pub threshold_laplace: f64,
    /// Bound on the relative integration error, reported by `compare`.
    #[arg(long, default_value_t = 1e-7)]
    pub threshold_ode: f64,
}

/// Resolved settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub model: Option<PathBuf>,
    pub c: f64,
    pub s0: f64,
    pub grid: usize,
    pub s_start: Option<f64>,
    pub s_end: Option<f64>,
    pub steps: usize,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threshold_structural: f64,
    pub threshold_laplace: f64,
    pub threshold_ode: f64,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            preset: a.preset,
            model: a.model,
            c: a.c,
            s0: a.s0,
            grid: a.grid,
            s_start: a.s_start,
            s_end: a.s_end,
            steps: a.steps,
            method: a.method.into(),
            out: a.out,
            format: a.format,
            threshold_structural: a.threshold_structural,
            threshold_laplace: a.threshold_laplace,
            threshold_ode: a.threshold_ode,
        }
    }
}

impl RunConfig {
    /// The Heisenberg preset with default settings.
    pub fn heisenberg(c: f64, s0: f64) -> Self {
        RunConfig {
            preset: Some(Preset::Heisenberg),
            model: None,
            c,
            s0,
            grid: 50,
            s_start: None,
            s_end: None,
            steps: 300,
            method: Method::Rk4,
            out: None,
            format: None,
            threshold_structural: 1e-9,
            threshold_laplace: 1e-8,
            threshold_ode: 1e-7,
        }
    }

    pub fn check_steps(&self) -> AppResult<()> {
        if self.steps == 0 {
            return Err(AppError::Usage("--steps must be at least 1".into()));
        }
        if self.grid == 0 {
            return Err(AppError::Usage("--grid must be at least 1".into()));
        }
        if self.s_start == Some(0.0) {
            return Err(nk_flow_core::Error::ZeroLevel.into());
        }
        Ok(())
    }

    pub fn source(&self) -> AppResult<Source> {
        Source::resolve(self.preset, self.model.as_deref(), self.c, self.s0)
    }
}
