//! The four subcommands. Each writes its report to `out` and returns the
//! exit code; errors carry their own exit code.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use nk_flow_core::evolution::{integrate, EvolutionState};
use nk_flow_core::heisenberg::{closed_form_profiles, compare_ode_vs_closed, theta_shift, Comparison, HeisenbergParams};
use nk_flow_core::ode::Method;
use nk_flow_core::su3::nk_residual;
use nk_flow_core::{Error as CoreError, Residual};

use crate::config::{Format, RunConfig};
use crate::error::{AppError, AppResult, EXIT_OK, EXIT_THRESHOLD};
use crate::formats::{write_tidy_csv, write_trajectory_csv, ResidualJson, TidyRow, TrajectoryRow};
use crate::source::Source;
use crate::suite::{flow_suite, heisenberg_suite, reduced_suite, LAPLACE_CHECK};

/// `n` evenly spaced levels from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

fn out_of_domain(p: &HeisenbergParams, levels: &[f64]) -> AppResult<()> {
    match levels.iter().find(|&&s| !p.in_domain(s)) {
        Some(&0.0) => Err(CoreError::ZeroLevel.into()),
        Some(&s) if s < 0.0 => Err(CoreError::Domain("levels must be positive").into()),
        Some(&s) => Err(CoreError::PoleProximity { s }.into()),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: String,
    pub residual: f64,
    pub s: Option<f64>,
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thresholds {
    pub structural: f64,
    pub laplace: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub status: &'static str,
    pub thresholds: Thresholds,
    pub residuals: Vec<ResidualJson>,
    pub failures: Vec<Failure>,
    /// Reported but never compared with a threshold.
    pub diagnostics: Vec<ResidualJson>,
}

impl VerifyReport {
    fn new(residuals: &[Residual], diagnostics: &[Residual], cfg: &RunConfig) -> Self {
        let thresholds = Thresholds { structural: cfg.threshold_structural, laplace: cfg.threshold_laplace };
        let failures: Vec<Failure> = residuals
            .iter()
            .filter_map(|r| {
                let threshold = if r.check == LAPLACE_CHECK { thresholds.laplace } else { thresholds.structural };
                // NaN never passes
                (!(r.residual < threshold)).then(|| Failure { check: r.check.to_string(), residual: r.residual, s: r.s, threshold })
            })
            .collect();
        VerifyReport {
            status: if failures.is_empty() { "pass" } else { "fail" },
            thresholds,
            residuals: residuals.iter().map(ResidualJson::from).collect(),
            failures,
            diagnostics: diagnostics.iter().map(ResidualJson::from).collect(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_THRESHOLD
        }
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> AppResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["check", "s", "residual", "threshold", "pass"])?;
                for r in &self.residuals {
                    let threshold = if r.check == LAPLACE_CHECK { self.thresholds.laplace } else { self.thresholds.structural };
                    let s = r.s.map(crate::formats::fmt_f64).unwrap_or_default();
                    w.write_record([r.check.clone(), s, crate::formats::fmt_f64(r.residual), crate::formats::fmt_f64(threshold), (r.residual < threshold).to_string()])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Integrates a flow source over `[s₀, s_end]`; on abort the partial
/// trajectory comes back together with the error.
fn run_flow(source: &Source, cfg: &RunConfig, default_end: f64) -> AppResult<(Vec<EvolutionState>, Option<CoreError>)> {
    let (model, st0) = source.as_flow()?;
    let s_end = cfg.s_end.unwrap_or(default_end);
    if let Some(start) = cfg.s_start {
        if start != st0.s {
            return Err(AppError::Usage(format!("--s-start must equal the initial level s0 = {}", st0.s)));
        }
    }
    let steps = cfg.steps;
    let ds = (s_end - st0.s) / steps as f64;
    match integrate(&model, &st0, ds, steps, cfg.method) {
        Ok(t) => Ok((t, None)),
        Err(a) => Ok((a.trajectory, Some(a.error))),
    }
}

pub fn verify(cfg: &RunConfig, out: &mut dyn Write) -> AppResult<i32> {
    cfg.check_steps()?;
    let source = cfg.source()?;
    let (residuals, diagnostics) = match &source {
        Source::Heisenberg(p) => {
            let levels = linspace(cfg.s_start.unwrap_or(p.s0), cfg.s_end.unwrap_or(1.35 * p.s0), cfg.grid);
            out_of_domain(p, &levels)?;
            let per_level: Vec<Vec<Residual>> = levels.par_iter().map(|&s| heisenberg_suite(p, s)).collect::<Result<_, _>>()?;
            (per_level.concat(), Vec::new())
        }
        Source::Flow { model, .. } => {
            let (trajectory, aborted) = run_flow(&source, cfg, 1.1 * source.s0())?;
            if let Some(e) = aborted {
                return Err(AppError::Aborted(e));
            }
            let picks = pick_nodes(trajectory.len(), cfg.grid);
            let per_node: Vec<(Vec<Residual>, Residual)> = picks
                .par_iter()
                .map(|&i| {
                    let st = &trajectory[i];
                    let mismatch = model.rhs(st)?.uv_mismatch;
                    Ok((flow_suite(model, st)?, Residual::new("g_uv_mismatch", mismatch.abs()).at(st.s)))
                })
                .collect::<Result<_, CoreError>>()?;
            let (rs, diag): (Vec<_>, Vec<_>) = per_node.into_iter().unzip();
            (rs.concat(), diag)
        }
        Source::Reduced(data) => (reduced_suite(data)?, Vec::new()),
    };
    let report = VerifyReport::new(&residuals, &diagnostics, cfg);
    report.write(cfg.format.unwrap_or(Format::Json), out)?;
    Ok(report.exit_code())
}

/// Up to `n` node indices spread evenly over `0..len`, always including
/// both ends.
fn pick_nodes(len: usize, n: usize) -> Vec<usize> {
    if len == 0 {
        return Vec::new();
    }
    if n >= len {
        return (0..len).collect();
    }
    let mut idx: Vec<usize> = linspace(0.0, (len - 1) as f64, n.max(1)).iter().map(|x| x.round() as usize).collect();
    idx.dedup();
    idx
}

pub fn evolve(cfg: &RunConfig, out: &mut dyn Write) -> AppResult<i32> {
    cfg.check_steps()?;
    let source = cfg.source()?;
    let (model, _) = source.as_flow()?;
    let (trajectory, aborted) = run_flow(&source, cfg, 1.3 * source.s0())?;
    let rows: Vec<TrajectoryRow> = trajectory
        .par_iter()
        .map(|st| {
            let nk = model.assemble(st).and_then(|six| nk_residual(&six)).unwrap_or((f64::NAN, f64::NAN));
            TrajectoryRow::new(st, nk)
        })
        .collect();
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => write_trajectory_csv(&mut *out, &rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    match aborted {
        Some(e) => Err(AppError::Aborted(e)),
        None => Ok(EXIT_OK),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub method: &'static str,
    pub steps: usize,
    pub s_start: f64,
    pub s_end: f64,
    /// Maximum relative error per channel over all nodes.
    pub channels: std::collections::BTreeMap<&'static str, f64>,
    pub max: f64,
    pub threshold_ode: f64,
    pub within_threshold: bool,
}

impl CompareReport {
    pub fn new(c: &Comparison, cfg: &RunConfig, s_start: f64, s_end: f64) -> Self {
        CompareReport {
            method: match cfg.method {
                Method::Euler => "euler",
                Method::Rk4 => "rk4",
            },
            steps: cfg.steps,
            s_start,
            s_end,
            channels: c.channels().into_iter().collect(),
            max: c.max(),
            threshold_ode: cfg.threshold_ode,
            within_threshold: c.max() < cfg.threshold_ode,
        }
    }
}

/// Informational: always exits 0 once the comparison could be computed.
pub fn compare(cfg: &RunConfig, out: &mut dyn Write) -> AppResult<i32> {
    cfg.check_steps()?;
    let Source::Heisenberg(p) = cfg.source()? else {
        return Err(AppError::Usage("compare needs --preset heisenberg".into()));
    };
    let s_start = cfg.s_start.unwrap_or(p.s0);
    let p = HeisenbergParams::new(p.c, s_start)?;
    let s_end = cfg.s_end.unwrap_or(1.3 * p.s0);
    let comparison = if s_end == s_start { Comparison::default() } else { compare_ode_vs_closed(&p, s_end, cfg.steps, cfg.method)? };
    let report = CompareReport::new(&comparison, cfg, s_start, s_end);
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let rows: Vec<TidyRow> = report.channels.iter().map(|(k, v)| TidyRow { s: s_end, quantity: k.to_string(), value: *v }).collect();
            write_tidy_csv(&mut *out, &rows)?;
        }
    }
    Ok(EXIT_OK)
}

fn heisenberg_rows(p: &HeisenbergParams, s: f64) -> AppResult<Vec<TidyRow>> {
    let pr = closed_form_profiles(p, s)?;
    let h = pr.h.val;
    let hm = h * h - s * s;
    let [shift, _] = theta_shift(p, s)?;
    let quantities = [
        ("h", h),
        ("f0", pr.f0.val),
        ("f1", pr.f1.val),
        ("f2", pr.f2.val),
        ("g_UU", h),
        ("g_UV", 0.0),
        ("g_VV", h),
        ("g_ss", 1.0 / (9.0 * hm)),
        ("theta_shift", shift),
    ];
    Ok(quantities.into_iter().map(|(q, value)| TidyRow { s, quantity: q.to_string(), value }).collect())
}

fn state_rows(st: &EvolutionState) -> Vec<TidyRow> {
    let h2 = st.h2();
    let hm = st.h_minus();
    let mut quantities = vec![
        ("h", h2.sqrt()),
        ("h2", h2),
        ("f", 4.0 * h2 / hm),
        ("g_UU", st.gram[0]),
        ("g_UV", st.gram[1]),
        ("g_VV", st.gram[2]),
        ("g_ss", 1.0 / (9.0 * hm)),
    ];
    const ALPHA: [&str; 9] = ["alpha0_0", "alpha0_1", "alpha0_2", "alpha1_0", "alpha1_1", "alpha1_2", "alpha2_0", "alpha2_1", "alpha2_2"];
    quantities.extend(ALPHA.iter().copied().zip(st.alpha.iter().flatten().copied()));
    quantities.into_iter().map(|(q, value)| TidyRow { s: st.s, quantity: q.to_string(), value }).collect()
}

pub fn export(cfg: &RunConfig, out: &mut dyn Write) -> AppResult<i32> {
    cfg.check_steps()?;
    let source = cfg.source()?;
    let (rows, aborted) = match &source {
        Source::Heisenberg(p) => {
            let levels = linspace(cfg.s_start.unwrap_or(p.s0), cfg.s_end.unwrap_or(1.35 * p.s0), cfg.grid);
            out_of_domain(p, &levels)?;
            let per_level: Vec<Vec<TidyRow>> = levels.par_iter().map(|&s| heisenberg_rows(p, s)).collect::<AppResult<_>>()?;
            (per_level.concat(), None)
        }
        Source::Flow { .. } => {
            let (trajectory, aborted) = run_flow(&source, cfg, 1.3 * source.s0())?;
            let picks = pick_nodes(trajectory.len(), cfg.grid);
            (picks.iter().flat_map(|&i| state_rows(&trajectory[i])).collect(), aborted)
        }
        Source::Reduced(_) => return Err(AppError::Usage("export needs a preset or a flow model".into())),
    };
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => write_tidy_csv(&mut *out, &rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    match aborted {
        Some(e) => Err(AppError::Aborted(e)),
        None => Ok(EXIT_OK),
    }
}
