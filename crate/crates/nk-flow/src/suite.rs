//! Residual suites evaluated by `verify` at a single level.

use nk_flow_core::evolution::{check_closure, curvature_forms, EvolutionState, FlowModel, SpatialGradients, SpatialOracle};
use nk_flow_core::exterior::{ext_d_structure, FrameChange};
use nk_flow_core::heisenberg::{heisenberg_frame6, heisenberg_reduced_data, heisenberg_structure, HeisenbergParams};
use nk_flow_core::reduction::{assemble_six, check_full_structure_equations, check_level_set_relations, check_q3_relations, fiber_action, six_frame, ReducedData};
use nk_flow_core::su3::{check_moment_gradient, laplacian_of_s, multi_moment, nk_residual, su3_compatibility, SU3Structure};
use nk_flow_core::{Form, Residual, Result};

/// Name of the only check measured relative to its target.
pub const LAPLACE_CHECK: &str = "laplace_rel";

/// A fixed invertible change of coframe that keeps `ds` and mixes all other
/// directions, so that the Gram matrix of a diagonal structure becomes full.
pub fn mixing_change() -> FrameChange {
    #[rustfmt::skip]
    let p = [
        1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.3, 0.0, -0.2, 0.1,
        0.0, 0.4, 1.1, 0.2, 0.0, 0.0,
        0.0, 0.0, 0.1, 0.9, 0.3, -0.1,
        0.0, 0.2, 0.0, -0.3, 1.2, 0.25,
        0.0, -0.1, 0.15, 0.0, 0.2, 0.8,
    ];
    FrameChange::new(6, &p).expect("mixing matrix is invertible")
}

/// Largest off-diagonal entry of the Gram matrix.
pub fn off_diagonal(st: &SU3Structure) -> f64 {
    let g = st.g.gram();
    let n = g.n();
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).map(|(a, b)| g[(a, b)].val.abs()).fold(0.0, f64::max)
}

/// `|Δs − 24s| / |24s|`.
pub fn laplace_relative(st: &SU3Structure, s: f64) -> Result<f64> {
    let lap = laplacian_of_s(st, s)?.val;
    Ok((lap - 24.0 * s).abs() / (24.0 * s).abs())
}

/// Checks that only need the six-dimensional structure.
fn structure_checks(st: &SU3Structure, s: f64, out: &mut Vec<Residual>) -> Result<()> {
    out.extend(su3_compatibility(st)?);
    let (r1, r2) = nk_residual(st)?;
    out.push(Residual::new("nk_d_sigma", r1));
    out.push(Residual::new("nk_d_psi_minus", r2));
    out.push(Residual::new("moment_gradient", check_moment_gradient(st, &fiber_action())?));
    out.push(Residual::new("multi_moment", (multi_moment(st, &fiber_action())?.val - s).abs()));
    Ok(())
}

fn level_checks(data: &ReducedData, frame6: &nk_flow_core::Coframe, df: &Form, out: &mut Vec<Residual>) -> Result<()> {
    out.extend(check_q3_relations(data.f, &data.alpha, &data.frame3, df)?);
    // d(ϑ̂_k + T_k) along the level set
    let restricted = |k: usize| -> Result<Form> {
        let dhat = frame6.d_basis(k + 1).restrict(3, 3)?;
        Ok(&dhat + &ext_d_structure(&data.theta[k].values_only(), &data.frame3)?)
    };
    let dtheta = [restricted(0)?, restricted(1)?];
    out.extend(check_level_set_relations(data, &dtheta)?);
    out.extend(check_full_structure_equations(data, frame6)?);
    Ok(())
}

fn stamp(mut rs: Vec<Residual>, s: f64) -> Vec<Residual> {
    for r in &mut rs {
        r.s = Some(s);
    }
    rs
}

fn structure_diff(a: &SU3Structure, b: &SU3Structure) -> f64 {
    let gram = a.g.gram().values().iter().zip(b.g.gram().values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    gram.max(a.sigma.max_abs_diff(&b.sigma)).max(a.psi_plus.max_abs_diff(&b.psi_plus)).max(a.psi_minus.max_abs_diff(&b.psi_minus))
}

/// Full suite on the Heisenberg family at level `s`.
pub fn heisenberg_suite(p: &HeisenbergParams, s: f64) -> Result<Vec<Residual>> {
    let st = heisenberg_structure(p, s)?;
    let data = heisenberg_reduced_data(p, s)?;
    let frame6 = heisenberg_frame6(p, s)?;
    let mut out = Vec::new();
    structure_checks(&st, s, &mut out)?;
    let mixed = st.change_frame(&mixing_change())?;
    out.push(Residual::new(LAPLACE_CHECK, laplace_relative(&mixed, s)?));
    level_checks(&data, &frame6, &Form::zero(3, 1), &mut out)?;
    let invariant = EvolutionState::new(s, [data.gram.uu.val, data.gram.uv.val, data.gram.vv.val], alpha_values(&data.alpha), [[0.0; 3]; 2])?;
    let (c1, c2) = check_closure(&invariant, &SpatialGradients::default())?;
    out.push(Residual::new("closure_theta1", c1));
    out.push(Residual::new("closure_theta2", c2));
    out.push(Residual::new("assembly_agreement", structure_diff(&st, &assemble_six(&data, &frame6)?)));
    Ok(stamp(out, s))
}

fn alpha_values(alpha: &[Form; 3]) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| {
        let v = alpha[i].one_form_values();
        [v[0], v[1], v[2]]
    })
}

/// Suite at one node of an integrated flow.
pub fn flow_suite<O: SpatialOracle>(model: &FlowModel<O>, st: &EvolutionState) -> Result<Vec<Residual>> {
    let data = model.reduced_data(st)?;
    let frame6 = model.frame6()?;
    let six = assemble_six(&data, &frame6)?;
    let mut out = Vec::new();
    structure_checks(&six, st.s, &mut out)?;
    out.push(Residual::new(LAPLACE_CHECK, laplace_relative(&six, st.s)?));
    let x = model.oracle.gradients(st);
    // f = 4h²/(h² − s²), so X(f) = −4s² X(h²)/(h² − s²)².
    let hm = st.h_minus();
    let k = -4.0 * st.s * st.s / (hm * hm);
    let forms = st.alpha_forms();
    let mut df = Form::zero(3, 1);
    for (i, a) in forms.iter().enumerate() {
        df = &df + &a.scale_f64(k * x.h2[i]);
    }
    level_checks(&data, &frame6, &df, &mut out)?;
    let (c1, c2) = check_closure(st, &x)?;
    out.push(Residual::new("closure_theta1", c1));
    out.push(Residual::new("closure_theta2", c2));
    Ok(stamp(out, st.s))
}

/// Six-frame for a standalone level: `dϑ̂_k = Θ_k(s) − d T_k`, so that
/// `d(ϑ̂_k + T_k)` restricts to the curvature computed from the data.
pub fn reduced_frame6(data: &ReducedData) -> Result<nk_flow_core::Coframe> {
    let gram = [data.gram.uu.val, data.gram.uv.val, data.gram.vv.val];
    let theta = [0, 1].map(|k| {
        let v = data.theta[k].one_form_values();
        [v[0], v[1], v[2]]
    });
    let st = EvolutionState::new(data.s, gram, alpha_values(&data.alpha), theta)?;
    let curvature = curvature_forms(&data.frame3, &st)?;
    let mut dhat = [Form::zero(3, 2), Form::zero(3, 2)];
    for k in 0..2 {
        let dt = ext_d_structure(&data.theta[k].values_only(), &data.frame3)?;
        dhat[k] = &curvature[k] - &dt;
    }
    six_frame(&data.frame3, &dhat, None)
}

/// Suite on a standalone level of reduced data.
pub fn reduced_suite(data: &ReducedData) -> Result<Vec<Residual>> {
    let frame6 = reduced_frame6(data)?;
    let six = assemble_six(data, &frame6)?;
    let mut out = Vec::new();
    structure_checks(&six, data.s, &mut out)?;
    out.push(Residual::new(LAPLACE_CHECK, laplace_relative(&six, data.s)?));
    level_checks(data, &frame6, &Form::zero(3, 1), &mut out)?;
    Ok(stamp(out, data.s))
}
