//! Torus reduction: from a six-dimensional structure with a `T²`-action to
//! basic one-forms on the three-dimensional quotient, and back.
//!
//! The six-dimensional coframe produced here is always ordered
//! `(ds, ϑ₁, ϑ₂, e⁰, e¹, e²)` where `eⁱ` is the base coframe on which the
//! `αᵢ` are written. On assembled structures the multi-moment map is the
//! level coordinate itself, `ν ≡ s`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exterior::{ext_d, ext_d_structure, flat, Coframe, Form, JetMatrix, MetricTensor, Vector};
use crate::jet::Jet;
use crate::su3::{Residual, SU3Structure, TorusAction};

/// Relative distance of `h²` from `s²` below which a level counts as singular.
pub const SINGULAR_LEVEL_TOL: f64 = 1e-12;

/// Gram matrix of the torus generators, `G = [[g_UU, g_UV], [g_UV, g_VV]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitGram {
    pub uu: Jet,
    pub uv: Jet,
    pub vv: Jet,
}

impl OrbitGram {
    pub fn new(uu: Jet, uv: Jet, vv: Jet) -> Self {
        OrbitGram { uu, uv, vv }
    }

    pub fn from_values(uu: f64, uv: f64, vv: f64) -> Self {
        OrbitGram::new(Jet::constant(uu), Jet::constant(uv), Jet::constant(vv))
    }

    pub fn from_metric(g: &MetricTensor, action: &TorusAction) -> Self {
        OrbitGram {
            uu: g.inner(&action.u, &action.u),
            uv: g.inner(&action.u, &action.v),
            vv: g.inner(&action.v, &action.v),
        }
    }

    /// `h² = g_UU g_VV − g_UV²`.
    pub fn h2(&self) -> Jet {
        self.uu * self.vv - self.uv * self.uv
    }
}

/// Three-dimensional data at a regular level `s`.
///
/// `theta` holds the horizontal parts `T_k` of the connection forms
/// `ϑ_k = ϑ̂_k + T_k`, written against `frame3` (zero when the six-frame is
/// built directly on the `ϑ_k`).
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedData {
    pub s: f64,
    pub gram: OrbitGram,
    pub frame3: Coframe,
    pub alpha: [Form; 3],
    pub theta: [Form; 2],
    pub f: Jet,
}

impl ReducedData {
    pub fn new(s: f64, gram: OrbitGram, frame3: Coframe, alpha: [Form; 3], theta: [Form; 2]) -> Result<Self> {
        if frame3.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: frame3.dim() });
        }
        for w in alpha.iter().chain(theta.iter()) {
            if w.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: w.dim() });
            }
            if w.grade() != 1 {
                return Err(Error::GradeMismatch { expected: 1, found: w.grade() });
            }
        }
        if s == 0.0 {
            return Err(Error::ZeroLevel);
        }
        if !(gram.uu.val > 0.0) || !(gram.h2().val > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let h_minus = level_gap(&gram, s)?;
        let f = (gram.h2() * 4.0).try_div(h_minus)?;
        if !(f.val > 4.0) {
            return Err(Error::InvalidF { f: f.val });
        }
        Ok(ReducedData { s, gram, frame3, alpha, theta, f })
    }

    pub fn h2(&self) -> Jet {
        self.gram.h2()
    }

    /// `h² − s²` as a jet in `s`.
    pub fn h_minus(&self) -> Jet {
        let s = Jet::variable(self.s);
        self.gram.h2() - s * s
    }
}

/// `h² − s²` with the singular-level guard.
fn level_gap(gram: &OrbitGram, s: f64) -> Result<Jet> {
    let sj = Jet::variable(s);
    let h2 = gram.h2();
    let gap = h2 - sj * sj;
    if gap.abs_val() <= SINGULAR_LEVEL_TOL * h2.abs_val().max(s * s) {
        return Err(Error::SingularLevel { s, h2: h2.val });
    }
    Ok(gap)
}

/// Connection forms dual to the generators:
/// `ϑ₁ = h⁻²(g_VV U♭ − g_UV V♭)`, `ϑ₂ = h⁻²(g_UU V♭ − g_UV U♭)`.
pub fn dual_connection_forms(action: &TorusAction, g: &MetricTensor) -> Result<[Form; 2]> {
    let gram = OrbitGram::from_metric(g, action);
    let h2 = gram.h2();
    let scale = gram.uu.abs_val().max(gram.vv.abs_val()).max(f64::MIN_POSITIVE);
    if h2.abs_val() <= 1e-14 * scale * scale {
        return Err(Error::DegenerateAction);
    }
    let u_flat = flat(&action.u, g)?;
    let v_flat = flat(&action.v, g)?;
    let inv = h2.recip()?;
    let theta1 = (&u_flat.scale(gram.vv) - &v_flat.scale(gram.uv)).scale(inv);
    let theta2 = (&v_flat.scale(gram.uu) - &u_flat.scale(gram.uv)).scale(inv);
    Ok([theta1, theta2])
}

/// Basic one-forms `α₀ = V⨼U⨼ψ₋`, `α₁ = sϑ₁ + V⨼σ`, `α₂ = sϑ₂ − U⨼σ`.
pub fn reduced_one_forms(st: &SU3Structure, action: &TorusAction, s: f64) -> Result<[Form; 3]> {
    let [theta1, theta2] = dual_connection_forms(action, &st.g)?;
    let sj = Jet::constant(s);
    let alpha0 = st.psi_minus.contract(&action.u)?.contract(&action.v)?;
    let alpha1 = &theta1.scale(sj) + &st.sigma.contract(&action.v)?;
    let alpha2 = &theta2.scale(sj) - &st.sigma.contract(&action.u)?;
    Ok([alpha0, alpha1, alpha2])
}

/// The six-frame `(ds, ϑ₁, ϑ₂, e⁰, e¹, e²)` over `frame3` with
/// `dϑ_k = Θ_k + ds ∧ ρ_k`, where `Θ_k = curvature[k]` and `ρ_k` (if given)
/// is the `s`-derivative of a moving `ϑ_k`; both are forms on `frame3`.
pub fn six_frame(frame3: &Coframe, curvature: &[Form; 2], theta_rate: Option<&[Form; 2]>) -> Result<Coframe> {
    if frame3.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: frame3.dim() });
    }
    let ds = Form::basis(6, 0);
    let mut structure = Vec::with_capacity(6);
    structure.push(Form::zero(6, 2));
    for k in 0..2 {
        let mut d = curvature[k].lift(6, 3)?;
        if let Some(rate) = theta_rate {
            d = &d + &ds.wedge(&rate[k].lift(6, 3)?)?;
        }
        structure.push(d);
    }
    for i in 0..3 {
        structure.push(frame3.d_basis(i).lift(6, 3)?);
    }
    let mut labels: Vec<String> = ["ds", "theta1", "theta2"].iter().map(|l| String::from(*l)).collect();
    labels.extend(frame3.labels().iter().cloned());
    Coframe::new(labels, structure, Some(0))
}

/// Generators of the fibre directions of an assembled structure: the
/// vectors dual to `ϑ₁`, `ϑ₂` in the six-frame.
pub fn fiber_action() -> TorusAction {
    TorusAction::new(Vector::basis(6, 1), Vector::basis(6, 2))
}

/// The lifted building blocks of an assembled structure.
struct Lifted {
    s: Jet,
    ds: Form,
    theta: [Form; 2],
    alpha: [Form; 3],
    h_minus: Jet,
}

fn lift(data: &ReducedData, frame6: &Coframe) -> Result<Lifted> {
    if frame6.dim() != 6 || frame6.s_index() != Some(0) {
        return Err(Error::Domain("six-frame must be ordered (ds, theta1, theta2, e0, e1, e2)"));
    }
    let h_minus = level_gap(&data.gram, data.s)?;
    let theta = [
        &Form::basis(6, 1) + &data.theta[0].lift(6, 3)?,
        &Form::basis(6, 2) + &data.theta[1].lift(6, 3)?,
    ];
    let alpha = [data.alpha[0].lift(6, 3)?, data.alpha[1].lift(6, 3)?, data.alpha[2].lift(6, 3)?];
    Ok(Lifted { s: Jet::variable(data.s), ds: Form::basis(6, 0), theta, alpha, h_minus })
}

/// `m += c · (a ⊗ b)`.
fn add_tensor(m: &mut JetMatrix, a: &Form, b: &Form, c: Jet) {
    for (ia, x) in a.terms() {
        let i = ia.indices().next().expect("one-form");
        for (jb, y) in b.terms() {
            let j = jb.indices().next().expect("one-form");
            m[(i, j)] += c * x * y;
        }
    }
}

fn add_sym(m: &mut JetMatrix, a: &Form, b: &Form, c: Jet) {
    add_tensor(m, a, b, c);
    add_tensor(m, b, a, c);
}

/// Builds `(g, σ, ψ₊, ψ₋)` on `frame6` from reduced data, with `ν = s`.
pub fn assemble_six(data: &ReducedData, frame6: &Coframe) -> Result<SU3Structure> {
    let Lifted { s, ds, theta: [t1, t2], alpha: [a0, a1, a2], h_minus } = lift(data, frame6)?;
    let OrbitGram { uu, uv, vv } = data.gram;
    let inv_h = h_minus.recip()?;
    let third_inv_h = inv_h.scale(1.0 / 3.0);

    let mut gram = JetMatrix::zeros(6);
    add_tensor(&mut gram, &ds, &ds, inv_h.scale(1.0 / 9.0));
    add_tensor(&mut gram, &t1, &t1, uu);
    add_tensor(&mut gram, &t2, &t2, vv);
    add_sym(&mut gram, &t1, &t2, uv);
    add_tensor(&mut gram, &a0, &a0, inv_h);
    add_tensor(&mut gram, &a1, &a1, uu * inv_h);
    add_tensor(&mut gram, &a2, &a2, vv * inv_h);
    add_sym(&mut gram, &a1, &a2, uv * inv_h);
    let g = MetricTensor::new(gram)?;

    let w = |a: &Form, b: &Form| a.wedge(b);
    let t12 = w(&t1, &t2)?;
    let t1a2 = w(&t1, &a2)?;
    let t2a1 = w(&t2, &a1)?;
    let a12 = w(&a1, &a2)?;

    let sigma = &(&(&w(&ds, &a0)?.scale(third_inv_h) + &t12.scale(s)) - &t1a2) + &(&t2a1 - &a12.scale(s * inv_h));

    // H ϑ₁∧ϑ₂ + s(ϑ₁∧α₂ − ϑ₂∧α₁) − α₁∧α₂
    let block = &(&t12.scale(h_minus) + &(&t1a2 - &t2a1).scale(s)) - &a12;
    // ϑ₁∧(g_UU α₁ + g_UV α₂) + ϑ₂∧(g_UV α₁ + g_VV α₂)
    let mixed = &w(&t1, &(&a1.scale(uu) + &a2.scale(uv)))? + &w(&t2, &(&a1.scale(uv) + &a2.scale(vv)))?;

    let psi_plus = &w(&ds, &block)?.scale(third_inv_h) - &w(&mixed, &a0)?.scale(inv_h);
    let psi_minus = &w(&ds, &mixed)?.scale(third_inv_h) + &w(&block, &a0)?.scale(inv_h);

    SU3Structure::new(frame6.clone(), g, sigma, psi_plus, psi_minus)
}

/// Residuals of `s dϑ₁ = dα₁ − (3/(h²−s²))(g_UV α₁ + g_VV α₂) ∧ α₀` and
/// `s dϑ₂ = dα₂ + (3/(h²−s²))(g_UU α₁ + g_UV α₂) ∧ α₀` on the level set;
/// `dtheta` are the two-forms `d₅ϑ_k` written on the base frame.
pub fn check_level_set_relations(data: &ReducedData, dtheta: &[Form; 2]) -> Result<[Residual; 2]> {
    if data.s == 0.0 {
        return Err(Error::ZeroLevel);
    }
    let [a0, a1, a2] = &data.alpha;
    let OrbitGram { uu, uv, vv } = data.gram;
    let k = Jet::constant(3.0 / data.h_minus().val);
    let s = Jet::constant(data.s);
    let da1 = ext_d_structure(a1, &data.frame3)?;
    let da2 = ext_d_structure(a2, &data.frame3)?;
    let rhs1 = &da1 - &(&a1.scale(uv) + &a2.scale(vv)).wedge(a0)?.scale(k);
    let rhs2 = &da2 + &(&a1.scale(uu) + &a2.scale(uv)).wedge(a0)?.scale(k);
    Ok([
        Residual::new("level_set_theta1", dtheta[0].scale(s).max_abs_diff(&rhs1)).at(data.s),
        Residual::new("level_set_theta2", dtheta[1].scale(s).max_abs_diff(&rhs2)).at(data.s),
    ])
}

/// Residuals of `dα₀ = f α₁∧α₂` and `dα_i ∧ α₀ = −(df/f) ∧ α_i ∧ α₀`
/// (`i = 1, 2`); `df` is the spatial differential of `f` on the quotient.
pub fn check_q3_relations(f: Jet, alpha: &[Form; 3], frame3: &Coframe, df: &Form) -> Result<[Residual; 3]> {
    if !(f.val > 4.0) {
        return Err(Error::InvalidF { f: f.val });
    }
    let [a0, a1, a2] = alpha;
    let fc = Jet::constant(f.val);
    let log_df = df.values_only().scale(fc.recip()?);
    let r0 = ext_d_structure(a0, frame3)?.max_abs_diff(&a1.wedge(a2)?.scale(fc));
    let mut rest = [0.0; 2];
    for (slot, ai) in rest.iter_mut().zip([a1, a2]) {
        let lhs = ext_d_structure(ai, frame3)?.wedge(a0)?;
        let rhs = -log_df.wedge(ai)?.wedge(a0)?;
        *slot = lhs.max_abs_diff(&rhs);
    }
    Ok([
        Residual::new("q3_d_alpha0", r0),
        Residual::new("q3_d_alpha1", rest[0]),
        Residual::new("q3_d_alpha2", rest[1]),
    ])
}

/// `β₀ = α₀`, `β_i = f α_i`.
pub fn to_beta_frame(f: Jet, alpha: &[Form; 3]) -> Result<[Form; 3]> {
    if f.val == 0.0 {
        return Err(Error::Domain("beta frame needs f ≠ 0"));
    }
    Ok([alpha[0].clone(), alpha[1].scale(f), alpha[2].scale(f)])
}

pub fn from_beta_frame(f: Jet, beta: &[Form; 3]) -> Result<[Form; 3]> {
    let inv = f.recip()?;
    Ok([beta[0].clone(), beta[1].scale(inv), beta[2].scale(inv)])
}

/// Residuals of `dβ₀ = (1/f) β₁∧β₂` and `dβ_i ∧ β₀ = 0`, with
/// `dβ_i = df ∧ α_i + f dα_i`.
pub fn check_beta_relations(f: Jet, beta: &[Form; 3], frame3: &Coframe, df: &Form) -> Result<[Residual; 3]> {
    let fc = Jet::constant(f.val);
    let inv = fc.recip()?;
    let r0 = ext_d_structure(&beta[0], frame3)?.max_abs_diff(&beta[1].wedge(&beta[2])?.scale(inv));
    let mut rest = [0.0; 2];
    for (slot, b) in rest.iter_mut().zip([&beta[1], &beta[2]]) {
        let alpha_i = b.scale(inv);
        let db = &df.values_only().wedge(&alpha_i)? + &ext_d_structure(&alpha_i, frame3)?.scale(fc);
        *slot = db.wedge(&beta[0])?.max_abs();
    }
    Ok([
        Residual::new("beta_d_beta0", r0),
        Residual::new("beta_d_beta1", rest[0]),
        Residual::new("beta_d_beta2", rest[1]),
    ])
}

/// Residuals of the full structure equations on the six-manifold: the
/// `dϑ_k` relations, the `dα₀` relation and the three wedge identities
/// obtained from `dσ = 3ψ₊`, `dψ₋ = −2σ∧σ` before restricting to a level.
///
/// Spatial derivatives of `h²` and `g_··` are taken to vanish (invariant
/// data); their `s`-dependence comes from the jets.
pub fn check_full_structure_equations(data: &ReducedData, frame6: &Coframe) -> Result<Vec<Residual>> {
    let Lifted { s: nu, ds: dnu, theta: [t1, t2], alpha: [a0, a1, a2], h_minus } = lift(data, frame6)?;
    let OrbitGram { uu, uv, vv } = data.gram;
    let h2 = data.gram.h2();
    let d = |w: &Form| ext_d(w, frame6);
    let w = |a: &Form, b: &Form| a.wedge(b);
    let inv_h = h_minus.recip()?;
    let inv_h_sq = inv_h * inv_h;
    let dh2 = d(&Form::scalar(6, h2))?;

    let dt1 = d(&t1)?;
    let dt2 = d(&t2)?;
    let da0 = d(&a0)?;
    let da1 = d(&a1)?;
    let da2 = d(&a2)?;

    // ν dϑ₂ = dα₂ + (3g_UU α₁∧α₀ + 3g_UV α₂∧α₀ + ν dν∧α₂)/H
    let rhs = &da2
        + &(&(&w(&a1, &a0)?.scale(uu * 3.0) + &w(&a2, &a0)?.scale(uv * 3.0)) + &w(&dnu, &a2)?.scale(nu)).scale(inv_h);
    let theta2_eq = dt2.scale(nu).max_abs_diff(&rhs);

    // ν dϑ₁ = dα₁ − (3g_UV α₁∧α₀ + 3g_VV α₂∧α₀ − ν dν∧α₁)/H
    let rhs = &da1
        - &(&(&w(&a1, &a0)?.scale(uv * 3.0) + &w(&a2, &a0)?.scale(vv * 3.0)) - &w(&dnu, &a1)?.scale(nu)).scale(inv_h);
    let theta1_eq = dt1.scale(nu).max_abs_diff(&rhs);

    // dα₀ = −(4ν/(3H)) dν∧α₀ + (4h²/H) α₁∧α₂
    let rhs = &w(&dnu, &a0)?.scale(nu * inv_h * (-4.0 / 3.0)) + &w(&a1, &a2)?.scale(h2 * inv_h * 4.0);
    let alpha0_eq = da0.max_abs_diff(&rhs);

    // dϑ₁∧α₂ − dϑ₂∧α₁ = ((2ν²/H²)dν − (ν/H²)dh²)∧α₂∧α₁
    //   + dν∧((1/(3H²))dh²∧α₀ − (1/(3H))dα₀) + (ν/H) d(α₂∧α₁)
    let lhs = &w(&dt1, &a2)? - &w(&dt2, &a1)?;
    let a21 = w(&a2, &a1)?;
    let one = &dnu.scale(nu * nu * inv_h_sq * 2.0) - &dh2.scale(nu * inv_h_sq);
    let two = &w(&dh2, &a0)?.scale(inv_h_sq.scale(1.0 / 3.0)) - &da0.scale(inv_h.scale(1.0 / 3.0));
    let rhs = &(&w(&one, &a21)? + &w(&dnu, &two)?) + &d(&a21)?.scale(nu * inv_h);
    let forme1 = lhs.max_abs_diff(&rhs);

    // dϑ₂∧α₀ = −(1/(3H²))(dν∧(g_UU α₁ + g_UV α₂) + 3ν α₀∧α₂)∧dh²
    //   − (1/(3H))(dν∧d(g_UU α₁ + g_UV α₂) + 3ν dα₂∧α₀) − ((h²−3ν²)/(3H²)) dν∧α₀∧α₂
    let comb = &a1.scale(uu) + &a2.scale(uv);
    let lhs = w(&dt2, &a0)?;
    let p1 = w(&(&w(&dnu, &comb)? + &w(&a0, &a2)?.scale(nu * 3.0)), &dh2)?.scale(inv_h_sq.scale(-1.0 / 3.0));
    let p2 = (&w(&dnu, &d(&comb)?)? + &w(&da2, &a0)?.scale(nu * 3.0)).scale(inv_h.scale(-1.0 / 3.0));
    let p3 = w(&w(&dnu, &a0)?, &a2)?.scale((h2 - nu * nu * 3.0) * inv_h_sq.scale(-1.0 / 3.0));
    let forme2 = lhs.max_abs_diff(&(&(&p1 + &p2) + &p3));

    // dϑ₁∧α₀ = (1/(3H²))(dν∧(g_UV α₁ + g_VV α₂) − 3ν α₀∧α₁)∧dh²
    //   + (1/(3H))(dν∧d(g_UV α₁ + g_VV α₂) − 3ν dα₁∧α₀) − ((h²−3ν²)/(3H²)) dν∧α₀∧α₁
    let comb = &a1.scale(uv) + &a2.scale(vv);
    let lhs = w(&dt1, &a0)?;
    let p1 = w(&(&w(&dnu, &comb)? - &w(&a0, &a1)?.scale(nu * 3.0)), &dh2)?.scale(inv_h_sq.scale(1.0 / 3.0));
    let p2 = (&w(&dnu, &d(&comb)?)? - &w(&da1, &a0)?.scale(nu * 3.0)).scale(inv_h.scale(1.0 / 3.0));
    let p3 = w(&w(&dnu, &a0)?, &a1)?.scale((h2 - nu * nu * 3.0) * inv_h_sq.scale(-1.0 / 3.0));
    let forme3 = lhs.max_abs_diff(&(&(&p1 + &p2) + &p3));

    let s = data.s;
    Ok(alloc::vec![
        Residual::new("structure_theta2", theta2_eq).at(s),
        Residual::new("structure_theta1", theta1_eq).at(s),
        Residual::new("structure_alpha0", alpha0_eq).at(s),
        Residual::new("structure_wedge_theta", forme1).at(s),
        Residual::new("structure_wedge_theta2_alpha0", forme2).at(s),
        Residual::new("structure_wedge_theta1_alpha0", forme3).at(s),
    ])
}

/// Human-readable description of a residual list, one check per line.
pub fn describe(residuals: &[Residual]) -> String {
    residuals.iter().map(|r| format!("{}: {:.3e}\n", r.check, r.residual)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su3::standard_su3;

    #[test]
    fn orthonormal_generators_give_flat_duals() {
        let frame = Coframe::abelian(&["a", "b", "c", "d", "e", "f"], None).unwrap();
        let st = standard_su3(&frame).unwrap();
        let action = TorusAction::new(Vector::basis(6, 0), Vector::basis(6, 2));
        let [t1, t2] = dual_connection_forms(&action, &st.g).unwrap();
        assert_eq!(t1, Form::basis(6, 0));
        assert_eq!(t2, Form::basis(6, 2));
    }

    #[test]
    fn dependent_generators_are_degenerate() {
        let g = MetricTensor::identity(6);
        let u = Vector::basis(6, 0);
        let action = TorusAction::new(u.clone(), u.scale(Jet::constant(2.0)));
        assert_eq!(dual_connection_forms(&action, &g), Err(Error::DegenerateAction));
    }

    #[test]
    fn alpha0_vanishes_for_dependent_generators() {
        let frame = Coframe::abelian(&["a", "b", "c", "d", "e", "f"], None).unwrap();
        let st = standard_su3(&frame).unwrap();
        let u = Vector::from_values(&[1.0, 0.5, 0.0, 0.2, 0.0, 0.0]);
        let alpha0 = st.psi_minus.contract(&u).unwrap().contract(&u.scale(Jet::constant(3.0))).unwrap();
        assert_eq!(alpha0.max_abs(), 0.0);
    }

    #[test]
    fn reduced_data_guards() {
        let frame3 = Coframe::abelian(&["a", "b", "c"], None).unwrap();
        let alpha = [Form::basis(3, 0), Form::basis(3, 1), Form::basis(3, 2)];
        let theta = [Form::zero(3, 1), Form::zero(3, 1)];
        let gram = OrbitGram::from_values(2.0, 0.0, 2.0);
        assert!(matches!(
            ReducedData::new(2.0, gram, frame3.clone(), alpha.clone(), theta.clone()),
            Err(Error::SingularLevel { .. })
        ));
        assert_eq!(ReducedData::new(0.0, gram, frame3.clone(), alpha.clone(), theta.clone()), Err(Error::ZeroLevel));
        assert!(matches!(
            ReducedData::new(3.0, gram, frame3.clone(), alpha.clone(), theta.clone()),
            Err(Error::InvalidF { .. })
        ));
        let ok = ReducedData::new(1.0, gram, frame3, alpha, theta).unwrap();
        assert!((ok.f.val - 16.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_gram_drops_alpha1_term_of_level_set_relation() {
        // with g_UV = 0 the first relation is s dϑ₁ = dα₁ − 3g_VV/(h²−s²) α₂∧α₀
        let frame3 = Coframe::from_constants(&["a", "b", "c"], &[(1, 0, 2, 1.0)], None).unwrap();
        let alpha = [Form::basis(3, 0), Form::basis(3, 1), Form::basis(3, 2)];
        let theta = [Form::zero(3, 1), Form::zero(3, 1)];
        let data = ReducedData::new(1.0, OrbitGram::from_values(2.0, 0.0, 2.0), frame3.clone(), alpha.clone(), theta).unwrap();
        let k = 3.0 / 3.0;
        let da1 = ext_d_structure(&alpha[1], &frame3).unwrap();
        let dt1 = &da1 - &alpha[2].wedge(&alpha[0]).unwrap().scale_f64(2.0 * k);
        let dt2 = alpha[1].wedge(&alpha[0]).unwrap().scale_f64(2.0 * k);
        let [r1, r2] = check_level_set_relations(&data, &[dt1, dt2]).unwrap();
        assert!(r1.residual < 1e-15 && r2.residual < 1e-15);
    }

    #[test]
    fn abelian_quotient_rejects_contact_relation() {
        let frame3 = Coframe::abelian(&["a", "b", "c"], None).unwrap();
        let alpha = [Form::basis(3, 0), Form::basis(3, 1).scale_f64(2.0), Form::basis(3, 2)];
        let f = Jet::constant(5.0);
        let [r0, r1, r2] = check_q3_relations(f, &alpha, &frame3, &Form::zero(3, 1)).unwrap();
        assert_eq!(r0.residual, 10.0);
        assert_eq!(r1.residual, 0.0);
        assert_eq!(r2.residual, 0.0);
        assert!(check_q3_relations(Jet::constant(4.0), &alpha, &frame3, &Form::zero(3, 1)).is_err());
    }

    #[test]
    fn beta_frame_identity_for_unit_f() {
        let alpha = [Form::basis(3, 0), Form::basis(3, 1), Form::one_form_f64(&[0.5, 0.0, 2.0])];
        let beta = to_beta_frame(Jet::ONE, &alpha).unwrap();
        assert_eq!(beta, alpha);
        assert!(to_beta_frame(Jet::ZERO, &alpha).is_err());
    }
}
