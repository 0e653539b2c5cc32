//! SU(3)-structures on six-dimensional coframes.
//!
//! A structure is the quadruple `(g, σ, ψ₊, ψ₋)`; the almost complex
//! structure is reconstructed from `σ = g(J·, ·)` whenever it is needed.
//! The nearly Kähler condition is `dσ = 3ψ₊`, `dψ₋ = −2σ ∧ σ`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exterior::{ext_d, hodge, Coframe, Form, FrameChange, JetMatrix, MetricTensor, Vector};
use crate::jet::Jet;

/// One named scalar diagnostic: max-abs coefficient deviation of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub check: &'static str,
    pub residual: f64,
    pub s: Option<f64>,
}

impl Residual {
    pub fn new(check: &'static str, residual: f64) -> Self {
        Residual { check, residual, s: None }
    }

    pub fn at(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SU3Structure {
    pub frame: Coframe,
    pub g: MetricTensor,
    pub sigma: Form,
    pub psi_plus: Form,
    pub psi_minus: Form,
}

/// Generating vector fields `U`, `V` of a two-torus action.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusAction {
    pub u: Vector,
    pub v: Vector,
}

impl TorusAction {
    pub fn new(u: Vector, v: Vector) -> Self {
        TorusAction { u, v }
    }

    pub fn swapped(&self) -> Self {
        TorusAction { u: self.v.clone(), v: self.u.clone() }
    }
}

impl SU3Structure {
    pub fn new(frame: Coframe, g: MetricTensor, sigma: Form, psi_plus: Form, psi_minus: Form) -> Result<Self> {
        if frame.dim() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, found: frame.dim() });
        }
        for (form, grade) in [(&sigma, 2), (&psi_plus, 3), (&psi_minus, 3)] {
            if form.dim() != 6 {
                return Err(Error::DimensionMismatch { expected: 6, found: form.dim() });
            }
            if form.grade() != grade {
                return Err(Error::GradeMismatch { expected: grade, found: form.grade() });
            }
        }
        if g.dim() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, found: g.dim() });
        }
        Ok(SU3Structure { frame, g, sigma, psi_plus, psi_minus })
    }

    /// `vol = σ³ / 6`, which fixes the orientation.
    pub fn volume(&self) -> Result<Form> {
        let s2 = self.sigma.wedge(&self.sigma)?;
        Ok(s2.wedge(&self.sigma)?.scale_f64(1.0 / 6.0))
    }

    pub fn complex_structure(&self) -> Result<JetMatrix> {
        complex_structure(&self.g, &self.sigma)
    }

    /// The same structure written against the frame `êᵃ = Σ P_ab eᵇ`.
    pub fn change_frame(&self, change: &FrameChange) -> Result<SU3Structure> {
        SU3Structure::new(
            change.frame(&self.frame)?,
            change.metric(&self.g)?,
            change.form(&self.sigma)?,
            change.form(&self.psi_plus)?,
            change.form(&self.psi_minus)?,
        )
    }
}

/// The model structure on a coframe ordered `(f₁, Jf₁, f₂, Jf₂, f₃, Jf₃)`
/// with the identity Gram matrix.
pub fn standard_su3(frame: &Coframe) -> Result<SU3Structure> {
    if frame.dim() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, found: frame.dim() });
    }
    let mut sigma = Form::zero(6, 2);
    for (i, j) in [(0, 1), (2, 3), (4, 5)] {
        sigma.add_unsorted(&[i, j], Jet::ONE)?;
    }
    let mut psi_plus = Form::zero(6, 3);
    for (idx, c) in [([0, 2, 4], 1.0), ([1, 3, 4], -1.0), ([0, 3, 5], -1.0), ([1, 2, 5], -1.0)] {
        psi_plus.add_unsorted(&idx, Jet::constant(c))?;
    }
    let mut psi_minus = Form::zero(6, 3);
    for (idx, c) in [([0, 2, 5], 1.0), ([1, 3, 5], -1.0), ([0, 3, 4], 1.0), ([1, 2, 4], 1.0)] {
        psi_minus.add_unsorted(&idx, Jet::constant(c))?;
    }
    SU3Structure::new(frame.clone(), MetricTensor::identity(6), sigma, psi_plus, psi_minus)
}

/// The endomorphism `J` with `σ(X, Y) = g(JX, Y)`; column `a` holds `J(E_a)`.
pub fn complex_structure(g: &MetricTensor, sigma: &Form) -> Result<JetMatrix> {
    let n = g.dim();
    if sigma.grade() != 2 || sigma.dim() != n {
        return Err(Error::GradeMismatch { expected: 2, found: sigma.grade() });
    }
    // σ_ab = Σ_c J_ca g_cb, so J = g⁻¹ σᵀ = −g⁻¹ σ
    let mut j = JetMatrix::zeros(n);
    for r in 0..n {
        for a in 0..n {
            let mut acc = Jet::ZERO;
            for c in 0..n {
                acc -= g.inverse()[(r, c)] * sigma.coeff(&[c, a]);
            }
            j[(r, a)] = acc;
        }
    }
    Ok(j)
}

/// Residuals of the five pointwise SU(3) identities:
/// `σ∧ψ₊ = 0`, `σ∧ψ₋ = 0`, `ψ₊∧ψ₋ = ⅔σ³`, `J² = −1`, `ψ₊(J·,·,·) = −ψ₋`.
pub fn su3_compatibility(st: &SU3Structure) -> Result<Vec<Residual>> {
    let sigma_psi_plus = st.sigma.wedge(&st.psi_plus)?.max_abs();
    let sigma_psi_minus = st.sigma.wedge(&st.psi_minus)?.max_abs();

    let sigma3 = st.sigma.wedge(&st.sigma)?.wedge(&st.sigma)?;
    let normalization = st.psi_plus.wedge(&st.psi_minus)?.max_abs_diff(&sigma3.scale_f64(2.0 / 3.0));

    let j = st.complex_structure()?;
    let j2 = &j * &j;
    let mut j_squared: f64 = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            let id = if a == b { 1.0 } else { 0.0 };
            j_squared = j_squared.max(libm::fabs(j2[(a, b)].val + id));
        }
    }

    let mut psi_type: f64 = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                let mut lhs = Jet::ZERO;
                for d in 0..6 {
                    lhs += j[(d, a)] * st.psi_plus.coeff(&[d, b, c]);
                }
                psi_type = psi_type.max((lhs + st.psi_minus.coeff(&[a, b, c])).abs_val());
            }
        }
    }

    Ok(alloc::vec![
        Residual::new("sigma_wedge_psi_plus", sigma_psi_plus),
        Residual::new("sigma_wedge_psi_minus", sigma_psi_minus),
        Residual::new("psi_normalization", normalization),
        Residual::new("j_squared", j_squared),
        Residual::new("psi_type", psi_type),
    ])
}

/// `(max|dσ − 3ψ₊|, max|dψ₋ + 2σ∧σ|)`.
pub fn nk_residual(st: &SU3Structure) -> Result<(f64, f64)> {
    let d_sigma = ext_d(&st.sigma, &st.frame)?;
    let r1 = (&d_sigma - &st.psi_plus.scale_f64(3.0)).max_abs();
    let d_psi_minus = ext_d(&st.psi_minus, &st.frame)?;
    let r2 = (&d_psi_minus + &st.sigma.wedge(&st.sigma)?.scale_f64(2.0)).max_abs();
    Ok((r1, r2))
}

/// Multi-moment map `ν = σ(U, V)`.
pub fn multi_moment(st: &SU3Structure, action: &TorusAction) -> Result<Jet> {
    st.sigma.eval(&[&action.u, &action.v])
}

/// `ψ₊(U, V, ·) = V ⨼ U ⨼ ψ₊`.
pub fn psi_plus_uv(st: &SU3Structure, action: &TorusAction) -> Result<Form> {
    st.psi_plus.contract(&action.u)?.contract(&action.v)
}

/// `max|dν − 3ψ₊(U, V, ·)|`, with `ν` differentiated through its jet.
pub fn check_moment_gradient(st: &SU3Structure, action: &TorusAction) -> Result<f64> {
    let nu = multi_moment(st, action)?;
    let d_nu = ext_d(&Form::scalar(6, nu), &st.frame)?;
    Ok((&d_nu - &psi_plus_uv(st, action)?.scale_f64(3.0)).max_abs())
}

/// `Δf = −⋆d⋆d f` for a function that is constant along the coframe
/// directions and whose `s`-dependence is carried by the jet `f`.
pub fn laplacian(st: &SU3Structure, f: Jet) -> Result<Jet> {
    let vol = st.volume()?;
    let df = ext_d(&Form::scalar(6, f), &st.frame)?;
    let star_df = hodge(&df, &st.g, &vol)?;
    let d_star_df = ext_d(&star_df, &st.frame)?;
    Ok(-hodge(&d_star_df, &st.g, &vol)?.scalar_value())
}

/// Laplacian of the level function `s` (jet `(s, 1)`).
pub fn laplacian_of_s(st: &SU3Structure, s: f64) -> Result<Jet> {
    if st.frame.s_index().is_none() {
        return Err(Error::Domain("laplacian of s needs a frame with a ds label"));
    }
    laplacian(st, Jet::variable(s))
}

/// `max|V ⨼ U ⨼ (σ∧σ) − 2(νσ − (U ⨼ σ) ∧ (V ⨼ σ))|`.
pub fn check_useful_formula(st: &SU3Structure, action: &TorusAction) -> Result<f64> {
    let (u, v) = (&action.u, &action.v);
    let lhs = st.sigma.wedge(&st.sigma)?.contract(u)?.contract(v)?;
    let nu = multi_moment(st, action)?;
    let cross = st.sigma.contract(u)?.wedge(&st.sigma.contract(v)?)?;
    let rhs = (&st.sigma.scale(nu) - &cross).scale_f64(2.0);
    Ok(lhs.max_abs_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> SU3Structure {
        let frame = Coframe::abelian(&["f1", "Jf1", "f2", "Jf2", "f3", "Jf3"], None).unwrap();
        standard_su3(&frame).unwrap()
    }

    fn max_residual(r: &[Residual]) -> f64 {
        r.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    #[test]
    fn standard_coefficients() {
        let st = model();
        assert_eq!(st.sigma.coeff(&[0, 1]).val, 1.0);
        assert_eq!(st.psi_plus.coeff(&[1, 3, 4]).val, -1.0);
    }

    #[test]
    fn standard_structure_is_compatible() {
        let st = model();
        assert_eq!(max_residual(&su3_compatibility(&st).unwrap()), 0.0);
        // J(F₁) = JF₁
        let j = st.complex_structure().unwrap();
        assert_eq!(j[(1, 0)].val, 1.0);
        assert_eq!(j[(0, 1)].val, -1.0);
    }

    #[test]
    fn scaled_psi_minus_shows_in_normalization() {
        let mut st = model();
        st.psi_minus = st.psi_minus.scale_f64(1.01);
        let r = su3_compatibility(&st).unwrap();
        let norm = r.iter().find(|r| r.check == "psi_normalization").unwrap();
        assert!((norm.residual - 0.04).abs() < 1e-12);
    }

    #[test]
    fn constant_model_is_not_nearly_kahler() {
        let (r1, r2) = nk_residual(&model()).unwrap();
        assert_eq!(r1, 3.0);
        // σ∧σ has coefficient 2 on each f_i∧Jf_i∧f_j∧Jf_j
        assert_eq!(r2, 4.0);
    }

    #[test]
    fn multi_moment_basics() {
        let st = model();
        let a = TorusAction::new(Vector::basis(6, 0), Vector::basis(6, 1));
        assert_eq!(multi_moment(&st, &a).unwrap().val, 1.0);
        let same = TorusAction::new(Vector::basis(6, 0), Vector::basis(6, 0));
        assert_eq!(multi_moment(&st, &same).unwrap().val, 0.0);
        assert_eq!(multi_moment(&st, &a.swapped()).unwrap().val, -1.0);
    }

    #[test]
    fn moment_gradient_flags_constant_model() {
        let st = model();
        let a = TorusAction::new(Vector::basis(6, 0), Vector::basis(6, 2));
        assert_eq!(check_moment_gradient(&st, &a).unwrap(), 3.0);
        let same = TorusAction::new(Vector::basis(6, 0), Vector::basis(6, 0));
        assert_eq!(check_moment_gradient(&st, &same).unwrap(), 0.0);
    }

    #[test]
    fn useful_formula_on_model() {
        let st = model();
        let a = TorusAction::new(
            Vector::from_values(&[0.3, -1.2, 0.5, 2.0, 0.0, 0.7]),
            Vector::from_values(&[1.1, 0.4, -0.6, 0.0, 1.5, -0.2]),
        );
        assert!(check_useful_formula(&st, &a).unwrap() < 1e-12);
        let zero_u = TorusAction::new(Vector::zero(6), a.v.clone());
        assert_eq!(check_useful_formula(&st, &zero_u).unwrap(), 0.0);
    }

    #[test]
    fn flat_laplacian_of_linear_coordinate() {
        let frame = Coframe::abelian(&["ds", "a", "b", "c", "d", "e"], Some(0)).unwrap();
        let mut st = standard_su3(&frame).unwrap();
        st.frame = frame;
        assert!(laplacian_of_s(&st, 0.7).unwrap().val.abs() < 1e-15);
    }

    #[test]
    fn wrong_dimension() {
        let frame = Coframe::abelian(&["a", "b", "c"], None).unwrap();
        assert!(standard_su3(&frame).is_err());
    }
}
