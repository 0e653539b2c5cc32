//! The left-invariant nearly Kähler structure over the Heisenberg group.
//!
//! With `dσ₀ = σ₁∧σ₂` on the quotient, `h = C/s` and
//! `r(s) = (C² − s⁴)/(C² − s₀⁴)`, the one-forms are `α_k = f_k σ_k` with
//! `f₀ = fs0 · r^{1/3}` and `f₁ = f₂ = fs0 · r^{2/3}`. The six-frame used here
//! moves with `s`: `ϑ_k` absorbs the `s`-dependent shift of the connection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolution::{integrate, EvolutionState, FlowModel};
use crate::exterior::{ext_d_structure, Coframe, Form, JetMatrix, MetricTensor};
use crate::jet::Jet;
use crate::ode::Method;
use crate::reduction::{six_frame, OrbitGram, ReducedData};
use crate::su3::{Residual, SU3Structure};

/// Relative margin kept from `s⁴ = C²`.
pub const DOMAIN_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergParams {
    pub c: f64,
    pub s0: f64,
    /// Common initial value of `f₀, f₁, f₂`.
    pub fs0: f64,
}

impl HeisenbergParams {
    /// Parameters with the consistent initial value `fs0 = (h₀² − s₀²)/(4h₀²)`.
    pub fn new(c: f64, s0: f64) -> Result<Self> {
        let h0 = c / s0;
        HeisenbergParams::with_fs0(c, s0, (h0 * h0 - s0 * s0) / (4.0 * h0 * h0))
    }

    /// Arbitrary positive `fs0`; only the consistent value gives a nearly
    /// Kähler structure.
    pub fn with_fs0(c: f64, s0: f64, fs0: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain("C must be positive"));
        }
        if !(s0 > 0.0) || !(s0 * s0 < c * (1.0 - DOMAIN_MARGIN)) {
            return Err(Error::Domain("need 0 < s0² < C"));
        }
        if !(fs0 > 0.0) || !fs0.is_finite() {
            return Err(Error::Domain("fs0 must be positive"));
        }
        Ok(HeisenbergParams { c, s0, fs0 })
    }

    pub fn h0(&self) -> f64 {
        self.c / self.s0
    }

    pub fn is_consistent(&self) -> bool {
        let h0 = self.h0();
        let expected = (h0 * h0 - self.s0 * self.s0) / (4.0 * h0 * h0);
        libm::fabs(self.fs0 - expected) <= 1e-12 * expected
    }

    /// `C² − s₀⁴`.
    fn gap0(&self) -> f64 {
        self.c * self.c - pow4(self.s0)
    }

    /// Curvature constant `K` in `dϑ₁ = K σ₀∧σ₂ + …`, `dϑ₂ = −K σ₀∧σ₁ + …`.
    pub fn curvature_constant(&self) -> f64 {
        3.0 * self.c * self.fs0 * self.fs0 / self.gap0()
    }

    pub fn in_domain(&self, s: f64) -> bool {
        s > 0.0 && pow4(s) < self.c * self.c * (1.0 - DOMAIN_MARGIN)
    }

    fn check(&self, s: f64) -> Result<()> {
        if self.in_domain(s) {
            Ok(())
        } else {
            Err(Error::Domain("need 0 < s and s⁴ < C²"))
        }
    }
}

fn pow4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2
}

/// `dσ₀ = σ₁∧σ₂`, `dσ₁ = dσ₂ = 0`.
pub fn h3_coframe() -> Coframe {
    Coframe::from_constants(&["sigma0", "sigma1", "sigma2"], &[(0, 1, 2, 1.0)], None).expect("valid constants")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profiles {
    pub h: Jet,
    pub f0: Jet,
    pub f1: Jet,
    pub f2: Jet,
}

impl Profiles {
    pub fn f(&self) -> [Jet; 3] {
        [self.f0, self.f1, self.f2]
    }
}

/// `r(s) = (C² − s⁴)/(C² − s₀⁴)` as a jet.
fn ratio(p: &HeisenbergParams, s: f64) -> Jet {
    let sj = Jet::variable(s);
    let s2 = sj * sj;
    (Jet::constant(p.c * p.c) - s2 * s2) / p.gap0()
}

pub fn closed_form_profiles(p: &HeisenbergParams, s: f64) -> Result<Profiles> {
    p.check(s)?;
    let r = ratio(p, s);
    let h = Jet::constant(p.c).try_div(Jet::variable(s))?;
    let f0 = r.cbrt()? * p.fs0;
    let f1 = r.powf(2.0 / 3.0)? * p.fs0;
    Ok(Profiles { h, f0, f1, f2: f1 })
}

/// `h² − s² = (C² − s⁴)/s²`.
fn level_gap(p: &HeisenbergParams, s: f64) -> Jet {
    let sj = Jet::variable(s);
    let s2 = sj * sj;
    (Jet::constant(p.c * p.c) - s2 * s2).try_div(s2).expect("s > 0 in domain")
}

/// Rate `ρ_k = −5 f_k/(3(h² − s²))` of the moving connection forms,
/// `∂ₛϑ_k = ρ_k σ_k`.
pub fn theta_rate(p: &HeisenbergParams, s: f64) -> Result<[f64; 2]> {
    let pr = closed_form_profiles(p, s)?;
    let hm = level_gap(p, s).val;
    Ok([-5.0 * pr.f1.val / (3.0 * hm), -5.0 * pr.f2.val / (3.0 * hm)])
}

/// `∫_{s₀}^{s} ρ_k`: the horizontal parts `T_k = φ_k σ_k` acquired by the
/// connection forms of a frame fixed at `s₀`. Adaptive Simpson quadrature.
pub fn theta_shift(p: &HeisenbergParams, s: f64) -> Result<[f64; 2]> {
    p.check(s)?;
    let rate = |x: f64| theta_rate(p, x).map(|r| r[0]).unwrap_or(f64::NAN);
    let v = adaptive_simpson(&rate, p.s0, s, 1e-15, 40);
    if !v.is_finite() {
        return Err(Error::NonFinite { s });
    }
    Ok([v, v])
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)
}

/// The moving six-frame `(ds, ϑ₁, ϑ₂, σ₀, σ₁, σ₂)` at level `s`:
/// `dϑ₁ = K σ₀∧σ₂ + ρ₁ ds∧σ₁`, `dϑ₂ = −K σ₀∧σ₁ + ρ₂ ds∧σ₂`.
pub fn heisenberg_frame6(p: &HeisenbergParams, s: f64) -> Result<Coframe> {
    let k = p.curvature_constant();
    let curvature = [
        Form::monomial(3, &[0, 2], Jet::constant(k))?,
        Form::monomial(3, &[0, 1], Jet::constant(-k))?,
    ];
    let [r1, r2] = theta_rate(p, s)?;
    let rate = [Form::one_form_f64(&[0.0, r1, 0.0]), Form::one_form_f64(&[0.0, 0.0, r2])];
    six_frame(&h3_coframe(), &curvature, Some(&rate))
}

/// Reduced data at `s` on the moving frame (`T_k = 0`).
pub fn heisenberg_reduced_data(p: &HeisenbergParams, s: f64) -> Result<ReducedData> {
    let pr = closed_form_profiles(p, s)?;
    let alpha = [0, 1, 2].map(|i| {
        let mut c = [Jet::ZERO; 3];
        c[i] = pr.f()[i];
        Form::one_form(&c)
    });
    let theta = [Form::zero(3, 1), Form::zero(3, 1)];
    ReducedData::new(s, OrbitGram::new(pr.h, Jet::ZERO, pr.h), h3_coframe(), alpha, theta)
}

/// The explicit structure on the moving frame. Requires the consistent
/// `fs0` (the explicit expressions have it eliminated).
pub fn heisenberg_structure(p: &HeisenbergParams, s: f64) -> Result<SU3Structure> {
    if !p.is_consistent() {
        return Err(Error::Domain("explicit structure needs the consistent fs0"));
    }
    p.check(s)?;
    let frame = heisenberg_frame6(p, s)?;
    let c = p.c;
    let c2 = c * c;
    let c4 = c2 * c2;
    let d = p.gap0();
    let sj = Jet::variable(s);
    let s2 = sj * sj;
    let gap = Jet::constant(c2) - s2 * s2;
    let q = ratio(p, s);
    let q13 = q.cbrt()?;
    let q23 = q.powf(2.0 / 3.0)?;
    let qm13 = q13.recip()?;
    let qm23 = q23.recip()?;
    let k = |x: f64| Jet::constant(x);

    let fiber = k(c).try_div(sj)?;
    let base = s2 * (d / (16.0 * c4));
    let gram = JetMatrix::diagonal(&[
        s2.try_div(gap * 9.0)?,
        fiber,
        fiber,
        base * qm13,
        base * fiber * q13,
        base * fiber * q13,
    ]);
    let g = MetricTensor::new(gram)?;

    let m = |idx: &[usize], c: Jet| Form::monomial(6, idx, c);
    // indices: ds 0, ϑ₁ 1, ϑ₂ 2, σ₀ 3, σ₁ 4, σ₂ 5
    let sigma = &(&(&m(&[0, 3], s2 * qm23 / (12.0 * c2))? + &m(&[1, 2], sj)?)
        + &(&m(&[2, 4], q23 * (d / (4.0 * c2)))? - &m(&[1, 5], q23 * (d / (4.0 * c2)))?))
        - &m(&[4, 5], sj * s2 * q13 * (d / (16.0 * c4)))?;

    let a = s2 * sj * qm13 / (4.0 * c2);
    let psi_plus = &(&(&m(&[0, 1, 2], k(1.0 / 3.0))? + &m(&[0, 1, 5], a / 3.0)?) - &m(&[0, 2, 4], a / 3.0)?)
        - &(&(&m(&[0, 4, 5], s2 * q13 * (d / (48.0 * c4)))? + &m(&[1, 4, 3], sj * (c * d / (16.0 * c4)))?)
            + &m(&[2, 5, 3], sj * (c * d / (16.0 * c4)))?);

    let b = sj * qm13 / (12.0 * c);
    let e = s2 * (d / (16.0 * c4));
    let tail = gap.powf(2.0 / 3.0)? * (libm::cbrt(d) / (4.0 * c2));
    let psi_minus = &(&(&(&m(&[0, 1, 4], b)? + &m(&[0, 2, 5], b)?) + &m(&[1, 2, 3], q13 * (d / (4.0 * c2)))?)
        + &(&m(&[1, 5, 3], e * sj)? - &m(&[2, 4, 3], e * sj)?))
        - &m(&[4, 5, 3], e * tail)?;

    SU3Structure::new(frame, g, sigma, psi_plus, psi_minus)
}

/// Initial state and flow model on the fixed frame at `s₀`.
pub fn initial_flow(p: &HeisenbergParams) -> Result<(FlowModel, EvolutionState)> {
    let h0 = p.h0();
    let f = p.fs0;
    let st = EvolutionState::new(p.s0, [h0, 0.0, h0], [[f, 0.0, 0.0], [0.0, f, 0.0], [0.0, 0.0, f]], [[0.0; 3]; 2])?;
    let model = FlowModel::new(h3_coframe(), &st, true)?;
    Ok((model, st))
}

/// Maximum relative error per channel between an integrated trajectory and
/// the closed forms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Comparison {
    pub h: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub theta: f64,
}

impl Comparison {
    pub fn max(&self) -> f64 {
        [self.h, self.f0, self.f1, self.f2, self.theta].into_iter().fold(0.0, f64::max)
    }

    pub fn channels(&self) -> [(&'static str, f64); 5] {
        [("h", self.h), ("f0", self.f0), ("f1", self.f1), ("f2", self.f2), ("theta", self.theta)]
    }
}

fn rel(num: f64, reference: f64) -> f64 {
    let d = libm::fabs(num - reference);
    if reference == 0.0 {
        d
    } else {
        d / libm::fabs(reference)
    }
}

/// Compares a single trajectory state with the closed forms.
pub fn compare_state(p: &HeisenbergParams, st: &EvolutionState) -> Result<Comparison> {
    let pr = closed_form_profiles(p, st.s)?;
    let [phi1, phi2] = theta_shift(p, st.s)?;
    let off_diagonal = [st.alpha[0][1], st.alpha[0][2], st.alpha[1][0], st.alpha[1][2], st.alpha[2][0], st.alpha[2][1]]
        .into_iter()
        .chain([st.theta[0][0], st.theta[0][2], st.theta[1][0], st.theta[1][1]])
        .map(libm::fabs)
        .fold(0.0, f64::max);
    let theta = rel(st.theta[0][1], phi1).max(rel(st.theta[1][2], phi2)).max(off_diagonal);
    Ok(Comparison {
        h: rel(libm::sqrt(st.h2()), pr.h.val),
        f0: rel(st.alpha[0][0], pr.f0.val),
        f1: rel(st.alpha[1][1], pr.f1.val),
        f2: rel(st.alpha[2][2], pr.f2.val),
        theta,
    })
}

/// Integrates from the initial state to `s_end` in `steps` steps and
/// returns the worst relative error per channel over all nodes.
pub fn compare_ode_vs_closed(p: &HeisenbergParams, s_end: f64, steps: usize, method: Method) -> Result<Comparison> {
    if steps == 0 {
        return Ok(Comparison::default());
    }
    p.check(s_end)?;
    let (model, st0) = initial_flow(p)?;
    let ds = (s_end - p.s0) / steps as f64;
    let trajectory = integrate(&model, &st0, ds, steps, method).map_err(|a| a.error)?;
    let mut worst = Comparison::default();
    for st in &trajectory {
        let c = compare_state(p, st)?;
        worst.h = worst.h.max(c.h);
        worst.f0 = worst.f0.max(c.f0);
        worst.f1 = worst.f1.max(c.f1);
        worst.f2 = worst.f2.max(c.f2);
        worst.theta = worst.theta.max(c.theta);
    }
    Ok(worst)
}

/// Brings `β₀, β₁, β₂` into the model form `dσ₀ = σ₁∧σ₂`: `σ₀ = f β₀` and
/// `σ₁, σ₂` are a `g̃`-orthogonal pair of equal norm spanning the same plane
/// as `β₁, β₂` with `σ₁∧σ₂ = β₁∧β₂` (Gram–Schmidt from `β₁`).
pub fn normalize_h3_frame(beta: &[Form; 3], frame3: &Coframe, gtilde: &MetricTensor, f: f64) -> Result<[Form; 3]> {
    if frame3.dim() != 3 || gtilde.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: frame3.dim().min(gtilde.dim()) });
    }
    let scale = beta.iter().map(Form::max_abs).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if libm::fabs(beta[1].coeff(&[0]).val).max(libm::fabs(beta[2].coeff(&[0]).val)) > 1e-12 * scale {
        return Err(Error::Domain("beta1 and beta2 must lie in span{tau1, tau2}"));
    }
    let d_beta0 = ext_d_structure(&beta[0], frame3)?;
    if libm::fabs(d_beta0.coeff(&[0, 1]).val).max(libm::fabs(d_beta0.coeff(&[0, 2]).val)) > 1e-12 * scale.max(d_beta0.max_abs()) {
        return Err(Error::Domain("d beta0 must be proportional to tau1 ∧ tau2"));
    }
    let b12 = beta[1].wedge(&beta[2])?;
    if b12.max_abs() <= 1e-14 * scale * scale {
        return Err(Error::Degenerate("beta1 ∧ beta2 = 0"));
    }
    let e1 = beta[1].values_only();
    let n1 = gtilde.form_norm_sq(&e1)?.val;
    let proj = gtilde.form_inner(&beta[2], &e1)?.val / n1;
    let e2 = &beta[2].values_only() - &e1.scale_f64(proj);
    let n2 = gtilde.form_norm_sq(&e2)?.val;
    let lambda = libm::sqrt(libm::sqrt(n2 / n1));
    Ok([beta[0].values_only().scale_f64(f), e1.scale_f64(lambda), e2.scale_f64(1.0 / lambda)])
}

/// The defining conditions of a normalized frame: orthogonality, equal
/// norms, `σ₁∧σ₂ = β₁∧β₂` and `dσ₀ = σ₁∧σ₂`.
pub fn normalization_conditions(sigma: &[Form; 3], beta: &[Form; 3], frame3: &Coframe, gtilde: &MetricTensor) -> Result<Vec<Residual>> {
    let ortho = gtilde.form_inner(&sigma[1], &sigma[2])?.val;
    let norms = gtilde.form_norm_sq(&sigma[1])?.val - gtilde.form_norm_sq(&sigma[2])?.val;
    let s12 = sigma[1].wedge(&sigma[2])?;
    let area = s12.max_abs_diff(&beta[1].wedge(&beta[2])?);
    let model = ext_d_structure(&sigma[0], frame3)?.max_abs_diff(&s12);
    Ok(alloc::vec![
        Residual::new("orthogonal", libm::fabs(ortho)),
        Residual::new("equal_norms", libm::fabs(norms)),
        Residual::new("area", area),
        Residual::new("model_form", model),
    ])
}
