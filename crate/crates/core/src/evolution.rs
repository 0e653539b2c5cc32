//! The first-order flow in the level parameter `s`.
//!
//! The state carries the Gram matrix `G` of the torus generators, the
//! one-forms `α₀, α₁, α₂` and the horizontal parts `T₁, T₂` of the
//! connection forms, all as coefficient rows against a fixed coframe `τ` of
//! the three-dimensional group. The connection forms themselves are
//! `ϑ_k = ϑ̂_k + T_k` with `dϑ̂_k = Θ_k(s₀)`.
//!
//! Sign convention: the coefficients `a_ij` are the multipliers of the
//! one-form "prime" used in the derivation, which is minus the
//! `s`-derivative of the coefficients (it is defined through
//! `d_s γ = γ' ∧ ds`). Hence `∂ₛα_i = −Σ_j a_ij α_j`. On functions the prime
//! is the ordinary derivative. [`evolution_rhs`] always returns true
//! `s`-derivatives.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exterior::{ext_d_structure, Coframe, Form, JetMatrix};
use crate::jet::Jet;
use crate::ode::{self, Method, OdeSystem};
use crate::reduction::{assemble_six, six_frame, OrbitGram, ReducedData};
use crate::su3::SU3Structure;

/// Relative gap `|h² − s²| / h²` below which integration aborts.
pub const POLE_TOL: f64 = 1e-6;

/// Index pairs `(i, j)`, `i < j`, in the order used for `b_ij`, `c_ij`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Number of scalars in a flattened [`EvolutionState`] (without `s`).
pub const STATE_LEN: usize = 18;

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionState {
    pub s: f64,
    /// `(g_UU, g_UV, g_VV)`.
    pub gram: [f64; 3],
    /// Rows are `α₀, α₁, α₂` in the fixed coframe.
    pub alpha: [[f64; 3]; 3],
    /// Rows are the horizontal parts of `ϑ₁, ϑ₂`.
    pub theta: [[f64; 3]; 2],
}

impl EvolutionState {
    pub fn new(s: f64, gram: [f64; 3], alpha: [[f64; 3]; 3], theta: [[f64; 3]; 2]) -> Result<Self> {
        let st = EvolutionState { s, gram, alpha, theta };
        st.validate()?;
        Ok(st)
    }

    /// Initial state on the level `s₀ = (1 − 4/f)^{1/2} h`, with `T_k = 0`.
    ///
    /// `f` is read off `dα₀ = f α₁∧α₂`; if `f` or `s0` are supplied they must
    /// agree with the values implied by the data.
    pub fn initial(frame3: &Coframe, alpha: [[f64; 3]; 3], gram: [f64; 3], f: Option<f64>, s0: Option<f64>) -> Result<Self> {
        let probe = EvolutionState { s: f64::NAN, gram, alpha, theta: [[0.0; 3]; 2] };
        let h2 = probe.h2();
        if !(gram[0] > 0.0) || !(h2 > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let b0 = expand_d3(frame3, &alpha, 0)?;
        // dα₀ = f α₁∧α₂ and no other components
        let implied = b0[2];
        let rest = libm::fabs(b0[0]).max(libm::fabs(b0[1]));
        if rest > 1e-10 * libm::fabs(implied).max(1.0) {
            return Err(Error::Domain("dα₀ is not a multiple of α₁∧α₂"));
        }
        let f = match f {
            Some(f) if libm::fabs(f - implied) > 1e-9 * libm::fabs(implied).max(1.0) => {
                return Err(Error::Domain("declared f disagrees with dα₀ = f α₁∧α₂"));
            }
            Some(f) => f,
            None => implied,
        };
        if !(f > 4.0) {
            return Err(Error::InvalidF { f });
        }
        let s_implied = libm::sqrt((1.0 - 4.0 / f) * h2);
        let s = match s0 {
            Some(s) if libm::fabs(s - s_implied) > 1e-9 * s_implied => {
                return Err(Error::Domain("declared s0 disagrees with (1 - 4/f)^(1/2) h"));
            }
            Some(s) => s,
            None => s_implied,
        };
        EvolutionState::new(s, gram, alpha, [[0.0; 3]; 2])
    }

    pub fn h2(&self) -> f64 {
        self.gram[0] * self.gram[2] - self.gram[1] * self.gram[1]
    }

    /// `h² − s²`.
    pub fn h_minus(&self) -> f64 {
        self.h2() - self.s * self.s
    }

    pub fn alpha_matrix(&self) -> Result<JetMatrix> {
        JetMatrix::from_f64(3, &self.alpha.concat())
    }

    pub fn alpha_forms(&self) -> [Form; 3] {
        self.alpha.map(|row| Form::one_form_f64(&row))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.s.is_finite()
            && self.gram.iter().chain(self.alpha.iter().flatten()).chain(self.theta.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::NonFinite { s: self.s });
        }
        if self.s == 0.0 {
            return Err(Error::ZeroLevel);
        }
        if !(self.gram[0] > 0.0) || !(self.h2() > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        if libm::fabs(self.h_minus()) < POLE_TOL * self.h2() {
            return Err(Error::PoleProximity { s: self.s });
        }
        self.alpha_matrix()?.inverse()?;
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(STATE_LEN);
        v.extend_from_slice(&self.gram);
        self.alpha.iter().for_each(|r| v.extend_from_slice(r));
        self.theta.iter().for_each(|r| v.extend_from_slice(r));
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec); no validation.
    pub fn from_slice(s: f64, y: &[f64]) -> Self {
        let mut it = y.iter().copied();
        let mut next = || it.next().expect("state length");
        let gram = [next(), next(), next()];
        let alpha = [[next(), next(), next()], [next(), next(), next()], [next(), next(), next()]];
        let theta = [[next(), next(), next()], [next(), next(), next()]];
        EvolutionState { s, gram, alpha, theta }
    }
}

/// Values `X_i(q)` of the spatial derivatives along the frame dual to the
/// `α_i`, for `q ∈ {h², g_UU, g_UV, g_VV}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpatialGradients {
    pub h2: [f64; 3],
    pub uu: [f64; 3],
    pub uv: [f64; 3],
    pub vv: [f64; 3],
}

/// Source of spatial derivatives of the metric data on the quotient.
pub trait SpatialOracle {
    fn gradients(&self, st: &EvolutionState) -> SpatialGradients;
}

/// Invariant data: every spatial derivative vanishes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Invariant;

impl SpatialOracle for Invariant {
    fn gradients(&self, _st: &EvolutionState) -> SpatialGradients {
        SpatialGradients::default()
    }
}

/// Constant injected gradients, for probing the general formulas.
impl SpatialOracle for SpatialGradients {
    fn gradients(&self, _st: &EvolutionState) -> SpatialGradients {
        *self
    }
}

/// `Σ_i X_i(q) α_i` as a form on the fixed coframe.
fn gradient_form(x: &[f64; 3], alpha: &[Form; 3]) -> Form {
    let mut out = Form::zero(3, 1);
    for (xi, a) in x.iter().zip(alpha) {
        if *xi != 0.0 {
            out = &out + &a.scale_f64(*xi);
        }
    }
    out
}

/// Coefficients of `d₃α_i` in the basis `α_j∧α_k`, ordered by [`PAIRS`].
fn expand_d3(frame3: &Coframe, alpha: &[[f64; 3]; 3], i: usize) -> Result<[f64; 3]> {
    if frame3.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: frame3.dim() });
    }
    let forms = alpha.map(|row| Form::one_form_f64(&row));
    let d = ext_d_structure(&forms[i], frame3)?;
    // column (jk) holds α_j∧α_k in the τ-basis τ_a∧τ_b, rows ordered by PAIRS
    let mut m = JetMatrix::zeros(3);
    for (col, &(j, k)) in PAIRS.iter().enumerate() {
        let w = forms[j].wedge(&forms[k])?;
        for (row, &(a, b)) in PAIRS.iter().enumerate() {
            m[(row, col)] = w.coeff(&[a, b]);
        }
    }
    let inv = m.inverse()?;
    let rhs: [f64; 3] = PAIRS.map(|(a, b)| d.coeff(&[a, b]).val);
    let mut out = [0.0; 3];
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|c| inv[(r, c)].val * rhs[c]).sum();
    }
    Ok(out)
}

/// `(b, c)` with `d₃α₁ = Σ b_ij α_i∧α_j`, `d₃α₂ = Σ c_ij α_i∧α_j`, indexed
/// by [`PAIRS`].
pub fn expand_d3_alphas(frame3: &Coframe, st: &EvolutionState) -> Result<([f64; 3], [f64; 3])> {
    Ok((expand_d3(frame3, &st.alpha, 1)?, expand_d3(frame3, &st.alpha, 2)?))
}

/// Multipliers `a_ij` (row 0 is `(4s/(3(h²−s²)), 0, 0)`) and `(h²)'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowCoefficients {
    pub a: [[f64; 3]; 3],
    pub dh2: f64,
}

fn guard(st: &EvolutionState) -> Result<(f64, f64, f64)> {
    let s = st.s;
    if s == 0.0 {
        return Err(Error::ZeroLevel);
    }
    let h2 = st.h2();
    let hm = st.h_minus();
    if libm::fabs(hm) <= 1e-14 * h2.max(s * s) {
        return Err(Error::SingularLevel { s, h2 });
    }
    Ok((s, h2, hm))
}

pub fn evolution_coefficients(st: &EvolutionState, b: &[f64; 3], c: &[f64; 3], x: &SpatialGradients) -> Result<FlowCoefficients> {
    let (s, h2, hm) = guard(st)?;
    let [uu, uv, vv] = st.gram;
    let [b01, b02, _] = *b;
    let [c01, c02, _] = *c;
    let k = s / (3.0 * h2 * hm);
    let l = s / (3.0 * h2);

    let a10 = k * x.h2[2];
    let a20 = -k * x.h2[1];
    let a21 = uu * k * x.h2[0] - l * (x.uu[0] + uu * b01 + uv * c01);
    let a12 = -vv * k * x.h2[0] + l * (x.vv[0] + uv * b02 + vv * c02);
    let a11 = 8.0 * s / (3.0 * hm) + l * (x.uv[0] + b02 * uu + c02 * uv) - uv * k * x.h2[0];
    let a22 = 8.0 * s / (3.0 * hm) - l * (x.uv[0] + b01 * uv + c01 * vv) + uv * k * x.h2[0];
    let dh2 = -2.0 * h2 / s + hm / (3.0 * s) * ((b01 - c02) * uv + c01 * vv - b02 * uu);

    Ok(FlowCoefficients {
        a: [[4.0 * s / (3.0 * hm), 0.0, 0.0], [a10, a11, a12], [a20, a21, a22]],
        dh2,
    })
}

/// `(g_UU', g_UV', g_VV')`, with `g_UV'` the mean of its two expressions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricDerivatives {
    pub uu: f64,
    pub uv: f64,
    pub vv: f64,
    /// Difference between the two expressions for `g_UV'`.
    pub uv_mismatch: f64,
}

pub fn metric_derivatives(st: &EvolutionState, coeffs: &FlowCoefficients, b: &[f64; 3], c: &[f64; 3], x: &SpatialGradients) -> Result<MetricDerivatives> {
    let (s, h2, hm) = guard(st)?;
    let [uu, uv, vv] = st.gram;
    let a = &coeffs.a;
    let common = |aii: f64| coeffs.dh2 / hm + 1.0 / s + aii - 2.0 * s / (3.0 * hm);
    let r = h2 / (3.0 * s);
    let t = s * x.h2[0] / (3.0 * hm);

    let d_uu = uu * common(a[1][1]) - r * c[0] + uv * a[2][1];
    let d_uv_1 = uv * common(a[2][2]) - r * c[1] + uu * a[1][2] + t;
    let d_uv_2 = uv * common(a[1][1]) + r * b[0] + vv * a[2][1] - t;
    let d_vv = vv * common(a[2][2]) + r * b[1] + uv * a[1][2];
    Ok(MetricDerivatives { uu: d_uu, uv: 0.5 * (d_uv_1 + d_uv_2), vv: d_vv, uv_mismatch: d_uv_1 - d_uv_2 })
}

/// `Θ₁ = (1/s)(dα₁ − 3/(h²−s²)(g_UV α₁ + g_VV α₂)∧α₀)`,
/// `Θ₂ = (1/s)(dα₂ + 3/(h²−s²)(g_UU α₁ + g_UV α₂)∧α₀)`.
pub fn curvature_forms(frame3: &Coframe, st: &EvolutionState) -> Result<[Form; 2]> {
    let (s, _, hm) = guard(st)?;
    let [uu, uv, vv] = st.gram;
    let [a0, a1, a2] = st.alpha_forms();
    let k = 3.0 / hm;
    let da1 = ext_d_structure(&a1, frame3)?;
    let da2 = ext_d_structure(&a2, frame3)?;
    let t1 = &da1 - &(&a1.scale_f64(uv) + &a2.scale_f64(vv)).wedge(&a0)?.scale_f64(k);
    let t2 = &da2 + &(&a1.scale_f64(uu) + &a2.scale_f64(uv)).wedge(&a0)?.scale_f64(k);
    Ok([t1.scale_f64(1.0 / s), t2.scale_f64(1.0 / s)])
}

/// Residuals of the two closure conditions of `Θ₁`, `Θ₂` (in the form
/// obtained with the quotient relations), as max-abs coefficients.
pub fn check_closure(st: &EvolutionState, x: &SpatialGradients) -> Result<(f64, f64)> {
    let h2 = st.h2();
    if !(h2 > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let [uu, uv, vv] = st.gram;
    let forms = st.alpha_forms();
    let [a0, a1, a2] = &forms;
    let dh2 = gradient_form(&x.h2, &forms);
    let a10 = a1.wedge(a0)?;
    let a20 = a2.wedge(a0)?;
    let side = |p: f64, q: f64, dp: &[f64; 3], dq: &[f64; 3]| -> Result<f64> {
        let lhs = &dh2.wedge(&a10)?.scale_f64(p / h2) + &dh2.wedge(&a20)?.scale_f64(q / h2);
        let rhs = &gradient_form(dp, &forms).wedge(&a10)? + &gradient_form(dq, &forms).wedge(&a20)?;
        Ok(lhs.max_abs_diff(&rhs))
    };
    Ok((side(uv, vv, &x.uv, &x.vv)?, side(uu, uv, &x.uu, &x.uv)?))
}

/// True `s`-derivatives of the state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative {
    pub d_alpha: [[f64; 3]; 3],
    pub d_theta: [[f64; 3]; 2],
    /// `(g_UU', g_UV', g_VV')`.
    pub d_gram: [f64; 3],
    pub coefficients: FlowCoefficients,
    pub uv_mismatch: f64,
}

impl StateDerivative {
    fn is_finite(&self) -> bool {
        self.d_alpha.iter().flatten().chain(self.d_theta.iter().flatten()).chain(&self.d_gram).all(|x| x.is_finite())
    }

    /// `d/ds det G` from the metric derivatives (product rule).
    pub fn det_derivative(&self, st: &EvolutionState) -> f64 {
        let [uu, uv, vv] = st.gram;
        let [duu, duv, dvv] = self.d_gram;
        duu * vv + uu * dvv - 2.0 * uv * duv
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(STATE_LEN);
        v.extend_from_slice(&self.d_gram);
        self.d_alpha.iter().for_each(|r| v.extend_from_slice(r));
        self.d_theta.iter().for_each(|r| v.extend_from_slice(r));
        v
    }
}

/// A flow on a fixed three-dimensional coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowModel<O = Invariant> {
    pub frame3: Coframe,
    /// `Θ_k` at the initial level: `dϑ̂_k` of the fixed connection forms.
    pub curvature: [Form; 2],
    pub s0: f64,
    /// Declared by the user, never verified.
    pub periods_integral: bool,
    pub oracle: O,
}

impl FlowModel<Invariant> {
    pub fn new(frame3: Coframe, initial: &EvolutionState, periods_integral: bool) -> Result<Self> {
        FlowModel::with_oracle(frame3, initial, periods_integral, Invariant)
    }
}

impl<O: SpatialOracle> FlowModel<O> {
    pub fn with_oracle(frame3: Coframe, initial: &EvolutionState, periods_integral: bool, oracle: O) -> Result<Self> {
        initial.validate()?;
        let curvature = curvature_forms(&frame3, initial)?;
        Ok(FlowModel { frame3, curvature, s0: initial.s, periods_integral, oracle })
    }

    /// `(ds, ϑ₁, ϑ₂, τ₀, τ₁, τ₂)` with `dϑ̂_k = Θ_k(s₀)`.
    pub fn frame6(&self) -> Result<Coframe> {
        six_frame(&self.frame3, &self.curvature, None)
    }

    pub fn rhs(&self, st: &EvolutionState) -> Result<StateDerivative> {
        evolution_rhs(self, st)
    }

    /// Reduced data at `st`, with the `s`-derivatives stored in the jets.
    pub fn reduced_data(&self, st: &EvolutionState) -> Result<ReducedData> {
        let d = self.rhs(st)?;
        let jets = |v: &[f64; 3], dv: &[f64; 3]| Form::one_form(&[0, 1, 2].map(|i| Jet::new(v[i], dv[i])));
        let alpha = [0, 1, 2].map(|i| jets(&st.alpha[i], &d.d_alpha[i]));
        let theta = [0, 1].map(|k| jets(&st.theta[k], &d.d_theta[k]));
        let [uu, uv, vv] = [0, 1, 2].map(|i| Jet::new(st.gram[i], d.d_gram[i]));
        ReducedData::new(st.s, OrbitGram::new(uu, uv, vv), self.frame3.clone(), alpha, theta)
    }

    /// The six-dimensional structure at `st`.
    pub fn assemble(&self, st: &EvolutionState) -> Result<SU3Structure> {
        assemble_six(&self.reduced_data(st)?, &self.frame6()?)
    }
}

pub fn evolution_rhs<O: SpatialOracle>(model: &FlowModel<O>, st: &EvolutionState) -> Result<StateDerivative> {
    let (s, _, hm) = guard(st)?;
    let x = model.oracle.gradients(st);
    let (b, c) = expand_d3_alphas(&model.frame3, st)?;
    let coefficients = evolution_coefficients(st, &b, &c, &x)?;
    let md = metric_derivatives(st, &coefficients, &b, &c, &x)?;

    let mut d_alpha = [[0.0; 3]; 3];
    for (i, row) in d_alpha.iter_mut().enumerate() {
        for (col, slot) in row.iter_mut().enumerate() {
            *slot = -(0..3).map(|j| coefficients.a[i][j] * st.alpha[j][col]).sum::<f64>();
        }
    }
    let mut d_theta = [[0.0; 3]; 2];
    for (k, row) in d_theta.iter_mut().enumerate() {
        for (col, slot) in row.iter_mut().enumerate() {
            *slot = d_alpha[k + 1][col] / s + st.alpha[k + 1][col] / hm;
        }
    }
    let out = StateDerivative { d_alpha, d_theta, d_gram: [md.uu, md.uv, md.vv], coefficients, uv_mismatch: md.uv_mismatch };
    if !out.is_finite() {
        return Err(Error::NonFinite { s });
    }
    Ok(out)
}

impl<O: SpatialOracle> OdeSystem for FlowModel<O> {
    fn rhs(&self, s: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        let d = evolution_rhs(self, &EvolutionState::from_slice(s, y))?;
        out.copy_from_slice(&d.to_vec());
        Ok(())
    }
}

/// An aborted integration: the error and every state emitted before it.
#[derive(Clone, Debug, PartialEq)]
pub struct Aborted {
    pub error: Error,
    pub trajectory: Vec<EvolutionState>,
}

/// Fixed-step integration of `steps` steps of size `ds` from `st0`.
///
/// Aborts (returning the partial trajectory) when a state is non-finite,
/// reaches `s = 0`, or comes within [`POLE_TOL`] of `h² = s²` or jumps
/// across it.
pub fn integrate<O: SpatialOracle>(model: &FlowModel<O>, st0: &EvolutionState, ds: f64, steps: usize, method: Method) -> core::result::Result<Vec<EvolutionState>, Aborted> {
    let mut trajectory = Vec::with_capacity(steps + 1);
    if let Err(error) = st0.validate() {
        return Err(Aborted { error, trajectory });
    }
    trajectory.push(st0.clone());
    let mut y = st0.to_vec();
    let mut s = st0.s;
    let mut side = st0.h_minus().signum();
    for i in 0..steps {
        let next_s = st0.s + (i + 1) as f64 * ds;
        if s.signum() != next_s.signum() || next_s == 0.0 {
            return Err(Aborted { error: Error::ZeroLevel, trajectory });
        }
        if let Err(error) = ode::step(model, method, s, ds, &mut y) {
            let error = match error {
                Error::SingularLevel { .. } => Error::PoleProximity { s: next_s },
                e => e,
            };
            return Err(Aborted { error, trajectory });
        }
        s = next_s;
        let st = EvolutionState::from_slice(s, &y);
        if st.to_vec().iter().any(|v| !v.is_finite()) {
            return Err(Aborted { error: Error::NonFinite { s }, trajectory });
        }
        if st.h_minus().signum() != side {
            return Err(Aborted { error: Error::PoleProximity { s }, trajectory });
        }
        if let Err(error) = st.validate() {
            return Err(Aborted { error, trajectory });
        }
        side = st.h_minus().signum();
        trajectory.push(st);
    }
    Ok(trajectory)
}
