use alloc::vec::Vec;

use super::{Coframe, Form, JetMatrix, MetricTensor, Vector};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// A constant linear change of coframe `êᵃ = Σ_b P_ab eᵇ`.
///
/// Used to re-express a structure in a frame where the Gram matrix is far
/// from diagonal. The `ds` slot must be left untouched so that the
/// `s`-channel of [`ext_d`](super::ext_d) keeps its meaning.
#[derive(Clone, Debug)]
pub struct FrameChange {
    p: Vec<f64>,
    q: Vec<f64>,
    n: usize,
}

impl FrameChange {
    pub fn new(n: usize, p: &[f64]) -> Result<Self> {
        let pm = JetMatrix::from_f64(n, p)?;
        let q = pm.inverse()?.values();
        Ok(FrameChange { p: p.to_vec(), q, n })
    }

    /// Images of the old basis one-forms in the new frame: `eᵇ = Σ_a Q_ba êᵃ`.
    fn old_in_new(&self) -> Vec<Form> {
        (0..self.n)
            .map(|b| {
                let coeffs: Vec<f64> = (0..self.n).map(|a| self.q[b * self.n + a]).collect();
                Form::one_form_f64(&coeffs)
            })
            .collect()
    }

    /// Rewrites a form given against the old coframe in the new one.
    pub fn form(&self, w: &Form) -> Result<Form> {
        if w.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: w.dim() });
        }
        let images = self.old_in_new();
        let mut out = Form::zero(self.n, w.grade());
        for (blade, c) in w.terms() {
            let mut term = Form::scalar(self.n, c);
            for i in blade.indices() {
                term = term.wedge(&images[i])?;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn frame(&self, frame: &Coframe) -> Result<Coframe> {
        if let Some(k) = frame.s_index() {
            for j in 0..self.n {
                let expect = if j == k { 1.0 } else { 0.0 };
                if self.p[k * self.n + j] != expect || self.p[j * self.n + k] != expect {
                    return Err(Error::Domain("frame change must fix the ds slot"));
                }
            }
        }
        let mut structure = Vec::with_capacity(self.n);
        for a in 0..self.n {
            let mut d = Form::zero(self.n, 2);
            for b in 0..self.n {
                let pab = self.p[a * self.n + b];
                if pab != 0.0 {
                    d = &d + &frame.d_basis(b).scale(Jet::constant(pab));
                }
            }
            structure.push(self.form(&d)?);
        }
        Coframe::new(frame.labels().to_vec(), structure, frame.s_index())
    }

    /// `ĝ = Qᵀ g Q`.
    pub fn metric(&self, g: &MetricTensor) -> Result<MetricTensor> {
        let n = self.n;
        let mut out = JetMatrix::zeros(n);
        for a in 0..n {
            for d in 0..n {
                let mut acc = Jet::ZERO;
                for b in 0..n {
                    for c in 0..n {
                        acc += g.gram()[(b, c)].scale(self.q[b * n + a] * self.q[c * n + d]);
                    }
                }
                out[(a, d)] = acc;
            }
        }
        // symmetrise away rounding before validation
        for a in 0..n {
            for d in a + 1..n {
                let m = (out[(a, d)] + out[(d, a)]).scale(0.5);
                out[(a, d)] = m;
                out[(d, a)] = m;
            }
        }
        MetricTensor::new(out)
    }

    /// Vector components transform with `P`.
    pub fn vector(&self, x: &Vector) -> Vector {
        let n = self.n;
        Vector::new(
            (0..n)
                .map(|a| (0..n).fold(Jet::ZERO, |acc, b| acc + x[b].scale(self.p[a * n + b])))
                .collect(),
        )
    }
}
