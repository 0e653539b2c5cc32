use alloc::vec::Vec;
use core::ops::Index;

use super::{Blade, Form, JetMatrix};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// A tangent vector, given by its components against the frame dual to the
/// coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    components: Vec<Jet>,
}

impl Vector {
    pub fn new(components: Vec<Jet>) -> Self {
        Vector { components }
    }

    pub fn from_values(values: &[f64]) -> Self {
        Vector { components: values.iter().map(|&v| Jet::constant(v)).collect() }
    }

    pub fn zero(dim: usize) -> Self {
        Vector { components: alloc::vec![Jet::ZERO; dim] }
    }

    /// The dual basis vector `Eᵢ`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Vector::zero(dim);
        v.components[i] = Jet::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn scale(&self, c: Jet) -> Vector {
        Vector { components: self.components.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector {
            components: self.components.iter().zip(&other.components).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max((*a - *b).abs_val()))
    }
}

impl Index<usize> for Vector {
    type Output = Jet;
    fn index(&self, i: usize) -> &Jet {
        &self.components[i]
    }
}

/// Symmetric positive-definite Gram matrix of a metric against the coframe,
/// `g = Σ g_ij eⁱ ⊗ eʲ`. The inverse is computed once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    gram: JetMatrix,
    inverse: JetMatrix,
}

impl MetricTensor {
    pub fn new(gram: JetMatrix) -> Result<Self> {
        let n = gram.n();
        let scale = gram.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in i + 1..n {
                if (gram[(i, j)] - gram[(j, i)]).abs_val() > 1e-12 * scale {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if gram.leading_minors().iter().any(|&m| !(m > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        let inverse = gram.inverse()?;
        Ok(MetricTensor { gram, inverse })
    }

    pub fn identity(dim: usize) -> Self {
        MetricTensor { gram: JetMatrix::identity(dim), inverse: JetMatrix::identity(dim) }
    }

    pub fn diagonal(entries: &[Jet]) -> Result<Self> {
        MetricTensor::new(JetMatrix::diagonal(entries))
    }

    pub fn dim(&self) -> usize {
        self.gram.n()
    }

    pub fn gram(&self) -> &JetMatrix {
        &self.gram
    }

    pub fn inverse(&self) -> &JetMatrix {
        &self.inverse
    }

    pub fn det(&self) -> Jet {
        self.gram.det()
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Jet {
        let n = self.dim();
        let mut acc = Jet::ZERO;
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc += x[i] * self.gram[(i, j)] * y[j];
            }
        }
        acc
    }

    /// Induced inner product on `k`-forms: `Σ a_I b_J det(g⁻¹[I, J])`.
    pub fn form_inner(&self, a: &Form, b: &Form) -> Result<Jet> {
        if a.grade() != b.grade() {
            return Err(Error::GradeMismatch { expected: a.grade(), found: b.grade() });
        }
        if a.dim() != self.dim() || b.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        let mut acc = Jet::ZERO;
        for (i, x) in a.terms() {
            let rows: Vec<usize> = i.indices().collect();
            for (j, y) in b.terms() {
                let cols: Vec<usize> = j.indices().collect();
                acc += x * y * self.inverse.minor_matrix(&rows, &cols).det();
            }
        }
        Ok(acc)
    }

    pub fn form_norm_sq(&self, a: &Form) -> Result<Jet> {
        self.form_inner(a, a)
    }
}

/// Hodge star relative to the top form `vol`, characterised by
/// `a ∧ ⋆w = g(a, w) vol` for every `a` of the same grade as `w`.
pub fn hodge(w: &Form, g: &MetricTensor, vol: &Form) -> Result<Form> {
    let n = g.dim();
    if w.dim() != n || vol.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.dim() });
    }
    if vol.grade() != n {
        return Err(Error::GradeMismatch { expected: n, found: vol.grade() });
    }
    let full = Blade::full(n);
    let v = vol.get(full);
    if v.val == 0.0 {
        return Err(Error::DegenerateVolume);
    }
    let k = w.grade();
    let mut out = Form::zero(n, n - k);
    let targets = Blade::all_of_grade(n, k);
    for (i, wi) in w.terms() {
        if wi.is_zero() {
            continue;
        }
        let rows: Vec<usize> = i.indices().collect();
        for &j in &targets {
            let cols: Vec<usize> = j.indices().collect();
            let minor = g.inverse().minor_matrix(&rows, &cols).det();
            if minor.is_zero() {
                continue;
            }
            let comp = j.complement(n);
            let (sign, _) = j.wedge(comp).expect("complementary blades");
            out.add_term(comp, (wi * minor * v).scale(sign));
        }
    }
    Ok(out)
}

/// `X♭ = g(X, ·)`.
pub fn flat(x: &Vector, g: &MetricTensor) -> Result<Form> {
    let n = g.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
    }
    let coeffs: Vec<Jet> = (0..n)
        .map(|j| (0..n).fold(Jet::ZERO, |acc, i| acc + x[i] * g.gram()[(i, j)]))
        .collect();
    Ok(Form::one_form(&coeffs))
}

/// `w♯`, the vector with `g(w♯, Y) = w(Y)`.
pub fn sharp(w: &Form, g: &MetricTensor) -> Result<Vector> {
    let n = g.dim();
    if w.grade() != 1 {
        return Err(Error::GradeMismatch { expected: 1, found: w.grade() });
    }
    if w.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.dim() });
    }
    let c = w.one_form_jets();
    Ok(Vector::new(
        (0..n).map(|i| (0..n).fold(Jet::ZERO, |acc, j| acc + g.inverse()[(i, j)] * c[j])).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclidean_vol(n: usize) -> Form {
        Form::monomial(n, &(0..n).collect::<Vec<_>>(), Jet::ONE).unwrap()
    }

    #[test]
    fn star_of_two_form_in_six_dimensions() {
        let g = MetricTensor::identity(6);
        let w = Form::monomial(6, &[0, 1], Jet::ONE).unwrap();
        let star = hodge(&w, &g, &euclidean_vol(6)).unwrap();
        assert_eq!(star, Form::monomial(6, &[2, 3, 4, 5], Jet::ONE).unwrap());
    }

    #[test]
    fn flat_of_basis_vector() {
        let g = MetricTensor::identity(6);
        assert_eq!(flat(&Vector::basis(6, 0), &g).unwrap(), Form::basis(6, 0));
    }

    #[test]
    fn rejects_indefinite_and_singular() {
        let bad = JetMatrix::from_f64(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert_eq!(MetricTensor::new(bad), Err(Error::NotPositiveDefinite));
        let singular = JetMatrix::from_f64(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(MetricTensor::new(singular).is_err());
        let asym = JetMatrix::from_f64(2, &[2.0, 1.0, 0.0, 2.0]).unwrap();
        assert_eq!(MetricTensor::new(asym), Err(Error::NotSymmetric));
    }

    #[test]
    fn sharp_inverts_flat_on_non_diagonal_metric() {
        let g = MetricTensor::new(JetMatrix::from_f64(3, &[2.0, 0.5, 0.1, 0.5, 1.0, -0.3, 0.1, -0.3, 3.0]).unwrap()).unwrap();
        let x = Vector::from_values(&[1.0, -2.0, 0.5]);
        let back = sharp(&flat(&x, &g).unwrap(), &g).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn degenerate_volume_is_an_error() {
        let g = MetricTensor::identity(3);
        assert_eq!(hodge(&Form::basis(3, 0), &g, &Form::zero(3, 3)), Err(Error::DegenerateVolume));
    }
}
