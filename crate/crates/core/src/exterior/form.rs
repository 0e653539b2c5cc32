use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use super::{Blade, Vector, MAX_DIM};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// A homogeneous differential form of fixed grade over a `dim`-dimensional
/// coframe. Only strictly increasing index tuples are stored; a missing
/// tuple means a zero coefficient.
#[derive(Clone, Debug)]
pub struct Form {
    dim: usize,
    grade: usize,
    terms: BTreeMap<Blade, Jet>,
}

impl Form {
    /// # Panics
    /// If `grade > dim` or `dim > MAX_DIM`.
    pub fn zero(dim: usize, grade: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        assert!(grade <= dim, "grade {grade} exceeds dimension {dim}");
        Form { dim, grade, terms: BTreeMap::new() }
    }

    pub fn try_zero(dim: usize, grade: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, found: dim });
        }
        if grade > dim {
            return Err(Error::GradeOverflow { grade, dim });
        }
        Ok(Form::zero(dim, grade))
    }

    pub fn scalar(dim: usize, c: Jet) -> Self {
        let mut f = Form::zero(dim, 0);
        f.add_term(Blade::EMPTY, c);
        f
    }

    /// The basis one-form `eⁱ`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dimension {dim}");
        let mut f = Form::zero(dim, 1);
        f.add_term(Blade::single(i), Jet::ONE);
        f
    }

    /// `c · e^{i₁} ∧ … ∧ e^{i_k}` for an arbitrary (not necessarily sorted)
    /// tuple.
    pub fn monomial(dim: usize, indices: &[usize], c: Jet) -> Result<Self> {
        let mut f = Form::try_zero(dim, indices.len())?;
        f.add_unsorted(indices, c)?;
        Ok(f)
    }

    /// One-form with the given coefficients against `e⁰ … eⁿ⁻¹`.
    pub fn one_form(coeffs: &[Jet]) -> Self {
        let mut f = Form::zero(coeffs.len(), 1);
        for (i, &c) in coeffs.iter().enumerate() {
            f.add_term(Blade::single(i), c);
        }
        f
    }

    pub fn one_form_f64(coeffs: &[f64]) -> Self {
        let mut f = Form::zero(coeffs.len(), 1);
        for (i, &c) in coeffs.iter().enumerate() {
            f.add_term(Blade::single(i), Jet::constant(c));
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, Jet)> + '_ {
        self.terms.iter().map(|(&b, &c)| (b, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates `c` onto the coefficient of `blade`.
    ///
    /// # Panics
    /// If the blade has the wrong grade or lies outside the frame.
    pub fn add_term(&mut self, blade: Blade, c: Jet) {
        assert_eq!(blade.grade(), self.grade, "blade grade mismatch");
        assert!(
            blade.max_index().is_none_or(|m| m < self.dim),
            "blade {blade:?} outside dimension {}",
            self.dim
        );
        *self.terms.entry(blade).or_insert(Jet::ZERO) += c;
    }

    /// Accumulates `c · e^{indices}` where the tuple may be unsorted.
    pub fn add_unsorted(&mut self, indices: &[usize], c: Jet) -> Result<()> {
        if indices.len() != self.grade {
            return Err(Error::GradeMismatch { expected: self.grade, found: indices.len() });
        }
        if indices.iter().any(|&i| i >= self.dim) {
            return Err(Error::InvalidIndex);
        }
        if let Some((sign, blade)) = Blade::from_unsorted(indices)? {
            self.add_term(blade, c.scale(sign));
        }
        Ok(())
    }

    pub fn get(&self, blade: Blade) -> Jet {
        self.terms.get(&blade).copied().unwrap_or(Jet::ZERO)
    }

    /// Coefficient on an arbitrary tuple, with the sign of its sorting
    /// permutation; zero if an index repeats.
    pub fn coeff(&self, indices: &[usize]) -> Jet {
        match Blade::from_unsorted(indices) {
            Ok(Some((sign, blade))) if blade.grade() == self.grade => self.get(blade).scale(sign),
            _ => Jet::ZERO,
        }
    }

    /// Value of a 0-form.
    pub fn scalar_value(&self) -> Jet {
        debug_assert_eq!(self.grade, 0);
        self.get(Blade::EMPTY)
    }

    pub fn scale(&self, c: Jet) -> Form {
        Form {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(&b, &v)| (b, v * c)).collect(),
        }
    }

    pub fn scale_f64(&self, c: f64) -> Form {
        self.scale(Jet::constant(c))
    }

    /// Drops the `s`-derivative channel of every coefficient.
    pub fn values_only(&self) -> Form {
        Form {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(&b, &v)| (b, Jet::constant(v.val))).collect(),
        }
    }

    fn check_compatible(&self, other: &Form) {
        assert_eq!(self.dim, other.dim, "forms live on frames of different dimension");
        assert_eq!(self.grade, other.grade, "cannot add forms of different grade");
    }

    /// Largest absolute coefficient value (the `dds` channel is ignored).
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs_val()))
    }

    /// Largest absolute `s`-derivative.
    pub fn max_abs_dds(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(libm::fabs(c.dds)))
    }

    pub fn max_abs_diff(&self, other: &Form) -> f64 {
        (self - other).max_abs()
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let grade = self.grade + other.grade;
        if grade > self.dim {
            return Err(Error::GradeOverflow { grade, dim: self.dim });
        }
        let mut out = Form::zero(self.dim, grade);
        for (&a, &x) in &self.terms {
            for (&b, &y) in &other.terms {
                if let Some((sign, c)) = a.wedge(b) {
                    out.add_term(c, (x * y).scale(sign));
                }
            }
        }
        Ok(out)
    }

    /// `X ⨼ self`, i.e. `(X ⨼ w)(Y, …) = w(X, Y, …)`.
    pub fn contract(&self, x: &Vector) -> Result<Form> {
        if self.grade == 0 {
            return Err(Error::ContractGradeZero);
        }
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let mut out = Form::zero(self.dim, self.grade - 1);
        for (&blade, &c) in &self.terms {
            for i in blade.indices() {
                let xi = x[i];
                if xi.is_zero() {
                    continue;
                }
                let (sign, rest) = blade.remove(i).expect("index present");
                out.add_term(rest, (c * xi).scale(sign));
            }
        }
        Ok(out)
    }

    /// Evaluates the form on `grade` vectors: `w(X₁, …, X_k)`.
    pub fn eval(&self, vectors: &[&Vector]) -> Result<Jet> {
        if vectors.len() != self.grade {
            return Err(Error::GradeMismatch { expected: self.grade, found: vectors.len() });
        }
        let mut w = self.clone();
        for x in vectors {
            w = w.contract(x)?;
        }
        Ok(w.scalar_value())
    }

    /// Embeds the form into a larger frame, sending index `i` to `i + offset`.
    pub fn lift(&self, dim: usize, offset: usize) -> Result<Form> {
        if self.dim + offset > dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim + offset });
        }
        let mut out = Form::try_zero(dim, self.grade)?;
        for (&b, &c) in &self.terms {
            out.add_term(Blade::from_bits(b.bits() << offset), c);
        }
        Ok(out)
    }

    /// Restricts to the indices `offset .. offset + dim`, dropping every term
    /// that involves other indices.
    pub fn restrict(&self, dim: usize, offset: usize) -> Result<Form> {
        let mut out = Form::try_zero(dim, self.grade)?;
        let window = Blade::full(dim).bits() << offset;
        for (&b, &c) in &self.terms {
            if b.bits() & !window == 0 {
                out.add_term(Blade::from_bits(b.bits() >> offset), c);
            }
        }
        Ok(out)
    }

    /// Coefficient values of a one-form as a dense vector.
    pub fn one_form_values(&self) -> Vec<f64> {
        debug_assert_eq!(self.grade, 1);
        (0..self.dim).map(|i| self.get(Blade::single(i)).val).collect()
    }

    pub fn one_form_jets(&self) -> Vec<Jet> {
        debug_assert_eq!(self.grade, 1);
        (0..self.dim).map(|i| self.get(Blade::single(i))).collect()
    }

    /// Removes coefficients whose value and derivative are both exactly 0.
    pub fn pruned(mut self) -> Form {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }
}

/// Exact comparison; a stored zero equals an absent term.
impl PartialEq for Form {
    fn eq(&self, other: &Form) -> bool {
        self.dim == other.dim
            && self.grade == other.grade
            && self.terms.keys().chain(other.terms.keys()).all(|&b| self.get(b) == other.get(b))
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (&b, &c) in &rhs.terms {
            out.add_term(b, c);
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (&b, &c) in &rhs.terms {
            out.add_term(b, -c);
        }
        out
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale_f64(-1.0)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Form {
        Form::basis(6, i)
    }

    #[test]
    fn antisymmetry_of_basis_wedge() {
        let w = e(1).wedge(&e(2)).unwrap();
        assert_eq!(w.coeff(&[1, 2]).val, 1.0);
        assert_eq!(w.coeff(&[2, 1]).val, -1.0);
        let v = e(2).wedge(&e(1)).unwrap();
        assert_eq!(v.coeff(&[1, 2]).val, -1.0);
    }

    #[test]
    fn repeated_index_vanishes() {
        let a = e(1).wedge(&e(2)).unwrap();
        let b = e(1).wedge(&e(3)).unwrap();
        assert_eq!(a.wedge(&b).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn grade_overflow_is_rejected() {
        let top = Form::monomial(3, &[0, 1, 2], Jet::ONE).unwrap();
        let one = Form::basis(3, 0);
        assert_eq!(top.wedge(&one), Err(Error::GradeOverflow { grade: 4, dim: 3 }));
        assert!(Form::try_zero(3, 4).is_err());
    }

    #[test]
    fn contraction_basics() {
        let x = Vector::basis(6, 1);
        let w = e(1).wedge(&e(2)).unwrap();
        assert_eq!(w.contract(&x).unwrap(), Form::basis(6, 2));
        assert_eq!(Form::scalar(6, Jet::ONE).contract(&x), Err(Error::ContractGradeZero));
    }

    #[test]
    fn double_contraction_vanishes() {
        let u = Vector::from_values(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.5]);
        let mut sigma = Form::zero(6, 2);
        for (i, j, c) in [(0, 1, 1.0), (2, 3, -0.5), (0, 5, 2.0), (1, 4, 0.25)] {
            sigma.add_unsorted(&[i, j], Jet::constant(c)).unwrap();
        }
        let uu = sigma.contract(&u).unwrap().contract(&u).unwrap();
        assert!(uu.max_abs() < 1e-15);
    }

    #[test]
    fn lift_and_restrict() {
        let a = Form::monomial(3, &[0, 2], Jet::constant(2.0)).unwrap();
        let lifted = a.lift(6, 3).unwrap();
        assert_eq!(lifted.coeff(&[3, 5]).val, 2.0);
        assert_eq!(lifted.restrict(3, 3).unwrap(), a);
    }
}
