//! First-order jets in the level parameter `s`.

use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// A value together with its derivative with respect to `s`.
///
/// Arithmetic follows the usual forward-mode rules, so any coefficient built
/// from jets carries an exact `d/ds` channel that the exterior derivative
/// turns into a `ds ∧ …` term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub dds: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { val: 0.0, dds: 0.0 };
    pub const ONE: Jet = Jet { val: 1.0, dds: 0.0 };

    pub const fn new(val: f64, dds: f64) -> Self {
        Jet { val, dds }
    }

    /// An `s`-independent value.
    pub const fn constant(val: f64) -> Self {
        Jet { val, dds: 0.0 }
    }

    /// The level parameter itself, `s ↦ (s, 1)`.
    pub const fn variable(s: f64) -> Self {
        Jet { val: s, dds: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.val == 0.0 && self.dds == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite() && self.dds.is_finite()
    }

    pub fn abs_val(&self) -> f64 {
        libm::fabs(self.val)
    }

    pub fn recip(self) -> Result<Self> {
        Jet::ONE.try_div(self)
    }

    pub fn try_div(self, rhs: Jet) -> Result<Self> {
        if rhs.val == 0.0 {
            return Err(Error::Domain("division by a jet with zero value"));
        }
        Ok(self / rhs)
    }

    /// `self^p`, defined for positive values.
    pub fn powf(self, p: f64) -> Result<Self> {
        if !(self.val > 0.0) {
            return Err(Error::Domain("real power of a non-positive jet"));
        }
        let v = libm::pow(self.val, p);
        Ok(Jet::new(v, p * libm::pow(self.val, p - 1.0) * self.dds))
    }

    pub fn sqrt(self) -> Result<Self> {
        if !(self.val > 0.0) {
            return Err(Error::Domain("square root of a non-positive jet"));
        }
        let r = libm::sqrt(self.val);
        Ok(Jet::new(r, 0.5 * self.dds / r))
    }

    pub fn cbrt(self) -> Result<Self> {
        if self.val == 0.0 {
            return Err(Error::Domain("cube root at zero has no derivative"));
        }
        let r = libm::cbrt(self.val);
        Ok(Jet::new(r, self.dds / (3.0 * r * r)))
    }

    pub fn scale(self, c: f64) -> Self {
        Jet::new(c * self.val, c * self.dds)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.val + rhs.val, self.dds + rhs.dds)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.val - rhs.val, self.dds - rhs.dds)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(self.val * rhs.val, self.val * rhs.dds + self.dds * rhs.val)
    }
}

/// Quotient rule. Division by a zero value yields non-finite components; use
/// [`Jet::try_div`] where that must be an error.
impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let q = self.val / rhs.val;
        Jet::new(q, (self.dds - q * rhs.dds) / rhs.val)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.val, -self.dds)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        Jet::new(self.val + rhs, self.dds)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        Jet::new(self.val - rhs, self.dds)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        Jet::new(self.val / rhs, self.dds / rhs)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}
