//! Exterior algebra over a fixed coframe with jet-valued coefficients.
//!
//! A [`Coframe`] is an ordered basis of one-forms `e⁰ … eⁿ⁻¹` together with
//! the two-forms `d eᵏ` (structure constants stored directly as forms).
//! Every [`Form`] is a sparse map from strictly increasing index sets to
//! [`Jet`](crate::Jet) coefficients; the `dds` channel of each coefficient
//! is the `s`-derivative that [`ext_d`] turns into a `ds ∧ …` term when the
//! frame has a distinguished `ds` label.

mod blade;
mod change;
mod coframe;
mod form;
pub mod linalg;
mod metric;

pub use blade::{Blade, MAX_DIM};
pub use change::FrameChange;
pub use coframe::{check_d_squared, d_squared_defect, ext_d, ext_d_structure, Coframe};
pub use form::Form;
pub use linalg::JetMatrix;
pub use metric::{flat, hodge, sharp, MetricTensor, Vector};

use crate::error::Result;

/// `a ∧ b`.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    a.wedge(b)
}

/// Interior product `X ⨼ w`, inserting `X` into the first slot.
pub fn contract(x: &Vector, w: &Form) -> Result<Form> {
    w.contract(x)
}
