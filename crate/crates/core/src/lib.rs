//! Numerical engine for nearly Kähler six-manifolds with two-torus symmetry.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`jet`] — value/first-derivative pairs carrying the dependence on the
//!   level parameter `s`.
//! * [`exterior`] — forms over a fixed coframe with structure constants:
//!   wedge, contraction, exterior derivative, Hodge star, musical maps.
//! * [`su3`] — SU(3)-structures, compatibility and nearly Kähler residuals,
//!   the multi-moment map and the Laplace eigenvalue check.
//! * [`reduction`] — torus reduction to three-dimensional data and the
//!   reassembly of six-dimensional structures from it.
//! * [`evolution`] — the first-order flow in `s` that rebuilds a nearly
//!   Kähler structure from data on a three-dimensional Lie group.
//! * [`heisenberg`] — the left-invariant solution on the Heisenberg group in
//!   closed form, used as the reference solution throughout.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod evolution;
pub mod exterior;
pub mod heisenberg;
pub mod jet;
pub mod ode;
pub mod reduction;
pub mod su3;

pub use error::{Error, Result};
pub use exterior::{Blade, Coframe, Form, MetricTensor, Vector};
pub use jet::Jet;
pub use su3::{Residual, SU3Structure, TorusAction};

