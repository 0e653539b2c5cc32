//! File formats and command-line front end for `nk-flow-core`.
//!
//! Exit codes: 0 success, 1 a residual above its threshold, 2 usage or
//! domain error, 3 integration aborted (partial output is still written).

// `!(x < bound)` is used on purpose: a NaN residual must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod source;
pub mod suite;

pub use config::{Format, RunConfig};
pub use error::{AppError, AppResult};
