//! Numerical laboratory for weakly damped forced oscillators
//! `x'' + p(t)x' + ω²x = f(t)`.

// `!(a > b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asympt;
pub mod cli;
pub mod coeffs;
pub mod conditions;
pub mod error;
pub mod filters;
pub mod integrate;
pub mod ode;
pub mod quad;
pub mod resolvent;

pub use error::{LabError, Result};
