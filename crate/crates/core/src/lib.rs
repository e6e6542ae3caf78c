//! Numerical companion for moments of GL(2) L-functions over number fields.
//!
//! The crate is organised bottom-up: [`numerics`] supplies special functions and
//! quadrature, [`fields`] the number-field and Hecke-character data, and the
//! remaining modules build the archimedean kernels, local factors, Poincare
//! series, p-adic norm integrals and moment experiments on top of them.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::too_many_arguments)]

pub mod error;
pub mod fields;
pub mod kernels;
pub mod moments;
pub mod numerics;
pub mod padic_norms;
pub mod parse;
pub mod poincare;
pub mod verify;
pub mod whittaker;

pub use error::{Error, Result};
pub use numerics::ComplexValue;
