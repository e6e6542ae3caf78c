//! Complex special functions and quadrature engines.

mod bessel;
pub mod fit;
mod gamma;
pub mod quadrature;
mod zeta;

pub use bessel::{bessel_j, bessel_k, bessel_k_with, BesselKFixedOrder};
pub use gamma::{
    cos_pi, gamma, gamma_ratio, ln_gamma_any, ln_gamma_lanczos, ln_gamma_stirling, ln_sin_pi, log_gamma, sin_pi,
    sin_pi_complex, STIRLING_SWITCH,
};
pub use quadrature::{
    integrate_finite, integrate_halfline, integrate_vertical_line, Decay, GaussLegendre, QuadResult, QuadratureSpec,
};
pub use fit::{linear_fit, polyfit};
pub use zeta::{zeta, zeta_with_error};

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type ComplexValue = num_complex::Complex64;

/// Shorthand constructor.
#[inline]
pub fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

/// Real number as a complex value.
#[inline]
pub fn r(re: f64) -> ComplexValue {
    ComplexValue::new(re, 0.0)
}

pub(crate) fn check_finite(function: &'static str, at: ComplexValue, v: ComplexValue) -> Result<ComplexValue> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range {
            function,
            at: at.to_string(),
        })
    }
}
