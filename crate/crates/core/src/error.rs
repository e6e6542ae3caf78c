use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("{function}: argument outside the domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("{function}: result at {at} is not representable as f64")]
    Range { function: &'static str, at: String },

    #[error("{function}: quadrature did not converge (estimate {estimate}, error {error:.3e})")]
    Quadrature {
        function: &'static str,
        estimate: Complex64,
        error: f64,
    },

    #[error("{function}: series diverges ({detail})")]
    Divergence { function: &'static str, detail: String },

    #[error("unit matrix is ill-conditioned (relative determinant {0:.3e})")]
    IllConditioned(f64),

    #[error("invalid field data: {0}")]
    InvalidField(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("character evaluated at zero")]
    ZeroArgument,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pole(function: &'static str, at: impl std::fmt::Display) -> Self {
        Error::Pole {
            function,
            at: at.to_string(),
        }
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for errors that come from numerical breakdown rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Range { .. } | Error::Quadrature { .. } | Error::Divergence { .. } | Error::IllConditioned(_)
        )
    }
}
