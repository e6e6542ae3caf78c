//! Field-description files.
//!
//! A field file is a TOML document:
//!
//! ```toml
//! name = "Q(sqrt 5)"          # optional
//! r1 = 2
//! r2 = 0
//! abs_discriminant = 5
//! roots_of_unity = 2
//! zeta_residue = 0.43040894096400403   # 2 log(golden ratio) / sqrt 5
//! unit_logs = [[0.48121182505960347, -0.48121182505960347]]
//! unit_args = [[]]            # optional, args of each unit at the complex places
//! root_exponents = []         # optional, defaults to 1 at every complex place
//! ```
//!
//! Unknown keys are rejected and the result is validated before it is returned.

use serde::Deserialize;

use super::NumberField;
use crate::error::{Error, Result};

/// Raw file contents before defaults and validation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub name: Option<String>,
    pub r1: usize,
    pub r2: usize,
    pub abs_discriminant: u64,
    pub unit_logs: Vec<Vec<f64>>,
    pub roots_of_unity: u32,
    pub zeta_residue: f64,
    pub unit_args: Option<Vec<Vec<f64>>>,
    pub root_exponents: Option<Vec<i64>>,
}

const MAX_PLACES: usize = 64;

/// Parse and validate a field description.
pub fn parse_field_toml(text: &str) -> Result<NumberField> {
    let raw: FieldFile = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
    if raw.r1 > MAX_PLACES || raw.r2 > MAX_PLACES {
        return Err(Error::InvalidField(format!("at most {MAX_PLACES} places of each kind are supported")));
    }
    let units = raw.unit_logs.len();
    let unit_args = match raw.unit_args {
        Some(a) => a,
        None => vec![vec![0.0; raw.r2]; units],
    };
    let root_exponents = raw.root_exponents.unwrap_or_else(|| vec![1; raw.r2]);
    let field = NumberField {
        name: raw.name.unwrap_or_else(|| format!("field(r1={}, r2={}, D={})", raw.r1, raw.r2, raw.abs_discriminant)),
        r1: raw.r1,
        r2: raw.r2,
        abs_discriminant: raw.abs_discriminant,
        unit_logs: raw.unit_logs,
        unit_args,
        roots_of_unity: raw.roots_of_unity,
        root_exponents,
        zeta_residue: raw.zeta_residue,
    };
    field.validate()?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{builtin_field, BuiltinField};

    const SQRT2: &str = r#"
name = "Q_sqrt2"
r1 = 2
r2 = 0
abs_discriminant = 8
roots_of_unity = 2
zeta_residue = 0.6232252401402305
unit_logs = [[0.881373587019543, -0.881373587019543]]
"#;

    #[test]
    fn round_trip_against_builtin() {
        let f = parse_field_toml(SQRT2).unwrap();
        let b = builtin_field(BuiltinField::QSqrt2);
        assert_eq!(f.r1, b.r1);
        assert!((f.unit_logs[0][0] - b.unit_logs[0][0]).abs() < 1e-14);
        assert_eq!(f.unit_args, vec![Vec::<f64>::new()]);
    }

    #[test]
    fn gaussian_defaults() {
        let f = parse_field_toml(
            "r1 = 0\nr2 = 1\nabs_discriminant = 4\nroots_of_unity = 4\nzeta_residue = 0.7853981633974483\nunit_logs = []\n",
        )
        .unwrap();
        assert_eq!(f.root_exponents, vec![1]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_shapes() {
        let extra = format!("{SQRT2}\nclass_number = 1\n");
        assert!(matches!(parse_field_toml(&extra), Err(Error::Parse(_))));
        let wrong = SQRT2.replace("-0.881373587019543", "0.2");
        assert!(matches!(parse_field_toml(&wrong), Err(Error::InvalidField(_))));
        assert!(parse_field_toml("r1 = 1").is_err());
        assert!(parse_field_toml("not toml at all [").is_err());
    }
}
