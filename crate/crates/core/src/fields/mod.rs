//! Number-field descriptors and unramified Hecke characters.
//!
//! Places are ordered with the r1 real places first, then the r2 complex
//! places. Field data (units, discriminant, residue) is supplied, not computed.

mod characters;
mod file;

pub use characters::{
    budget_growth_exponent, character_lattice, character_value, kappa_chi, moment_budget, sublevel_measure,
    unit_character_value, Budget, HeckeCharacter,
};
pub use file::{parse_field_toml, FieldFile};

use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Archimedean place kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PlaceType {
    Real,
    Complex,
}

impl PlaceType {
    /// Local degree d_v.
    pub fn degree(self) -> f64 {
        match self {
            PlaceType::Real => 1.0,
            PlaceType::Complex => 2.0,
        }
    }
}

impl FromStr for PlaceType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(PlaceType::Real),
            "complex" | "c" => Ok(PlaceType::Complex),
            other => Err(Error::Parse(format!("unknown place type '{other}' (expected real or complex)"))),
        }
    }
}

impl fmt::Display for PlaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaceType::Real => "real",
            PlaceType::Complex => "complex",
        })
    }
}

/// Archimedean signature, discriminant and unit data of a number field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumberField {
    pub name: String,
    pub r1: usize,
    pub r2: usize,
    pub abs_discriminant: u64,
    /// One vector per fundamental unit: d_v log|e|_v over the archimedean places.
    pub unit_logs: Vec<Vec<f64>>,
    /// One vector per fundamental unit: arg of e at each complex place.
    pub unit_args: Vec<Vec<f64>>,
    pub roots_of_unity: u32,
    /// Exponent a_v with zeta_w -> exp(2 pi i a_v / w) at each complex place.
    pub root_exponents: Vec<i64>,
    pub zeta_residue: f64,
}

/// The sample fields shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinField {
    Q,
    QI,
    QSqrt2,
}

impl FromStr for BuiltinField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Q" | "q" => Ok(BuiltinField::Q),
            "Q_i" | "Q(i)" | "qi" => Ok(BuiltinField::QI),
            "Q_sqrt2" | "Q(sqrt2)" | "Q(sqrt 2)" => Ok(BuiltinField::QSqrt2),
            other => Err(Error::Parse(format!(
                "unknown builtin field '{other}' (expected Q, Q_i or Q_sqrt2)"
            ))),
        }
    }
}

/// Validated data for a built-in field.
pub fn builtin_field(which: BuiltinField) -> NumberField {
    let f = match which {
        BuiltinField::Q => NumberField {
            name: "Q".into(),
            r1: 1,
            r2: 0,
            abs_discriminant: 1,
            unit_logs: vec![],
            unit_args: vec![],
            roots_of_unity: 2,
            root_exponents: vec![],
            zeta_residue: 1.0,
        },
        BuiltinField::QI => NumberField {
            name: "Q_i".into(),
            r1: 0,
            r2: 1,
            abs_discriminant: 4,
            unit_logs: vec![],
            unit_args: vec![],
            roots_of_unity: 4,
            root_exponents: vec![1],
            zeta_residue: PI / 4.0,
        },
        BuiltinField::QSqrt2 => {
            let l = (1.0 + SQRT_2).ln();
            NumberField {
                name: "Q_sqrt2".into(),
                r1: 2,
                r2: 0,
                abs_discriminant: 8,
                unit_logs: vec![vec![l, -l]],
                unit_args: vec![vec![]],
                roots_of_unity: 2,
                root_exponents: vec![],
                zeta_residue: l / SQRT_2,
            }
        }
    };
    f.validate().expect("builtin field data is valid");
    f
}

impl NumberField {
    pub fn degree(&self) -> usize {
        self.r1 + 2 * self.r2
    }

    pub fn place_count(&self) -> usize {
        self.r1 + self.r2
    }

    pub fn unit_rank(&self) -> usize {
        self.place_count().saturating_sub(1)
    }

    pub fn place_type(&self, index: usize) -> PlaceType {
        if index < self.r1 {
            PlaceType::Real
        } else {
            PlaceType::Complex
        }
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceType> + '_ {
        (0..self.place_count()).map(|i| self.place_type(i))
    }

    /// Order of the Dedekind zeta pole structure r1 + r2 + 1 entering the leading term.
    pub fn pole_order(&self) -> usize {
        self.r1 + self.r2 + 1
    }

    /// Check every structural invariant of the descriptor.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidField(m));
        if self.degree() < 1 {
            return bad("degree r1 + 2 r2 must be at least 1".into());
        }
        if self.abs_discriminant < 1 {
            return bad("abs_discriminant must be a positive integer".into());
        }
        if self.roots_of_unity < 1 {
            return bad("roots_of_unity must be positive".into());
        }
        if self.r1 > 0 && self.roots_of_unity != 2 {
            return bad(format!(
                "a field with a real place has exactly 2 roots of unity, got {}",
                self.roots_of_unity
            ));
        }
        if self.r1 == 0 && self.roots_of_unity % 2 != 0 {
            return bad(format!("roots_of_unity must be even, got {}", self.roots_of_unity));
        }
        if !(self.zeta_residue > 0.0 && self.zeta_residue.is_finite()) {
            return bad(format!("zeta_residue must be a positive real, got {}", self.zeta_residue));
        }
        let places = self.place_count();
        if self.unit_logs.len() != self.unit_rank() {
            return bad(format!(
                "expected {} unit vectors (Dirichlet rank), got {}",
                self.unit_rank(),
                self.unit_logs.len()
            ));
        }
        for (j, u) in self.unit_logs.iter().enumerate() {
            if u.len() != places {
                return bad(format!("unit {j} has {} components, expected {places}", u.len()));
            }
            if u.iter().any(|x| !x.is_finite()) {
                return bad(format!("unit {j} has non-finite components"));
            }
            let scale: f64 = u.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            let sum: f64 = u.iter().sum();
            if sum.abs() > 1e-9 * scale {
                return bad(format!("unit {j} log vector sums to {sum:e}, not 0"));
            }
            if scale <= 1.0 && u.iter().all(|x| x.abs() < 1e-12) {
                return bad(format!("unit {j} is torsion (all logs vanish)"));
            }
        }
        if self.unit_args.len() != self.unit_logs.len() {
            return bad(format!(
                "unit_args has {} rows, expected {}",
                self.unit_args.len(),
                self.unit_logs.len()
            ));
        }
        for (j, a) in self.unit_args.iter().enumerate() {
            if a.len() != self.r2 && !(self.r2 == 0 && a.is_empty()) {
                return bad(format!("unit_args row {j} has {} entries, expected r2 = {}", a.len(), self.r2));
            }
            if a.iter().any(|x| !x.is_finite()) {
                return bad(format!("unit_args row {j} has non-finite entries"));
            }
        }
        if self.root_exponents.len() != self.r2 {
            return bad(format!(
                "root_exponents has {} entries, expected r2 = {}",
                self.root_exponents.len(),
                self.r2
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let q = builtin_field(BuiltinField::Q);
        assert_eq!(q.pole_order(), 2);
        let qi = builtin_field(BuiltinField::QI);
        assert!((qi.zeta_residue - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        // class number formula 2 pi h / (w sqrt|D|)
        assert!((qi.zeta_residue - 2.0 * PI / (4.0 * 2.0)).abs() < 1e-15);
        let q2 = builtin_field(BuiltinField::QSqrt2);
        assert!((q2.zeta_residue - 0.623_225_240_140_230_5).abs() < 1e-14);
        // 2^{r1} h R / sqrt|D| with R = log(1 + sqrt 2)
        let reg = (1.0 + SQRT_2).ln();
        assert!((q2.zeta_residue - 4.0 * reg / (2.0 * 8f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn validation_rejects_bad_data() {
        let mut f = builtin_field(BuiltinField::QSqrt2);
        f.unit_logs[0][1] = 0.5;
        assert!(f.validate().is_err());
        let mut f = builtin_field(BuiltinField::QSqrt2);
        f.unit_logs.clear();
        f.unit_args.clear();
        assert!(f.validate().is_err());
        let mut f = builtin_field(BuiltinField::Q);
        f.roots_of_unity = 4;
        assert!(f.validate().is_err());
        let mut f = builtin_field(BuiltinField::QI);
        f.zeta_residue = -1.0;
        assert!(f.validate().is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("Q_i".parse::<BuiltinField>().unwrap(), BuiltinField::QI);
        assert!("Q_sqrt3".parse::<BuiltinField>().is_err());
        assert_eq!("complex".parse::<PlaceType>().unwrap(), PlaceType::Complex);
    }
}
