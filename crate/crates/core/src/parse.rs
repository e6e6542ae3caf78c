//! Parsers for command-line style arguments.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Longest grid accepted by [`parse_grid`].
pub const MAX_GRID_POINTS: usize = 1_000_000;

fn parse_real(text: &str, what: &str) -> Result<f64> {
    let t = text.trim();
    let x: f64 = t
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: cannot read {t:?} as a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{what}: {t:?} is not finite")));
    }
    Ok(x)
}

/// Reads "re,im" or a plain real number.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let mut parts = text.split(',');
    let re = parse_real(parts.next().unwrap_or(""), "real part")?;
    let im = match parts.next() {
        Some(p) => parse_real(p, "imaginary part")?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(Error::Parse(format!("complex value {text:?} has more than two parts")));
    }
    Ok(Complex64::new(re, im))
}

/// Reads "min:max:step" into the points min, min + step, ... up to max inclusive.
///
/// "min..max" means unit step and a single number gives a one-point grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    if let Some((lo, hi)) = text.split_once("..") {
        return parse_grid(&format!("{lo}:{hi}:1"));
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![parse_real(one, "grid point")?]),
        [lo, hi, step] => {
            let (lo, hi, step) = (parse_real(lo, "grid min")?, parse_real(hi, "grid max")?, parse_real(step, "grid step")?);
            if hi < lo {
                return Err(Error::Parse(format!("grid max {hi} is below min {lo}")));
            }
            if !(step > 0.0) {
                return Err(Error::Parse(format!("grid step must be positive, got {step}")));
            }
            let count = ((hi - lo) / step * (1.0 + 1e-12) + 1e-9).floor();
            if !(count < MAX_GRID_POINTS as f64) {
                return Err(Error::Parse(format!("grid has more than {MAX_GRID_POINTS} points")));
            }
            Ok((0..=count as usize).map(|k| lo + k as f64 * step).collect())
        }
        _ => Err(Error::Parse(format!("grid {text:?} is not of the form min:max:step"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex(" 3 ").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("7").unwrap(), vec![7.0]);
        assert_eq!(parse_grid("0..3").unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        assert!(parse_grid("0..1..2").is_err());
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1e300:1e-300").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}
