//! Complex gamma and log-gamma.
//!
//! Lanczos (g = 7, nine terms) in the moderate range, the Stirling series once
//! |Im z| exceeds [`STIRLING_SWITCH`], and reflection for Re z < 1/2.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{c, check_finite};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Above this imaginary part the Stirling series replaces Lanczos.
pub const STIRLING_SWITCH: f64 = 30.0;

/// B_{2k} / (2k (2k - 1)) for k = 1..12.
const STIRLING: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
    77_683.0 / 5796.0,
    -236_364_091.0 / 1_506_960.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// sin(pi x) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    let k = (2.0 * r).round();
    let f = r - k / 2.0;
    let (s, co) = (PI * f).sin_cos();
    match k as i64 % 4 {
        0 => s,
        1 => co,
        2 => -s,
        _ => -co,
    }
}

/// cos(pi x) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    let k = (2.0 * r).round();
    let f = r - k / 2.0;
    let (s, co) = (PI * f).sin_cos();
    match k as i64 % 4 {
        0 => co,
        1 => -s,
        2 => -co,
        _ => s,
    }
}

/// sin(pi z) for complex z.
pub fn sin_pi_complex(z: Complex64) -> Complex64 {
    let (sh, ch) = ((PI * z.im).sinh(), (PI * z.im).cosh());
    c(sin_pi(z.re) * ch, cos_pi(z.re) * sh)
}

/// A logarithm of sin(pi z), stable for large |Im z|. The branch is arbitrary.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 10.0 {
        return sin_pi_complex(z).ln();
    }
    let xr = z.re - 2.0 * (z.re / 2.0).floor();
    let zr = c(xr, z.im);
    let i = Complex64::i();
    if z.im > 0.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z})
        let small = (2.0 * PI * i * zr).exp();
        c(0.5f64.ln(), PI / 2.0) - i * PI * zr + (Complex64::new(1.0, 0.0) - small).ln()
    } else {
        let small = (-2.0 * PI * i * zr).exp();
        c(0.5f64.ln(), -PI / 2.0) + i * PI * zr + (Complex64::new(1.0, 0.0) - small).ln()
    }
}

/// Log-gamma by the Lanczos approximation, valid for Re z >= 1/2.
pub fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let zz = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, &ck) in LANCZOS.iter().enumerate().skip(1) {
        x += ck / (zz + k as f64);
    }
    let t = zz + LANCZOS_G + 0.5;
    HALF_LN_2PI + (zz + 0.5) * t.ln() - t + x.ln()
}

/// Log-gamma by the Stirling series, with the magnitude of the first omitted term.
///
/// Intended for |z| >= 15 with Re z >= 0.
pub fn ln_gamma_stirling(z: Complex64) -> (Complex64, f64) {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = inv;
    let mut last = f64::INFINITY;
    for &b in STIRLING.iter() {
        let term = b * p;
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        last = mag;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        p *= inv2;
    }
    ((z - 0.5) * z.ln() - z + HALF_LN_2PI + sum, last)
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    if z.im.abs() > STIRLING_SWITCH {
        ln_gamma_stirling(z).0
    } else {
        ln_gamma_lanczos(z)
    }
}

/// Principal branch of log Gamma on Re z > 0, continuous along vertical lines.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("log_gamma", format!("non-finite argument {z}")));
    }
    if z.re <= 0.0 {
        return Err(Error::domain("log_gamma", format!("Re z <= 0 at {z}")));
    }
    let v = if z.re < 0.5 {
        ln_gamma_right(z + 1.0) - z.ln()
    } else {
        ln_gamma_right(z)
    };
    check_finite("log_gamma", z, v)
}

/// log Gamma for any z off the poles; the imaginary part is only defined mod 2 pi.
pub fn ln_gamma_any(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("gamma", format!("non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::pole("gamma", z));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        Ok(PI.ln() - ln_sin_pi(z) - ln_gamma_right(one_minus))
    } else {
        Ok(ln_gamma_right(z))
    }
}

/// The complex gamma function.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    let l = ln_gamma_any(z)?;
    if l.re > 709.0 || l.re < -708.0 {
        return Err(Error::Range {
            function: "gamma",
            at: z.to_string(),
        });
    }
    if z.im == 0.0 && z.re > 0.0 && z.re <= 171.0 {
        return Ok(Complex64::new(l.re.exp(), 0.0));
    }
    if z.im == 0.0 {
        // real negative argument: sign from sin(pi z)
        let sign = if sin_pi(z.re) < 0.0 { -1.0 } else { 1.0 };
        return Ok(Complex64::new(sign * l.re.exp(), 0.0));
    }
    check_finite("gamma", z, l.exp())
}

/// Product of gamma values over `num` divided by the product over `den`, evaluated in log space.
pub fn gamma_ratio(function: &'static str, num: &[Complex64], den: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for &z in num {
        if is_nonpositive_integer(z) {
            return Err(Error::pole(function, format!("Gamma({z})")));
        }
        acc += ln_gamma_any(z)?;
        if z.im == 0.0 && z.re < 0.0 && sin_pi(z.re) < 0.0 {
            sign = -sign;
        }
    }
    for &z in den {
        if is_nonpositive_integer(z) {
            // 1/Gamma vanishes at its poles
            return Ok(Complex64::new(0.0, 0.0));
        }
        acc -= ln_gamma_any(z)?;
        if z.im == 0.0 && z.re < 0.0 && sin_pi(z.re) < 0.0 {
            sign = -sign;
        }
    }
    if acc.re > 709.0 {
        return Err(Error::Range {
            function,
            at: format!("{num:?}/{den:?}"),
        });
    }
    let all_real = num.iter().chain(den).all(|z| z.im == 0.0);
    let v = if all_real {
        Complex64::new(sign * acc.re.exp(), 0.0)
    } else {
        acc.exp()
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn factorials() {
        let mut f = 1.0;
        for n in 1..20 {
            let g = gamma(c(n as f64, 0.0)).unwrap();
            assert!((g.re - f).abs() / f < 1e-13, "n={n}");
            f *= n as f64;
        }
        assert_eq!(gamma(c(1.0, 0.0)).unwrap().re, 1.0);
        assert!((gamma(c(5.0, 0.0)).unwrap().re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn half_integer_by_quadrature() {
        // Gamma(1/2) = 2 * integral of exp(-u^2) over (0, inf)
        let n = 200_000;
        let h = 12.0 / n as f64;
        let s: f64 = (0..=n)
            .map(|k| {
                let u = k as f64 * h;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * (-u * u).exp()
            })
            .sum();
        let quad = 2.0 * s * h;
        let g = gamma(c(0.5, 0.0)).unwrap().re;
        assert!((g - quad).abs() < 1e-12);
        assert!((g - 1.772_453_850_905_516).abs() < 1e-14);
    }

    #[test]
    fn poles_and_domain() {
        assert!(matches!(gamma(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(gamma(c(-3.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(gamma(c(200.0, 0.0)), Err(Error::Range { .. })));
        assert!(matches!(log_gamma(c(0.0, 1.0)), Err(Error::Domain { .. })));
        assert!(gamma(c(-2.5, 0.0)).unwrap().re < 0.0);
    }

    #[test]
    fn log_gamma_small_integers() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn log_gamma_against_shifted_stirling() {
        // independent route: shift up by 40 and divide out the Pochhammer product
        let z = c(10.0, 100.0);
        let mut shifted = z;
        let mut logp = Complex64::new(0.0, 0.0);
        for _ in 0..40 {
            logp += shifted.ln();
            shifted += 1.0;
        }
        let (big, err) = ln_gamma_stirling(shifted);
        let oracle = big - logp;
        let v = log_gamma(z).unwrap();
        assert!(err < 1e-20);
        // compare the real part and the phase mod 2 pi
        assert!((v.re - oracle.re).abs() < 1e-10 * v.norm());
        let dphi = (v.im - oracle.im) / (2.0 * PI);
        assert!((dphi - dphi.round()).abs() * 2.0 * PI < 1e-10 * v.norm());
    }

    #[test]
    fn switch_point_agreement() {
        for &x in &[0.5, 1.0, 3.7, 10.0, 25.0, 49.0] {
            for &y in &[STIRLING_SWITCH, -STIRLING_SWITCH, 45.0] {
                let z = c(x, y);
                let a = ln_gamma_lanczos(z);
                let b = ln_gamma_stirling(z).0;
                assert!((a - b).norm() < 1e-11 * a.norm().max(1.0), "z={z}");
            }
        }
    }

    #[test]
    fn continuity_on_vertical_line() {
        let mut prev = log_gamma(c(0.25, 0.0)).unwrap();
        for k in 1..4000 {
            let z = c(0.25, k as f64 * 0.05);
            let v = log_gamma(z).unwrap();
            assert!((v - prev).norm() < 0.5, "jump at {z}");
            prev = v;
        }
    }

    #[test]
    fn exp_log_gamma_matches_gamma() {
        for &z in &[c(0.3, 0.2), c(4.5, -7.0), c(20.0, 31.0), c(2.0, 150.0)] {
            let a = log_gamma(z).unwrap().exp();
            let b = gamma(z).unwrap();
            assert!(rel(a, b) < 1e-10, "z={z}");
        }
    }

    #[test]
    fn reflection_at_large_imaginary_part() {
        let z = c(-3.3, 120.0);
        let lhs = gamma(z).unwrap() * gamma(Complex64::new(1.0, 0.0) - z).unwrap();
        let rhs = (PI.ln() - ln_sin_pi(z)).exp();
        assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn sin_pi_exact_zeros() {
        for n in -10..10 {
            assert_eq!(sin_pi(n as f64), 0.0);
            assert_eq!(cos_pi(n as f64 + 0.5), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
    }
}
