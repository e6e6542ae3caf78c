//! Riemann zeta by Euler-Maclaurin summation.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::gamma::{ln_gamma_any, ln_sin_pi};
use crate::error::{Error, Result};

const EM_TERMS: usize = 24;

/// B_{2k} / (2k)! for k = 1..=EM_TERMS + 1.
fn bernoulli_over_factorial() -> &'static [f64; EM_TERMS + 1] {
    static TABLE: OnceLock<[f64; EM_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; EM_TERMS + 1];
        t[0] = 1.0 / 12.0;
        t[1] = -1.0 / 720.0;
        t[2] = 1.0 / 30_240.0;
        for (i, slot) in t.iter_mut().enumerate().skip(3) {
            let k = (i + 1) as f64;
            // B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}
            let z2k: f64 = (1..2000).rev().map(|n| (n as f64).powf(-2.0 * k)).sum();
            let sign = if (i + 1) % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * z2k * (2.0 * PI).powf(-2.0 * k);
        }
        t
    })
}

/// zeta(s) for s != 1, |Im s| <= 1e4.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    zeta_with_error(s).map(|(v, _)| v)
}

/// zeta(s) together with the Euler-Maclaurin remainder bound.
pub fn zeta_with_error(s: Complex64) -> Result<(Complex64, f64)> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("zeta", format!("non-finite argument {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::pole("zeta", s));
    }
    if s.im.abs() > 1e4 {
        return Err(Error::domain("zeta", format!("|Im s| > 1e4 at {s}")));
    }
    if s.re < -1.0 {
        // functional equation: zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
        let one_minus = Complex64::new(1.0, 0.0) - s;
        let (z1, e1) = euler_maclaurin(one_minus);
        if s.im == 0.0 && s.re == s.re.round() && (s.re as i64) % 2 == 0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let lf = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_sin_pi(s * 0.5) + ln_gamma_any(one_minus)?;
        let f = lf.exp();
        let v = f * z1;
        return Ok((v, f.norm() * e1));
    }
    Ok(euler_maclaurin(s))
}

fn euler_maclaurin(s: Complex64) -> (Complex64, f64) {
    let b = bernoulli_over_factorial();
    let m = EM_TERMS;
    let n = (((s.norm() + 2.0 * m as f64) / PI).ceil() as usize).max(12);
    let nf = n as f64;
    let mut head = Complex64::new(0.0, 0.0);
    for k in (1..n).rev() {
        head += (-s * (k as f64).ln()).exp();
    }
    let n_pow = (-s * nf.ln()).exp();
    let mut tail = n_pow * nf / (s - 1.0) + n_pow * 0.5;
    // T_k = B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    let mut rising = s;
    let mut npow = n_pow / nf;
    let inv_n2 = 1.0 / (nf * nf);
    for (k, &bk) in b.iter().enumerate().take(m) {
        tail += rising * npow * bk;
        let j = (2 * k + 1) as f64;
        rising *= (s + j) * (s + j + 1.0);
        npow *= inv_n2;
    }
    let next = (rising * npow * b[m]).norm();
    let sigma = s.re + 2.0 * m as f64 + 1.0;
    let bound = next * (s + 2.0 * m as f64 + 1.0).norm() / sigma.max(1.0);
    (head + tail, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_values() {
        let z2 = zeta(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z6 = zeta(Complex64::new(6.0, 0.0)).unwrap();
        assert!((z6.re - PI.powi(6) / 945.0).abs() < 1e-14);
    }

    #[test]
    fn pole_and_trivial_zeros() {
        assert!(matches!(zeta(Complex64::new(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(zeta(Complex64::new(-4.0, 0.0)).unwrap().norm() < 1e-15);
        // zeta(0) = -1/2 and zeta(-1) = -1/12
        assert!((zeta(Complex64::new(0.0, 0.0)).unwrap().re + 0.5).abs() < 1e-14);
        assert!((zeta(Complex64::new(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-12);
        assert!((zeta(Complex64::new(-3.0, 0.0)).unwrap().re - 1.0 / 120.0).abs() < 1e-14);
    }

    #[test]
    fn error_bound_small() {
        let (_, e) = zeta_with_error(Complex64::new(0.5, 4000.0)).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn coefficient_table() {
        let b = bernoulli_over_factorial();
        // B_8/8! = -1/1209600, B_10/10! = 1/47900160
        assert!((b[3] * 1_209_600.0 + 1.0).abs() < 1e-14);
        assert!((b[4] * 47_900_160.0 - 1.0).abs() < 1e-14);
    }
}
