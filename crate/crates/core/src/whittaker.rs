//! Unramified local L-factors, spherical Whittaker values and Mellin
//! transforms of Eisenstein Whittaker functions.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::PlaceType;
use crate::numerics::{bessel_k, gamma_ratio, integrate_halfline, Decay, QuadratureSpec};

const DEGENERATE_SATAKE: f64 = 1e-8;

/// Residue cardinality and Satake parameters of an unramified local representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalSatakeData {
    pub q: u64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// Set when |alpha beta| = 1 is intended (unitary central character).
    pub central_ok: bool,
}

impl LocalSatakeData {
    pub fn new(q: u64, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let d = LocalSatakeData {
            q,
            alpha,
            beta,
            central_ok: ((alpha * beta).norm() - 1.0).abs() < 1e-12,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidParameter(format!("q must be at least 2, got {}", self.q)));
        }
        if self.alpha.norm() == 0.0 || self.beta.norm() == 0.0 {
            return Err(Error::InvalidParameter("Satake parameters must be nonzero".into()));
        }
        Ok(())
    }

    /// Parameters of the complex-conjugate representation.
    pub fn conj(&self) -> Self {
        LocalSatakeData {
            alpha: self.alpha.conj(),
            beta: self.beta.conj(),
            ..*self
        }
    }
}

/// Unramified local character, described by its value on a uniformizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalCharacter {
    pub value_at_uniformizer: Complex64,
    pub unramified: bool,
}

impl LocalCharacter {
    pub fn unramified(value_at_uniformizer: Complex64) -> Self {
        LocalCharacter {
            value_at_uniformizer,
            unramified: true,
        }
    }

    pub fn trivial() -> Self {
        Self::unramified(Complex64::new(1.0, 0.0))
    }

    /// The character |.|^v, i.e. value q^{-v} at the uniformizer.
    pub fn norm_power(q: u64, v: Complex64) -> Self {
        Self::unramified((-v * (q as f64).ln()).exp())
    }

    pub fn inverse(&self) -> Self {
        Self::unramified(1.0 / self.value_at_uniformizer)
    }

    pub fn square(&self) -> Self {
        Self::unramified(self.value_at_uniformizer * self.value_at_uniformizer)
    }

    pub fn times(&self, other: &LocalCharacter) -> Self {
        Self::unramified(self.value_at_uniformizer * other.value_at_uniformizer)
    }
}

/// Norm |d| = q^{-delta} of a local different.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferentalData {
    pub d_norm: f64,
    pub exponent: u32,
}

impl DifferentalData {
    pub fn new(q: u64, exponent: u32) -> Self {
        DifferentalData {
            d_norm: (q as f64).powi(-(exponent as i32)),
            exponent,
        }
    }

    pub fn unramified() -> Self {
        DifferentalData {
            d_norm: 1.0,
            exponent: 0,
        }
    }
}

/// A truncated series together with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalSum {
    pub value: Complex64,
    pub tail_bound: f64,
}

fn q_pow(q: u64, s: Complex64) -> Complex64 {
    (-s * (q as f64).ln()).exp()
}

/// L(s, chi) = (1 - chi(pi) q^{-s})^{-1}.
pub fn local_l_factor(chi: &LocalCharacter, q: u64, s: Complex64) -> Result<Complex64> {
    let x = chi.value_at_uniformizer * q_pow(q, s);
    let d = Complex64::new(1.0, 0.0) - x;
    if d.norm() < 1e-14 {
        return Err(Error::pole("local_l_factor", format!("s = {s}, chi(pi) = {}", chi.value_at_uniformizer)));
    }
    Ok(1.0 / d)
}

/// Complete homogeneous symmetric polynomial h_m(a, b) = (a^{m+1} - b^{m+1}) / (a - b).
fn h_m(a: Complex64, b: Complex64, m: u32) -> Complex64 {
    if (a - b).norm() < DEGENERATE_SATAKE * (a.norm() + b.norm()).max(1.0) {
        let mid = 0.5 * (a + b);
        return (m as f64 + 1.0) * mid.powu(m);
    }
    (a.powu(m + 1) - b.powu(m + 1)) / (a - b)
}

/// Spherical Whittaker value W(diag(pi^m, 1)).
pub fn casselman_shalika(data: &LocalSatakeData, m: i64) -> Complex64 {
    if m < 0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = m as u32;
    (data.q as f64).powf(-0.5 * m as f64) * h_m(data.alpha, data.beta, m)
}

/// sum_{m > n} (m + 1) r^m for 0 <= r < 1.
fn linear_geometric_tail(r: f64, n: u32) -> f64 {
    let n = n as f64;
    r.powf(n + 1.0) * ((n + 2.0) - (n + 1.0) * r) / ((1.0 - r) * (1.0 - r))
}

/// Standard L-factor (1 - alpha x)^{-1} (1 - beta x)^{-1}.
pub fn standard_l_factor(data: &LocalSatakeData, x: Complex64) -> Result<Complex64> {
    let d = (1.0 - data.alpha * x) * (1.0 - data.beta * x);
    if d.norm() < 1e-14 {
        return Err(Error::pole("standard_l_factor", x));
    }
    Ok(1.0 / d)
}

fn satake_ratio(data: &LocalSatakeData, twist: Complex64) -> f64 {
    data.alpha.norm().max(data.beta.norm()) * twist.norm()
}

/// sum_{m=0}^{truncation} W(m) twist^m q^{m/2}, i.e. the Hecke integral with x = twist.
fn hecke_series(function: &'static str, data: &LocalSatakeData, twist: Complex64, truncation: u32) -> Result<LocalSum> {
    data.validate()?;
    let r = satake_ratio(data, twist);
    if !(r < 1.0) {
        return Err(Error::Divergence {
            function,
            detail: format!("max(|alpha|, |beta|) |x| = {r} >= 1"),
        });
    }
    let a = data.alpha * twist;
    let b = data.beta * twist;
    // Horner-free recursion h_{m+1} = (a + b) h_m - ab h_{m-1}
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    let mut sum = cur;
    let degenerate = (a - b).norm() < DEGENERATE_SATAKE * (a.norm() + b.norm()).max(1.0);
    for m in 1..=truncation {
        let next = if degenerate {
            h_m(a, b, m)
        } else {
            (a + b) * cur - a * b * prev
        };
        prev = cur;
        cur = next;
        sum += cur;
    }
    Ok(LocalSum {
        value: sum,
        tail_bound: linear_geometric_tail(r, truncation),
    })
}

/// sum_{m=0}^{truncation} W(m) q^{-m(s - 1/2)}.
pub fn hecke_local_integral(data: &LocalSatakeData, s: Complex64, truncation: u32) -> Result<LocalSum> {
    hecke_series("hecke_local_integral", data, q_pow(data.q, s), truncation)
}

/// Double sum over valuations realizing the local factor of the moment identity.
///
/// The twist of f1 is chi0 chi^{-1}, the one of conj(f2) is chi, both shifted by |.|^{1/2}.
pub fn local_moment_factor(
    f1: &LocalSatakeData,
    f2: &LocalSatakeData,
    chi0: &LocalCharacter,
    chi: &LocalCharacter,
    truncation: u32,
) -> Result<LocalSum> {
    if f1.q != f2.q {
        return Err(Error::InvalidParameter("both representations must live at the same place".into()));
    }
    let q = f1.q;
    let f2c = f2.conj();
    let x1 = chi0.times(&chi.inverse()).value_at_uniformizer;
    let x2 = chi.value_at_uniformizer;
    for (d, x) in [(f1, x1), (&f2c, x2)] {
        d.validate()?;
        let r = satake_ratio(d, x) * (q as f64).powf(-0.5);
        if !(r < 1.0) {
            return Err(Error::Divergence {
                function: "local_moment_factor",
                detail: format!("Euler factor ratio {r} >= 1"),
            });
        }
    }
    let n = truncation as i64;
    let w1: Vec<Complex64> = (0..=n).map(|m| casselman_shalika(f1, m) * x1.powi(m as i32)).collect();
    let w2: Vec<Complex64> = (0..=n)
        .map(|m| casselman_shalika(f2, m).conj() * x2.powi(m as i32))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for a in &w1 {
        let mut row = Complex64::new(0.0, 0.0);
        for b in &w2 {
            row += a * b;
        }
        total += row;
    }
    let sq = (q as f64).powf(-0.5);
    let r1 = satake_ratio(f1, x1) * sq;
    let r2 = satake_ratio(&f2c, x2) * sq;
    let full1 = 1.0 / ((1.0 - r1) * (1.0 - r1));
    let full2 = 1.0 / ((1.0 - r2) * (1.0 - r2));
    let t1 = linear_geometric_tail(r1, truncation);
    let t2 = linear_geometric_tail(r2, truncation);
    Ok(LocalSum {
        value: total,
        tail_bound: t1 * full2 + t2 * full1,
    })
}

/// Closed form L(chi0 chi^{-1} |.|^{1/2}, f1) L(chi |.|^{1/2}, conj f2).
pub fn local_moment_closed_form(
    f1: &LocalSatakeData,
    f2: &LocalSatakeData,
    chi0: &LocalCharacter,
    chi: &LocalCharacter,
) -> Result<Complex64> {
    let sq = (f1.q as f64).powf(-0.5);
    let x1 = chi0.times(&chi.inverse()).value_at_uniformizer * sq;
    let x2 = chi.value_at_uniformizer * sq;
    Ok(standard_l_factor(f1, x1)? * standard_l_factor(&f2.conj(), x2)?)
}

/// Closed-form local Mellin transform of the Eisenstein Whittaker function at a finite place.
pub fn finite_mellin_whittaker(
    chi: &LocalCharacter,
    q: u64,
    d: &DifferentalData,
    s: Complex64,
    v: Complex64,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let num = local_l_factor(chi, q, v + s)? * local_l_factor(&chi.inverse(), q, v + one - s)?;
    let den = local_l_factor(&chi.square(), q, 2.0 * s)?;
    let delta = d.exponent as i32;
    let diff = (d.d_norm.sqrt()) * (-(v + one - s) * d.d_norm.ln()).exp() * chi.value_at_uniformizer.powi(delta);
    Ok(diff * num / den)
}

/// Independent evaluation of the same transform from the Tate-integral presentation.
///
/// With n = val(a) and k = val(t) the integrand is supported on -n <= k <= delta,
/// so for each n the t-sum is finite; the a-sum is truncated at n = truncation.
pub fn tate_brute_force_mellin(
    chi: &LocalCharacter,
    q: u64,
    d: &DifferentalData,
    s: Complex64,
    v: Complex64,
    truncation: u32,
) -> Result<LocalSum> {
    let c = chi.value_at_uniformizer;
    let x = c * q_pow(q, v + s);
    let y = c * c * q_pow(q, 2.0 * s - 1.0);
    let z_inv = (1.0 / c) * q_pow(q, v + 1.0 - s);
    let rho = x.norm().max(z_inv.norm());
    if !(rho < 1.0) {
        return Err(Error::Divergence {
            function: "tate_brute_force_mellin",
            detail: format!("geometric ratio {rho} >= 1"),
        });
    }
    let delta = d.exponent as i64;
    let n_max = truncation as i64;
    // x^n y^k is regrouped so that no factor overflows: as z_inv^n y^(k+n) when
    // |y| <= 1 and as x^n y^delta y^(k-delta) otherwise
    let small_y = y.norm() <= 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in -delta..=n_max {
        let mut inner = Complex64::new(0.0, 0.0);
        for k in -n..=delta {
            inner += if small_y { y.powi((k + n) as i32) } else { y.powi((k - delta) as i32) };
        }
        let outer = if small_y {
            z_inv.powi(n as i32)
        } else {
            x.powi(n as i32) * y.powi(delta as i32)
        };
        sum += outer * inner;
    }
    let eta = local_l_factor(&chi.square(), q, 2.0 * s)?;
    let scale = d.d_norm.sqrt() / eta.norm();
    let growth = (x * z_inv.inv()).norm().max(1.0).powi(delta as i32);
    let nf = n_max as f64;
    let df = delta as f64;
    // terms with n > N are bounded by growth (n + delta + 1) rho^n
    let tail = growth * rho.powf(nf + 1.0) * ((nf + df + 2.0) - (nf + df + 1.0) * rho) / ((1.0 - rho) * (1.0 - rho));
    Ok(LocalSum {
        value: d.d_norm.sqrt() * sum / eta,
        tail_bound: scale * tail,
    })
}

fn normalizer(place: PlaceType, s: Complex64) -> Result<Complex64> {
    // pi^{-s} Gamma(s) or (2 pi)^{-2s} Gamma(2s)
    match place {
        PlaceType::Real => Ok(gamma_ratio("w_eis_arch", &[s], &[])? * (-s * PI.ln()).exp()),
        PlaceType::Complex => Ok(gamma_ratio("w_eis_arch", &[2.0 * s], &[])? * (-2.0 * s * (2.0 * PI).ln()).exp()),
    }
}

/// Normalized archimedean Eisenstein Whittaker value at diag(a, 1).
pub fn w_eis_arch(place: PlaceType, s: Complex64, a: f64) -> Result<Complex64> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::ZeroArgument);
    }
    let r = a.abs();
    let raw = match place {
        PlaceType::Real => 2.0 * r.sqrt() * bessel_k(s - 0.5, 2.0 * PI * r)?,
        PlaceType::Complex => 2.0 * r * bessel_k(2.0 * s - 1.0, 4.0 * PI * r)?,
    };
    Ok(raw / normalizer(place, s)?)
}

/// Gamma_R(v + s) Gamma_R(v + 1 - s) / Gamma_R(2s) or its complex analogue.
pub fn arch_mellin_closed_form(place: PlaceType, s: Complex64, v: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    match place {
        PlaceType::Real => {
            let g = gamma_ratio("arch_mellin_whittaker", &[(v + s) * 0.5, (v + one - s) * 0.5], &[s])?;
            Ok(g * ((s - v - 0.5) * PI.ln()).exp())
        }
        PlaceType::Complex => {
            let g = gamma_ratio("arch_mellin_whittaker", &[v + s, v + one - s], &[2.0 * s])?;
            Ok(g * ((2.0 * s - 2.0 * v) * (2.0 * PI).ln()).exp())
        }
    }
}

/// Mellin transform int |a|^v W(a) d^x a over the local multiplicative group, by quadrature.
///
/// The real place integrates over both signs; the complex place uses
/// d^x a = 2 dr dtheta / r, so the angular integral contributes 4 pi.
pub fn arch_mellin_whittaker(place: PlaceType, s: Complex64, v: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    let edge = (s.re - 0.5).abs() * place.degree();
    if !(v.re * place.degree() > edge - 0.5 * place.degree()) {
        return Err(Error::Divergence {
            function: "arch_mellin_whittaker",
            detail: format!("Re v = {} too small for Re s = {}", v.re, s.re),
        });
    }
    let (rate, factor, power) = match place {
        PlaceType::Real => (2.0 * PI, 2.0, 1.0),
        PlaceType::Complex => (4.0 * PI, 4.0 * PI, 2.0),
    };
    let f = |r: f64| -> Complex64 {
        match w_eis_arch(place, s, r) {
            Ok(w) => w * (v * power * r.ln()).exp() / r,
            Err(_) => Complex64::new(f64::NAN, 0.0),
        }
    };
    let res = integrate_halfline(f, Decay::Exponential { rate }, spec)?;
    Ok(res.value * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn l_factors() {
        let t = LocalCharacter::trivial();
        assert!((local_l_factor(&t, 2, c(2.0, 0.0)).unwrap() - 4.0 / 3.0).norm() < 1e-15);
        assert!((local_l_factor(&t, 3, c(1.0, 0.0)).unwrap() - 1.5).norm() < 1e-15);
        let zero = LocalCharacter::unramified(c(0.0, 0.0));
        assert_eq!(local_l_factor(&zero, 5, c(0.3, 1.0)).unwrap(), c(1.0, 0.0));
        assert!(matches!(local_l_factor(&t, 2, c(0.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn whittaker_values() {
        let d = LocalSatakeData::new(2, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(casselman_shalika(&d, -1), c(0.0, 0.0));
        assert!((casselman_shalika(&d, 1).re - std::f64::consts::SQRT_2).abs() < 1e-15);
        let d = LocalSatakeData::new(4, c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((casselman_shalika(&d, 2).re - 1.3125).abs() < 1e-15);
    }

    #[test]
    fn hecke_examples() {
        let d = LocalSatakeData::new(2, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let h = hecke_local_integral(&d, c(2.0, 0.0), 80).unwrap();
        assert!((h.value.re - 16.0 / 9.0).abs() < 1e-12);
        assert!(h.tail_bound < 1e-12);
        let d = LocalSatakeData::new(2, c(-1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let h = hecke_local_integral(&d, c(2.0, 0.0), 80).unwrap();
        assert!((h.value.re - 0.64).abs() < 1e-12);
        let d = LocalSatakeData::new(3, c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(hecke_local_integral(&d, c(0.5, 0.0), 10).is_err());
    }

    #[test]
    fn finite_mellin_examples() {
        let t = LocalCharacter::trivial();
        let v = finite_mellin_whittaker(&t, 2, &DifferentalData::unramified(), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v - 2.0).norm() < 1e-14);
        let v = finite_mellin_whittaker(&t, 3, &DifferentalData::new(3, 1), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v.re - 1.5 * 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn archimedean_whittaker() {
        let w = w_eis_arch(PlaceType::Real, c(0.5, 0.0), 0.7).unwrap();
        let k0 = bessel_k(c(0.0, 0.0), 2.0 * PI * 0.7).unwrap();
        assert!((w - 2.0 * 0.7f64.sqrt() * k0).norm() < 1e-13);
        assert_eq!(w_eis_arch(PlaceType::Real, c(0.3, 0.0), -1.1), w_eis_arch(PlaceType::Real, c(0.3, 0.0), 1.1));
        let wc = w_eis_arch(PlaceType::Complex, c(1.0, 0.0), 1.0).unwrap();
        let k1 = bessel_k(c(1.0, 0.0), 4.0 * PI).unwrap();
        assert!((wc - 2.0 * k1 * (2.0 * PI).powi(2)).norm() < 1e-10 * wc.norm());
        assert!(w_eis_arch(PlaceType::Real, c(0.5, 0.0), 0.0).is_err());
    }
}
