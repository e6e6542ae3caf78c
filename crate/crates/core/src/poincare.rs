//! The Poincaré series over Q with the seed (1 + x^2)^{-w/2}, the real-analytic
//! Eisenstein series, and convergence and domination probes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{gamma_ratio, integrate_finite, zeta, QuadratureSpec};

/// A point x + iy of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("need finite x and y > 0, got {x} + {y}i")));
        }
        Ok(UpperHalfPoint { x, y })
    }

    /// Representative with x in [0, 1); the truncated sums are evaluated there so
    /// they are exactly invariant under integer translation.
    pub fn reduced(&self) -> Self {
        UpperHalfPoint {
            x: self.x - self.x.floor(),
            y: self.y,
        }
    }

    /// Image under z -> -1/z.
    pub fn inverted(&self) -> Self {
        let r = self.x * self.x + self.y * self.y;
        UpperHalfPoint {
            x: -self.x / r,
            y: self.y / r,
        }
    }

    /// Image under (a b; c d) with ad - bc = 1.
    pub fn moved(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidParameter(format!("({a} {b}; {c} {d}) is not in SL(2, Z)")));
        }
        let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
        let den = (c * self.x + d).powi(2) + (c * self.y).powi(2);
        Ok(UpperHalfPoint {
            x: ((a * self.x + b) * (c * self.x + d) + a * c * self.y * self.y) / den,
            y: self.y / den,
        })
    }
}

/// Box max(|c|, |d|) <= coprime_bound and translations |n| <= translation_bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesTruncation {
    pub coprime_bound: u32,
    pub translation_bound: u32,
}

impl SeriesTruncation {
    pub fn new(coprime_bound: u32, translation_bound: u32) -> Result<Self> {
        if coprime_bound < 1 || translation_bound < 1 {
            return Err(Error::InvalidParameter("truncation bounds must be at least 1".into()));
        }
        Ok(SeriesTruncation {
            coprime_bound,
            translation_bound,
        })
    }

    /// Both bounds equal to n.
    pub fn uniform(n: u32) -> Result<Self> {
        Self::new(n, n)
    }
}

/// A truncated series value with its estimated truncation error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub warning: Option<String>,
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    egcd(a.abs(), b.abs()).0
}

/// Sum over coprime (c, d) modulo sign with max(|c|, |d|) <= n of f(c, d),
/// reduced per c and then in increasing c so the result does not depend on threading.
fn sum_over_cosets<F>(n: u32, f: F) -> (Complex64, f64)
where
    F: Fn(i64, i64) -> (Complex64, f64) + Sync,
{
    let n = n as i64;
    let rows: Vec<(Complex64, f64)> = (-n..=n)
        .into_par_iter()
        .map(|c| {
            let mut acc = (Complex64::new(0.0, 0.0), 0.0);
            if c == 1 {
                let t = f(1, 0);
                acc.0 += t.0;
                acc.1 += t.1;
            }
            for d in 1..=n {
                if gcd(c, d) == 1 {
                    let t = f(c, d);
                    acc.0 += t.0;
                    acc.1 += t.1;
                }
            }
            acc
        })
        .collect();
    rows.into_iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Iwasawa coordinates of gamma z for the coset of (c, d), with x reduced mod 1.
fn coset_point(z: &UpperHalfPoint, c: i64, d: i64) -> (f64, f64) {
    let (_, p, q) = egcd(d, c);
    // p d + q c = 1, so (p -q; c d) has determinant 1
    let (a, b) = (p as f64, -q as f64);
    let (cf, df) = (c as f64, d as f64);
    let den = (cf * z.x + df).powi(2) + (cf * z.y).powi(2);
    let x = ((a * z.x + b) * (cf * z.x + df) + a * cf * z.y * z.y) / den;
    (x.rem_euclid(1.0), z.y / den)
}

/// Integral of |v|^{-2 sigma} over the outside of the box max(|c|, |d|) <= n, for v = cz + d.
fn outside_box_integral(z: &UpperHalfPoint, sigma: f64, n: f64) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let f = |c: f64, d: f64| ((c * z.x + d).powi(2) + (c * z.y).powi(2)).powf(-sigma);
    // the integrand is homogeneous, so the integral is a perimeter integral times a radial factor
    let mut perimeter = 0.0;
    for sign in [1.0, -1.0] {
        perimeter += integrate_finite(|d| Complex64::new(f(sign, d), 0.0), -1.0, 1.0, &spec)?.value.re;
        perimeter += integrate_finite(|c| Complex64::new(f(c, sign), 0.0), -1.0, 1.0, &spec)?.value.re;
    }
    Ok(perimeter * n.powf(2.0 - 2.0 * sigma) / (2.0 * sigma - 2.0))
}

/// Asymptotic size of sum over cosets outside the box of y_gamma^sigma.
fn coset_tail(z: &UpperHalfPoint, sigma: f64, n: u32) -> Result<f64> {
    if sigma <= 1.0 {
        return Ok(f64::INFINITY);
    }
    let density = 1.0 / (2.0 * zeta(Complex64::new(2.0, 0.0))?.re);
    Ok(density * z.y.powf(sigma) * outside_box_integral(z, sigma, n as f64)?)
}

/// Integral of (1 + x^2)^{-w/2} over R.
fn seed_integral(w: f64) -> Result<f64> {
    Ok(PI.sqrt() * gamma_ratio("eval_poincare_q", &[Complex64::new(0.5 * (w - 1.0), 0.0)], &[Complex64::new(0.5 * w, 0.0)])?.re)
}

fn cpow(base: f64, e: Complex64) -> Complex64 {
    if e.im == 0.0 {
        Complex64::new(base.powf(e.re), 0.0)
    } else {
        (e * base.ln()).exp()
    }
}

fn truncation_warning(value: Complex64, tail: f64) -> Option<String> {
    (tail > 1e-3 * value.norm())
        .then(|| format!("truncation too small: tail estimate {tail:.3e} exceeds 1e-3 of |value| = {:.3e}", value.norm()))
}

/// int_a^inf (1 + t^2)^{-w/2} dt for a >= 0.
fn seed_tail(w: Complex64, a: f64) -> Result<Complex64> {
    if a >= 2.0 {
        // expand (1 + t^{-2})^{-w/2} in powers of t^{-2}
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = Complex64::new(1.0, 0.0);
        let inv2 = 1.0 / (a * a);
        let mut pow = cpow(a, 1.0 - w);
        for k in 0..80 {
            let term = binom * pow / (w + 2.0 * k as f64 - 1.0);
            acc += term;
            if term.norm() < 1e-17 * acc.norm() {
                break;
            }
            binom *= (-0.5 * w - k as f64) / (k as f64 + 1.0);
            pow *= inv2;
        }
        return Ok(acc);
    }
    let half = PI.sqrt() * gamma_ratio("eval_poincare_q", &[0.5 * (w - 1.0)], &[0.5 * w])? * 0.5;
    let head = integrate_finite(|t| cpow(1.0 + t * t, -0.5 * w), 0.0, a, &QuadratureSpec::default())?;
    Ok(half - head.value)
}

/// Partial sum over cosets, each translation sum completed by the integral of
/// its tail, and the size of the error left by that completion.
fn poincare_partial(z: &UpperHalfPoint, v: Complex64, w: Complex64, trunc: &SeriesTruncation) -> Result<(Complex64, f64)> {
    let z = &z.reduced();
    let nt = trunc.translation_bound as i64;
    let half_w = -0.5 * w;
    let wr = w.re;
    let failure = std::sync::Mutex::new(None);
    let out = sum_over_cosets(trunc.coprime_bound, |c, d| {
        let (xg, yg) = coset_point(z, c, d);
        let inv = 1.0 / yg;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -nt..=nt {
            let u = (xg + k as f64) * inv;
            acc += cpow(1.0 + u * u, half_w);
        }
        // midpoint rule for the omitted n, with Euler-Maclaurin error ~ |f'| / 24 on each side
        let edge = nt as f64 + 0.5;
        match (seed_tail(w, (edge + xg) * inv), seed_tail(w, (edge - xg) * inv)) {
            (Ok(hi), Ok(lo)) => acc += (hi + lo) * yg,
            (Err(e), _) | (_, Err(e)) => *failure.lock().expect("poisoned") = Some(e),
        }
        let slope = w.norm() * yg.powf(wr) * (edge - 1.0).max(0.5).powf(-wr - 1.0) / 12.0;
        let scale = cpow(yg, v);
        (acc * scale, slope * scale.norm())
    });
    match failure.into_inner().expect("poisoned") {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Truncated Poincaré series sum over cosets and translations of y_g^v (1 + ((x_g + n)/y_g)^2)^{-w/2}.
///
/// Translations beyond the cutoff enter through the integral of the seed. The
/// tail estimate bounds each omitted coset by y^v (2 + y int Phi) and sums that
/// bound asymptotically, plus the error of the translation completion.
pub fn eval_poincare_q(z: &UpperHalfPoint, v: Complex64, w: Complex64, trunc: &SeriesTruncation) -> Result<SeriesValue> {
    if !(v.re > 1.0 && w.re > 1.0) {
        return Err(Error::Divergence {
            function: "eval_poincare_q",
            detail: format!("need Re v > 1 and Re w > 1, got v = {v}, w = {w}"),
        });
    }
    let z = &z.reduced();
    let (value, translation_tail) = poincare_partial(z, v, w, trunc)?;
    let coset = 2.0 * coset_tail(z, v.re, trunc.coprime_bound)?
        + seed_integral(w.re)? * coset_tail(z, v.re + 1.0, trunc.coprime_bound)?;
    let tail = coset + translation_tail;
    Ok(SeriesValue {
        value,
        tail_estimate: tail,
        warning: truncation_warning(value, tail),
    })
}

/// Truncated Eisenstein series sum over cosets of (y / |cz + d|^2)^s, plus the
/// asymptotic contribution of the cosets outside the box.
///
/// The tail estimate is the size of the correction divided by the box size.
pub fn eval_eisenstein_q(z: &UpperHalfPoint, s: Complex64, trunc: &SeriesTruncation) -> Result<SeriesValue> {
    if !(s.re > 1.0) {
        return Err(Error::Divergence {
            function: "eval_eisenstein_q",
            detail: format!("need Re s > 1, got {s}"),
        });
    }
    let z = &z.reduced();
    let (partial, _) = sum_over_cosets(trunc.coprime_bound, |c, d| {
        let (_, yg) = coset_point(z, c, d);
        (cpow(yg, s), 0.0)
    });
    let correction = eisenstein_tail(z, s, trunc.coprime_bound)?;
    let value = partial + correction;
    let tail = correction.norm() / trunc.coprime_bound as f64;
    Ok(SeriesValue {
        value,
        tail_estimate: tail,
        warning: truncation_warning(value, tail),
    })
}

fn eisenstein_tail(z: &UpperHalfPoint, s: Complex64, n: u32) -> Result<Complex64> {
    if s.im == 0.0 {
        return Ok(Complex64::new(coset_tail(z, s.re, n)?, 0.0));
    }
    let spec = QuadratureSpec::default();
    let f = |c: f64, d: f64| cpow(z.y / ((c * z.x + d).powi(2) + (c * z.y).powi(2)), s);
    let mut perimeter = Complex64::new(0.0, 0.0);
    for sign in [1.0, -1.0] {
        perimeter += integrate_finite(|d| f(sign, d), -1.0, 1.0, &spec)?.value;
        perimeter += integrate_finite(|c| f(c, sign), -1.0, 1.0, &spec)?.value;
    }
    let density = 1.0 / (2.0 * zeta(Complex64::new(2.0, 0.0))?.re);
    Ok(perimeter * density * cpow(n as f64, 2.0 - 2.0 * s) / (2.0 * s - 2.0))
}

/// Ratio of the Poincaré series to E_v + E_{v+1+2 eps} at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationPoint {
    pub x: f64,
    pub y: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub points: Vec<DominationPoint>,
    pub constant: f64,
}

/// Checks |P(z)| <= C (E_v(z) + E_{v+1+2 eps}(z)) over a grid and reports C.
///
/// Fails when a ratio is not finite or, at some x, the ratio still grows
/// between the two largest y of the grid.
pub fn domination_check(
    xs: &[f64],
    ys: &[f64],
    v: f64,
    w: f64,
    epsilon: f64,
    trunc: &SeriesTruncation,
) -> Result<DominationReport> {
    if !(epsilon > 0.0 && v > 1.0 + 2.0 * epsilon && w > 1.0 + epsilon) {
        return Err(Error::InvalidParameter(format!(
            "need eps > 0, v > 1 + 2 eps and w > 1 + eps, got v = {v}, w = {w}, eps = {epsilon}"
        )));
    }
    let mut ys = ys.to_vec();
    ys.sort_by(f64::total_cmp);
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        let mut row = Vec::with_capacity(ys.len());
        for &y in &ys {
            let z = UpperHalfPoint::new(x, y)?;
            let p = eval_poincare_q(&z, Complex64::new(v, 0.0), Complex64::new(w, 0.0), trunc)?.value;
            let e1 = eval_eisenstein_q(&z, Complex64::new(v, 0.0), trunc)?.value;
            let e2 = eval_eisenstein_q(&z, Complex64::new(v + 1.0 + 2.0 * epsilon, 0.0), trunc)?.value;
            let ratio = p.norm() / (e1 + e2).norm();
            if !ratio.is_finite() {
                return Err(Error::Divergence {
                    function: "domination_check",
                    detail: format!("ratio not finite at {x} + {y}i"),
                });
            }
            row.push(DominationPoint { x, y, ratio });
        }
        if let [.., a, b] = row.as_slice() {
            if b.ratio > a.ratio * (1.0 + 1e-9) {
                return Err(Error::Divergence {
                    function: "domination_check",
                    detail: format!("ratio still grows at x = {x}: {} at y = {} to {} at y = {}", a.ratio, a.y, b.ratio, b.y),
                });
            }
        }
        points.extend(row);
    }
    let constant = points.iter().fold(0.0f64, |m, p| m.max(p.ratio));
    Ok(DominationReport { points, constant })
}

/// Partial sums over a ladder of truncations and their successive differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub ladder: Vec<u32>,
    pub partial_sums: Vec<Complex64>,
    pub increments: Vec<f64>,
    /// Last increment over the one before; above 1 the partial sums are running away.
    pub growth: f64,
    /// Increments strictly decrease and the last is below 1e-6 of the final value.
    pub converged: bool,
}

/// Runs the Poincaré partial sums with both bounds equal to each ladder entry.
///
/// No region check is made, so divergent parameters show up as non-decreasing increments.
pub fn cauchy_convergence_probe(z: &UpperHalfPoint, v: Complex64, w: Complex64, ladder: &[u32]) -> Result<CauchyReport> {
    if ladder.len() < 3 || ladder.windows(2).any(|p| p[1] <= p[0]) || ladder[0] < 1 {
        return Err(Error::InvalidParameter("ladder must be increasing with at least three entries".into()));
    }
    let partial_sums: Vec<Complex64> = ladder
        .iter()
        .map(|&n| Ok(poincare_partial(z, v, w, &SeriesTruncation::uniform(n)?)?.0))
        .collect::<Result<_>>()?;
    let increments: Vec<f64> = partial_sums.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
    let last = *partial_sums.last().expect("nonempty");
    let decreasing = increments.windows(2).all(|p| p[1] < p[0]);
    let small = *increments.last().expect("nonempty") < 1e-6 * last.norm();
    Ok(CauchyReport {
        ladder: ladder.to_vec(),
        partial_sums,
        growth: increments[increments.len() - 1] / increments[increments.len() - 2].max(f64::MIN_POSITIVE),
        increments,
        converged: decreasing && small,
    })
}
