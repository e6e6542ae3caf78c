//! Cartan cell counts and norm integrals on PGL(2) over a p-adic field,
//! with the matching Euler product and its archimedean analogue.

use serde::Serialize;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::numerics::{integrate_finite, integrate_halfline, r, zeta, Decay, QuadratureSpec};

/// Residue cardinality and exponent of a local norm integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalNormParams {
    pub q: u64,
    pub sigma: f64,
}

impl LocalNormParams {
    pub fn new(q: u64, sigma: f64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::InvalidParameter(format!("q must be prime, got {q}")));
        }
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::Divergence {
                function: "local_norm_integral",
                detail: format!("sigma = {sigma} <= 1"),
            });
        }
        Ok(LocalNormParams { q, sigma })
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Number of cosets in K diag(pi^l, 1) K / K, i.e. 1 for l = 0 and (q + 1) q^{l-1} otherwise,
/// saturating at u64::MAX.
pub fn cell_index(q: u64, ell: u32) -> u64 {
    if ell == 0 {
        1
    } else {
        (q + 1).saturating_mul(q.saturating_pow(ell - 1))
    }
}

/// Upper bound q^2 q^{l-1} for the cell count.
pub fn cell_index_bound(q: u64, ell: u32) -> u64 {
    if ell == 0 {
        1
    } else {
        q.saturating_pow(ell + 1)
    }
}

/// Number of subgroups H of (Z/p^l)^2 with (Z/p^l)^2 / H cyclic of order p^l.
///
/// Every such H is the kernel of a surjection (x, y) -> a x + b y onto Z/p^l;
/// all surjections are enumerated and their kernels collected as bitsets.
pub fn brute_force_cell_count(p: u64, ell: u32) -> Result<u64> {
    if ![2, 3, 5].contains(&p) || !(1..=3).contains(&ell) {
        return Err(Error::InvalidParameter(format!(
            "brute force supports p in {{2, 3, 5}} and 1 <= l <= 3, got p = {p}, l = {ell}"
        )));
    }
    let n = p.pow(ell) as usize;
    let words = (n * n).div_ceil(64);
    let mut kernels: HashSet<Vec<u64>> = HashSet::new();
    for a in 0..n {
        for b in 0..n {
            if a as u64 % p == 0 && b as u64 % p == 0 {
                continue;
            }
            let mut bits = vec![0u64; words];
            for x in 0..n {
                for y in 0..n {
                    if (a * x + b * y) % n == 0 {
                        let i = x * n + y;
                        bits[i / 64] |= 1 << (i % 64);
                    }
                }
            }
            kernels.insert(bits);
        }
    }
    Ok(kernels.len() as u64)
}

/// Exact integral of ||g||^{-sigma} over PGL(2) with meas(K) = 1, and the coarser bound
/// (1 + q^{2 - sigma}) / (1 - q^{1 - sigma}).
pub fn local_norm_integral(params: &LocalNormParams) -> (f64, f64) {
    let q = params.q as f64;
    let s = params.sigma;
    let ratio = q.powf(1.0 - s);
    let exact = 1.0 + (q + 1.0) * q.powf(-s) / (1.0 - ratio);
    let bound = (1.0 + q.powf(2.0 - s)) / (1.0 - ratio);
    (exact, bound)
}

/// The same integral as a direct sum over Cartan cells 0..=max_ell, with the geometric tail bound.
pub fn local_norm_integral_by_cells(params: &LocalNormParams, max_ell: u32) -> (f64, f64) {
    let q = params.q as f64;
    let mut sum = 0.0;
    for ell in (0..=max_ell).rev() {
        let cells = if ell == 0 { 1.0 } else { (q + 1.0) * q.powi(ell as i32 - 1) };
        sum += cells * q.powf(-(ell as f64) * params.sigma);
    }
    let ratio = q.powf(1.0 - params.sigma);
    let next = (q + 1.0) * q.powf(max_ell as f64) * q.powf(-(max_ell as f64 + 1.0) * params.sigma);
    (sum, next / (1.0 - ratio))
}

/// Result of comparing a truncated Euler product with its zeta-quotient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductCheck {
    pub product: f64,
    pub zeta_form: f64,
    pub gap: f64,
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// prod_{p <= bound} (1 + p^{-a}) / (1 - p^{-b}) against zeta(a) zeta(b) / zeta(2a).
pub fn global_norm_product_check(a: f64, b: f64, prime_bound: u64) -> Result<ProductCheck> {
    if !(a > 1.0 && b > 1.0) {
        return Err(Error::InvalidParameter(format!("need a, b > 1, got a = {a}, b = {b}")));
    }
    let mut log_product = 0.0;
    for p in primes_up_to(prime_bound).into_iter().rev() {
        let pf = p as f64;
        log_product += pf.powf(-a).ln_1p() - (-pf.powf(-b)).ln_1p();
    }
    let product = log_product.exp();
    let zeta_form = (zeta(r(a))? * zeta(r(b))? / zeta(r(2.0 * a))?).re;
    Ok(ProductCheck {
        product,
        zeta_form,
        gap: (zeta_form - product).abs(),
    })
}

/// Closed form of int_R max(|x|, 1/|x|)^{d - sigma} dx = 2 (1/(sigma - d + 1) + 1/(sigma - d - 1)).
pub fn archimedean_norm_integral(d: f64, sigma: f64) -> Result<f64> {
    if !(sigma > d + 1.0) {
        return Err(Error::Divergence {
            function: "archimedean_norm_integral",
            detail: format!("sigma = {sigma} <= d + 1 = {}", d + 1.0),
        });
    }
    Ok(2.0 * (1.0 / (sigma - d + 1.0) + 1.0 / (sigma - d - 1.0)))
}

/// The same integral by quadrature: [0, 1] by Gauss-Kronrod and [1, inf) on the half-line.
pub fn archimedean_norm_integral_quadrature(d: f64, sigma: f64, spec: &QuadratureSpec) -> Result<f64> {
    archimedean_norm_integral(d, sigma)?;
    let f = |x: f64| {
        let m = if x.abs() >= 1.0 { x.abs() } else { 1.0 / x.abs() };
        r(m.powf(d - sigma))
    };
    let inner = integrate_finite(f, 0.0, 1.0, spec)?;
    let outer = integrate_halfline(
        |y| f(1.0 + y),
        Decay::Power {
            exponent: sigma - d,
        },
        spec,
    )?;
    Ok(2.0 * (inner.value.re + outer.value.re))
}

/// Operator norm (largest singular value) of a real 2x2 matrix.
pub fn operator_norm(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let fro = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (fro + disc)).sqrt()
}

pub fn mat_mul(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(cell_index(7, 0), 1);
        assert_eq!(cell_index(3, 2), 12);
        assert_eq!(cell_index(2, 1), 3);
        assert!(cell_index(2, 1) <= cell_index_bound(2, 1));
    }

    #[test]
    fn brute_force_small() {
        assert_eq!(brute_force_cell_count(2, 1).unwrap(), 3);
        assert_eq!(brute_force_cell_count(3, 1).unwrap(), 4);
        assert_eq!(brute_force_cell_count(2, 3).unwrap(), 12);
        assert!(brute_force_cell_count(7, 1).is_err());
    }

    #[test]
    fn norm_integral_examples() {
        let (e, b) = local_norm_integral(&LocalNormParams::new(2, 3.0).unwrap());
        assert!((e - 1.5).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        let (e, b) = local_norm_integral(&LocalNormParams::new(3, 2.0).unwrap());
        assert!((e - 5.0 / 3.0).abs() < 1e-15 && (b - 3.0).abs() < 1e-15);
        assert!(LocalNormParams::new(2, 1.0).is_err());
        assert!(LocalNormParams::new(4, 2.0).is_err());
    }

    #[test]
    fn operator_norm_basics() {
        assert!((operator_norm([[3.0, 0.0], [0.0, -5.0]]) - 5.0).abs() < 1e-14);
        assert!((operator_norm([[1.0, 1.0], [0.0, 1.0]]) - (1.5 + 1.25f64.sqrt()).sqrt()).abs() < 1e-14);
    }
}
