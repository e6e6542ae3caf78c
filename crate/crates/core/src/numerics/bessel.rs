//! Bessel functions K of complex order and J of integer order.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::quadrature::QuadratureSpec;
use crate::error::{Error, Result};

/// K_order(x) for x > 0 with the default tolerances.
pub fn bessel_k(order: Complex64, x: f64) -> Result<Complex64> {
    bessel_k_with(order, x, &QuadratureSpec::default())
}

/// K_order(x) = int_0^inf exp(-x cosh t) cosh(order t) dt.
///
/// The integrand already decays double exponentially, so the trapezoidal rule
/// in t converges geometrically; the step is halved until two levels agree.
/// The sum is symmetric in the two exponentials, which makes K_{-v} = K_v
/// hold bit for bit.
pub fn bessel_k_with(order: Complex64, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_k", format!("x must be positive, got {x}")));
    }
    if !(order.re.is_finite() && order.im.is_finite()) || order.im.abs() > 100.0 {
        return Err(Error::domain("bessel_k", format!("order {order} outside |Im| <= 100")));
    }
    let a = order.re.abs();
    let b = order.im.abs();
    // exponent of the dominant part: -x (cosh t - 1) + a t
    let expo = |t: f64| -x * (t.cosh() - 1.0) + a * t;
    let t_peak = (a / x).asinh();
    let e_peak = expo(t_peak);
    let mut t_max = t_peak + 1.0;
    while expo(t_max) > e_peak - 46.0 {
        t_max *= 1.5;
    }
    let f = |t: f64| -> Complex64 {
        let base = Complex64::new(-x * (t.cosh() - 1.0), 0.0);
        let nt = order * t;
        ((base + nt).exp() + (base - nt).exp()) * 0.5
    };
    // the Gaussian width of the integrand near t = 0 is 1/sqrt(x)
    let mut h = (PI * PI / (40.0 + 0.5 * PI * b + a)).min(PI / (20.0 * x).sqrt()).min(0.5).min(t_max / 8.0);
    let mut nodes = (t_max / h).ceil() as usize;
    h = t_max / nodes as f64;
    let mut raw = f(0.0) * 0.5;
    for k in 1..=nodes {
        raw += f(k as f64 * h);
    }
    let mut prev = raw * h;
    let scale = (-x).exp();
    let levels = spec.max_subdivisions.clamp(2, 16);
    for _ in 0..levels {
        h *= 0.5;
        nodes *= 2;
        for k in (1..nodes).step_by(2) {
            raw += f(k as f64 * h);
        }
        let next = raw * h;
        let diff = (next - prev).norm();
        prev = next;
        if diff <= spec.rel_tol * 1e-2 * next.norm() || diff * scale <= spec.abs_tol * 1e-2 {
            let v = next * scale;
            if v.re.is_finite() && v.im.is_finite() {
                return Ok(v);
            }
            return Err(Error::Range {
                function: "bessel_k",
                at: format!("order {order}, x {x}"),
            });
        }
    }
    Err(Error::Quadrature {
        function: "bessel_k",
        estimate: prev * scale,
        error: f64::NAN,
    })
}

/// K_order(x) for one fixed order and x in a bounded range, by a precomputed trapezoidal rule.
///
/// The step is chosen for the largest x of the range and the node table is
/// long enough for the smallest, so each evaluation is a sum of real
/// exponentials against fixed complex weights.
#[derive(Debug, Clone)]
pub struct BesselKFixedOrder {
    cosh: Vec<f64>,
    weights: Vec<Complex64>,
    x_min: f64,
    x_max: f64,
}

impl BesselKFixedOrder {
    pub fn new(order: Complex64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min > 0.0 && x_max >= x_min && x_max.is_finite()) {
            return Err(Error::domain("bessel_k", format!("bad range [{x_min}, {x_max}]")));
        }
        if !(order.re.is_finite() && order.im.is_finite()) || order.im.abs() > 100.0 {
            return Err(Error::domain("bessel_k", format!("order {order} outside |Im| <= 100")));
        }
        let a = order.re.abs();
        let b = order.im.abs();
        let h = (PI * PI / (44.0 + 0.5 * PI * b + a))
            .min(PI / (24.0 * x_max).sqrt())
            .min(0.5);
        // beyond t_max the factor exp(-x_min cosh t + a t) is below e^{-46} of its peak
        let expo = |t: f64| -x_min * t.cosh() + a * t;
        let t_peak = (a / x_min).asinh();
        let e_peak = expo(t_peak);
        let mut t_max = t_peak + 1.0;
        while expo(t_max) > e_peak - 46.0 {
            t_max += 1.0;
        }
        let n = (t_max / h).ceil() as usize;
        let mut cosh = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = k as f64 * h;
            cosh.push(t.cosh());
            let nt = order * t;
            let wk = (nt.exp() + (-nt).exp()) * 0.5 * h;
            weights.push(if k == 0 { wk * 0.5 } else { wk });
        }
        Ok(BesselKFixedOrder {
            cosh,
            weights,
            x_min,
            x_max,
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        debug_assert!(x >= self.x_min * (1.0 - 1e-12) && x <= self.x_max * (1.0 + 1e-12));
        let mut acc = Complex64::new(0.0, 0.0);
        for (ch, w) in self.cosh.iter().zip(&self.weights) {
            let e = -x * ch;
            if e < -745.0 {
                break;
            }
            acc += w * e.exp();
        }
        acc
    }
}

/// J_n(x) for integer n and x >= 0.
///
/// Power series for x <= 1, the Hankel expansion for x > 40 + n^2, Miller's
/// backward recurrence for n > x, and the periodic trapezoidal rule for the
/// Bessel integral in between.
pub fn bessel_j(order: i64, x: f64) -> Result<f64> {
    if order.unsigned_abs() > 10_000 {
        return Err(Error::domain("bessel_j", format!("|order| > 1e4 ({order})")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_j", format!("x must be nonnegative, got {x}")));
    }
    let n = order.unsigned_abs();
    let sign = if order < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = n as f64;
    let v = if x <= 1.0 {
        j_series(n, x)
    } else if x > 40.0 + nf * nf {
        j_hankel(nf, x)
    } else if nf > x {
        j_miller(n, x)
    } else {
        j_trapezoid(nf, x)
    };
    Ok(sign * v)
}

fn j_series(n: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead_log = n as f64 * half.ln() - super::gamma::ln_gamma_lanczos(Complex64::new(n as f64 + 1.0, 0.0)).re;
    if lead_log < -745.0 {
        return 0.0;
    }
    let mut term = lead_log.exp();
    let mut sum = term;
    let q = -half * half;
    for k in 1..60 {
        term *= q / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn j_miller(n: u64, x: f64) -> f64 {
    // downward recurrence is stable; normalize by J_0 + 2 sum J_2k = 1
    let top = n as f64 + 20.0 + (40.0 * n as f64).sqrt();
    let start = ((top.ceil() as u64) / 2 + 1) * 2;
    let (mut above, mut here) = (0.0f64, 1e-300f64);
    let mut wanted = 0.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * here - above;
        above = here;
        here = below;
        if k - 1 == n {
            wanted = here;
        }
        if (k - 1) % 2 == 0 {
            norm += if k == 1 { here } else { 2.0 * here };
        }
        if here.abs() > 1e250 {
            above *= 1e-250;
            here *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    wanted / norm
}

fn j_trapezoid(n: f64, x: f64) -> f64 {
    // J_n(x) = (1/2 pi) int_0^{2 pi} cos(n tau - x sin tau) d tau; aliasing error ~ J_{P-n}(x)
    let p = ((n + x + 40.0 + 8.0 * x.cbrt()).ceil() as usize).next_multiple_of(2);
    let step = 2.0 * PI / p as f64;
    let mut sum = 0.0;
    for k in 0..p {
        let tau = k as f64 * step;
        sum += (n * tau - x * tau.sin()).cos();
    }
    sum / p as f64
}

fn j_hankel(n: f64, x: f64) -> f64 {
    let mu = 4.0 * n * n;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..80 {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            a *= (mu - j * j) / (k as f64 * 8.0 * x);
        }
        if a.abs() > last {
            break;
        }
        last = a.abs();
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
