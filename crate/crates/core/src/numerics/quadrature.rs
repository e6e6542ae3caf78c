//! Quadrature engines: adaptive Gauss-Kronrod on intervals, exp-sinh on the
//! half-line, trapezoidal sums on vertical lines and fixed Gauss-Legendre panels.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerances and work limit for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let s = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) || !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive, got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Same limits with the relative tolerance replaced.
    pub fn with_rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Estimate, error bound and number of integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Caller-declared decay of an integrand at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// |f(x)| <~ exp(-rate |x|)
    Exponential { rate: f64 },
    /// |f(x)| <~ exp(-rate x^2)
    Gaussian { rate: f64 },
    /// |f(x)| <~ |x|^(-exponent), exponent > 1
    Power { exponent: f64 },
}

impl Decay {
    fn scale(&self) -> f64 {
        match *self {
            Decay::Exponential { rate } => 1.0 / rate,
            Decay::Gaussian { rate } => 1.0 / rate.sqrt(),
            Decay::Power { .. } => 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Decay::Exponential { rate } | Decay::Gaussian { rate } => rate > 0.0 && rate.is_finite(),
            Decay::Power { exponent } => exponent > 1.0 && exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad decay hint {self:?}")))
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * half, ((k - g) * half).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive 7/15-point Gauss-Kronrod integration over [a, b].
pub fn integrate_finite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("interval [{a}, {b}] is not finite")));
    }
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evaluations = 15;
    let mut segments = 1;
    while err > spec.target(total.norm()) {
        if segments >= spec.max_subdivisions.max(1) {
            return Err(Error::Quadrature {
                function: "integrate_finite",
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (l, le) = gk15(&f, worst.a, mid);
        let (r, re) = gk15(&f, mid, worst.b);
        evaluations += 30;
        segments += 1;
        total += l + r - worst.value;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: l,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: r,
            error: re,
        });
        err = heap.iter().map(|s| s.error).sum();
    }
    // recompute the total from the pieces to shed accumulated rounding
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Quadrature {
            function: "integrate_finite",
            estimate: value,
            error: f64::INFINITY,
        });
    }
    Ok(QuadResult {
        value,
        error: err,
        evaluations,
    })
}

const EXP_SINH_UMAX: f64 = 6.5;

/// Integral over (0, inf) by the exp-sinh transform x = s exp(pi/2 sinh u),
/// with the scale s taken from the decay hint.
pub fn integrate_halfline<F: Fn(f64) -> Complex64>(f: F, decay: Decay, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    decay.validate()?;
    let scale = decay.scale();
    let node = |u: f64| -> Complex64 {
        let e = (0.5 * PI * u.sinh()).exp();
        let x = scale * e;
        if x == 0.0 || !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let w = scale * 0.5 * PI * u.cosh() * e;
        let v = f(x) * w;
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    // sum over the nodes u = k h, k odd (or all k at level 0), in both directions
    let side_sum = |h: f64, step: usize, start: usize, evals: &mut usize, reference: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for dir in [1.0, -1.0] {
            let mut small = 0;
            let mut k = start;
            loop {
                let u = dir * k as f64 * h;
                if u.abs() > EXP_SINH_UMAX {
                    break;
                }
                let t = node(u);
                *evals += 1;
                acc += t;
                if t.norm() <= 1e-20 * (reference + acc.norm()) {
                    small += 1;
                    if small >= 4 && u.abs() > 1.0 {
                        break;
                    }
                } else {
                    small = 0;
                }
                k += step;
            }
        }
        acc
    };
    let mut evaluations = 0usize;
    let mut h = 0.5;
    let f0 = node(0.0);
    evaluations += 1;
    let mut raw = f0 + side_sum(h, 1, 1, &mut evaluations, f0.norm());
    let mut estimate = raw * h;
    let max_levels = spec.max_subdivisions.clamp(1, 12);
    let mut err = f64::INFINITY;
    for level in 1..=max_levels {
        h *= 0.5;
        let add = side_sum(h, 2, 1, &mut evaluations, raw.norm());
        raw += add;
        let next = raw * h;
        err = (next - estimate).norm();
        estimate = next;
        if level >= 3 && err <= spec.target(estimate.norm()) {
            return Ok(QuadResult {
                value: estimate,
                error: err,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        function: "integrate_halfline",
        estimate,
        error: err,
    })
}

/// (1/2 pi i) times the integral of f along Re w = re_part, upward.
///
/// Trapezoidal sums in Im w with step halving; the window is taken from the
/// decay hint and widened while the integrand is still visible at its edge.
pub fn integrate_vertical_line<F: Fn(Complex64) -> Complex64>(
    f: F,
    re_part: f64,
    decay: Decay,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    decay.validate()?;
    let digits = (1.0 / spec.rel_tol.min(spec.abs_tol)).ln() + 12.0;
    let mut tau_max = match decay {
        Decay::Gaussian { rate } => (digits / rate).sqrt(),
        Decay::Exponential { rate } => digits / rate,
        Decay::Power { .. } => {
            return Err(Error::InvalidParameter(
                "vertical-line integration needs exponential or Gaussian decay".into(),
            ))
        }
    };
    let eval = |tau: f64| f(Complex64::new(re_part, tau));
    let mut evaluations = 0usize;
    // widen the window until the edge values are negligible against the peak
    let mut peak = eval(0.0).norm();
    evaluations += 1;
    for k in 1..=32 {
        let t = tau_max * k as f64 / 32.0;
        peak = peak.max(eval(t).norm()).max(eval(-t).norm());
        evaluations += 2;
    }
    for _ in 0..20 {
        let edge = eval(tau_max).norm().max(eval(-tau_max).norm());
        evaluations += 2;
        if edge <= 1e-18 * peak.max(spec.abs_tol) {
            break;
        }
        tau_max *= 1.5;
    }
    let mut n = 64usize;
    let mut h = tau_max / n as f64;
    let mut raw = eval(0.0);
    for k in 1..=n {
        let t = k as f64 * h;
        raw += eval(t) + eval(-t);
    }
    evaluations += 2 * n + 1;
    let mut estimate = raw * h / (2.0 * PI);
    let max_levels = spec.max_subdivisions.clamp(1, 14);
    let mut err = f64::INFINITY;
    for level in 1..=max_levels {
        h *= 0.5;
        n *= 2;
        for k in (1..=n).step_by(2) {
            let t = k as f64 * h;
            raw += eval(t) + eval(-t);
        }
        evaluations += n;
        let next = raw * h / (2.0 * PI);
        err = (next - estimate).norm();
        estimate = next;
        if level >= 2 && err <= spec.target(estimate.norm()) {
            return Ok(QuadResult {
                value: estimate,
                error: err,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        function: "integrate_vertical_line",
        estimate,
        error: err,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Fixed-order rule on [a, b].
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-12, 0).is_err());
        let d = QuadratureSpec::default();
        assert_eq!((d.rel_tol, d.abs_tol), (1e-10, 1e-12));
    }

    #[test]
    fn halfline_closed_forms() {
        let r = integrate_halfline(|t| Complex64::new((-t).exp(), 0.0), Decay::Exponential { rate: 1.0 }, &spec()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12 && r.error >= (r.value.re - 1.0).abs());
        let r = integrate_halfline(|t| Complex64::new((-t * t).exp(), 0.0), Decay::Gaussian { rate: 1.0 }, &spec()).unwrap();
        let exact = 0.5 * PI.sqrt();
        assert!((r.value.re - exact).abs() < 1e-12);
        let r = integrate_halfline(
            |t| Complex64::new(t * (-t).exp() * t.cos(), 0.0),
            Decay::Exponential { rate: 1.0 },
            &spec(),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-11);
    }

    #[test]
    fn halfline_power_decay_and_endpoint_singularity() {
        // integral of x^{-1/2} / (1 + x) over (0, inf) = pi
        let r = integrate_halfline(
            |x| Complex64::new(1.0 / (x.sqrt() * (1.0 + x)), 0.0),
            Decay::Power { exponent: 1.5 },
            &spec(),
        )
        .unwrap();
        assert!((r.value.re - PI).abs() < 1e-10);
    }

    #[test]
    fn finite_interval() {
        let r = integrate_finite(|x| Complex64::new(x.sin(), x.cos()), 0.0, PI, &spec()).unwrap();
        assert!((r.value - Complex64::new(2.0, 0.0)).norm() < 1e-13);
        let r = integrate_finite(|x| Complex64::new(x.sqrt(), 0.0), 0.0, 1.0, &spec()).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-11);
        assert!(r.error >= (r.value.re - 2.0 / 3.0).abs());
    }

    #[test]
    fn finite_reports_failure() {
        let tight = QuadratureSpec::new(1e-15, 1e-300, 3).unwrap();
        let e = integrate_finite(|x| Complex64::new(1.0 / x.abs().sqrt().max(1e-300), 0.0), -1.0, 1.0, &tight);
        assert!(matches!(e, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn gauss_legendre_exactness() {
        let g = GaussLegendre::new(10);
        let v = g.integrate(|x| Complex64::new(x.powi(19) + x.powi(18), 0.0), -1.0, 1.0);
        assert!((v.re - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn vertical_gaussian() {
        // (1/2 pi i) int e^{(w-1)^2} T^w dw on Re w = 2, T = 1
        let r = integrate_vertical_line(
            |w| ((w - 1.0) * (w - 1.0)).exp(),
            2.0,
            Decay::Gaussian { rate: 1.0 },
            &spec(),
        )
        .unwrap();
        assert!((r.value.re - 0.5 / PI.sqrt()).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-13);
    }

    #[test]
    fn vertical_zero() {
        let r = integrate_vertical_line(|_| Complex64::new(0.0, 0.0), 2.0, Decay::Gaussian { rate: 1.0 }, &spec()).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }
}
