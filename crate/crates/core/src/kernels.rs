//! Archimedean kernels: gamma-ratio kernels, their Bessel-integral
//! counterparts, asymptotic main terms and the Eisenstein-term scalars.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{NumberField, PlaceType};
use crate::numerics::{
    bessel_j, gamma_ratio, integrate_finite, integrate_halfline, BesselKFixedOrder, Decay, GaussLegendre,
    QuadratureSpec,
};
use crate::whittaker::w_eis_arch;

/// The triple (s, v, w) at which a kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelPoint {
    pub s: Complex64,
    pub v: Complex64,
    pub w: Complex64,
}

impl KernelPoint {
    pub fn new(s: Complex64, v: Complex64, w: Complex64) -> Self {
        KernelPoint { s, v, w }
    }

    /// Re w > 1 and Re v > 1.
    pub fn admissible(&self) -> bool {
        self.w.re > 1.0 && self.v.re > 1.0
    }
}

/// Local spectral parameters of the two forms at one archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParams {
    pub mu1: Complex64,
    pub mu2: Complex64,
}

impl SpectralParams {
    pub fn new(mu1: Complex64, mu2: Complex64) -> Self {
        SpectralParams { mu1, mu2 }
    }

    /// mu1 = mu2 = mu.
    pub fn equal(mu: Complex64) -> Self {
        SpectralParams { mu1: mu, mu2: mu }
    }

    /// |Re(i mu)| < 1/9 for both parameters.
    pub fn kim_shahidi_admissible(&self) -> bool {
        [self.mu1, self.mu2].iter().all(|m| m.im.abs() < 1.0 / 9.0)
    }
}

/// Archimedean parameters (t_v, l_v) of a character at one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalCharacterParams {
    pub t_nu: f64,
    pub ell_nu: i64,
}

impl LocalCharacterParams {
    pub fn new(t_nu: f64, ell_nu: i64) -> Self {
        LocalCharacterParams { t_nu, ell_nu }
    }

    pub fn trivial() -> Self {
        Self::new(0.0, 0)
    }
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn gamma_product(function: &'static str, num: &[(&str, Complex64)], den: &[Complex64]) -> Result<Complex64> {
    for (label, z) in num {
        if is_pole(*z) {
            return Err(Error::Pole {
                function,
                at: format!("{label} at {z}"),
            });
        }
    }
    let args: Vec<Complex64> = num.iter().map(|p| p.1).collect();
    gamma_ratio(function, &args, den)
}

/// Real-place gamma kernel.
///
/// pi^{-v} G((v+1-s)/2) G((v+w-s)/2) G((v+s)/2) G((v+w+s-1)/2) / (G(w/2) G(v+w/2)).
pub fn g_real(s: Complex64, v: Complex64, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let g = gamma_product(
        "g_real",
        &[
            ("Gamma((v+1-s)/2)", (v + one - s) * 0.5),
            ("Gamma((v+w-s)/2)", (v + w - s) * 0.5),
            ("Gamma((v+s)/2)", (v + s) * 0.5),
            ("Gamma((v+w+s-1)/2)", (v + w + s - one) * 0.5),
        ],
        &[w * 0.5, v + w * 0.5],
    )?;
    Ok(g * (-v * PI.ln()).exp())
}

/// Complex-place gamma kernel.
///
/// (2 pi)^{-2v} G(v+1-s) G(v+w-s) G(v+s) G(v+w+s-1) / (G(w) G(2v+w)).
pub fn g_complex(s: Complex64, v: Complex64, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let g = gamma_product(
        "g_complex",
        &[
            ("Gamma(v+1-s)", v + one - s),
            ("Gamma(v+w-s)", v + w - s),
            ("Gamma(v+s)", v + s),
            ("Gamma(v+w+s-1)", v + w + s - one),
        ],
        &[w, 2.0 * v + w],
    )?;
    Ok(g * (-2.0 * v * (2.0 * PI).ln()).exp())
}

/// 2^{4w-4v-4} prod G(w+v +- i mu1 +- i conj(mu2)) / G(2w+2v).
pub fn a_complex(v: Complex64, w: Complex64, mu: &SpectralParams) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let a = i * mu.mu1;
    let b = i * mu.mu2.conj();
    let base = w + v;
    let g = gamma_product(
        "a_complex",
        &[
            ("Gamma(w+v+i mu1+i conj mu2)", base + a + b),
            ("Gamma(w+v-i mu1+i conj mu2)", base - a + b),
            ("Gamma(w+v+i mu1-i conj mu2)", base + a - b),
            ("Gamma(w+v-i mu1-i conj mu2)", base - a - b),
        ],
        &[2.0 * w + 2.0 * v],
    )?;
    Ok(g * ((4.0 * w - 4.0 * v - 4.0) * 2f64.ln()).exp())
}

/// Asymptotic main term of a local kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainTerm {
    pub value: Complex64,
    /// At real places the gamma-ratio constant is not known in closed form; the
    /// value is then the normalized main term with that constant set to 1.
    pub constant_normalized: bool,
}

/// Main term of the local kernel as a function of t.
pub fn k_asym_main(
    place: PlaceType,
    t: f64,
    v: Complex64,
    w: Complex64,
    chi: &LocalCharacterParams,
    mu: &SpectralParams,
) -> Result<MainTerm> {
    let x = t + chi.t_nu;
    match place {
        PlaceType::Complex => {
            let l = chi.ell_nu as f64;
            let base: f64 = 1.0 + l * l + 4.0 * x * x;
            let a = a_complex(v, w, mu)?;
            let value = ((1.0 - 2.0 * v) * PI.ln()).exp() * a * (-w * base.ln()).exp();
            Ok(MainTerm {
                value,
                constant_normalized: false,
            })
        }
        PlaceType::Real => {
            let base: f64 = 1.0 + x.abs();
            Ok(MainTerm {
                value: (-w * base.ln()).exp(),
                constant_normalized: true,
            })
        }
    }
}

/// A kernel value from nested quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEstimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub warning: Option<String>,
}

const GL_ORDER: usize = 10;
/// K_nu(x) is below e^{-42} of its small-x size beyond x = 42.
const K_CUTOFF: f64 = 42.0;
/// Start of the quadrature in u; below it the integrand is replaced by its two-term expansion.
const SMALL_U: f64 = 3e-4 / (2.0 * PI);
const TINY_U: f64 = 1e-15;
/// Orders below this size make the expansion coefficients Gamma(+-nu) cancel badly.
const SMALL_ORDER: f64 = 1e-3;

/// Parameters of the inner u-integral shared by both places.
struct InnerIntegral {
    tau: f64,
    /// exponent of u in front of K and the oscillatory factor: u^{power + i tau_scale tau}
    power: f64,
    tau_scale: f64,
    order: Complex64,
    /// arguments are (k_scale u c) and (osc_scale u s)
    k_scale: f64,
    osc_scale: f64,
    ell: u32,
    real_place: bool,
    k: BesselKFixedOrder,
    beta: f64,
    expand: bool,
    gl: GaussLegendre,
}

/// ln Gamma-free small-argument data: K_nu(z) ~ sum_{+-} G(+-nu)/2 (z/2)^{-+nu} (1 + (z/2)^2 / (1 -+ nu)).
fn k_small_coefficients(order: Complex64) -> Result<[Complex64; 2]> {
    let gp = gamma_ratio("bessel_k", &[order], &[])?;
    let gm = gamma_ratio("bessel_k", &[-order], &[])?;
    Ok([gp * 0.5, gm * 0.5])
}

impl InnerIntegral {
    fn new(real_place: bool, tau: f64, mu: Complex64, ell: u32, c_lo: f64) -> Result<Self> {
        let (power, tau_scale, order, k_scale, osc_scale) = if real_place {
            (-0.5, 1.0, Complex64::new(0.0, 1.0) * mu, 2.0 * PI, 2.0 * PI)
        } else {
            (0.0, 2.0, Complex64::new(0.0, 2.0) * mu, 4.0 * PI, 4.0 * PI)
        };
        let edge = if real_place { 0.5 } else { 1.0 };
        if order.re.abs() >= edge {
            return Err(Error::Domain {
                function: if real_place { "k_exact_real" } else { "k_exact_complex" },
                detail: format!("|Im mu| too large for an integrable kernel (order {order})"),
            });
        }
        let expand = order.norm() >= SMALL_ORDER;
        let u_start = if expand { SMALL_U } else { TINY_U };
        let x_min = k_scale * u_start * c_lo * 0.999;
        let k = BesselKFixedOrder::new(order, x_min, K_CUTOFF * 1.001)?;
        let beta = (1.2 / (tau_scale * tau.abs() + tau_scale * mu.norm() + 1.0)).min(1.0);
        Ok(InnerIntegral {
            tau,
            power,
            tau_scale,
            order,
            k_scale,
            osc_scale,
            ell,
            real_place,
            k,
            beta,
            expand,
            gl: GaussLegendre::new(GL_ORDER),
        })
    }

    fn oscillator(&self, y: f64) -> Result<f64> {
        if self.real_place {
            Ok(y.cos())
        } else {
            bessel_j(self.ell as i64, y)
        }
    }

    /// Integral over (0, u_start) from the small-argument expansions.
    fn small_piece(&self, c: f64, s: f64) -> Result<Complex64> {
        if !self.expand {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let u0 = SMALL_U;
        let coeff = k_small_coefficients(self.order)?;
        let i = Complex64::new(0.0, 1.0);
        let half_k = 0.5 * self.k_scale * c;
        let half_o = 0.5 * self.osc_scale * s;
        let (lead_o, pow_o, corr_o) = if self.real_place {
            // cos(y) = 1 - y^2/2, with y = osc_scale u s
            (1.0, 0.0, -2.0 * half_o * half_o)
        } else {
            let l = self.ell as f64;
            let fact: f64 = (1..=self.ell).map(|k| k as f64).product();
            (half_o.powi(self.ell as i32) / fact, l, -half_o * half_o / (l + 1.0))
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (sign, g) in [(1.0, coeff[0]), (-1.0, coeff[1])] {
            let nu = self.order * sign;
            let pref = g * (-nu * half_k.ln()).exp() * lead_o;
            let corr_k = half_k * half_k / (1.0 - nu);
            let e = Complex64::new(self.power + pow_o + 1.0, 0.0) + i * self.tau_scale * self.tau - nu;
            let lead = (e * u0.ln()).exp() / e;
            let next = (corr_k + corr_o) * ((e + 2.0) * u0.ln()).exp() / (e + 2.0);
            acc += pref * (lead + next);
        }
        Ok(acc)
    }

    fn eval(&self, c: f64, s: f64) -> Result<(Complex64, usize)> {
        let mut acc = self.small_piece(c, s)?;
        let u_max = K_CUTOFF / (self.k_scale * c);
        let cap = if s > 0.0 {
            PI / (2.0 * self.osc_scale * s)
        } else {
            f64::INFINITY
        };
        let mut u = if self.expand { SMALL_U } else { TINY_U };
        let mut evals = 0;
        let i_tau = Complex64::new(self.power, self.tau_scale * self.tau);
        while u < u_max {
            let b = (u + (self.beta * u).min(cap)).min(u_max);
            for (x, wt) in self.gl.mapped(u, b) {
                let phase = (i_tau * x.ln()).exp();
                let kv = self.k.eval(self.k_scale * x * c);
                let o = self.oscillator(self.osc_scale * x * s)?;
                acc += phase * kv * (o * wt);
            }
            evals += GL_ORDER;
            u = b;
        }
        Ok((acc, evals))
    }
}

/// V(t, phi) = int_0^inf u^{2 i tau} K_{2 i mu}(4 pi u cos phi) J_{|l|}(4 pi u sin phi) du with tau = t + t_v.
pub fn kernel_v_complex(tau: f64, phi: f64, mu: Complex64, ell: i64) -> Result<Complex64> {
    let c = phi.cos();
    let inner = InnerIntegral::new(false, tau, mu, ell.unsigned_abs() as u32, c)?;
    Ok(inner.eval(c, phi.sin())?.0)
}

/// int_0^inf u^{-1/2 + i tau} K_{i mu}(2 pi u cos phi) cos(2 pi u sin phi) du.
pub fn kernel_v_real(tau: f64, phi: f64, mu: Complex64) -> Result<Complex64> {
    let c = phi.cos();
    let inner = InnerIntegral::new(true, tau, mu, 0, c)?;
    Ok(inner.eval(c, phi.sin())?.0)
}

/// One term coeff c^{pc} s^{ps} of the small-c expansion of V.
struct ExpansionTerm {
    coeff: Complex64,
    pc: Complex64,
    ps: Complex64,
}

/// Two orders of the small-c expansion of V for each sign of the K order.
///
/// Each term of the K series turns the u-integral into a continued Mellin
/// transform of the oscillatory factor, which scales as s^{-alpha}.
fn small_c_expansion(real_place: bool, tau: f64, mu: Complex64, ell: u32) -> Result<Vec<ExpansionTerm>> {
    let i = Complex64::new(0.0, 1.0);
    let function = if real_place { "k_exact_real" } else { "k_exact_complex" };
    let (nu, alpha0, k_half) = if real_place {
        (i * mu, Complex64::new(0.5, tau), PI)
    } else {
        (2.0 * i * mu, Complex64::new(1.0, 2.0 * tau), 2.0 * PI)
    };
    let l = ell as f64;
    let mellin = |alpha: Complex64| -> Result<Complex64> {
        if real_place {
            // int_0^inf u^{alpha-1} cos(2 pi u) du
            Ok(gamma_ratio(function, &[alpha], &[])? * (alpha * PI * 0.5).cos() * (-alpha * (2.0 * PI).ln()).exp())
        } else {
            // int_0^inf u^{alpha-1} J_l(4 pi u) du
            Ok(gamma_ratio(function, &[(alpha + l) * 0.5], &[(l - alpha) * 0.5 + 1.0])?
                * ((alpha - 1.0) * 2f64.ln()).exp()
                * (-alpha * (4.0 * PI).ln()).exp())
        }
    };
    let coeff = k_small_coefficients(nu)?;
    let mut out = Vec::with_capacity(4);
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        let n = nu * sign;
        let alpha = alpha0 - n;
        let g = coeff[k] * (-n * k_half.ln()).exp();
        out.push(ExpansionTerm {
            coeff: g * mellin(alpha)?,
            pc: -n,
            ps: -alpha,
        });
        out.push(ExpansionTerm {
            coeff: g * k_half * k_half / (1.0 - n) * mellin(alpha + 2.0)?,
            pc: 2.0 - n,
            ps: -alpha - 2.0,
        });
    }
    Ok(out)
}

fn expansion_value(terms: &[ExpansionTerm], c: f64, s: f64) -> Complex64 {
    let (lc, ls) = (c.ln(), s.ln());
    terms.iter().map(|t| t.coeff * (t.pc * lc + t.ps * ls).exp()).sum()
}

fn geometric_edges(lo: f64, hi: f64) -> Vec<f64> {
    let mut edges = vec![lo];
    let mut x = lo;
    while x * 2.0 < hi {
        x *= 2.0;
        edges.push(x);
    }
    edges.push(hi);
    edges
}

fn kernel_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    // the inner rule resolves V to about 1e-11, so tighter outer targets only chase noise
    QuadratureSpec {
        rel_tol: spec.rel_tol.max(1e-9),
        ..*spec
    }
}

fn run_panels<F>(function: &'static str, edges: &[f64], spec: &QuadratureSpec, f: F) -> Result<(Complex64, f64, usize)>
where
    F: Fn(f64) -> Result<(Complex64, usize)> + Sync,
{
    let pieces: Vec<Result<(Complex64, f64, usize)>> = edges
        .par_windows(2)
        .map(|w| {
            let count = std::sync::atomic::AtomicUsize::new(0);
            let failure = std::sync::Mutex::new(None);
            let res = integrate_finite(
                |x| match f(x) {
                    Ok((v, n)) => {
                        count.fetch_add(n, std::sync::atomic::Ordering::Relaxed);
                        v
                    }
                    Err(e) => {
                        *failure.lock().expect("poisoned") = Some(e);
                        Complex64::new(0.0, 0.0)
                    }
                },
                w[0],
                w[1],
                spec,
            );
            if let Some(e) = failure.into_inner().expect("poisoned") {
                return Err(e);
            }
            let res = res.map_err(|e| match e {
                Error::Quadrature { estimate, error, .. } => Error::Quadrature {
                    function,
                    estimate,
                    error,
                },
                other => other,
            })?;
            Ok((res.value, res.error, count.into_inner()))
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for p in pieces {
        let (v, e, n) = p?;
        total += v;
        err += e;
        evals += n;
    }
    Ok((total, err, evals))
}

fn boundary_warning(w: Complex64) -> Option<String> {
    (w.re < 1.0).then(|| format!("Re w = {} is close to the boundary 3/4; the c-integral converges slowly", w.re))
}

fn check_kernel_args(function: &'static str, w: Complex64, mu: &SpectralParams) -> Result<Complex64> {
    if mu.mu1 != mu.mu2 {
        return Err(Error::InvalidParameter(format!("{function} needs mu1 = mu2")));
    }
    if !(w.re > 0.75) {
        return Err(Error::Divergence {
            function,
            detail: format!("Re w = {} <= 3/4", w.re),
        });
    }
    Ok(mu.mu1)
}

/// Complex-place kernel at v = 0, s = 1/2 + it:
/// (2 pi)^3 int_0^1 c^{2w-1} |V(c)|^2 dc with c = cos phi.
///
/// The c-range is cut into dyadic panels down to c_min ~ 0.02 / (1 + |tau|),
/// each integrated adaptively; below c_min the integral is taken from the
/// small-c expansion of V.
pub fn k_exact_complex(
    t: f64,
    w: Complex64,
    chi: &LocalCharacterParams,
    mu: &SpectralParams,
    spec: &QuadratureSpec,
) -> Result<KernelEstimate> {
    spec.validate()?;
    let m = check_kernel_args("k_exact_complex", w, mu)?;
    let tau = t + chi.t_nu;
    let ell = chi.ell_nu.unsigned_abs() as u32;
    let c_min = 0.02 / (1.0 + tau.abs() + m.norm());
    let inner = InnerIntegral::new(false, tau, m, ell, c_min)?;
    let edges = geometric_edges(c_min, 1.0);
    let ks = kernel_spec(spec);
    let (body, err, evals) = run_panels("k_exact_complex", &edges, &ks, |c| {
        let s = ((1.0 - c) * (1.0 + c)).sqrt();
        let (v, n) = inner.eval(c, s)?;
        Ok((((2.0 * w - 1.0) * c.ln()).exp() * v.norm_sqr(), n))
    })?;
    let tail = small_c_tail(false, tau, m, ell, w, c_min, &ks, || {
        let s = ((1.0 - c_min) * (1.0 + c_min)).sqrt();
        Ok(inner.eval(c_min, s)?.0)
    })?;
    let scale = (2.0 * PI).powi(3);
    let value = (body + tail) * scale;
    let tail_err = tail.norm() * (c_min * (1.0 + tau.abs())).powi(4);
    Ok(KernelEstimate {
        value,
        error: (err + tail_err) * scale,
        evaluations: evals,
        warning: boundary_warning(w),
    })
}

/// Contribution of (0, x0) to the outer integral, from the small-c expansion of V.
fn small_c_tail<F: Fn() -> Result<Complex64>>(
    real_place: bool,
    tau: f64,
    mu: Complex64,
    ell: u32,
    w: Complex64,
    x0: f64,
    spec: &QuadratureSpec,
    at_edge: F,
) -> Result<Complex64> {
    let exponent = if real_place { w } else { 2.0 * w };
    let order = if real_place { mu.norm() } else { 2.0 * mu.norm() };
    if order < SMALL_ORDER {
        // V is nearly constant in log c here
        let v = at_edge()?;
        return Ok(v.norm_sqr() * (exponent * x0.ln()).exp() / exponent);
    }
    let terms = small_c_expansion(real_place, tau, mu, ell)?;
    let f = |x: f64| {
        let th = x0 * (-x).exp();
        let (c, s) = if real_place {
            th.sin_cos()
        } else {
            (th, ((1.0 - th) * (1.0 + th)).sqrt())
        };
        let v = expansion_value(&terms, c, s);
        ((exponent - 1.0) * c.ln()).exp() * v.norm_sqr() * th
    };
    Ok(integrate_halfline(f, Decay::Exponential { rate: exponent.re }, spec)?.value)
}

/// Real-place kernel at v = 0, s = 1/2 + it: 8 int_0^{pi/2} (cos phi)^{w-1} |V_R(phi)|^2 dphi.
///
/// Integrated in theta = pi/2 - phi on dyadic panels, with the small-theta
/// contribution from the expansion of V_R.
pub fn k_exact_real(
    t: f64,
    w: Complex64,
    chi: &LocalCharacterParams,
    mu: &SpectralParams,
    spec: &QuadratureSpec,
) -> Result<KernelEstimate> {
    spec.validate()?;
    let m = check_kernel_args("k_exact_real", w, mu)?;
    let tau = t + chi.t_nu;
    let theta_min = 0.02 / (1.0 + tau.abs() + m.norm());
    let inner = InnerIntegral::new(true, tau, m, 0, theta_min.sin())?;
    let edges = geometric_edges(theta_min, 0.5 * PI);
    let ks = kernel_spec(spec);
    let (body, err, evals) = run_panels("k_exact_real", &edges, &ks, |theta| {
        let (c, s) = theta.sin_cos();
        let (v, n) = inner.eval(c, s)?;
        Ok((((w - 1.0) * c.ln()).exp() * v.norm_sqr(), n))
    })?;
    let tail = small_c_tail(true, tau, m, 0, w, theta_min, &ks, || {
        let (c, s) = theta_min.sin_cos();
        Ok(inner.eval(c, s)?.0)
    })?;
    let tail_err = tail.norm() * (theta_min * (1.0 + tau.abs())).powi(4);
    Ok(KernelEstimate {
        value: (body + tail) * 8.0,
        error: (err + tail_err) * 8.0,
        evaluations: evals,
        warning: boundary_warning(w),
    })
}

/// exact / normalized-main at the real place for a ladder of t, estimating the omitted constant.
pub fn real_constant_ladder(
    w: Complex64,
    chi: &LocalCharacterParams,
    mu: &SpectralParams,
    ts: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<(f64, Complex64)>> {
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let exact = k_exact_real(t, w, chi, mu, spec)?;
        let main = k_asym_main(PlaceType::Real, t, Complex64::new(0.0, 0.0), w, chi, mu)?;
        out.push((t, exact.value / main.value));
    }
    Ok(out)
}

/// Eisenstein-term scalar prod_real sqrt(pi) G((w-1)/2)/G(w/2) prod_complex 2 pi/(w-1).
pub fn r_eisenstein(field: &NumberField, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if w == one {
        return Err(Error::pole("r_eisenstein", w));
    }
    let real = PI.sqrt()
        * gamma_product("r_eisenstein", &[("Gamma((w-1)/2)", (w - one) * 0.5)], &[w * 0.5])?;
    let complex = 2.0 * PI / (w - one);
    Ok(real.powi(field.r1 as i32) * complex.powi(field.r2 as i32))
}

fn q_place(place: PlaceType, s: Complex64, v: Complex64, w: Complex64) -> Result<Complex64> {
    match place {
        PlaceType::Real => {
            let g = g_real(s, v, w)?;
            let n = gamma_product("q_scalar", &[("Gamma(s)", s)], &[])? * (-s * PI.ln()).exp();
            Ok(g / n)
        }
        PlaceType::Complex => {
            let g = g_complex(s, v, w)?;
            let n = gamma_product("q_scalar", &[("Gamma(2s)", 2.0 * s)], &[])?
                * ((-2.0 * s - 1.0) * (2.0 * PI).ln()).exp();
            Ok(g / n)
        }
    }
}

/// Product over archimedean places of the local Whittaker pairings G_v / (normalizer of W^E).
pub fn q_scalar(field: &NumberField, s: Complex64, v: Complex64, w: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for place in field.places() {
        acc *= q_place(place, s, v, w)?;
    }
    Ok(acc)
}

/// Both sides of the local Mellin identity and their relative gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MellinCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative_gap: f64,
}

/// Fourier transform of (1 + x^2)^{-w/2} on R, or of (1 + |z|^2)^{-w} on C with the
/// self-dual measure for e(2 Re z), as a function of |a|.
fn seed_fourier(place: PlaceType, w: Complex64, a: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    match place {
        PlaceType::Real => {
            let e = (w - 1.0) * 0.5 - 1.0;
            let q = PI * PI * a * a;
            let r = integrate_halfline(
                |t| (e * t.ln() - t - q / t).exp(),
                Decay::Exponential { rate: 1.0 },
                spec,
            )?;
            let norm = gamma_product("mellin_identity_check", &[("Gamma(w/2)", w * 0.5)], &[])?;
            Ok(r.value * PI.sqrt() / norm)
        }
        PlaceType::Complex => {
            let e = w - 2.0;
            let q = 4.0 * PI * PI * a * a;
            let r = integrate_halfline(
                |t| (e * t.ln() - t - q / t).exp(),
                Decay::Exponential { rate: 1.0 },
                spec,
            )?;
            let norm = gamma_product("mellin_identity_check", &[("Gamma(w)", w)], &[])?;
            Ok(r.value * 2.0 * PI / norm)
        }
    }
}

/// int |a|^v hat(Phi)(a) W^E_s(a) d^x a by nested quadrature, against the gamma closed form.
pub fn mellin_identity_check(
    place: PlaceType,
    s: Complex64,
    v: Complex64,
    w: Complex64,
    spec: &QuadratureSpec,
) -> Result<MellinCheck> {
    spec.validate()?;
    if !(w.re > 1.0) {
        return Err(Error::Divergence {
            function: "mellin_identity_check",
            detail: format!("Re w = {} <= 1", w.re),
        });
    }
    let rhs = q_place(place, s, v, w)?;
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 1e-2,
        abs_tol: spec.abs_tol * 1e-4,
        ..*spec
    };
    let (factor, power, rate) = match place {
        PlaceType::Real => (2.0, 1.0, 4.0 * PI),
        PlaceType::Complex => (4.0 * PI, 2.0, 8.0 * PI),
    };
    let failure = std::sync::Mutex::new(None);
    let f = |a: f64| -> Complex64 {
        let r = seed_fourier(place, w, a, &inner_spec).and_then(|p| Ok(p * w_eis_arch(place, s, a)?));
        match r {
            Ok(x) => x * ((v * power - 1.0) * a.ln()).exp(),
            Err(e) => {
                *failure.lock().expect("poisoned") = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let res = integrate_halfline(f, Decay::Exponential { rate }, spec);
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    let lhs = res?.value * factor;
    Ok(MellinCheck {
        lhs,
        rhs,
        relative_gap: (lhs - rhs).norm() / rhs.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{builtin_field, BuiltinField};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_kernels_at_half() {
        let g = g_real(c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((g.re - PI / 8.0).abs() < 1e-14);
        let g = g_complex(c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((g.re - 3.0 / 512.0).abs() < 1e-16);
        let e = g_real(c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::Pole { ref at, .. } if at.contains("(v+1-s)/2")), "{e}");
    }

    #[test]
    fn a_complex_trivial_point() {
        let a = a_complex(c(0.0, 0.0), c(1.0, 0.0), &SpectralParams::equal(c(0.0, 0.0))).unwrap();
        assert!((a - 1.0).norm() < 1e-15);
    }

    #[test]
    fn main_terms() {
        let mu = SpectralParams::equal(c(0.0, 0.0));
        let chi = LocalCharacterParams::new(1.5, 0);
        let m = k_asym_main(PlaceType::Complex, -1.5, c(0.0, 0.0), c(1.0, 0.0), &chi, &mu).unwrap();
        assert!((m.value - PI).norm() < 1e-14);
        let m = k_asym_main(PlaceType::Real, 3.0, c(0.0, 0.0), c(2.0, 0.0), &LocalCharacterParams::trivial(), &mu).unwrap();
        assert!((m.value - 1.0 / 16.0).norm() < 1e-16 && m.constant_normalized);
    }

    #[test]
    fn eisenstein_scalar() {
        let q = builtin_field(BuiltinField::Q);
        assert!((r_eisenstein(&q, c(3.0, 0.0)).unwrap() - 2.0).norm() < 1e-14);
        let qi = builtin_field(BuiltinField::QI);
        assert!((r_eisenstein(&qi, c(2.0, 0.0)).unwrap() - 2.0 * PI).norm() < 1e-14);
        assert!(r_eisenstein(&q, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn q_scalar_examples() {
        let q = builtin_field(BuiltinField::Q);
        let v = q_scalar(&q, c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((v.re - PI / 8.0).abs() < 1e-14);
        let qi = builtin_field(BuiltinField::QI);
        let v = q_scalar(&qi, c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let direct = g_complex(c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap() * (2.0 * PI).powi(2);
        assert!((v - direct).norm() < 1e-12 * direct.norm());
    }
}
