//! Second and fourth moments of zeta on the critical line, the smoothing
//! weights M_{chi,T}(t) and the positivity probe for the exact kernel.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fields::{HeckeCharacter, NumberField};
use crate::kernels::{k_asym_main, k_exact_complex, LocalCharacterParams, SpectralParams};
use crate::numerics::{integrate_vertical_line, linear_fit, polyfit, zeta, Decay, GaussLegendre, QuadratureSpec};

/// Largest height at which the zeta evaluator is used for moments.
pub const MOMENT_T_MAX: f64 = 5000.0;

/// Panel refinement for the moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepControl {
    /// Initial panel width in t.
    pub initial_step: f64,
    /// Two successive halvings must agree to this relative tolerance.
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            initial_step: 1.0,
            rel_tol: 1e-4,
            max_refinements: 6,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step control needs positive step and tolerance, got {} and {}",
                self.initial_step, self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Moment integrals on a T grid with the fitted coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub t_grid: Vec<f64>,
    pub integrals: Vec<f64>,
    /// Coefficients of I(T)/T as a polynomial in log T, constant term first.
    pub fitted_coefficients: Vec<f64>,
    pub residuals: f64,
    pub runtime_seconds: f64,
}

const GL_ORDER: usize = 10;

fn check_grid(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidParameter("empty T grid".into()));
    }
    let mut prev = 0.0;
    for &t in ts {
        if !(t >= prev) {
            return Err(Error::InvalidParameter(format!("T grid must be nonnegative and increasing, got {t} after {prev}")));
        }
        if t > MOMENT_T_MAX {
            return Err(Error::Domain {
                function: "moment_integrals",
                detail: format!("T = {t} above the zeta budget {MOMENT_T_MAX}"),
            });
        }
        prev = t;
    }
    Ok(())
}

/// int_0^T |zeta(1/2 + it)|^power dt at every T of an increasing grid, all from one pass.
fn cumulative_at_step(power: i32, ts: &[f64], step: f64, gl: &GaussLegendre) -> Result<Vec<f64>> {
    let mut panels = Vec::new();
    let mut prev = 0.0;
    for (k, &t) in ts.iter().enumerate() {
        let n = ((t - prev) / step).ceil().max(0.0) as usize;
        for j in 0..n {
            let a = prev + (t - prev) * j as f64 / n as f64;
            let b = prev + (t - prev) * (j + 1) as f64 / n as f64;
            panels.push((k, a, b));
        }
        prev = t;
    }
    let values: Vec<Result<f64>> = panels
        .par_iter()
        .map(|&(_, a, b)| {
            let mut acc = 0.0;
            for (x, w) in gl.mapped(a, b) {
                acc += w * zeta(Complex64::new(0.5, x))?.norm().powi(power);
            }
            Ok(acc)
        })
        .collect();
    let mut out = vec![0.0; ts.len()];
    let mut running = 0.0;
    let mut idx = 0;
    for ((k, _, _), v) in panels.iter().zip(values) {
        while idx < *k {
            out[idx] = running;
            idx += 1;
        }
        running += v?;
    }
    while idx < ts.len() {
        out[idx] = running;
        idx += 1;
    }
    Ok(out)
}

/// Moment integrals with panel halving until two successive passes agree.
pub fn moment_integrals(power: u32, ts: &[f64], control: &StepControl) -> Result<Vec<f64>> {
    if power != 2 && power != 4 {
        return Err(Error::InvalidParameter(format!("moment power must be 2 or 4, got {power}")));
    }
    control.validate()?;
    check_grid(ts)?;
    let gl = GaussLegendre::new(GL_ORDER);
    let mut step = control.initial_step;
    let mut prev = cumulative_at_step(power as i32, ts, step, &gl)?;
    for _ in 0..control.max_refinements {
        step *= 0.5;
        let next = cumulative_at_step(power as i32, ts, step, &gl)?;
        let agree = prev
            .iter()
            .zip(&next)
            .all(|(a, b)| (a - b).abs() <= control.rel_tol * b.abs());
        if agree {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        function: "moment_integrals",
        estimate: Complex64::new(*prev.last().expect("nonempty grid"), 0.0),
        error: f64::NAN,
    })
}

/// int_0^T |zeta(1/2 + it)|^2 dt.
pub fn second_moment_zeta(big_t: f64, control: &StepControl) -> Result<f64> {
    Ok(moment_integrals(2, &[big_t], control)?[0])
}

/// int_0^T |zeta(1/2 + it)|^4 dt.
pub fn fourth_moment_zeta(big_t: f64, control: &StepControl) -> Result<f64> {
    Ok(moment_integrals(4, &[big_t], control)?[0])
}

fn log_points(ts: &[f64], integrals: &[f64]) -> Vec<(f64, f64)> {
    ts.iter().zip(integrals).map(|(&t, &i)| (t.ln(), i / t)).collect()
}

/// Second moment on a grid with the line I(T)/T = a + b log T.
pub fn second_moment_report(ts: &[f64], control: &StepControl) -> Result<MomentReport> {
    let start = Instant::now();
    if ts.iter().any(|&t| t <= 1.0) {
        return Err(Error::InvalidParameter("fit grid needs T > 1".into()));
    }
    let integrals = moment_integrals(2, ts, control)?;
    let pts = log_points(ts, &integrals);
    let (a, b) = linear_fit(&pts);
    let residuals = pts.iter().map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>().sqrt();
    Ok(MomentReport {
        t_grid: ts.to_vec(),
        integrals,
        fitted_coefficients: vec![a, b],
        residuals,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Fourth moment on a grid with I(T)/T fitted by a quartic in log T.
pub fn fourth_moment_report(ts: &[f64], control: &StepControl) -> Result<MomentReport> {
    let start = Instant::now();
    if ts.iter().any(|&t| t <= 1.0) {
        return Err(Error::InvalidParameter("fit grid needs T > 1".into()));
    }
    let integrals = moment_integrals(4, ts, control)?;
    let (coeffs, residuals) = polyfit(&log_points(ts, &integrals), 4)?;
    Ok(MomentReport {
        t_grid: ts.to_vec(),
        integrals,
        fitted_coefficients: coeffs,
        residuals,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Least-squares a in I(T)/T ~ a log^4 T.
pub fn log4_only_coefficient(ts: &[f64], integrals: &[f64]) -> f64 {
    let pts = log_points(ts, integrals);
    let num: f64 = pts.iter().map(|(x, y)| y * x.powi(4)).sum();
    let den: f64 = pts.iter().map(|(x, _)| x.powi(8)).sum();
    num / den
}

/// Geometric grid of n points from lo to hi.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo * (r * k as f64).exp() }).collect()
}

/// Test function h on the contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HChoice {
    /// h(w) = exp((w - 1)^2)
    GaussianShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub h_choice: HChoice,
    pub contour_re: f64,
    pub big_t: f64,
}

impl WeightSpec {
    pub fn new(contour_re: f64, big_t: f64) -> Result<Self> {
        if !(contour_re > 1.0) || !(big_t > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weight needs contour Re w > 1 and T > 1, got {contour_re} and {big_t}"
            )));
        }
        Ok(WeightSpec {
            h_choice: HChoice::GaussianShift,
            contour_re,
            big_t,
        })
    }

    pub fn h(&self, w: Complex64) -> Complex64 {
        match self.h_choice {
            HChoice::GaussianShift => ((w - 1.0) * (w - 1.0)).exp(),
        }
    }
}

/// M_{chi,T}(t) = (1/2 pi i) int_{Re w = L} K(1/2 + it, 0, w, chi) h(w) T^w dw with K the
/// product of the main-term kernels over the archimedean places.
pub fn smoothing_weight(
    field: &NumberField,
    chi: &HeckeCharacter,
    mu: &SpectralParams,
    t: f64,
    weight: &WeightSpec,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let log_t = weight.big_t.ln();
    let locals: Vec<_> = (0..field.place_count())
        .map(|v| {
            (
                field.place_type(v),
                LocalCharacterParams::new(chi.t_values[v], chi.ell_at(field, v)),
            )
        })
        .collect();
    let failure = std::sync::Mutex::new(None);
    let f = |w: Complex64| {
        let mut k = weight.h(w) * (w * log_t).exp();
        for (place, local) in &locals {
            match k_asym_main(*place, t, zero, w, local, mu) {
                Ok(m) => k *= m.value,
                Err(e) => {
                    *failure.lock().expect("poisoned") = Some(e);
                    return zero;
                }
            }
        }
        k
    };
    let res = integrate_vertical_line(f, weight.contour_re, Decay::Gaussian { rate: 1.0 }, spec);
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    let value = res?.value;
    if value.im.abs() > 1e-8 * value.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Domain {
            function: "smoothing_weight",
            detail: format!("integrand is not conjugate-symmetric: imaginary part {:.3e} of {:.3e}", value.im, value.re),
        });
    }
    Ok(value.re)
}

/// One evaluation of the exact complex-place kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityPoint {
    pub t: f64,
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub points: Vec<PositivityPoint>,
    /// Imaginary part below 1e-8 and real part above -1e-8 of the magnitude at every point.
    pub all_nonnegative: bool,
    pub warnings: Vec<String>,
}

/// Evaluates the exact complex-place kernel over a t grid and checks it is real and nonnegative.
pub fn landau_positivity_probe(
    w: f64,
    mu: f64,
    chi: &LocalCharacterParams,
    t_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<PositivityReport> {
    if !(w > 1.0) {
        return Err(Error::InvalidParameter(format!("probe needs w > 1, got {w}")));
    }
    let mu = SpectralParams::equal(Complex64::new(mu, 0.0));
    let mut points = Vec::with_capacity(t_grid.len());
    let mut warnings = Vec::new();
    let mut ok = true;
    for &t in t_grid {
        let k = k_exact_complex(t, Complex64::new(w, 0.0), chi, &mu, spec)?;
        let mag = k.value.norm();
        ok &= k.value.im.abs() <= 1e-8 * mag && k.value.re >= -1e-8 * mag;
        if let Some(msg) = k.warning {
            warnings.push(format!("t = {t}: {msg}"));
        }
        points.push(PositivityPoint {
            t,
            value: k.value,
            error: k.error,
        });
    }
    Ok(PositivityReport {
        points,
        all_nonnegative: ok,
        warnings,
    })
}
