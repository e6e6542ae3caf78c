//! Least-squares polynomial fits by Householder QR.

use crate::error::{Error, Result};

/// Coefficients c_0..c_degree minimizing sum (y - sum c_k x^k)^2, and the residual norm.
///
/// The abscissae are centred and scaled to [-1, 1] before the QR factorisation
/// and the coefficients are mapped back afterwards.
pub fn polyfit(points: &[(f64, f64)], degree: usize) -> Result<(Vec<f64>, f64)> {
    let n = points.len();
    let m = degree + 1;
    if n < m {
        return Err(Error::InvalidParameter(format!("{n} points cannot determine degree {degree}")));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let center = 0.5 * (lo + hi);
    let half = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let mut a: Vec<Vec<f64>> = points
        .iter()
        .map(|&(x, _)| {
            let u = (x - center) / half;
            (0..m).map(|k| u.powi(k as i32)).collect()
        })
        .collect();
    let mut y: Vec<f64> = points.iter().map(|p| p.1).collect();
    for k in 0..m {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::IllConditioned(0.0));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            for j in k..m {
                let d: f64 = (k..n).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vv;
                for i in k..n {
                    a[i][j] -= d * v[i - k];
                }
            }
            let d: f64 = (k..n).map(|i| v[i - k] * y[i]).sum::<f64>() * 2.0 / vv;
            for i in k..n {
                y[i] -= d * v[i - k];
            }
        }
    }
    let diag_max = (0..m).fold(0.0f64, |s, k| s.max(a[k][k].abs()));
    let diag_min = (0..m).fold(f64::INFINITY, |s, k| s.min(a[k][k].abs()));
    if diag_min <= 1e-13 * diag_max {
        return Err(Error::IllConditioned(diag_min / diag_max));
    }
    let mut u = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|j| a[k][j] * u[j]).sum();
        u[k] = (y[k] - s) / a[k][k];
    }
    let residual = y[m..].iter().map(|r| r * r).sum::<f64>().sqrt();
    // expand sum u_k ((x - center)/half)^k in powers of x
    let mut coeffs = vec![0.0; m];
    let mut basis = vec![1.0];
    for (k, &uk) in u.iter().enumerate() {
        for (j, &b) in basis.iter().enumerate() {
            coeffs[j] += uk * b;
        }
        if k + 1 < m {
            let mut next = vec![0.0; basis.len() + 1];
            for (j, &b) in basis.iter().enumerate() {
                next[j] -= b * center / half;
                next[j + 1] += b / half;
            }
            basis = next;
        }
    }
    Ok((coeffs, residual))
}

/// (intercept, slope) of the least-squares line.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_polynomial_recovered() {
        let pts: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = 6.0 + 0.1 * i as f64;
                (x, 0.05 * x.powi(4) - 0.3 * x.powi(3) + 2.0 * x - 1.0)
            })
            .collect();
        let (c, res) = polyfit(&pts, 4).unwrap();
        assert!((c[4] - 0.05).abs() < 1e-8, "{c:?}");
        assert!((c[3] + 0.3).abs() < 1e-6);
        assert!(res < 1e-8);
    }

    #[test]
    fn line() {
        let (a, b) = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((a - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        assert!(polyfit(&[(0.0, 1.0)], 1).is_err());
    }
}
