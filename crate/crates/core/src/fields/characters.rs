//! Unramified spherical Hecke characters, the budget kappa_chi and its sublevel sets.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::{NumberField, PlaceType};
use crate::error::{Error, Result};

/// Archimedean data of an unramified spherical idele-class character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeckeCharacter {
    /// t_v for every archimedean place.
    pub t_values: Vec<f64>,
    /// l_v for every complex place.
    pub ell_values: Vec<i64>,
    /// Integer coordinates m of the character in the unit lattice.
    pub lattice_index: Vec<i64>,
}

impl HeckeCharacter {
    pub fn trivial(field: &NumberField) -> Self {
        HeckeCharacter {
            t_values: vec![0.0; field.place_count()],
            ell_values: vec![0; field.r2],
            lattice_index: vec![0; field.unit_rank()],
        }
    }

    pub fn inverse(&self) -> Self {
        HeckeCharacter {
            t_values: self.t_values.iter().map(|t| -t).collect(),
            ell_values: self.ell_values.iter().map(|l| -l).collect(),
            lattice_index: self.lattice_index.iter().map(|m| -m).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.t_values.iter().all(|&t| t == 0.0) && self.ell_values.iter().all(|&l| l == 0)
    }

    /// l at place index `place`, zero at real places.
    pub fn ell_at(&self, field: &NumberField, place: usize) -> i64 {
        if place < field.r1 {
            0
        } else {
            self.ell_values[place - field.r1]
        }
    }

    /// max over places of |t_v| and |l_v|.
    pub fn size(&self) -> f64 {
        let t = self.t_values.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        self.ell_values.iter().fold(t, |m, l| m.max(l.unsigned_abs() as f64))
    }
}

/// Local component chi_v at z: |z|^{it} at real places, |z|_C^{l/2 + it} z^{-l} at complex places.
pub fn character_value(field: &NumberField, chi: &HeckeCharacter, place: usize, z: Complex64) -> Result<Complex64> {
    if place >= field.place_count() {
        return Err(Error::InvalidParameter(format!(
            "place {place} out of range for {} places",
            field.place_count()
        )));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let t = chi.t_values[place];
    match field.place_type(place) {
        PlaceType::Real => {
            if z.im != 0.0 {
                return Err(Error::domain("character_value", "real place needs a real argument"));
            }
            Ok(Complex64::from_polar(1.0, t * z.re.abs().ln()))
        }
        PlaceType::Complex => {
            let l = chi.ell_at(field, place) as f64;
            Ok(Complex64::from_polar(1.0, 2.0 * t * z.norm().ln() - l * z.arg()))
        }
    }
}

/// chi(e_j) for the j-th fundamental unit, from the stored log and argument data.
pub fn unit_character_value(field: &NumberField, chi: &HeckeCharacter, unit: usize) -> Complex64 {
    Complex64::from_polar(1.0, unit_phase(field, chi, unit))
}

fn unit_phase(field: &NumberField, chi: &HeckeCharacter, unit: usize) -> f64 {
    let logs = &field.unit_logs[unit];
    let mut phase = 0.0;
    for (v, &lg) in logs.iter().enumerate() {
        phase += chi.t_values[v] * lg;
    }
    for (k, &a) in field.unit_args[unit].iter().enumerate() {
        phase -= chi.ell_values[k] as f64 * a;
    }
    phase
}

/// Phase of chi on the generator of the roots of unity, in units of 2 pi.
fn root_condition(field: &NumberField, ell: &[i64]) -> bool {
    let w = field.roots_of_unity as i64;
    let s: i64 = ell.iter().zip(&field.root_exponents).map(|(l, a)| l * a).sum();
    s.rem_euclid(w) == 0
}

/// kappa_chi(t) = prod_real (1 + |t + t_v|) prod_complex (1 + l_v^2 + 4 (t + t_v)^2).
pub fn kappa_chi(field: &NumberField, chi: &HeckeCharacter, t: f64) -> f64 {
    let mut k = 1.0;
    for v in 0..field.place_count() {
        let x = t + chi.t_values[v];
        k *= match field.place_type(v) {
            PlaceType::Real => 1.0 + x.abs(),
            PlaceType::Complex => {
                let l = chi.ell_at(field, v) as f64;
                1.0 + l * l + 4.0 * x * x
            }
        };
    }
    k
}

struct Lu {
    a: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(mut a: Vec<Vec<f64>>) -> Result<(Self, f64)> {
        let n = a.len();
        let row_norms: f64 = a
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product::<f64>();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .expect("nonempty pivot range");
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                det = -det;
            }
            let piv = a[k][k];
            det *= piv;
            if piv == 0.0 {
                return Err(Error::IllConditioned(0.0));
            }
            for i in k + 1..n {
                let f = a[i][k] / piv;
                a[i][k] = f;
                for j in k + 1..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        let rel = det.abs() / row_norms.max(f64::MIN_POSITIVE);
        Ok((Lu { a, perm }, rel))
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i][j] * x[j];
            }
            x[i] /= self.a[i][i];
        }
        x
    }
}

fn for_each_box(ranges: &[i64], mut f: impl FnMut(&[i64])) {
    let mut cur: Vec<i64> = ranges.iter().map(|r| -r).collect();
    if ranges.is_empty() {
        f(&cur);
        return;
    }
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            cur[i] += 1;
            if cur[i] <= ranges[i] {
                break;
            }
            cur[i] = -ranges[i];
            i += 1;
            if i == ranges.len() {
                return;
            }
        }
    }
}

const TRIVIALITY_TOL: f64 = 1e-10;

/// All unramified spherical characters with max(|t_v|, |l_v|) <= bound.
///
/// The conditions sum d_v t_v = 0 and chi(e_j) = 1 form a square linear
/// system in t for each choice of l and of the integer lattice coordinates m;
/// the m box is bounded a priori from the row sums of the unit-log matrix.
pub fn character_lattice(field: &NumberField, bound: f64) -> Result<Vec<HeckeCharacter>> {
    field.validate()?;
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::InvalidParameter(format!("bound must be positive, got {bound}")));
    }
    let p = field.place_count();
    let rank = field.unit_rank();
    let lmax = bound.floor() as i64;
    let ell_ranges = vec![lmax; field.r2];
    let mut ell_choices = Vec::new();
    for_each_box(&ell_ranges, |ell| {
        if root_condition(field, ell) {
            ell_choices.push(ell.to_vec());
        }
    });

    let mut out = Vec::new();
    if rank == 0 {
        for ell in ell_choices {
            let chi = HeckeCharacter {
                t_values: vec![0.0; p],
                ell_values: ell,
                lattice_index: vec![],
            };
            out.push(chi);
        }
        return Ok(out);
    }

    let mut rows = Vec::with_capacity(p);
    rows.push(field.places().map(|k| k.degree()).collect::<Vec<_>>());
    rows.extend(field.unit_logs.iter().cloned());
    let (lu, rel_det) = Lu::new(rows)?;
    if rel_det < 1e-10 {
        return Err(Error::IllConditioned(rel_det));
    }
    let last = p - 1;
    let d_last = field.place_type(last).degree();
    for ell in ell_choices {
        let arg_shift: Vec<f64> = (0..rank)
            .map(|j| {
                field.unit_args[j]
                    .iter()
                    .zip(&ell)
                    .map(|(a, &l)| a * l as f64)
                    .sum::<f64>()
            })
            .collect();
        let m_ranges: Vec<i64> = (0..rank)
            .map(|j| {
                let row: f64 = field.unit_logs[j].iter().map(|x| x.abs()).sum();
                ((row * bound + arg_shift[j].abs()) / (2.0 * PI)).ceil() as i64 + 1
            })
            .collect();
        for_each_box(&m_ranges, |m| {
            let mut rhs = vec![0.0; p];
            for j in 0..rank {
                rhs[j + 1] = 2.0 * PI * m[j] as f64 + arg_shift[j];
            }
            let mut t = lu.solve(&rhs);
            let partial: f64 = (0..last).map(|v| field.place_type(v).degree() * t[v]).sum();
            t[last] = -partial / d_last;
            if t.iter().any(|x| x.abs() > bound + 1e-9) {
                return;
            }
            let chi = HeckeCharacter {
                t_values: t,
                ell_values: ell.clone(),
                lattice_index: m.to_vec(),
            };
            let ok = (0..rank).all(|j| (unit_character_value(field, &chi, j) - 1.0).norm() < TRIVIALITY_TOL);
            if ok {
                out.push(chi);
            }
        });
    }
    Ok(out)
}

/// Count and total Lebesgue measure of the sets {t : kappa_chi(t) <= T}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Budget {
    pub character_count: usize,
    pub total_measure: f64,
    pub per_character: Vec<(HeckeCharacter, f64)>,
}

/// Measure of {t : kappa_chi(t) <= T}.
///
/// Every factor of kappa is at least 1, so the set lies inside the
/// intersection of the single-factor windows. That window is cut at the kinks
/// -t_v, each smooth piece is scanned on a fine grid and every crossing of
/// kappa = T is refined by bisection.
pub fn sublevel_measure(field: &NumberField, chi: &HeckeCharacter, big_t: f64) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let slack = big_t - 1.0;
    if slack < 0.0 {
        return 0.0;
    }
    let mut kinks = Vec::new();
    for v in 0..field.place_count() {
        let center = -chi.t_values[v];
        let radius = match field.place_type(v) {
            PlaceType::Real => {
                kinks.push(center);
                slack
            }
            PlaceType::Complex => {
                let l = chi.ell_at(field, v) as f64;
                let r2 = slack - l * l;
                if r2 < 0.0 {
                    return 0.0;
                }
                0.5 * r2.sqrt()
            }
        };
        lo = lo.max(center - radius);
        hi = hi.min(center + radius);
    }
    if lo >= hi {
        return 0.0;
    }
    let mut cuts = vec![lo, hi];
    cuts.extend(kinks.into_iter().filter(|&k| k > lo && k < hi));
    cuts.sort_by(f64::total_cmp);
    let g = |t: f64| kappa_chi(field, chi, t) - big_t;
    let mut total = 0.0;
    const SCAN: usize = 200;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let h = (b - a) / SCAN as f64;
        let mut x0 = a;
        let mut g0 = g(x0);
        for k in 1..=SCAN {
            let x1 = if k == SCAN { b } else { a + k as f64 * h };
            let g1 = g(x1);
            total += match (g0 <= 0.0, g1 <= 0.0) {
                (true, true) => x1 - x0,
                (false, false) => 0.0,
                (inside_left, _) => {
                    let r = bisect(&g, x0, x1);
                    if inside_left {
                        r - x0
                    } else {
                        x1 - r
                    }
                }
            };
            x0 = x1;
            g0 = g1;
        }
    }
    total
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a) <= 0.0;
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (g(m) <= 0.0) == ga {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Characters with nonempty {kappa_chi <= T} and the total measure of those sets.
pub fn moment_budget(field: &NumberField, big_t: f64) -> Result<Budget> {
    if !(big_t > 1.0 && big_t.is_finite()) {
        return Err(Error::InvalidParameter(format!("T must exceed 1, got {big_t}")));
    }
    // kappa <= T forces |t_v - t_w| <= 2 (T - 1), hence |t_v| <= 2 (T - 1), and l^2 <= T - 1
    let bound = (2.0 * (big_t - 1.0)).max((big_t - 1.0).sqrt()) + 1e-9;
    let chars = character_lattice(field, bound)?;
    let mut per_character = Vec::new();
    let mut total = 0.0;
    for chi in chars {
        let m = sublevel_measure(field, &chi, big_t);
        if m > 0.0 {
            total += m;
            per_character.push((chi, m));
        }
    }
    Ok(Budget {
        character_count: per_character.len(),
        total_measure: total,
        per_character,
    })
}

/// Least-squares slope of log(total measure) against log T.
pub fn budget_growth_exponent(field: &NumberField, ts: &[f64]) -> Result<f64> {
    if ts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two T values".into()));
    }
    let mut pts = Vec::with_capacity(ts.len());
    for &t in ts {
        let b = moment_budget(field, t)?;
        pts.push((t.ln(), b.total_measure.ln()));
    }
    Ok(crate::numerics::linear_fit(&pts).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{builtin_field, BuiltinField};
    use std::f64::consts::SQRT_2;

    #[test]
    fn lattice_q() {
        let q = builtin_field(BuiltinField::Q);
        let l = character_lattice(&q, 100.0).unwrap();
        assert_eq!(l.len(), 1);
        assert!(l[0].is_trivial());
    }

    #[test]
    fn lattice_gaussian() {
        let f = builtin_field(BuiltinField::QI);
        let l = character_lattice(&f, 10.0).unwrap();
        let ells: Vec<i64> = l.iter().map(|c| c.ell_values[0]).collect();
        assert_eq!(ells, vec![-8, -4, 0, 4, 8]);
        assert!(l.iter().all(|c| c.t_values == vec![0.0]));
    }

    #[test]
    fn lattice_sqrt2() {
        let f = builtin_field(BuiltinField::QSqrt2);
        let l = character_lattice(&f, 8.0).unwrap();
        let ms: Vec<i64> = l.iter().map(|c| c.lattice_index[0]).collect();
        assert_eq!(ms.len(), 5);
        let step = PI / (1.0 + SQRT_2).ln();
        for c in &l {
            assert_eq!(c.t_values[0] + c.t_values[1], 0.0);
            let m = c.lattice_index[0] as f64;
            assert!((c.t_values[0].abs() - (m * step).abs()).abs() < 1e-12);
        }
        assert!((step - 3.564_43).abs() < 1e-5);
    }

    #[test]
    fn unit_value_from_embeddings() {
        let f = builtin_field(BuiltinField::QSqrt2);
        let l = character_lattice(&f, 4.0).unwrap();
        let chi = l.iter().find(|c| c.lattice_index == vec![1]).unwrap();
        let e1 = Complex64::new(1.0 + SQRT_2, 0.0);
        let e2 = Complex64::new(1.0 - SQRT_2, 0.0);
        let v = character_value(&f, chi, 0, e1).unwrap() * character_value(&f, chi, 1, e2).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
        assert!(character_value(&f, chi, 0, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn value_gaussian() {
        let f = builtin_field(BuiltinField::QI);
        let chi = HeckeCharacter {
            t_values: vec![0.0],
            ell_values: vec![4],
            lattice_index: vec![],
        };
        let z = Complex64::from_polar(1.0, PI / 4.0);
        let v = character_value(&f, &chi, 0, z).unwrap();
        assert!((v + 1.0).norm() < 1e-15);
    }

    #[test]
    fn kappa_examples() {
        let q = builtin_field(BuiltinField::Q);
        assert_eq!(kappa_chi(&q, &HeckeCharacter::trivial(&q), 3.0), 4.0);
        let qi = builtin_field(BuiltinField::QI);
        let chi = HeckeCharacter {
            t_values: vec![0.0],
            ell_values: vec![4],
            lattice_index: vec![],
        };
        assert_eq!(kappa_chi(&qi, &chi, 1.0), 21.0);
        let q2 = builtin_field(BuiltinField::QSqrt2);
        assert_eq!(kappa_chi(&q2, &HeckeCharacter::trivial(&q2), 2.0), 9.0);
    }

    #[test]
    fn budget_q_and_gaussian() {
        let q = builtin_field(BuiltinField::Q);
        let b = moment_budget(&q, 50.0).unwrap();
        assert_eq!(b.character_count, 1);
        assert!((b.total_measure - 98.0).abs() < 1e-9);
        let qi = builtin_field(BuiltinField::QI);
        let b = moment_budget(&qi, 100.0).unwrap();
        assert_eq!(b.character_count, 5);
        let closed: f64 = [-8.0f64, -4.0, 0.0, 4.0, 8.0].iter().map(|l| (99.0 - l * l).sqrt()).sum();
        assert!((b.total_measure - closed).abs() < 1e-9);
    }

    #[test]
    fn budget_sqrt2_against_grid_scan() {
        let f = builtin_field(BuiltinField::QSqrt2);
        let big_t = 30.0;
        let b = moment_budget(&f, big_t).unwrap();
        for (chi, m) in &b.per_character {
            let h = 1e-4;
            let count = (-700_000..700_000)
                .filter(|&k| kappa_chi(&f, chi, k as f64 * h) <= big_t)
                .count();
            assert!((count as f64 * h - m).abs() < 1e-3, "m {m} vs scan {}", count as f64 * h);
        }
    }

    #[test]
    fn ill_conditioned_units() {
        let mut f = builtin_field(BuiltinField::QSqrt2);
        f.r1 = 3;
        f.unit_logs = vec![vec![1.0, -0.5, -0.5], vec![2.0, -1.0, -1.0]];
        f.unit_args = vec![vec![], vec![]];
        assert!(matches!(character_lattice(&f, 3.0), Err(Error::IllConditioned(_))));
    }
}
