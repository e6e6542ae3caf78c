//! One function per subcommand. Every flag is range-checked before any computation.

use gl2moments::fields::{
    builtin_field, character_lattice, kappa_chi, moment_budget, parse_field_toml, BuiltinField, HeckeCharacter,
    NumberField, PlaceType,
};
use gl2moments::kernels::{g_complex, g_real, k_asym_main, k_exact_complex, k_exact_real, LocalCharacterParams, SpectralParams};
use gl2moments::moments::{
    fourth_moment_report, geometric_grid, second_moment_report, smoothing_weight, StepControl, WeightSpec, MOMENT_T_MAX,
};
use gl2moments::numerics::QuadratureSpec;
use gl2moments::padic_norms::{global_norm_product_check, local_norm_integral, primes_up_to, LocalNormParams};
use gl2moments::poincare::{cauchy_convergence_probe, domination_check, eval_poincare_q, SeriesTruncation, UpperHalfPoint};
use gl2moments::verify::criteria;
use gl2moments::whittaker::{
    finite_mellin_whittaker, hecke_local_integral, standard_l_factor, tate_brute_force_mellin, DifferentalData,
    LocalCharacter, LocalSatakeData,
};
use num_complex::Complex64;
use std::str::FromStr;

use super::{
    CharacterArgs, Command, Failure, KernelArgs, MomentArgs, NormArgs, PoincareArgs, VerifyArgs, WhittakerArgs,
};
use crate::report::{num, Report, Table};

/// The report, plus the check failure to signal once it has been written.
pub type Outcome = Result<(Report, Option<Failure>), Failure>;

const MAX_GRID: usize = 10_000;
const MAX_EXACT_GRID: usize = 200;
/// Two series evaluations with this relative agreement count as equal.
const LOCAL_CHECK_TOL: f64 = 1e-10;
const NORM_PRODUCT_TOL: f64 = 1e-6;
const NORM_PRODUCT_PRIMES: u64 = 100_000;

pub fn dispatch(command: &Command, config: String, spec: &QuadratureSpec) -> Outcome {
    match command {
        Command::Kernel(a) => kernel(a, config, spec),
        Command::Characters(a) => characters(a, config),
        Command::Whittaker(a) => whittaker(a, config),
        Command::Poincare(a) => poincare(a, config),
        Command::Norms(a) => norms(a, config),
        Command::Moment(a) => moment(a, config, spec),
        Command::Verify(a) => verify(a, config),
    }
}

fn in_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<(), Failure> {
    if x.is_finite() && x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{name} must lie in [{lo}, {hi}], got {x}")))
    }
}

fn complex_in_range(name: &str, z: Complex64, max_norm: f64) -> Result<(), Failure> {
    if z.re.is_finite() && z.im.is_finite() && z.norm() <= max_norm {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{name} must have modulus at most {max_norm}, got {z}")))
    }
}

fn grid_in_range(name: &str, grid: &[f64], lo: f64, hi: f64, max_len: usize) -> Result<(), Failure> {
    if grid.len() > max_len {
        return Err(Failure::invalid(format!("{name} has {} points, at most {max_len} allowed", grid.len())));
    }
    grid.iter().try_for_each(|&x| in_range(name, x, lo, hi))
}

fn load_field(source: &str) -> Result<NumberField, Failure> {
    if let Ok(which) = BuiltinField::from_str(source) {
        return Ok(builtin_field(which));
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Failure::invalid(format!("field {source:?} is neither builtin nor a readable file: {e}")))?;
    Ok(parse_field_toml(&text)?)
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn cnum(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

fn kernel(a: &KernelArgs, config: String, spec: &QuadratureSpec) -> Outcome {
    let max_grid = if a.exact { MAX_EXACT_GRID } else { MAX_GRID };
    grid_in_range("--t-grid", &a.t_grid.0, -1e6, 1e6, max_grid)?;
    complex_in_range("--s", a.s, 1e3)?;
    complex_in_range("--v", a.v, 1e3)?;
    complex_in_range("--w", a.w, 1e3)?;
    complex_in_range("--mu", a.mu, 1e3)?;
    in_range("--t-nu", a.t_nu, -1e6, 1e6)?;
    in_range("--ell", a.ell as f64, -1000.0, 1000.0)?;
    let order_limit = match a.place {
        PlaceType::Real => 0.5,
        PlaceType::Complex => 1.0,
    };
    let order_re = a.mu.im.abs() * if a.place == PlaceType::Complex { 2.0 } else { 1.0 };
    if order_re >= order_limit {
        return Err(Failure::invalid(format!("--mu has imaginary part too large for the {} place", a.place)));
    }
    if a.place == PlaceType::Real && a.ell != 0 {
        return Err(Failure::invalid("--ell must be 0 at a real place"));
    }
    if !(a.w.re > 0.0) {
        return Err(Failure::invalid(format!("--w needs a positive real part, got {}", a.w)));
    }
    if a.exact && !(a.w.re > 0.75) {
        return Err(Failure::invalid(format!("--exact needs Re w > 3/4, got {}", a.w)));
    }
    let mu = SpectralParams::equal(a.mu);
    let chi = LocalCharacterParams::new(a.t_nu, a.ell);
    let mut report = Report::new("kernel", config);

    let mut gamma = Table::new("gamma_kernel", &["place", "s_re", "s_im", "v_re", "v_im", "w_re", "w_im", "value_re", "value_im"]);
    let g = match a.place {
        PlaceType::Real => g_real(a.s, a.v, a.w)?,
        PlaceType::Complex => g_complex(a.s, a.v, a.w)?,
    };
    let mut cells = vec![a.place.to_string()];
    for z in [a.s, a.v, a.w, g] {
        cells.extend(cnum(z));
    }
    gamma.push("gamma_kernel", cells);
    report.tables.push(gamma);

    let mut columns = vec!["t", "main_re", "main_im"];
    if a.exact {
        columns.extend(["exact_re", "exact_im", "exact_error"]);
    }
    let mut table = Table::new("kernel", &columns);
    for &t in &a.t_grid.0 {
        let main = k_asym_main(a.place, t, a.v, a.w, &chi, &mu)?;
        let mut cells = vec![num(t)];
        cells.extend(cnum(main.value));
        let mut tag = "main_term";
        if a.exact {
            let exact = match a.place {
                PlaceType::Real => k_exact_real(t, a.w, &chi, &mu, spec)?,
                PlaceType::Complex => k_exact_complex(t, a.w, &chi, &mu, spec)?,
            };
            cells.extend(cnum(exact.value));
            cells.push(num(exact.error));
            tag = "main_term;exact_kernel";
        }
        table.push(tag, cells);
    }
    if a.place == PlaceType::Real {
        report.settings.push(("main_term_normalization", "real-place constant set to 1".into()));
    }
    report.tables.push(table);
    Ok((report, None))
}

fn characters(a: &CharacterArgs, config: String) -> Outcome {
    in_range("--bound", a.bound, 0.0, 1000.0)?;
    if let Some(super::Grid(grid)) = &a.t_grid {
        grid_in_range("--t-grid", grid, -1e6, 1e6, MAX_GRID)?;
    }
    if let Some(t) = a.big_t {
        in_range("--T", t, 1.0 + 1e-9, 1e4)?;
    }
    let field = load_field(&a.field)?;
    let chars = character_lattice(&field, a.bound)?;
    let mut report = Report::new("characters", config);
    report.settings.push(("field", field.name.clone()));
    let mut table = Table::new("characters", &["lattice_index", "t_values", "ell_values", "size"]);
    for chi in &chars {
        table.push(
            "character",
            vec![joined(&chi.lattice_index), joined(&chi.t_values.iter().map(|&t| num(t)).collect::<Vec<_>>()), joined(&chi.ell_values), num(chi.size())],
        );
    }
    report.tables.push(table);
    if let Some(super::Grid(grid)) = &a.t_grid {
        let mut kappa = Table::new("kappa", &["lattice_index", "t", "kappa"]);
        for chi in &chars {
            for &t in grid {
                kappa.push("kappa", vec![joined(&chi.lattice_index), num(t), num(kappa_chi(&field, chi, t))]);
            }
        }
        report.tables.push(kappa);
    }
    if let Some(t) = a.big_t {
        let budget = moment_budget(&field, t)?;
        let mut table = Table::new("budget", &["T", "character_count", "total_measure"]);
        table.push("moment_budget", vec![num(t), budget.character_count.to_string(), num(budget.total_measure)]);
        report.tables.push(table);
    }
    Ok((report, None))
}

fn whittaker(a: &WhittakerArgs, config: String) -> Outcome {
    in_range("--bound", a.bound, 2.0, 1000.0)?;
    complex_in_range("--s", a.s, 1e3)?;
    complex_in_range("--v", a.v, 1e3)?;
    in_range("|--alpha|", a.alpha.norm(), 1e-3, 1e3)?;
    let mut report = Report::new("whittaker", config);
    let mut table = Table::new("local_checks", &["kind", "q", "delta", "series_re", "series_im", "closed_re", "closed_im", "relative_gap", "tail_bound"]);
    let mut failed = Vec::new();
    let mut record = |table: &mut Table, tag: &str, q: u64, delta: u32, series: Complex64, closed: Complex64, tail: f64| {
        let gap = (series - closed).norm() / closed.norm().max(f64::MIN_POSITIVE);
        if !(gap <= LOCAL_CHECK_TOL + 2.0 * tail / closed.norm().max(f64::MIN_POSITIVE)) {
            failed.push(format!("{tag} at q = {q}"));
        }
        let mut cells = vec![tag.to_string(), q.to_string(), delta.to_string()];
        cells.extend(cnum(series));
        cells.extend(cnum(closed));
        cells.push(num(gap));
        cells.push(num(tail));
        table.push(tag, cells);
    };
    for q in primes_up_to(a.bound as u64) {
        for delta in 0..2u32 {
            let d = DifferentalData::new(q, delta);
            let chi = LocalCharacter::trivial();
            let closed = finite_mellin_whittaker(&chi, q, &d, a.s, a.v)?;
            let brute = tate_brute_force_mellin(&chi, q, &d, a.s, a.v, 400)?;
            record(&mut table, "tate_local", q, delta, brute.value, closed, brute.tail_bound);
        }
        let data = LocalSatakeData::new(q, a.alpha, 1.0 / a.alpha.conj())?;
        let sum = hecke_local_integral(&data, a.s, 400)?;
        let closed = standard_l_factor(&data, (-a.s * (q as f64).ln()).exp())?;
        record(&mut table, "hecke_local", q, 0, sum.value, closed, sum.tail_bound);
    }
    report.tables.push(table);
    let check = (!failed.is_empty()).then(|| Failure::check(format!("closed forms disagree: {}", failed.join(", "))));
    Ok((report, check))
}

fn poincare(a: &PoincareArgs, config: String) -> Outcome {
    in_range("--bound", a.bound, 8.0, 2000.0)?;
    in_range("Im --z", a.z.im, 1e-3, 1e3)?;
    in_range("Re --z", a.z.re, -1e3, 1e3)?;
    complex_in_range("--v", a.v, 50.0)?;
    complex_in_range("--w", a.w, 50.0)?;
    if let Some(eps) = a.domination {
        in_range("--domination", eps, 1e-3, 1.0)?;
        if a.v.im != 0.0 || a.w.im != 0.0 {
            return Err(Failure::invalid("--domination needs real --v and --w"));
        }
    }
    let z = UpperHalfPoint::new(a.z.re, a.z.im)?;
    let n = a.bound as u32;
    let ladder = [n / 8, n / 4, n / 2, n];
    let probe = cauchy_convergence_probe(&z, a.v, a.w, &ladder)?;
    let mut report = Report::new("poincare", config);
    let mut table = Table::new("partial_sums", &["N", "value_re", "value_im", "increment"]);
    for (k, (&n, &s)) in probe.ladder.iter().zip(&probe.partial_sums).enumerate() {
        let inc = if k == 0 { String::new() } else { num(probe.increments[k - 1]) };
        let [re, im] = cnum(s);
        table.push("poincare_partial", vec![n.to_string(), re, im, inc]);
    }
    report.tables.push(table);
    let mut summary = Table::new("cauchy_probe", &["converged", "growth"]);
    summary.push("cauchy_probe", vec![probe.converged.to_string(), num(probe.growth)]);
    report.tables.push(summary);
    if a.v.re > 1.0 && a.w.re > 1.0 {
        let value = eval_poincare_q(&z, a.v, a.w, &SeriesTruncation::uniform(n)?)?;
        let mut table = Table::new("series_value", &["N", "value_re", "value_im", "tail_estimate"]);
        let [re, im] = cnum(value.value);
        table.push("poincare_series", vec![n.to_string(), re, im, num(value.tail_estimate)]);
        report.tables.push(table);
    }
    if let Some(eps) = a.domination {
        let dom = domination_check(&[0.0, 0.25, 0.5], &[0.5, 1.0, 2.0, 10.0], a.v.re, a.w.re, eps, &SeriesTruncation::uniform(n.min(60))?)?;
        let mut table = Table::new("domination", &["x", "y", "ratio"]);
        for p in &dom.points {
            table.push("domination", vec![num(p.x), num(p.y), num(p.ratio)]);
        }
        report.tables.push(table);
        report.settings.push(("domination_constant", num(dom.constant)));
    }
    Ok((report, None))
}

fn norms(a: &NormArgs, config: String) -> Outcome {
    in_range("--bound", a.bound, 2.0, 1e4)?;
    grid_in_range("--sigma-grid", &a.sigma_grid.0, 1.0 + 1e-9, 100.0, 1000)?;
    let mut report = Report::new("norms", config);
    let mut table = Table::new("local_norms", &["q", "sigma", "exact", "bound"]);
    let mut failed = Vec::new();
    for q in primes_up_to(a.bound as u64) {
        for &sigma in &a.sigma_grid.0 {
            let (exact, bound) = local_norm_integral(&LocalNormParams::new(q, sigma)?);
            if !(exact <= bound) {
                failed.push(format!("q = {q}, sigma = {sigma}"));
            }
            table.push("local_norm", vec![q.to_string(), num(sigma), num(exact), num(bound)]);
        }
    }
    report.tables.push(table);
    let prod = global_norm_product_check(3.0, 3.0, NORM_PRODUCT_PRIMES)?;
    let mut table = Table::new("global_product", &["prime_bound", "product", "zeta_form", "gap"]);
    table.push("norm_product", vec![NORM_PRODUCT_PRIMES.to_string(), num(prod.product), num(prod.zeta_form), num(prod.gap)]);
    report.tables.push(table);
    if !(prod.gap < NORM_PRODUCT_TOL) {
        failed.push(format!("global product gap {}", prod.gap));
    }
    let check = (!failed.is_empty()).then(|| Failure::check(format!("norm bound violated: {}", failed.join(", "))));
    Ok((report, check))
}

fn moment(a: &MomentArgs, config: String, spec: &QuadratureSpec) -> Outcome {
    if a.power != 2 && a.power != 4 {
        return Err(Failure::invalid(format!("--power must be 2 or 4, got {}", a.power)));
    }
    in_range("--T", a.big_t, 100.0, MOMENT_T_MAX)?;
    let min_points = if a.power == 2 { 2 } else { 5 };
    in_range("--points", a.points as f64, min_points as f64, 256.0)?;
    let weight = match &a.t_grid {
        Some(super::Grid(grid)) => {
            grid_in_range("--t-grid", grid, -1e4, 1e4, 1000)?;
            complex_in_range("--mu", a.mu, 1e3)?;
            if a.w.im != 0.0 {
                return Err(Failure::invalid("--w is the real part of the contour and must be real"));
            }
            in_range("--w", a.w.re, 1.0 + 1e-9, 10.0)?;
            if !SpectralParams::equal(a.mu).kim_shahidi_admissible() {
                return Err(Failure::invalid(format!("--mu needs |Im mu| < 1/9, got {}", a.mu)));
            }
            Some((load_field(&a.field)?, grid, WeightSpec::new(a.w.re, a.big_t)?))
        }
        None => None,
    };
    let grid = geometric_grid(a.big_t / 8.0, a.big_t, a.points);
    let control = StepControl::default();
    let (result, tag) = if a.power == 2 {
        (second_moment_report(&grid, &control)?, "second_moment")
    } else {
        (fourth_moment_report(&grid, &control)?, "fourth_moment")
    };
    eprintln!("moment integrals took {:.2} s", result.runtime_seconds);
    let mut report = Report::new("moment", config);
    let mut table = Table::new("moment", &["T", "integral", "fit_residual"]);
    for (&t, &i) in result.t_grid.iter().zip(&result.integrals) {
        let fitted: f64 = result.fitted_coefficients.iter().rev().fold(0.0, |acc, c| acc * t.ln() + c);
        table.push(tag, vec![num(t), num(i), num(i / t - fitted)]);
    }
    report.tables.push(table);
    let mut fit = Table::new("fit", &["log_power", "coefficient"]);
    for (k, c) in result.fitted_coefficients.iter().enumerate() {
        fit.push("moment_fit", vec![k.to_string(), num(*c)]);
    }
    report.tables.push(fit);
    if let Some((field, t_grid, weight)) = weight {
        let chi = HeckeCharacter::trivial(&field);
        let mu = SpectralParams::equal(a.mu);
        let mut table = Table::new("weight", &["t", "weight"]);
        for &t in t_grid {
            table.push("smoothing_weight", vec![num(t), num(smoothing_weight(&field, &chi, &mu, t, &weight, spec)?)]);
        }
        report.settings.push(("weight_field", field.name.clone()));
        report.tables.push(table);
    }
    Ok((report, None))
}

fn verify(a: &VerifyArgs, config: String) -> Outcome {
    let all = criteria();
    for id in &a.only {
        if !all.iter().any(|c| c.id == *id) {
            return Err(Failure::invalid(format!("--only: no criterion {id}")));
        }
    }
    let mut report = Report::new("verify", config);
    let mut table = Table::new("criteria", &["id", "name", "passed", "measured"]);
    let mut notes = Table::new("notes", &["id", "note"]);
    let mut failed = Vec::new();
    for criterion in all.iter().filter(|c| a.only.is_empty() || a.only.contains(&c.id)) {
        let outcome = criterion.run();
        eprintln!("{}", outcome.line());
        if !outcome.passed {
            failed.push(outcome.id);
        }
        table.push("acceptance", vec![outcome.id.to_string(), outcome.name.into(), outcome.passed.to_string(), outcome.measured.clone()]);
        for note in &outcome.notes {
            notes.push("acceptance_note", vec![outcome.id.to_string(), note.clone()]);
        }
    }
    report.tables.push(table);
    report.tables.push(notes);
    let check = (!failed.is_empty()).then(|| Failure::check(format!("criteria {failed:?} failed")));
    Ok((report, check))
}
