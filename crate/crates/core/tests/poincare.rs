use gl2moments::poincare::{
    cauchy_convergence_probe, domination_check, eval_eisenstein_q, eval_poincare_q, SeriesTruncation, UpperHalfPoint,
};
use gl2moments::Error;
use num_complex::Complex64;

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// Fourier expansion with 60 terms at 25 digits
const EISENSTEIN_I_2: f64 = 2.784201545330791;
const EISENSTEIN_Z_3: f64 = 2.911280260265534;

#[test]
fn eisenstein_matches_fourier_expansion() {
    let e = eval_eisenstein_q(&UpperHalfPoint::new(0.0, 1.0).unwrap(), r(2.0), &SeriesTruncation::uniform(400).unwrap()).unwrap();
    assert!((e.value.re - EISENSTEIN_I_2).abs() < 1e-7 * EISENSTEIN_I_2, "{}", e.value);
    let e = eval_eisenstein_q(&UpperHalfPoint::new(0.2, 1.3).unwrap(), r(3.0), &SeriesTruncation::uniform(200).unwrap()).unwrap();
    assert!((e.value.re - EISENSTEIN_Z_3).abs() < 1e-8 * EISENSTEIN_Z_3, "{}", e.value);
}

#[test]
fn eisenstein_leading_term_high_in_the_cusp() {
    let e = eval_eisenstein_q(&UpperHalfPoint::new(0.0, 100.0).unwrap(), r(2.0), &SeriesTruncation::uniform(50).unwrap()).unwrap();
    assert!((e.value.re / 1e4 - 1.0).abs() < 1e-5);
}

#[test]
fn poincare_is_invariant_under_inversion() {
    let trunc = SeriesTruncation::uniform(60).unwrap();
    let z = UpperHalfPoint::new(0.3, 0.8).unwrap();
    let a = eval_poincare_q(&z, r(3.0), r(3.0), &trunc).unwrap();
    let b = eval_poincare_q(&z.inverted(), r(3.0), r(3.0), &trunc).unwrap();
    assert!((a.value - b.value).norm() < a.tail_estimate + b.tail_estimate);
    assert!((a.value - b.value).norm() < 1e-6 * a.value.norm());
}

#[test]
fn poincare_translation_invariance() {
    let trunc = SeriesTruncation::uniform(30).unwrap();
    let at = |x: f64| eval_poincare_q(&UpperHalfPoint::new(x, 1.1).unwrap(), r(2.5), r(3.0), &trunc).unwrap().value;
    assert_eq!(at(0.375), at(1.375));
    assert_eq!(at(0.375), at(-2.625));
    assert!((at(0.3) - at(5.3)).norm() < 1e-12 * at(0.3).norm());
}

#[test]
fn poincare_leading_behaviour_high_in_the_cusp() {
    // y^v times the translation sum, which is y int Phi = 2y for w = 3
    let e = eval_poincare_q(&UpperHalfPoint::new(0.0, 10.0).unwrap(), r(3.0), r(3.0), &SeriesTruncation::uniform(50).unwrap()).unwrap();
    assert!((e.value.re / 2e4 - 1.0).abs() < 1e-5, "{}", e.value);
}

#[test]
fn poincare_is_positive_for_real_parameters() {
    let trunc = SeriesTruncation::uniform(20).unwrap();
    for (x, y) in [(0.0, 0.5), (0.4, 1.0), (0.9, 3.0)] {
        let e = eval_poincare_q(&UpperHalfPoint::new(x, y).unwrap(), r(2.2), r(2.5), &trunc).unwrap();
        assert!(e.value.re > 0.0 && e.value.im == 0.0);
    }
}

#[test]
fn domination_constant_is_bounded() {
    let report = domination_check(&[0.0, 0.3, 0.5], &[0.5, 1.0, 2.0, 10.0, 100.0], 3.0, 3.0, 0.25, &SeriesTruncation::uniform(60).unwrap()).unwrap();
    assert!(report.constant > 0.5 && report.constant < 1.2, "{}", report.constant);
    assert_eq!(report.points.len(), 15);
}

#[test]
fn cauchy_probe_inside_and_outside_the_region() {
    let z = UpperHalfPoint::new(0.2, 1.3).unwrap();
    let inside = cauchy_convergence_probe(&z, r(2.5), r(2.5), &[50, 100, 200]).unwrap();
    assert!(inside.converged, "{:?}", inside.increments);
    let far = cauchy_convergence_probe(&z, r(-1.0), r(2.5), &[50, 100, 200]).unwrap();
    assert!(!far.converged && far.growth > 1.0);
}

#[test]
fn evaluation_outside_the_region_is_refused() {
    let z = UpperHalfPoint::new(0.0, 1.0).unwrap();
    let trunc = SeriesTruncation::uniform(10).unwrap();
    assert!(matches!(eval_poincare_q(&z, r(0.5), r(2.5), &trunc), Err(Error::Divergence { .. })));
    assert!(matches!(eval_eisenstein_q(&z, r(1.0), &trunc), Err(Error::Divergence { .. })));
    assert!(UpperHalfPoint::new(0.0, -1.0).is_err());
    assert!(cauchy_convergence_probe(&z, r(2.0), r(2.0), &[10, 20]).is_err());
}
