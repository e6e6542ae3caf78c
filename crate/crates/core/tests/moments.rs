use gl2moments::fields::{builtin_field, BuiltinField, HeckeCharacter};
use gl2moments::kernels::SpectralParams;
use gl2moments::moments::{
    fourth_moment_zeta, moment_integrals, second_moment_report, second_moment_zeta, smoothing_weight, StepControl,
    WeightSpec,
};
use gl2moments::numerics::QuadratureSpec;
use num_complex::Complex64;

// 20-digit quadrature of Z(t)^2 and Z(t)^4 with unit panels
const SECOND: [(f64, f64); 3] = [(50.0, 115.91173533959899), (100.0, 295.63509905471913), (200.0, 736.8327105614679)];
const FOURTH: [(f64, f64); 3] = [(50.0, 659.480388831688), (100.0, 2393.662061133603), (200.0, 9146.48064929039)];

#[test]
fn moment_integrals_match_oracle() {
    let control = StepControl::default();
    for (t, expected) in SECOND {
        let got = second_moment_zeta(t, &control).unwrap();
        assert!((got - expected).abs() < 1e-6 * expected, "T={t}: {got}");
    }
    for (t, expected) in FOURTH {
        let got = fourth_moment_zeta(t, &control).unwrap();
        assert!((got - expected).abs() < 1e-6 * expected, "T={t}: {got}");
    }
}

#[test]
fn moment_integrals_are_nondecreasing() {
    let ts: Vec<f64> = (1..=40).map(|k| 5.0 * k as f64).collect();
    let vals = moment_integrals(2, &ts, &StepControl::default()).unwrap();
    assert!(vals.windows(2).all(|p| p[1] >= p[0]));
    assert!(moment_integrals(3, &ts, &StepControl::default()).is_err());
}

#[test]
fn second_moment_slope_near_one() {
    let report = second_moment_report(&[250.0, 500.0, 1000.0], &StepControl::default()).unwrap();
    assert!((report.fitted_coefficients[1] - 1.0).abs() < 0.1);
}

// contour integral of the Q(i) main-term kernel at 20 digits, kappa = 1 + 4 t^2
const WEIGHTS: [(f64, f64, f64); 4] = [
    (1000.0, 1.0, 18.880994850626422),
    (2000.0, 1.0, 22.136056368347205),
    (1000.0, 100.0, 3.0440573254756696),
    (1000.0, 1e4, 0.030404799004799667),
];

#[test]
fn smoothing_weight_matches_oracle() {
    let field = builtin_field(BuiltinField::QI);
    let chi = HeckeCharacter::trivial(&field);
    let mu = SpectralParams::equal(Complex64::new(0.1, 0.0));
    let spec = QuadratureSpec::default();
    for (big_t, kappa, expected) in WEIGHTS {
        let t = ((kappa - 1.0) / 4.0f64).sqrt();
        let got = smoothing_weight(&field, &chi, &mu, t, &WeightSpec::new(2.0, big_t).unwrap(), &spec).unwrap();
        assert!((got - expected).abs() < 1e-8 * expected, "T={big_t}, kappa={kappa}: {got}");
    }
}

#[test]
fn smoothing_weight_is_independent_of_the_contour() {
    let field = builtin_field(BuiltinField::QI);
    let chi = HeckeCharacter::trivial(&field);
    let mu = SpectralParams::equal(Complex64::new(0.1, 0.0));
    let spec = QuadratureSpec::default();
    let a = smoothing_weight(&field, &chi, &mu, 3.0, &WeightSpec::new(1.5, 500.0).unwrap(), &spec).unwrap();
    let b = smoothing_weight(&field, &chi, &mu, 3.0, &WeightSpec::new(3.0, 500.0).unwrap(), &spec).unwrap();
    assert!((a - b).abs() < 1e-8 * a.abs());
}

#[test]
fn weight_spec_validation() {
    assert!(WeightSpec::new(1.0, 100.0).is_err());
    assert!(WeightSpec::new(2.0, 1.0).is_err());
}
