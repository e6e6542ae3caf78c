use gl2moments::fields::{builtin_field, character_lattice, BuiltinField};
use gl2moments::kernels::{g_complex, g_real};
use gl2moments::numerics::{gamma, zeta};
use gl2moments::padic_norms::{local_norm_integral, mat_mul, operator_norm, LocalNormParams};
use gl2moments::parse::{parse_complex, parse_grid};
use gl2moments::poincare::{eval_poincare_q, SeriesTruncation, UpperHalfPoint};
use gl2moments::whittaker::{finite_mellin_whittaker, tate_brute_force_mellin, DifferentalData, LocalCharacter};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_recurrence(re in -8.0f64..8.0, im in 0.01f64..8.0) {
        let z = c(re, im);
        prop_assert!(rel(gamma(z + 1.0).unwrap(), z * gamma(z).unwrap()) < 1e-12);
    }

    #[test]
    fn zeta_is_conjugate_symmetric(re in -3.0f64..4.0, im in 0.5f64..200.0) {
        let s = c(re, im);
        prop_assert!(rel(zeta(s.conj()).unwrap(), zeta(s).unwrap().conj()) < 1e-12);
    }

    #[test]
    fn gamma_kernels_are_symmetric(
        sr in -1.0f64..2.0, si in -10.0f64..10.0,
        vr in 1.0f64..3.0, vi in -3.0f64..3.0,
        wr in 1.0f64..4.0, wi in -3.0f64..3.0,
    ) {
        let (s, v, w) = (c(sr, si), c(vr, vi), c(wr, wi));
        prop_assert!(rel(g_real(1.0 - s, v, w).unwrap(), g_real(s, v, w).unwrap()) < 1e-10);
        prop_assert!(rel(g_complex(1.0 - s, v, w).unwrap(), g_complex(s, v, w).unwrap()) < 1e-10);
    }

    #[test]
    fn complex_parse_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        prop_assert_eq!(parse_complex(&format!("{re},{im}")).unwrap(), c(re, im));
        prop_assert_eq!(parse_complex(&format!("{re}")).unwrap(), c(re, 0.0));
    }

    #[test]
    fn grid_parse_is_an_arithmetic_progression(lo in -100.0f64..100.0, len in 0.0f64..50.0, step in 0.01f64..5.0) {
        let hi = lo + len;
        let grid = parse_grid(&format!("{lo}:{hi}:{step}")).unwrap();
        prop_assert_eq!(grid[0], lo);
        prop_assert!(grid.windows(2).all(|p| p[1] > p[0]));
        prop_assert!(*grid.last().unwrap() <= hi + 1e-9 * (1.0 + hi.abs()));
        prop_assert!(grid.last().unwrap() + step > hi - 1e-9 * (1.0 + hi.abs()));
    }

    #[test]
    fn local_norm_integral_decreases_and_is_bounded(q in prop::sample::select(vec![2u64, 3, 5, 7, 11]), s in 1.01f64..20.0, ds in 0.01f64..5.0) {
        let (a, bound) = local_norm_integral(&LocalNormParams::new(q, s).unwrap());
        let (b, _) = local_norm_integral(&LocalNormParams::new(q, s + ds).unwrap());
        prop_assert!(a <= bound && b <= a && b >= 1.0);
        prop_assert!(b < a || a - 1.0 < 1e-13);
    }

    #[test]
    fn operator_norm_is_submultiplicative(m in prop::array::uniform4(-20i32..20), n in prop::array::uniform4(-20i32..20)) {
        let a = [[m[0] as f64, m[1] as f64], [m[2] as f64, m[3] as f64]];
        let b = [[n[0] as f64, n[1] as f64], [n[2] as f64, n[3] as f64]];
        prop_assert!(operator_norm(mat_mul(a, b)) <= operator_norm(a) * operator_norm(b) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn tate_sum_matches_closed_form(
        q in prop::sample::select(vec![2u64, 3, 5, 7]), delta in 0u32..3, phase in 0.0f64..std::f64::consts::TAU,
        sr in 0.3f64..0.7, si in -5.0f64..5.0, vr in 1.0f64..3.0, vi in -5.0f64..5.0,
    ) {
        let chi = LocalCharacter::unramified(Complex64::from_polar(1.0, phase));
        let d = DifferentalData::new(q, delta);
        let (s, v) = (c(sr, si), c(vr, vi));
        let closed = finite_mellin_whittaker(&chi, q, &d, s, v).unwrap();
        let brute = tate_brute_force_mellin(&chi, q, &d, s, v, 400).unwrap();
        prop_assert!(rel(brute.value, closed) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn poincare_is_periodic_and_positive(k in 0u32..8, shift in -3i32..4, y in 0.3f64..3.0, v in 1.2f64..3.0, w in 1.2f64..3.0) {
        let trunc = SeriesTruncation::uniform(8).unwrap();
        let x = k as f64 / 8.0;
        let base = eval_poincare_q(&UpperHalfPoint::new(x, y).unwrap(), c(v, 0.0), c(w, 0.0), &trunc).unwrap().value;
        let moved = eval_poincare_q(&UpperHalfPoint::new(x + shift as f64, y).unwrap(), c(v, 0.0), c(w, 0.0), &trunc).unwrap().value;
        prop_assert_eq!(base, moved);
        prop_assert!(base.re > 0.0);
    }

    #[test]
    fn character_lattice_is_closed_under_inversion(which in prop::sample::select(vec![BuiltinField::Q, BuiltinField::QI, BuiltinField::QSqrt2]), bound in 1.0f64..40.0) {
        let field = builtin_field(which);
        let chars = character_lattice(&field, bound).unwrap();
        prop_assert!(chars.iter().any(|chi| chi.is_trivial()));
        for chi in &chars {
            let inv = chi.inverse();
            let found = chars.iter().any(|other| {
                other.ell_values == inv.ell_values
                    && other.t_values.iter().zip(&inv.t_values).all(|(a, b)| (a - b).abs() < 1e-9)
            });
            prop_assert!(found, "inverse of {:?} missing", chi);
        }
    }
}
