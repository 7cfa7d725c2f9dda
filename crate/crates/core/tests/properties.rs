use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use gup_core::algebra::DeformedAlgebra;
use gup_core::compacttheory::{delta_x_min, max_loc_state, maxloc_overlap, TruncatedSpace};
use gup_core::fulltheory::{gft_full, uniform_grid};
use gup_core::numerics::{integrate_finite, QuadratureSpec};
use gup_core::squeezed::{delta_x_value, verify_gup};
use gup_core::state::{MomentumState, Support};

fn algebra() -> impl Strategy<Value = DeformedAlgebra> {
    (0.05f64..3.0, prop::bool::ANY).prop_map(|(b, sqrt)| {
        if sqrt {
            DeformedAlgebra::sqrt_gup(b).unwrap()
        } else {
            DeformedAlgebra::kmm(b).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformation_is_at_least_one(alg in algebra(), p in -50.0f64..50.0) {
        prop_assert!(alg.f_at(p) >= 1.0);
        prop_assert!(alg.weight_at(p) > 0.0 && alg.weight_at(p) <= 1.0);
    }

    #[test]
    fn z_odd_u_even(alg in algebra(), p in -50.0f64..50.0) {
        prop_assert!((alg.z_at(-p) + alg.z_at(p)).abs() <= 1e-14 * alg.z_at(p).abs().max(1.0));
        prop_assert!((alg.u_at(-p) - alg.u_at(p)).abs() <= 1e-14 * alg.u_at(p).abs().max(1.0));
        prop_assert!(alg.u_at(p) >= 0.0);
    }

    #[test]
    fn z_inverts(alg in algebra(), p in -20.0f64..20.0) {
        prop_assert!((alg.p_of_z(alg.z_at(p)) - p).abs() <= 1e-10 * p.abs().max(1.0));
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.1f64..4.0) {
        let spec = QuadratureSpec::with_tolerances(1e-13, 1e-12);
        let g = |x: f64| (w * x).sin();
        let h = |x: f64| (-x * x).exp();
        let lhs: f64 = integrate_finite(|x| a * g(x) + b * h(x), -1.0, 2.0, &spec).unwrap();
        let rhs = a * integrate_finite(g, -1.0, 2.0, &spec).unwrap() + b * integrate_finite(h, -1.0, 2.0, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn quadrature_is_additive(lo in -5.0f64..0.0, mid in 0.0f64..1.0, hi in 1.0f64..5.0) {
        let spec = QuadratureSpec::with_tolerances(1e-13, 1e-12);
        let g = |x: f64| (x.cos() + 2.0) * (-0.1 * x * x).exp();
        let whole: f64 = integrate_finite(g, lo, hi, &spec).unwrap();
        let parts: f64 = integrate_finite(g, lo, mid, &spec).unwrap() + integrate_finite(g, mid, hi, &spec).unwrap();
        prop_assert!((whole - parts).abs() < 1e-10);
    }

    #[test]
    fn surface_is_even_in_eta(beta in 0.1f64..2.0, lambda in 0.02f64..5.0, eta in 0.1f64..2.5) {
        let alg = DeformedAlgebra::sqrt_gup(beta).unwrap();
        let spec = QuadratureSpec::default();
        let a = delta_x_value(&alg, lambda, eta, &spec).unwrap();
        let b = delta_x_value(&alg, lambda, -eta, &spec).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn overlap_is_bounded_and_symmetric(xi in -10.0f64..10.0, xj in -10.0f64..10.0, p0 in 0.5f64..6.0) {
        let space = TruncatedSpace::new(DeformedAlgebra::sqrt_gup(0.5).unwrap(), p0).unwrap();
        let o = maxloc_overlap(&space, xi, xj);
        prop_assert!(o.norm() <= 1.0 + 1e-14);
        prop_assert!((o - maxloc_overlap(&space, xj, xi).conj()).norm() < 1e-14);
    }

    #[test]
    fn mode_uncertainty_increases(beta in 0.1f64..2.0, p0 in 0.3f64..8.0, n in 1u32..8) {
        let space = TruncatedSpace::new(DeformedAlgebra::sqrt_gup(beta).unwrap(), p0).unwrap();
        prop_assert!(delta_x_min(&space, n + 1) > delta_x_min(&space, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn superpositions_respect_minimal_length(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        xi in -2.0f64..2.0,
    ) {
        prop_assume!(coeffs.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3);
        let space = TruncatedSpace::new(DeformedAlgebra::sqrt_gup(0.5).unwrap(), 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let mut state = max_loc_state(&space, xi, 1).unwrap().scaled(Complex64::new(coeffs[0].0, coeffs[0].1));
        for (n, &(a, b)) in coeffs.iter().enumerate().skip(1) {
            let mode = max_loc_state(&space, xi, n as u32 + 1).unwrap();
            state = state.superpose(Complex64::new(1.0, 0.0), &mode, Complex64::new(a, b)).unwrap();
        }
        let r = verify_gup(&state, &spec).unwrap();
        prop_assert!(r.delta_x >= delta_x_min(&space, 1) * (1.0 - 1e-9), "{} < {}", r.delta_x, delta_x_min(&space, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn full_transform_preserves_norm(zc in -1.0f64..1.0, s in 0.7f64..1.5, k in -2.0f64..2.0) {
        let alg = DeformedAlgebra::sqrt_gup(0.5).unwrap();
        let c = (2.0 / PI).powf(0.25) / s.sqrt();
        let amp = move |p: f64| {
            let z = alg.z_at(p);
            c * (-(z - zc).powi(2) / (s * s)).exp() * Complex64::from_polar(1.0, k * z)
        };
        let state = MomentumState::new(
            alg,
            Support::RealLine,
            std::sync::Arc::new(amp),
            gup_core::state::Derivative::FiniteDifference,
        );
        let spec = QuadratureSpec::default();
        let samples = gft_full(&state, &uniform_grid(-40.0, 40.0, 1601), &spec).unwrap();
        let lhs = samples.norm_squared().unwrap();
        let rhs = state.norm_squared(&spec).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs);
    }
}
