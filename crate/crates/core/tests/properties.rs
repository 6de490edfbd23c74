//! Property tests for the algebraic invariants that hold on whole input
//! ranges rather than at hand-picked points.

use proptest::prelude::*;
use stefan_core::profile::TabulatedCurve;
use stefan_core::reduction::omega_of_point;
use stefan_core::specialfn::{exp_integral_e1, lambert_w0, lambert_w_exp, phi_integral};
use stefan_core::symmetry::{apply_group, GeneratorTag, GroupElement};

proptest! {
    #[test]
    fn lambert_w_defining_identity(x in -0.36f64..1e6) {
        let w = lambert_w0(x, 1e-13).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
        prop_assert!(w >= -1.0);
    }

    #[test]
    fn lambert_w_exp_identity(a in -30.0f64..30.0) {
        let w = lambert_w_exp(a);
        prop_assert!(((a - w).exp() - w).abs() <= 1e-10 * w.abs().max(1e-300));
    }

    #[test]
    fn phi_is_e1_of_scaled_argument(
        omega in 0.01f64..50.0,
        mu in 0.01f64..20.0,
        a in 0.05f64..10.0,
    ) {
        let lhs = phi_integral(omega, mu, a).unwrap();
        let rhs = exp_integral_e1(mu * omega / (2.0 * a)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
    }

    #[test]
    fn omega_is_nonnegative_and_translation_covariant(
        x1 in -10.0f64..10.0,
        x2 in -10.0f64..10.0,
        x3 in -10.0f64..10.0,
        t in -5.0f64..5.0,
        mu in 0.01f64..5.0,
    ) {
        let w = omega_of_point((x1, x2, x3), t, mu);
        prop_assert!(w >= 0.0);
        // Moving along the front keeps ω fixed up to roundoff.
        let dt = 0.75;
        let w2 = omega_of_point((x1, x2, x3 + mu * dt), t + dt, mu);
        prop_assert!((w - w2).abs() <= 1e-9 * w.abs().max(1.0));
    }

    #[test]
    fn translations_and_rotations_compose_additively(
        e1 in -3.0f64..3.0,
        e2 in -3.0f64..3.0,
        px in -4.0f64..4.0,
        py in -4.0f64..4.0,
    ) {
        for tag in [GeneratorTag::T0, GeneratorTag::T3, GeneratorTag::T5] {
            let p = (0.3, px, py, 1.1);
            let a = apply_group(
                &GroupElement::new(tag, e1),
                apply_group(&GroupElement::new(tag, e2), p),
            );
            let b = apply_group(&GroupElement::new(tag, e1 + e2), p);
            for (u, v) in [(a.0, b.0), (a.1, b.1), (a.2, b.2), (a.3, b.3)] {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn monotone_interpolation_inverts(
        seedvals in proptest::collection::vec(0.05f64..2.0, 8..24),
    ) {
        // Build a strictly increasing curve from positive increments.
        let mut x = 0.0;
        let mut y = 1.0;
        let mut knots = vec![(x, y)];
        for (i, dv) in seedvals.iter().enumerate() {
            x += 0.3 + (i % 3) as f64 * 0.2;
            y += dv;
            knots.push((x, y));
        }
        let curve = TabulatedCurve::new(&knots).unwrap();
        let (lo, hi) = curve.range();
        for k in 1..10 {
            let xq = lo + (hi - lo) * k as f64 / 10.0;
            let yq = curve.eval(xq).unwrap();
            let back = curve.invert(yq).unwrap();
            // Value-space round trip always holds. The abscissa itself is
            // recoverable except where the slope limiter puts a stationary
            // point (end slopes at the 3·secant bound), where the curve is
            // flat to machine precision and the data does not determine x.
            let y_back = curve.eval(back).unwrap();
            prop_assert!((y_back - yq).abs() <= 1e-12 * yq.abs().max(1.0));
            let deriv = curve.eval_deriv(xq).unwrap();
            let mean_slope = (curve.last_value() - curve.first_value()) / (hi - lo);
            if deriv > 1e-3 * mean_slope {
                prop_assert!((back - xq).abs() <= 1e-8 * xq.abs().max(1.0));
            }
        }
    }
}
