//! Property tests for the algebra and model invariants.

use proptest::prelude::*;
use std::f64::consts::PI;

use singlet_core::constraint::{
    lambda_membership, measure_a, measure_b, strength_f, DetectionMode, InitialState, ModelParams,
};
use singlet_core::ga::{
    detector_bivector, oriented_dual, spin_bivector, Multivector3, Orientation, UnitQuaternion,
    UnitVector3,
};

fn finite_component() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

fn multivector() -> impl Strategy<Value = Multivector3> {
    prop::array::uniform8(-2.0f64..2.0).prop_map(|coeffs| Multivector3 { coeffs })
}

fn unit_vector() -> impl Strategy<Value = UnitVector3> {
    (finite_component(), finite_component(), finite_component())
        .prop_filter_map("non-degenerate", |(x, y, z)| UnitVector3::new(x, y, z).ok())
}

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Plus), Just(Orientation::Minus)]
}

/// Rotate a unit vector with the rotor sandwich R v R^dagger.
fn rotate(v: &UnitVector3, rotor: &UnitQuaternion) -> UnitVector3 {
    let reversed = rotor.reverse();
    let m = *rotor.as_multivector() * v.as_multivector() * *reversed.as_multivector();
    let [x, y, z] = m.vector_part();
    UnitVector3::new(x, y, z).expect("rotation preserves length")
}

proptest! {
    #[test]
    fn geometric_product_is_associative(a in multivector(), b in multivector(), c in multivector()) {
        let left = (a * b) * c;
        let right = a * (b * c);
        // coefficients are bounded by 8^2 * 2^3 with ~4 ulp per product chain
        prop_assert!(left.max_abs_diff(&right) < 1e-12 * 1024.0);
    }

    #[test]
    fn geometric_product_is_bilinear(a in multivector(), b in multivector(), c in multivector(), s in -3.0f64..3.0) {
        let lhs = a * (b.scale(s) + c);
        let rhs = (a * b).scale(s) + a * c;
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11);
    }

    #[test]
    fn vector_product_grade_split(u in unit_vector(), v in unit_vector()) {
        // uv = u.v + u^v with u^v = I (u x v)
        let prod = u.as_multivector() * v.as_multivector();
        prop_assert!((prod.scalar_part() - u.dot(&v)).abs() < 1e-12);
        let cross = u.cross(&v);
        let dual = oriented_dual(cross, Orientation::Plus);
        let bivector = Multivector3::bivector(
            prod.bivector_part()[0],
            prod.bivector_part()[1],
            prod.bivector_part()[2],
        );
        prop_assert!(bivector.max_abs_diff(&dual) < 1e-12);
        prop_assert_eq!(prod.vector_part(), [0.0; 3]);
        prop_assert_eq!(prod.pseudoscalar_part(), 0.0);
    }

    #[test]
    fn wedge_reversal_is_negation(u in unit_vector(), v in unit_vector()) {
        let uv = u.as_multivector() * v.as_multivector();
        let vu = v.as_multivector() * u.as_multivector();
        let wedge = (uv - vu).scale(0.5);
        prop_assert!(wedge.reverse().max_abs_diff(&-wedge) < 1e-12);
    }

    #[test]
    fn unit_quaternions_close_under_product(
        a in unit_vector(), b in unit_vector(),
        t in -7.0f64..7.0, s in -7.0f64..7.0,
    ) {
        let q1 = UnitQuaternion::exp(a, t);
        let q2 = UnitQuaternion::exp(b, s);
        prop_assert!((q1.norm() - 1.0).abs() < 1e-12);
        prop_assert!(((q1 * q2).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quaternion_sum_respects_triangle_inequality(a in unit_vector(), b in unit_vector(), t in 0.0f64..PI, s in 0.0f64..PI) {
        let p = UnitQuaternion::from_vector_pair(a, b);
        let q = UnitQuaternion::exp(a, s);
        let _ = t;
        prop_assert!((p + q).norm() <= 2.0 + 1e-12);
    }

    #[test]
    fn spin_bivector_square_is_minus_one(n in unit_vector(), o in orientation()) {
        let l = spin_bivector(n, o);
        prop_assert!((l * l).max_abs_diff(&Multivector3::scalar(-1.0)) < 1e-12);
    }

    #[test]
    fn bivector_identity_with_oriented_cross(a in unit_vector(), b in unit_vector(), o in orientation()) {
        // L(a,l) L(b,l) = -a.b - L(a X b, l) where X is the cross product of
        // the l-handed frame, i.e. l * (a x b) in right-handed components;
        // equivalently -a.b - l * L(a x b, l) = -a.b - D(a x b).
        let lhs = spin_bivector(a, o) * spin_bivector(b, o);
        let cross = a.cross(&b);
        let oriented_cross = cross.map(|c| o.sign() * c);
        let rhs = Multivector3::scalar(-a.dot(&b)) - oriented_dual(oriented_cross, o);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn detector_spin_relation(n in unit_vector(), o in orientation()) {
        let l = spin_bivector(n, o);
        let d = detector_bivector(n);
        prop_assert!(l.max_abs_diff(&d.scale(o.sign())) == 0.0);
        prop_assert!(d.max_abs_diff(&l.scale(o.sign())) == 0.0);
    }

    #[test]
    fn strength_is_bounded(eta in 0.0f64..PI, kappa in 0.0f64..8.0) {
        let f = strength_f(eta, kappa).unwrap();
        prop_assert!((-1.0..=1.0).contains(&f));
    }

    #[test]
    fn outcomes_follow_membership(
        e0 in unit_vector(), a in unit_vector(),
        eta_zs in 0.0f64..PI, kappa in 0.0f64..4.0,
    ) {
        let state = InitialState { e0, eta_zs, s0: e0 };
        let params = ModelParams::new(kappa, DetectionMode::PerStation).unwrap();
        let c = a.dot(&state.e0);
        let f = strength_f(eta_zs, kappa).unwrap();
        prop_assume!((c.abs() - f).abs() > 1e-9); // skip knife-edge states
        let member = lambda_membership(a.angle_to(&state.e0), eta_zs, kappa).unwrap();
        prop_assert_eq!(measure_a(&a, &state, &params).detected(), member);
        prop_assert_eq!(measure_b(&a, &state, &params).detected(), member);
        // anti-correlated signs whenever both stations look along a
        if member {
            prop_assert_eq!(
                measure_a(&a, &state, &params).sign(),
                -measure_b(&a, &state, &params).sign()
            );
        }
    }

    #[test]
    fn outcomes_are_rotation_invariant(
        e0 in unit_vector(), a in unit_vector(), b in unit_vector(),
        axis in unit_vector(), angle in 0.0f64..PI,
        eta_zs in 0.0f64..PI,
    ) {
        let params = ModelParams::new(1.0, DetectionMode::PerStation).unwrap();
        let f = strength_f(eta_zs, 1.0).unwrap();
        prop_assume!((a.dot(&e0).abs() - f).abs() > 1e-9);
        prop_assume!((b.dot(&e0).abs() - f).abs() > 1e-9);

        let rotor = UnitQuaternion::exp(axis, angle / 2.0);
        let state = InitialState { e0, eta_zs, s0: e0 };
        let rotated = InitialState { e0: rotate(&e0, &rotor), eta_zs, s0: e0 };
        let (ra, rb) = (rotate(&a, &rotor), rotate(&b, &rotor));

        prop_assert_eq!(measure_a(&a, &state, &params), measure_a(&ra, &rotated, &params));
        prop_assert_eq!(measure_b(&b, &state, &params), measure_b(&rb, &rotated, &params));
    }
}
