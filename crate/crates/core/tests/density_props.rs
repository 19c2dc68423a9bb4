use alpha_selfaction::densities::{
    angular_reduce, bilinear_density, build_bispinor, AngularMomentum, BispinorKind, Operator, SphereQuadrature,
};
use alpha_selfaction::series::RadialValues;
use proptest::prelude::*;

const SURVIVING: [Operator; 4] = [Operator::Gamma1, Operator::IGamma23, Operator::Gamma5, Operator::IGamma235];

fn kind() -> impl Strategy<Value = BispinorKind> {
    prop_oneof![Just(BispinorKind::First), Just(BispinorKind::Second)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // spin-diagonal operators give densities independent of φ
    #[test]
    fn azimuthal_symmetry(
        k in kind(),
        up in any::<bool>(),
        op in 0usize..4,
        upper in -2.0f64..2.0,
        lower in -2.0f64..2.0,
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let state = build_bispinor(k, AngularMomentum::half(up));
        let r = RadialValues { upper, lower };
        let op = SURVIVING[op];
        let a = bilinear_density(&state, r, op, &state, r, theta, phi).unwrap();
        let b = bilinear_density(&state, r, op, &state, r, theta, 0.0).unwrap();
        prop_assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn hermitian_operators_give_real_densities(
        k in kind(),
        up in any::<bool>(),
        id in 1usize..=16,
        upper in -2.0f64..2.0,
        lower in -2.0f64..2.0,
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let op = Operator::from_id(id).unwrap();
        prop_assume!(op != Operator::Gamma234);
        let state = build_bispinor(k, AngularMomentum::half(up));
        let r = RadialValues { upper, lower };
        let d = bilinear_density(&state, r, op, &state, r, theta, phi).unwrap();
        prop_assert!(d.im.abs() < 1e-13, "{op:?}: {d}");
    }
}

#[test]
fn particle_flip_is_confined_to_gamma5_rows() {
    let quad = SphereQuadrature::default();
    for op in SURVIVING {
        for up in [true, false] {
            let fractions = |k| {
                let t = angular_reduce(op, k, AngularMomentum::half(up), &quad).unwrap();
                t.listed().iter().map(|e| (e.left_harmonic, e.fraction.unwrap())).collect::<Vec<_>>()
            };
            let e = fractions(BispinorKind::First);
            let p = fractions(BispinorKind::Second);
            assert_eq!(e.len(), p.len());
            for (a, b) in e.iter().zip(&p) {
                assert_eq!(a.0, b.0);
                let want = if op.involves_gamma5() { -a.1 } else { a.1 };
                assert_eq!(b.1, want, "{op:?} up={up}");
            }
        }
    }
}

#[test]
fn non_surviving_operators_vanish_on_the_sphere() {
    let quad = SphereQuadrature::default();
    for id in 1..=16 {
        let op = Operator::from_id(id).unwrap();
        if SURVIVING.contains(&op) {
            continue;
        }
        for k in [BispinorKind::First, BispinorKind::Second] {
            let t = angular_reduce(op, k, AngularMomentum::half(true), &quad).unwrap();
            assert!(!t.survives(), "{op:?}");
        }
    }
}
