use alpha_selfaction::LogPolySeries;
use proptest::prelude::*;

fn series() -> impl Strategy<Value = LogPolySeries> {
    prop::collection::vec((-20i64..20, 1i64..9, 0u32..4, -3i32..4, 0u32..3), 0..6).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(n, d, a, p, q)| LogPolySeries::term(n, d, a, p, q))
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &LogPolySeries::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn antiderivative_inverts_differentiate(a in series()) {
        prop_assert_eq!(a.antiderivative().differentiate(), a);
    }

    #[test]
    fn product_rule(a in series(), b in series()) {
        let lhs = (&a * &b).differentiate();
        let rhs = &(&a.differentiate() * &b) + &(&a * &b.differentiate());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in series(), b in series(), s in 0.1f64..2.0, alpha in 0.001f64..0.1) {
        let ab = (&a * &b).eval_numeric(s, alpha).unwrap();
        let sep = a.eval_numeric(s, alpha).unwrap() * b.eval_numeric(s, alpha).unwrap();
        prop_assert!((ab - sep).abs() <= 1e-9 * (1.0 + sep.abs()), "{ab} vs {sep}");
    }

    #[test]
    fn json_round_trip(a in series()) {
        prop_assert_eq!(LogPolySeries::from_json(&a.to_json()).unwrap(), a);
    }
}
