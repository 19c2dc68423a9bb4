use alpha_selfaction::oracle::{integrate_ode, solve_at};
use alpha_selfaction::series::{generate_family, FamilyKind};
use proptest::prelude::*;

fn wronskian(alpha: f64, s: f64, tol: f64) -> f64 {
    let first = solve_at(alpha, FamilyKind::First, &[s], tol).unwrap()[0];
    let second = solve_at(alpha, FamilyKind::Second, &[s], tol).unwrap()[0];
    s * s * (first.upper * second.lower - first.lower * second.upper)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_is_conserved(alpha in 0.001f64..0.05, s in 0.05f64..1.0) {
        let w = wronskian(alpha, s, 1e-12);
        prop_assert!((w + 1.0).abs() < 1e-9, "W = {w}");
    }

    #[test]
    fn series_wronskian_is_minus_one(alpha in 0.001f64..0.02, s in 0.2f64..1.0) {
        let f1 = generate_family(FamilyKind::First, 3);
        let f2 = generate_family(FamilyKind::Second, 3);
        let e = |x: &alpha_selfaction::LogPolySeries| x.eval_numeric(s, alpha).unwrap();
        let w = s * s * (e(&f1.f_sum()) * e(&f2.g_sum()) - e(&f1.g_sum()) * e(&f2.f_sum()));
        prop_assert!((w + 1.0).abs() < 1e-8, "W = {w}");
    }
}

#[test]
fn trajectory_starts_at_the_boundary() {
    let t = integrate_ode(0.0073, FamilyKind::First, 0.1, 1e-12).unwrap();
    assert_eq!(t.samples[0].s, 1.0);
    assert!((t.last().s - 0.1).abs() < 1e-15);
    assert!(t.samples.windows(2).all(|w| w[1].s < w[0].s));
}
