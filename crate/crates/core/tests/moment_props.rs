use alpha_selfaction::damped::{damped_moment, DampedMoment, MomentMode};
use proptest::prelude::*;

fn exact(p: i32, q: u32, eta: f64) -> f64 {
    damped_moment(DampedMoment::new(p, q, eta), MomentMode::Exact, 1e-12).unwrap()
}

#[test]
fn exact_matches_quadrature_on_the_grid() {
    for eta in [1e-2, 1e-4, 1e-6] {
        for p in -6..=6 {
            for q in 0..=2 {
                let e = exact(p, q, eta);
                let g = damped_moment(DampedMoment::new(p, q, eta), MomentMode::Quadrature, 1e-12).unwrap();
                assert!(
                    (e - g).abs() <= 1e-11 * e.abs().max(1.0),
                    "p={p} q={q} η={eta}: {e} vs {g}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // d/dη M(p, q) = −M(p − 1, q)
    #[test]
    fn eta_derivative(p in -3i32..3, q in 0u32..3, log_eta in -6.0f64..-1.0) {
        let eta = 10f64.powf(log_eta);
        let h = 1e-4 * eta;
        let fd = (exact(p, q, eta + h) - exact(p, q, eta - h)) / (2.0 * h);
        let want = -exact(p - 1, q, eta);
        prop_assert!((fd - want).abs() <= 1e-6 * want.abs().max(1.0), "{fd} vs {want}");
    }

    // (p+1)M(p,q) + qM(p,q−1) + ηM(p−1,q) = δ_{q0} e^{−η}
    #[test]
    fn recurrence_holds(p in -4i32..4, q in 0u32..3, log_eta in -6.0f64..0.0) {
        let eta = 10f64.powf(log_eta);
        let lower = if q > 0 { q as f64 * exact(p, q - 1, eta) } else { 0.0 };
        let lhs = (p + 1) as f64 * exact(p, q, eta) + lower + eta * exact(p - 1, q, eta);
        let rhs = if q == 0 { (-eta).exp() } else { 0.0 };
        let scale = (eta * exact(p - 1, q, eta)).abs().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn halving_the_tolerance_changes_nothing(p in -4i32..4, q in 0u32..3, log_eta in -6.0f64..-1.0) {
        let eta = 10f64.powf(log_eta);
        let m = DampedMoment::new(p, q, eta);
        let a = damped_moment(m, MomentMode::Quadrature, 1e-10).unwrap();
        let b = damped_moment(m, MomentMode::Quadrature, 5e-11).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }
}
