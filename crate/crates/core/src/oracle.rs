//! Numerical cross-checks that do not go through the exact series: direct
//! integration of the reduced radial system, interior/exterior matching at
//! `s = 1`, sampled radial profiles, and the `∇²(1/r)` identity in `n`
//! dimensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::series::{external_solution, generate_family, FamilyKind, SolutionFamily};

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const ATOL: f64 = 1e-30;
const MAX_STEPS: usize = 1_000_000;

/// `(upper, lower)' = rhs(s, upper, lower)` for the reduced system:
/// `F' = (1 − 1/s)αG − 2F/s`, `G' = −(1 − 1/s)αF`.
fn rhs(alpha: f64, s: f64, y: [f64; 2]) -> [f64; 2] {
    let k = (1.0 - 1.0 / s) * alpha;
    [k * y[1] - 2.0 * y[0] / s, -k * y[0]]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    /// `F̃` or `f̃`
    pub upper: f64,
    /// `G̃` or `g̃`
    pub lower: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Inward,
    Outward,
}

/// Accepted integrator steps, from `s = 1` inward.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub alpha: f64,
    pub kind: FamilyKind,
    pub samples: Vec<Sample>,
    pub rtol: f64,
    pub atol: f64,
    pub direction: Direction,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectory holds the initial point")
    }
}

fn initial(kind: FamilyKind) -> [f64; 2] {
    match kind {
        FamilyKind::First => [0.0, 1.0],
        FamilyKind::Second => [1.0, 0.0],
    }
}

/// Adaptive Dormand–Prince integration from `s = 1` down to `s_stop`,
/// with per-component error scale `atol + tol·|y|`. Every value in
/// `stops` (descending, within `[s_stop, 1]`) is landed on exactly.
fn integrate_inward(
    alpha: f64,
    kind: FamilyKind,
    s_stop: f64,
    tol: f64,
    stops: &[f64],
) -> Result<Trajectory> {
    if !(s_stop > 0.0 && s_stop < 1.0) {
        return Err(Error::Domain(format!("s_stop must lie in (0, 1), got {s_stop}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut s = 1.0;
    let mut y = initial(kind);
    let mut samples = vec![Sample {
        s,
        upper: y[0],
        lower: y[1],
    }];
    let mut targets: Vec<f64> = stops.iter().copied().filter(|&t| t < 1.0 && t > s_stop).collect();
    targets.push(s_stop);
    let mut next = 0;
    let mut h = -1e-3;
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(alpha, s, y);
    for _ in 0..MAX_STEPS {
        let target = targets[next];
        let mut step = h;
        let landing = s + step <= target;
        if landing {
            step = target - s;
        }
        if step.abs() < 1e-14 * s.abs() {
            return Err(Error::StepUnderflow { s, h: step });
        }
        for i in 1..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                yi[0] += step * A[i][j] * kj[0];
                yi[1] += step * A[i][j] * kj[1];
            }
            k[i] = rhs(alpha, s + C[i] * step, yi);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += B5[i] * k[i][c];
                d4 += B4[i] * k[i][c];
            }
            y5[c] += step * d5;
            let scale = ATOL + tol * y[c].abs().max(y5[c].abs());
            err = err.max((step * (d5 - d4)).abs() / scale);
        }
        if err <= 1.0 {
            s = if landing { target } else { s + step };
            y = y5;
            k[0] = k[6];
            samples.push(Sample {
                s,
                upper: y[0],
                lower: y[1],
            });
            if landing {
                next += 1;
                if next == targets.len() {
                    return Ok(Trajectory {
                        alpha,
                        kind,
                        samples,
                        rtol: tol,
                        atol: ATOL,
                        direction: Direction::Inward,
                    });
                }
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        // an accepted landing step was shortened, so the old proposal stands
        if !(landing && err <= 1.0) {
            h = step * factor;
        }
    }
    Err(Error::IterationCap(MAX_STEPS))
}

pub fn integrate_ode(alpha: f64, kind: FamilyKind, s_stop: f64, tol: f64) -> Result<Trajectory> {
    integrate_inward(alpha, kind, s_stop, tol, &[])
}

/// Values at each requested `s` (any order, all in `[s_stop, 1]`).
pub fn solve_at(alpha: f64, kind: FamilyKind, points: &[f64], tol: f64) -> Result<Vec<Sample>> {
    let mut sorted: Vec<f64> = points.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let lowest = *sorted.last().ok_or_else(|| Error::Domain("empty grid".into()))?;
    if lowest <= 0.0 || sorted[0] > 1.0 {
        return Err(Error::Domain(format!("grid must lie in (0, 1], got [{lowest}, {}]", sorted[0])));
    }
    let stop = lowest.min(0.999_999);
    let traj = integrate_inward(alpha, kind, stop, tol, &sorted)?;
    points
        .iter()
        .map(|&p| {
            traj.samples
                .iter()
                .find(|smp| smp.s == p)
                .copied()
                .ok_or_else(|| Error::Domain(format!("grid point {p} was not landed on")))
        })
        .collect()
}

/// Integrator tolerance used by the series comparison.
pub const COMPARE_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointError {
    pub s: f64,
    pub family: FamilyKind,
    /// `upper` (F̃/f̃) or `lower` (G̃/g̃)
    pub component: &'static str,
    pub series: f64,
    pub ode: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesOdeComparison {
    pub order: usize,
    pub alpha: f64,
    pub max_rel_error: f64,
    pub points: Vec<PointError>,
}

/// Maximum of `|series − ode| / max(|ode|, 1e−30)` over both families and
/// both components on the grid.
pub fn compare_series_ode(order: usize, alpha: f64, grid: &[f64]) -> Result<SeriesOdeComparison> {
    if grid.is_empty() {
        return Err(Error::Domain("comparison grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|&&s| !(0.1..=0.99).contains(&s)) {
        return Err(Error::Domain(format!("grid point {bad} outside [0.1, 0.99]")));
    }
    let compare = |kind: FamilyKind| -> Result<Vec<PointError>> {
        let family = generate_family(kind, order);
        let (upper, lower) = (family.f_sum(), family.g_sum());
        let ode = solve_at(alpha, kind, grid, COMPARE_TOL)?;
        let mut out = Vec::with_capacity(2 * grid.len());
        for smp in ode {
            for (component, series, numeric) in [
                ("upper", upper.eval_numeric(smp.s, alpha)?, smp.upper),
                ("lower", lower.eval_numeric(smp.s, alpha)?, smp.lower),
            ] {
                out.push(PointError {
                    s: smp.s,
                    family: kind,
                    component,
                    series,
                    ode: numeric,
                    rel_error: (series - numeric).abs() / numeric.abs().max(1e-30),
                });
            }
        }
        Ok(out)
    };
    let (first, second) = rayon::join(|| compare(FamilyKind::First), || compare(FamilyKind::Second));
    let mut points = first?;
    points.extend(second?);
    let max_rel_error = points.iter().map(|p| p.rel_error).fold(0.0, f64::max);
    Ok(SeriesOdeComparison {
        order,
        alpha,
        max_rel_error,
        points,
    })
}

/// Uniform grid of `n` points on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gaps {
    pub big_g: f64,
    pub big_f: f64,
    pub small_f: f64,
    pub small_g: f64,
}

impl Gaps {
    pub fn max(&self) -> f64 {
        self.big_g.max(self.big_f).max(self.small_f).max(self.small_g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub alpha: f64,
    pub beta: f64,
    /// `(G, F, f, g)` just inside `s = 1`.
    pub interior: [f64; 4],
    /// `(G, F, f, g)` from the exterior closed forms.
    pub exterior: [f64; 4],
    pub gaps: Gaps,
    /// `Gg + Ff` from the exterior forms on `s ∈ (1, 3]`, largest magnitude.
    pub exterior_product_max: f64,
}

/// Interior damped series (order 2, `γ = 1`) against the exterior closed
/// forms at `s = 1`.
pub fn continuity_check(alpha: f64, beta: f64) -> Result<ContinuityReport> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!("need α, β > 0, got α = {alpha}, β = {beta}")));
    }
    let profile = RadialProfile::new(alpha, beta, 2);
    let interior = profile.interior(1.0)?;
    let exterior = profile.exterior(1.0)?;
    let gap = |i: usize| (interior[i] - exterior[i]).abs();
    let pair = external_solution(beta)?;
    let exterior_product_max = uniform_grid(1.0 + 1e-3, 3.0, 200)
        .into_iter()
        .map(|s| pair.product(s).map(f64::abs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ContinuityReport {
        alpha,
        beta,
        interior,
        exterior,
        gaps: Gaps {
            big_g: gap(0),
            big_f: gap(1),
            small_f: gap(2),
            small_g: gap(3),
        },
        exterior_product_max,
    })
}

/// Damped radial functions from the two series families inside `s = 1`
/// and the closed exterior forms outside.
pub struct RadialProfile {
    alpha: f64,
    beta: f64,
    first: SolutionFamily,
    second: SolutionFamily,
}

impl RadialProfile {
    pub fn new(alpha: f64, beta: f64, order: usize) -> Self {
        RadialProfile {
            alpha,
            beta,
            first: generate_family(FamilyKind::First, order),
            second: generate_family(FamilyKind::Second, order),
        }
    }

    /// Undamped interior `G̃` at `s`.
    pub fn g_tilde(&self, s: f64) -> Result<f64> {
        self.first.g_sum().eval_numeric(s, self.alpha)
    }

    /// `(G, F, f, g)` from the series times `exp(−β/s)`.
    pub fn interior(&self, s: f64) -> Result<[f64; 4]> {
        let w = (-self.beta / s).exp();
        let a = self.alpha;
        Ok([
            self.first.g_sum().eval_numeric(s, a)? * w,
            self.first.f_sum().eval_numeric(s, a)? * w,
            self.second.f_sum().eval_numeric(s, a)? * w,
            self.second.g_sum().eval_numeric(s, a)? * w,
        ])
    }

    pub fn exterior(&self, s: f64) -> Result<[f64; 4]> {
        let pair = external_solution(self.beta)?;
        let first = pair.first.eval(s)?;
        let second = pair.second.eval(s)?;
        Ok([first.lower, first.upper, second.upper, second.lower])
    }

    /// Interior for `s ≤ 1`, exterior beyond.
    pub fn at(&self, s: f64) -> Result<[f64; 4]> {
        if s <= 1.0 {
            self.interior(s)
        } else {
            self.exterior(s)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub s: f64,
    pub big_f: f64,
    pub big_g: f64,
    pub small_f: f64,
    pub small_g: f64,
    pub gg: f64,
    pub ff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Data {
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<ProfileRow>,
    /// Number of sign changes of G on the grid.
    pub g_sign_changes: usize,
    /// Refined position of the first sign change.
    pub g_zero: Option<f64>,
}

impl Fig1Data {
    pub const CSV_HEADER: &'static str = "s,F,G,f,g,Gg,Ff";
}

/// Radial profiles on a log grid from `β/100` to `1.2`.
pub fn fig1_data(alpha: f64, beta: f64, n_samples: usize) -> Result<Fig1Data> {
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!("need α, β > 0, got α = {alpha}, β = {beta}")));
    }
    let profile = RadialProfile::new(alpha, beta, 2);
    let (lo, hi) = ((beta / 100.0).ln(), 1.2f64.ln());
    let rows = (0..n_samples)
        .map(|i| {
            let s = (lo + (hi - lo) * i as f64 / (n_samples - 1) as f64).exp();
            let [g, f, sf, sg] = profile.at(s)?;
            Ok(ProfileRow {
                s,
                big_f: f,
                big_g: g,
                small_f: sf,
                small_g: sg,
                gg: g * sg,
                ff: f * sf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // sign of G on the grid follows G̃, since the damping factor is positive
    let signs: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.s <= 1.0)
        .map(|r| Ok((r.s, profile.g_tilde(r.s)?)))
        .collect::<Result<_>>()?;
    let crossings: Vec<(f64, f64)> = signs
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0].0, w[1].0))
        .collect();
    let g_zero = match crossings.first() {
        Some(&(a, b)) => Some(brent(|s| profile.g_tilde(s), a, b, 1e-15 * b, 200)?.x),
        None => None,
    };
    Ok(Fig1Data {
        alpha,
        beta,
        rows,
        g_sign_changes: crossings.len(),
        g_zero,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaplacianCheck {
    pub n: usize,
    /// `c(n)` in `∇²(1/r) = c(n)·r⁻³` away from the origin.
    pub coefficient: f64,
    pub radius: f64,
    pub analytic: f64,
    pub finite_difference: f64,
    /// `|fd − analytic|` relative to the `r⁻³` scale of the individual
    /// second derivatives, which stays meaningful when `c(n) = 0`.
    pub rel_error: f64,
}

// Eighth-order central second-difference weights, offsets −4..=4.
const FD8: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];

/// `c(n) = 3 − n`, with a finite-difference check of `∇²(1/r)` at a point
/// drawn uniformly on the unit sphere in `n` dimensions.
pub fn laplacian_ndim(n: usize, seed: u64) -> Result<LaplacianCheck> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {n}")));
    }
    let coefficient = 3.0 - n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|c| c * c).sum();
        if r2 > 1e-2 && r2 <= 1.0 {
            let r = r2.sqrt();
            break v.into_iter().map(|c| c / r).collect();
        }
    };
    let radius = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let inv_r = |p: &[f64]| 1.0 / p.iter().map(|c| c * c).sum::<f64>().sqrt();
    let h = 1e-2 * radius;
    let mut parts = Vec::with_capacity(n * FD8.len());
    for i in 0..n {
        let x0 = x[i];
        for (k, w) in FD8.iter().enumerate() {
            x[i] = x0 + (k as f64 - 4.0) * h;
            parts.push(w * inv_r(&x));
        }
        x[i] = x0;
    }
    let finite_difference = crate::summation::neumaier_sum(parts) / (h * h);
    let analytic = coefficient * radius.powi(-3);
    Ok(LaplacianCheck {
        n,
        coefficient,
        radius,
        analytic,
        finite_difference,
        rel_error: (finite_difference - analytic).abs() / radius.powi(-3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coupling_is_constant() {
        let t = integrate_ode(0.0, FamilyKind::First, 0.1, 1e-12).unwrap();
        assert!(t.samples.iter().all(|s| s.upper == 0.0 && s.lower == 1.0));
        let c = compare_series_ode(2, 0.0, &[0.2, 0.5]).unwrap();
        assert!(c.max_rel_error < 1e-13);
    }

    #[test]
    fn second_family_starts_at_unit_upper() {
        let t = integrate_ode(0.0073, FamilyKind::Second, 0.5, 1e-12).unwrap();
        assert_eq!((t.samples[0].upper, t.samples[0].lower), (1.0, 0.0));
        assert!(t.samples.windows(2).all(|w| w[1].s < w[0].s));
        assert_eq!(t.last().s, 0.5);
    }

    #[test]
    fn first_family_at_half_matches_first_correction() {
        let a = 0.0073;
        let v = solve_at(a, FamilyKind::First, &[0.5], 1e-13).unwrap()[0];
        let s: f64 = 0.5;
        let g1 = -(a * a / 12.0) * (s.powi(-2) - 2.0 / s + 6.0 * s.ln() + 9.0 - 10.0 * s + 2.0 * s * s);
        assert!(((v.lower - (1.0 + g1)) / v.lower).abs() < 10.0 * a.powi(4));
    }

    #[test]
    fn underflow_toward_origin_is_reported() {
        let r = integrate_ode(0.5, FamilyKind::Second, 0.5, 1e-300);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
        assert!(integrate_ode(0.1, FamilyKind::First, 1.5, 1e-10).is_err());
    }

    #[test]
    fn laplacian_coefficients() {
        for n in 2..=7 {
            let c = laplacian_ndim(n, 7).unwrap();
            assert_eq!(c.coefficient, 3.0 - n as f64);
            assert!(c.rel_error < 1e-9, "n = {n}: {c:?}");
        }
        assert!(laplacian_ndim(1, 0).is_err());
    }

    #[test]
    fn continuity_at_unit_radius() {
        let r = continuity_check(0.0073, 0.0073 * 0.0073 / 8.0).unwrap();
        assert!(r.gaps.max() < 1e-14, "{r:?}");
        assert_eq!(r.exterior_product_max, 0.0);
        assert!((r.interior[0] - (-0.0073f64 * 0.0073 / 8.0).exp()).abs() < 1e-15);
    }
}
