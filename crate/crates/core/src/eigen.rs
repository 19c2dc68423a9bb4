//! The eigenvalue condition on α.
//!
//! With `x = (α − β)^{1/2}`, `Ω₁ = cosh² x`, `Ω₂ = sinh² x` and
//! `λ = (α − β)^{1/(1+√α)}`, the condition is
//!
//! ```text
//! Ω₁·I_A − Ω₂·I_B = λ·I_λ
//! I_A = (1/α) ∫₀¹ s·P w ds,  I_B = (1/β) ∫₀¹ s²·P w ds,  I_λ = ∫₀¹ P w ds
//! ```
//!
//! where `P = (6/α) s² F̃ f̃` and `w = exp(−2β/s)`. The closed mode keeps
//! only the leading bracket `s⁻² − 3 + 2s` of `P`, puts `β = α²/8` and uses
//! the small-η moment approximations, which collapse the three integrals to
//! `I_A = −(1/α)[ln(α²/4) + 1.41055]` and `I_B = I_λ = 4/α²`.

use rayon::prelude::*;
use serde::Serialize;

use crate::damped::{
    integrate_series_damped, solve_beta_condition, BetaOptions, MomentMode, MomentOptions,
};
use crate::error::{Error, Result};
use crate::roots::brent;
use crate::series::{cached_product, ProductKind};

/// Constant of the `s⁻¹`-weighted leading integral: `γ + 3/2 − 2/3`,
/// printed to six digits.
pub const LOG_OFFSET: f64 = 1.41055;

/// `Σₙ (−√α)ⁿ = 1/(1 + √α)`, the exponent of `α − β` in λ.
pub fn lambda_exponent(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("exponent needs 0 < α < 1, got {alpha}")));
    }
    Ok(1.0 / (1.0 + alpha.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMode {
    /// Closed transcendental form with the printed constant.
    Closed,
    /// Damped integrals of the full products at a given series order.
    FullSeries,
}

impl std::str::FromStr for EigenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "eq64" | "eq64_closed" => Ok(EigenMode::Closed),
            "full_series" | "full-series" => Ok(EigenMode::FullSeries),
            other => Err(Error::Parse(format!("unknown eigen mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenConfig {
    pub bracket: (f64, f64),
    /// Absolute tolerance on α.
    pub tol: f64,
    pub mode: EigenMode,
    pub series_order: usize,
    pub moments: MomentOptions,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            bracket: (0.005, 0.01),
            tol: 1e-12,
            mode: EigenMode::Closed,
            series_order: 2,
            moments: MomentOptions::default(),
        }
    }
}

impl EigenConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && lo < hi && hi < 0.1) {
            return Err(Error::Domain(format!(
                "bracket must satisfy 0 < lo < hi < 0.1, got ({lo}, {hi})"
            )));
        }
        if self.mode == EigenMode::FullSeries && self.series_order == 0 {
            return Err(Error::OrderMismatch {
                requested: 0,
                available: 1,
            });
        }
        Ok(())
    }

    fn beta_options(&self) -> BetaOptions {
        BetaOptions {
            moments: self.moments,
            order: self.series_order,
            ..BetaOptions::default()
        }
    }
}

/// Both sides of the condition at one α, with their parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub alpha: f64,
    pub beta: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    pub integral_a: f64,
    pub integral_b: f64,
    pub integral_lambda: f64,
    /// `Ω₁·I_A`
    pub omega1_term: f64,
    /// `Ω₂·I_B`
    pub omega2_term: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Residual {
    pub fn value(&self) -> f64 {
        self.lhs - self.rhs
    }

    fn assemble(alpha: f64, beta: f64, integrals: (f64, f64, f64)) -> Result<Residual> {
        let (integral_a, integral_b, integral_lambda) = integrals;
        let gap = alpha - beta;
        if gap <= 0.0 {
            return Err(Error::Domain(format!("α − β must be positive, got {gap}")));
        }
        let x = gap.sqrt();
        let omega1 = x.cosh().powi(2);
        let omega2 = x.sinh().powi(2);
        let lambda = gap.powf(lambda_exponent(alpha)?);
        let omega1_term = omega1 * integral_a;
        let omega2_term = omega2 * integral_b;
        Ok(Residual {
            alpha,
            beta,
            omega1,
            omega2,
            lambda,
            integral_a,
            integral_b,
            integral_lambda,
            omega1_term,
            omega2_term,
            lhs: omega1_term - omega2_term,
            rhs: lambda * integral_lambda,
        })
    }
}

pub fn eigen_residual(alpha: f64, cfg: &EigenConfig) -> Result<Residual> {
    if !(alpha > 0.0 && alpha < 0.1) {
        return Err(Error::Domain(format!("α must lie in (0, 0.1), got {alpha}")));
    }
    match cfg.mode {
        EigenMode::Closed => {
            let beta = alpha * alpha / 8.0;
            let a = -((alpha * alpha / 4.0).ln() + LOG_OFFSET) / alpha;
            let b = 4.0 / (alpha * alpha);
            Residual::assemble(alpha, beta, (a, b, b))
        }
        EigenMode::FullSeries => {
            if cfg.series_order == 0 {
                return Err(Error::OrderMismatch {
                    requested: 0,
                    available: 1,
                });
            }
            let gg = cached_product(ProductKind::GG, cfg.series_order).normalized();
            let (beta, _) = solve_beta_condition(&gg, alpha, &cfg.beta_options())?;
            let p = cached_product(ProductKind::FF, cfg.series_order).normalized();
            let eta = 2.0 * beta;
            let integrate = |k: i32| integrate_series_damped(&p.shift_s(k), eta, alpha, &cfg.moments);
            let a = integrate(1)? / alpha;
            let b = integrate(2)? / beta;
            let l = integrate(0)?;
            Residual::assemble(alpha, beta, (a, b, l))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaResult {
    pub alpha: f64,
    pub beta: f64,
    pub residual: Residual,
    pub iterations: usize,
    pub mode: EigenMode,
    pub series_order: Option<usize>,
}

pub fn solve_alpha(cfg: &EigenConfig) -> Result<AlphaResult> {
    cfg.validate()?;
    let (lo, hi) = cfg.bracket;
    let root = brent(|a| Ok(eigen_residual(a, cfg)?.value()), lo, hi, cfg.tol, 200)?;
    let residual = eigen_residual(root.x, cfg)?;
    Ok(AlphaResult {
        alpha: root.x,
        beta: residual.beta,
        residual,
        iterations: root.iterations,
        mode: cfg.mode,
        series_order: (cfg.mode == EigenMode::FullSeries).then_some(cfg.series_order),
    })
}

/// Sign changes of `lhs − rhs` on a uniform grid over `[lo, hi]`; each entry
/// is the grid cell `(a, b)` containing one.
pub fn scan_sign_changes(cfg: &EigenConfig, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0 && lo < hi) {
        return Err(Error::Domain(format!("bad scan range ({lo}, {hi}) step {step}")));
    }
    let n = ((hi - lo) / step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&a| eigen_residual(a, cfg).map(|r| r.value()))
        .collect::<Result<_>>()?;
    Ok(grid
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| v[0].signum() != v[1].signum())
        .map(|(g, _)| (g[0], g[1]))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementRow {
    /// `None` for the closed-form baseline.
    pub order: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    /// `|α − α_previous|`; absent on the first row.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub rows: Vec<RefinementRow>,
    pub final_alpha: f64,
    /// Last change, or zero for a single row.
    pub uncertainty: f64,
}

impl Refinement {
    /// Ratios `change[k] / change[k+1]` of successive changes.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        let changes: Vec<f64> = self.rows.iter().filter_map(|r| r.change).collect();
        changes.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Closed-form root, then full-series roots at orders `1..=max_order`,
/// each re-solving β from the first-family product of the same order.
pub fn refine_alpha(max_order: usize, cfg: &EigenConfig) -> Result<Refinement> {
    if max_order == 0 {
        return Err(Error::Domain("refinement needs max_order ≥ 1".into()));
    }
    let closed = solve_alpha(&EigenConfig {
        mode: EigenMode::Closed,
        ..*cfg
    })?;
    let series: Vec<AlphaResult> = (1..=max_order)
        .into_par_iter()
        .map(|order| {
            solve_alpha(&EigenConfig {
                mode: EigenMode::FullSeries,
                series_order: order,
                ..*cfg
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = vec![RefinementRow {
        order: None,
        alpha: closed.alpha,
        beta: closed.beta,
        change: None,
    }];
    for r in series {
        let prev = rows.last().expect("baseline row").alpha;
        rows.push(RefinementRow {
            order: r.series_order,
            alpha: r.alpha,
            beta: r.beta,
            change: Some((r.alpha - prev).abs()),
        });
    }
    let last = rows.last().expect("at least two rows");
    Ok(Refinement {
        final_alpha: last.alpha,
        uncertainty: last.change.unwrap_or(0.0),
        rows,
    })
}

/// Moment mode used for the residual integrals.
pub fn with_moment_mode(cfg: EigenConfig, mode: MomentMode) -> EigenConfig {
    EigenConfig {
        moments: MomentOptions { mode, ..cfg.moments },
        ..cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damped::EULER_GAMMA;

    #[test]
    fn exponent() {
        assert!((lambda_exponent(0.0073).unwrap() - 0.921_286).abs() < 1e-6);
        assert!((lambda_exponent(0.25).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((lambda_exponent(1e-14).unwrap() - 1.0).abs() < 1e-6);
        assert!(lambda_exponent(1.0).is_err());
    }

    #[test]
    fn offset_is_gamma_plus_five_sixths() {
        assert!((LOG_OFFSET - (EULER_GAMMA + 5.0 / 6.0)).abs() < 1e-5);
    }

    #[test]
    fn closed_sides_near_root() {
        let cfg = EigenConfig::default();
        let r = eigen_residual(0.007292, &cfg).unwrap();
        assert!((r.lhs - r.rhs).abs() < 0.01 * r.rhs.abs());
        // values from an independent 30-digit evaluation
        assert!((r.lhs - 806.82).abs() < 0.01, "{}", r.lhs);
        assert!((r.rhs - 807.21).abs() < 0.01, "{}", r.rhs);
        let lo = eigen_residual(0.004, &cfg).unwrap().value();
        let hi = eigen_residual(0.012, &cfg).unwrap().value();
        assert!((lo - 376.7).abs() < 0.1 && (hi + 105.3).abs() < 0.1, "{lo} {hi}");
    }

    #[test]
    fn closed_root() {
        let r = solve_alpha(&EigenConfig::default()).unwrap();
        assert!((r.alpha - 0.007_283_718_712_2).abs() < 1e-12, "{}", r.alpha);
        let res = r.residual;
        assert!(res.value().abs() <= 1e-9 * res.lhs.abs().max(res.rhs.abs()));
        assert!((res.omega1 - res.omega2 - 1.0).abs() < 1e-14);
        // the s²-weighted integral dominates at the root
        assert!(res.integral_b > res.integral_a);
    }

    #[test]
    fn bad_config() {
        let cfg = EigenConfig {
            bracket: (0.01, 0.005),
            ..Default::default()
        };
        assert!(matches!(solve_alpha(&cfg), Err(Error::Domain(_))));
        let cfg = EigenConfig {
            bracket: (0.02, 0.05),
            ..Default::default()
        };
        assert!(matches!(solve_alpha(&cfg), Err(Error::NoSignChange { .. })));
    }
}
