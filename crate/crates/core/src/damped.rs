//! Moments of the damping factor `w = exp(−η/s)` against `s^p (ln s)^q` on
//! `(0, 1]`, series integrated against `w`, and the β(α) condition.
//!
//! Exact mode builds every moment from the `p = −1` column by the
//! integration-by-parts recurrence
//!
//! ```text
//! (p+1)·M(p,q) + q·M(p,q−1) + η·M(p−1,q) = δ_{q0}·e^{−η}
//! ```
//!
//! run downward for `p ≤ −2` and upward for `p ≥ 0`; both directions are
//! stable. The `p = −1` column has a convergent expansion in η whose
//! log-polynomial part comes from the Taylor coefficients of
//! `Γ(a)`-type generating functions (ζ values), so the `(ln s)^q` moments
//! are derivatives in `p` evaluated without numeric differentiation.

use rayon::prelude::*;

use crate::algebra::{rational_to_f64, LogPolySeries, Monomial};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_adaptive};
use crate::roots::brent;
use crate::series::ProductSeries;
use crate::summation::tree_sum;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ζ(2) … ζ(24)
const ZETA: [f64; 23] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
];

/// Largest log power the exact evaluator supports.
pub const MAX_LOG_POW: u32 = ZETA.len() as u32 - 1;

/// Above this η the small-η expansion loses digits to cancellation and the
/// exact evaluator switches to a fixed composite Gauss–Legendre rule.
const SERIES_ETA_MAX: f64 = 2.0;

const MAX_SUBDIVISIONS: usize = 4000;

/// `∫₀¹ exp(−η/s) s^p (ln s)^q ds`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampedMoment {
    pub p: i32,
    pub q: u32,
    pub eta: f64,
}

impl DampedMoment {
    pub fn new(p: i32, q: u32, eta: f64) -> Self {
        DampedMoment { p, q, eta }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMode {
    #[default]
    Exact,
    Quadrature,
}

impl std::str::FromStr for MomentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MomentMode::Exact),
            "quadrature" => Ok(MomentMode::Quadrature),
            other => Err(Error::Parse(format!("unknown moment mode `{other}`"))),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("damping parameter must be positive, got {eta}")))
    }
}

pub fn damped_moment(m: DampedMoment, mode: MomentMode, tol: f64) -> Result<f64> {
    check_eta(m.eta)?;
    match mode {
        MomentMode::Exact => {
            let table = MomentTable::new(m.eta, m.p, m.p, m.q)?;
            Ok(table.get(m.p, m.q))
        }
        MomentMode::Quadrature => moment_quadrature(m, tol),
    }
}

/// Exact moments `M(p, q, η)` for `p_min ≤ p ≤ p_max`, `q ≤ q_max`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    eta: f64,
    p_min: i32,
    width: usize,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn new(eta: f64, p_min: i32, p_max: i32, q_max: u32) -> Result<Self> {
        check_eta(eta)?;
        if q_max > MAX_LOG_POW {
            return Err(Error::Domain(format!(
                "log power {q_max} exceeds the supported maximum {MAX_LOG_POW}"
            )));
        }
        let (lo, hi) = (p_min.min(-1), p_max.max(-1));
        let width = (hi - lo + 1) as usize;
        let rows = q_max as usize + 1;
        let mut values = vec![0.0; width * rows];
        if eta > SERIES_ETA_MAX {
            for q in 0..rows {
                for (j, p) in (lo..=hi).enumerate() {
                    values[q * width + j] = moment_fixed_rule(p, q as u32, eta);
                }
            }
        } else {
            let base = minus_one_column(eta, q_max);
            let damp = (-eta).exp();
            let col = |p: i32| (p - lo) as usize;
            for q in 0..rows {
                let delta = if q == 0 { damp } else { 0.0 };
                let qf = q as f64;
                values[q * width + col(-1)] = base[q];
                // M(p−1,q) from M(p,q) and M(p,q−1)
                for p in ((lo + 1)..=-1).rev() {
                    let prev = if q == 0 { 0.0 } else { values[(q - 1) * width + col(p)] };
                    let m = values[q * width + col(p)];
                    values[q * width + col(p - 1)] = (delta - (p + 1) as f64 * m - qf * prev) / eta;
                }
                for p in 0..=hi {
                    let prev = if q == 0 { 0.0 } else { values[(q - 1) * width + col(p)] };
                    let below = values[q * width + col(p - 1)];
                    values[q * width + col(p)] = (delta - qf * prev - eta * below) / (p + 1) as f64;
                }
            }
        }
        Ok(MomentTable {
            eta,
            p_min: lo,
            width,
            values,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Panics if `(p, q)` lies outside the table.
    pub fn get(&self, p: i32, q: u32) -> f64 {
        let j = (p - self.p_min) as usize;
        assert!(j < self.width, "p = {p} outside moment table");
        self.values[q as usize * self.width + j]
    }
}

/// `M(−1, q)` for `q = 0..=q_max` from
/// `M(−1,q) = (−1)^q q! e_{q+1} − q! Σ_{n≥1} (−η)^n / (n!·n^{q+1})`,
/// where `Σ e_m a^m = exp(−(ln η + γ)a + Σ_{k≥2} (−1)^k ζ(k) a^k / k)`.
fn minus_one_column(eta: f64, q_max: u32) -> Vec<f64> {
    let n = q_max as usize + 2;
    let mut c = vec![0.0; n];
    c[1] = -(eta.ln() + EULER_GAMMA);
    for (k, ck) in c.iter_mut().enumerate().skip(2) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *ck = sign * ZETA[k - 2] / k as f64;
    }
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    for m in 1..n {
        let s: f64 = (1..=m).map(|k| k as f64 * c[k] * e[m - k]).sum();
        e[m] = s / m as f64;
    }
    let mut out = Vec::with_capacity(q_max as usize + 1);
    let mut factorial = 1.0;
    for q in 0..=q_max as usize {
        if q > 0 {
            factorial *= q as f64;
        }
        let mut tail = 0.0;
        let mut comp = 0.0;
        let mut power = 1.0;
        for k in 1..200 {
            power *= -eta / k as f64;
            let term = power / (k as f64).powi(q as i32 + 1);
            let t = tail + term;
            comp += if tail.abs() >= term.abs() {
                (tail - t) + term
            } else {
                (term - t) + tail
            };
            tail = t;
            if term.abs() <= 1e-18 * tail.abs() {
                break;
            }
        }
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        out.push(factorial * (sign * e[q + 1] - (tail + comp)));
    }
    out
}

/// Moment in `t = −ln s`, `∫₀^∞ exp(−η e^t − (p+1) t) (−t)^q dt`, with a
/// fixed 24-panel 20-point Gauss–Legendre rule. Only used for η > 2 where
/// the integrand is smooth and decays double-exponentially.
fn moment_fixed_rule(p: i32, q: u32, eta: f64) -> f64 {
    const CUTOFF: f64 = 745.0;
    if eta >= CUTOFF {
        return 0.0;
    }
    // past t_max the factor exp(−η e^t) is below the smallest subnormal
    let t_max = (CUTOFF / eta).ln() + 1.0;
    let (x, w) = gauss_legendre(20);
    let panels = 24;
    let h = t_max / panels as f64;
    let mut parts = Vec::with_capacity(panels * x.len());
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = mid + 0.5 * h * xi;
            parts.push(0.5 * h * wi * integrand_t(p, q, eta, t));
        }
    }
    tree_sum(&parts)
}

fn integrand_t(p: i32, q: u32, eta: f64, t: f64) -> f64 {
    let u = eta * t.exp();
    (-u - (p + 1) as f64 * t).exp() * (-t).powi(q as i32)
}

/// Substituting `u = η/s` turns the moment into
/// `η^{p+1} ∫_η^∞ e^{−u} u^{−p−2} (ln η − ln u)^q du`; the tail is cut at
/// the first `U` with `e^{−U} U^{|p|+q} < tol·10⁻²` and the remaining
/// range is stretched by `t = ln(u/η)` before adaptive integration.
fn moment_quadrature(m: DampedMoment, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let DampedMoment { p, q, eta } = m;
    let k = (p.unsigned_abs() + q) as f64;
    let cut = tol * 1e-2;
    let mut u_max = eta.max(1.0).max(k);
    while (-u_max + k * u_max.ln()).exp() >= cut {
        u_max *= 1.25;
    }
    let t_max = (u_max / eta).ln();
    let rel = tol.max(1e-13);
    let r = integrate_adaptive(
        |t| integrand_t(p, q, eta, t),
        0.0,
        t_max,
        0.0,
        rel,
        MAX_SUBDIVISIONS,
    )?;
    Ok(r.value)
}

/// Small-η approximations of `∫₀¹ w s^p ds`:
/// `p=−3: η⁻²`, `p=−2: η⁻¹`, `p=−1: −ln η − γ`, `p=0: 1 + η ln η`,
/// `p≥1: 1/(p+1) − η/p`. `None` for `p < −3`.
pub fn small_eta_approximation(p: i32, eta: f64) -> Option<f64> {
    match p {
        -3 => Some(eta.powi(-2)),
        -2 => Some(eta.recip()),
        -1 => Some(-eta.ln() - EULER_GAMMA),
        0 => Some(1.0 + eta * eta.ln()),
        k if k >= 1 => Some(1.0 / (k + 1) as f64 - eta / k as f64),
        _ => None,
    }
}

/// Closed forms of the `s⁻³` and `s⁻²` moments.
pub fn closed_form_moment(p: i32, eta: f64) -> Option<f64> {
    match p {
        -3 => Some((-eta).exp() * (eta.powi(-2) + eta.recip())),
        -2 => Some((-eta).exp() / eta),
        _ => None,
    }
}

/// `∫₀¹ w s⁻¹ ds + ln η`, which tends to `−γ` as η → 0.
pub fn euler_probe(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("probe requires 0 < η < 1, got {eta}")));
    }
    Ok(damped_moment(DampedMoment::new(-1, 0, eta), MomentMode::Exact, 0.0)? + eta.ln())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentOptions {
    pub mode: MomentMode,
    pub tol: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            mode: MomentMode::Exact,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DampedIntegral {
    pub value: f64,
    /// Size of the first omitted order, estimated as the top retained
    /// α-group times `α^(discarded − top)`. Zero when nothing was discarded.
    pub truncation_estimate: f64,
}

/// `∫₀¹ w S(s, α) ds` with α substituted numerically.
pub fn integrate_series_damped(
    series: &LogPolySeries,
    eta: f64,
    alpha: f64,
    opts: &MomentOptions,
) -> Result<f64> {
    Ok(integrate_terms(series, eta, alpha, opts)?.0)
}

/// As [`integrate_series_damped`] for a truncated product, with the
/// truncation estimate taken from its discarded order.
pub fn integrate_product_damped(
    product: &ProductSeries,
    eta: f64,
    alpha: f64,
    opts: &MomentOptions,
) -> Result<DampedIntegral> {
    let normalized = product.normalized();
    let (value, top) = integrate_terms(&normalized, eta, alpha, opts)?;
    let truncation_estimate = match top {
        Some((pow, group)) => {
            // normalized series is the stored one divided by α
            let discarded = product.discarded_from.saturating_sub(1);
            group.abs() * alpha.powi(discarded as i32 - pow as i32)
        }
        None => 0.0,
    };
    Ok(DampedIntegral {
        value,
        truncation_estimate,
    })
}

/// Returns the integral and, for the highest α power present, its
/// power and α-weighted contribution.
fn integrate_terms(
    series: &LogPolySeries,
    eta: f64,
    alpha: f64,
    opts: &MomentOptions,
) -> Result<(f64, Option<(u32, f64)>)> {
    check_eta(eta)?;
    if series.is_zero() {
        return Ok((0.0, None));
    }
    let mut keys: Vec<(i32, u32)> = series.iter().map(|(m, _)| (m.s_pow, m.log_pow)).collect();
    keys.sort_unstable();
    keys.dedup();
    let moments: Vec<f64> = match opts.mode {
        MomentMode::Exact => {
            let p_min = keys.iter().map(|k| k.0).min().unwrap_or(0);
            let p_max = keys.iter().map(|k| k.0).max().unwrap_or(0);
            let q_max = keys.iter().map(|k| k.1).max().unwrap_or(0);
            let table = MomentTable::new(eta, p_min, p_max, q_max)?;
            keys.iter().map(|&(p, q)| table.get(p, q)).collect()
        }
        MomentMode::Quadrature => keys
            .par_iter()
            .map(|&(p, q)| moment_quadrature(DampedMoment::new(p, q, eta), opts.tol))
            .collect::<Result<_>>()?,
    };
    let lookup = |m: &Monomial| {
        let i = keys
            .binary_search(&(m.s_pow, m.log_pow))
            .expect("every monomial has a moment");
        moments[i]
    };
    let top_pow = series.max_alpha_pow().unwrap_or(0);
    let mut contributions = Vec::with_capacity(series.len());
    let mut top_parts = Vec::new();
    for (m, c) in series.iter() {
        let v = rational_to_f64(c) * alpha.powi(m.alpha_pow as i32) * lookup(m);
        contributions.push(v);
        if m.alpha_pow == top_pow {
            top_parts.push(v);
        }
    }
    Ok((tree_sum(&contributions), Some((top_pow, tree_sum(&top_parts)))))
}

/// Regularized flux `exp(−β/ε) − exp(−1/β)` through a shell of radius ε.
pub fn gauss_flux(beta: f64, epsilon: f64) -> Result<f64> {
    if !(beta > 0.0 && epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "flux needs β > 0 and ε > 0, got β = {beta}, ε = {epsilon}"
        )));
    }
    Ok((-beta / epsilon).exp() - (-1.0 / beta).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    Asymptotic,
    Numeric,
    FullSeries,
}

impl std::str::FromStr for BetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(BetaMode::Asymptotic),
            "numeric" => Ok(BetaMode::Numeric),
            "full_series" | "full-series" => Ok(BetaMode::FullSeries),
            other => Err(Error::Parse(format!("unknown beta mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaOptions {
    pub moments: MomentOptions,
    /// Series order of the product used by the full-series condition.
    pub order: usize,
    /// Root tolerance relative to α².
    pub xtol: f64,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions {
            moments: MomentOptions::default(),
            order: 2,
            xtol: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BetaResult {
    pub alpha: f64,
    pub beta_asymptotic: f64,
    pub beta_numeric: f64,
    pub beta_full_series: f64,
    /// Condition values at the returned roots.
    pub residual_numeric: f64,
    pub residual_full_series: f64,
}

impl BetaResult {
    pub fn get(&self, mode: BetaMode) -> f64 {
        match mode {
            BetaMode::Asymptotic => self.beta_asymptotic,
            BetaMode::Numeric => self.beta_numeric,
            BetaMode::FullSeries => self.beta_full_series,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("α must lie in (0, 0.1), got {alpha}")))
    }
}

/// `(1 − s)² − (α²/12) s⁻²`, the leading two orders of the normalized
/// first-family product.
pub fn leading_beta_integrand() -> LogPolySeries {
    LogPolySeries::term(1, 1, 0, 0, 0) - LogPolySeries::term(2, 1, 0, 1, 0)
        + LogPolySeries::term(1, 1, 0, 2, 0)
        - LogPolySeries::term(1, 12, 2, -2, 0)
}

/// Root in β of `∫₀¹ exp(−2β/s) S(s, α) ds = 0`, bracketed from
/// `(α²/100, α²)` with the lower end pushed down geometrically.
pub fn solve_beta_condition(
    integrand: &LogPolySeries,
    alpha: f64,
    opts: &BetaOptions,
) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let h = |beta: f64| integrate_series_damped(integrand, 2.0 * beta, alpha, &opts.moments);
    let hi = alpha * alpha;
    let f_hi = h(hi)?;
    let mut lo = hi / 100.0;
    let mut f_lo = h(lo)?;
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() {
        if expansions == 8 {
            return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
        }
        lo /= 10.0;
        f_lo = h(lo)?;
        expansions += 1;
    }
    let root = brent(h, lo, hi, opts.xtol * hi, 200)?;
    Ok((root.x, root.fx))
}

pub fn solve_beta(alpha: f64, opts: &BetaOptions) -> Result<BetaResult> {
    check_alpha(alpha)?;
    let (beta_numeric, residual_numeric) =
        solve_beta_condition(&leading_beta_integrand(), alpha, opts)?;
    let (beta_full_series, residual_full_series) =
        solve_beta_condition(&full_series_beta_integrand(opts.order)?, alpha, opts)?;
    Ok(BetaResult {
        alpha,
        beta_asymptotic: alpha * alpha / 8.0,
        beta_numeric,
        beta_full_series,
        residual_numeric,
        residual_full_series,
    })
}

/// Single-mode β.
pub fn beta(alpha: f64, mode: BetaMode, opts: &BetaOptions) -> Result<f64> {
    check_alpha(alpha)?;
    match mode {
        BetaMode::Asymptotic => Ok(alpha * alpha / 8.0),
        BetaMode::Numeric => Ok(solve_beta_condition(&leading_beta_integrand(), alpha, opts)?.0),
        BetaMode::FullSeries => {
            Ok(solve_beta_condition(&full_series_beta_integrand(opts.order)?, alpha, opts)?.0)
        }
    }
}

/// Normalized first-family product `(2/α) s² G̃ g̃` through the given
/// order. Order 0 carries no α² correction and cannot fix β.
pub fn full_series_beta_integrand(order: usize) -> Result<LogPolySeries> {
    if order == 0 {
        return Err(Error::OrderMismatch {
            requested: 0,
            available: 1,
        });
    }
    Ok(crate::series::cached_product(crate::series::ProductKind::GG, order).normalized())
}
