//! Iterated series solutions of the reduced radial system
//!
//! ```text
//! s⁻² d/ds (s² F̃) = (1 − s⁻¹) α G̃
//!      −d/ds G̃    = (1 − s⁻¹) α F̃
//! ```
//!
//! Both independent solutions are built by a strictly alternating recursion.
//! Each step integrates one equation and fixes the integration constant so
//! the new iterate vanishes at `s = 1`:
//!
//! * first family: `G̃₀ = 1`, then `F̃₀, G̃₁, F̃₁, G̃₂, …`
//! * second family: `f̃₀ = s⁻²`, then `g̃₀, f̃₁, g̃₁, f̃₂, …`
//!
//! Every `F̃ₖ` is proportional to `α^{2k+1}` and every `G̃ₖ` to `α^{2k}`
//! (for the second family `f̃ₖ ∝ α^{2k}` and `g̃ₖ ∝ α^{2k+1}`).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::algebra::LogPolySeries;
use crate::error::{Error, Result};

/// Integrate the first equation: returns
/// `F̃ = s⁻² [∫ s²(1 − s⁻¹) α G̃ ds + C]` with `C` chosen so `F̃(1) = 0`.
pub fn f_step(g: &LogPolySeries) -> LogPolySeries {
    let weight = &LogPolySeries::term(1, 1, 1, 2, 0) - &LogPolySeries::term(1, 1, 1, 1, 0);
    let integral = (&weight * g).antiderivative();
    let constant = integral.eval_at_one();
    (&integral - &constant).shift_s(-2)
}

/// Integrate the second equation: returns
/// `G̃ = −∫ (1 − s⁻¹) α F̃ ds + C` with `C` chosen so `G̃(1) = 0`.
pub fn g_step(f: &LogPolySeries) -> LogPolySeries {
    let weight = &LogPolySeries::term(1, 1, 1, 0, 0) - &LogPolySeries::term(1, 1, 1, -1, 0);
    let integral = -(&weight * f).antiderivative();
    let constant = integral.eval_at_one();
    &integral - &constant
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Generated by `G̃₀ = 1`.
    First,
    /// Generated by `f̃₀ = s⁻²`.
    Second,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::First => "first",
            FamilyKind::Second => "second",
        }
    }

    /// Iterate labels in plain ASCII: `F0`, `G1` for the first family and
    /// `f1`, `g0` for the second.
    pub fn upper_label(self, k: usize) -> String {
        match self {
            FamilyKind::First => format!("F{k}"),
            FamilyKind::Second => format!("f{k}"),
        }
    }

    pub fn lower_label(self, k: usize) -> String {
        match self {
            FamilyKind::First => format!("G{k}"),
            FamilyKind::Second => format!("g{k}"),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Iterates `(F̃₀…F̃ₙ, G̃₀…G̃ₙ)` or `(f̃₀…f̃ₙ, g̃₀…g̃ₙ)` of one independent
/// solution, truncated at index `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    /// `F̃ₖ` (first family) or `f̃ₖ` (second family).
    pub f_parts: Vec<LogPolySeries>,
    /// `G̃ₖ` (first family) or `g̃ₖ` (second family).
    pub g_parts: Vec<LogPolySeries>,
    pub order: usize,
}

/// Run the alternating recursion up to and including index `order`.
pub fn generate_family(kind: FamilyKind, order: usize) -> SolutionFamily {
    let mut f_parts = Vec::with_capacity(order + 1);
    let mut g_parts = Vec::with_capacity(order + 1);
    match kind {
        FamilyKind::First => {
            g_parts.push(LogPolySeries::one());
            for k in 0..=order {
                let f = f_step(&g_parts[k]);
                if k < order {
                    g_parts.push(g_step(&f));
                }
                f_parts.push(f);
            }
        }
        FamilyKind::Second => {
            f_parts.push(LogPolySeries::s_pow(-2));
            for k in 0..=order {
                let g = g_step(&f_parts[k]);
                if k < order {
                    f_parts.push(f_step(&g));
                }
                g_parts.push(g);
            }
        }
    }
    SolutionFamily {
        kind,
        f_parts,
        g_parts,
        order,
    }
}

impl SolutionFamily {
    /// `Σₖ F̃ₖ` (or `Σₖ f̃ₖ`).
    pub fn f_sum(&self) -> LogPolySeries {
        self.f_parts.iter().sum()
    }

    /// `Σₖ G̃ₖ` (or `Σₖ g̃ₖ`).
    pub fn g_sum(&self) -> LogPolySeries {
        self.g_parts.iter().sum()
    }

    /// Labelled iterates in recursion order (generator first).
    pub fn iterates(&self) -> Vec<(String, &LogPolySeries)> {
        let mut out = Vec::with_capacity(2 * (self.order + 1));
        for k in 0..=self.order {
            match self.kind {
                FamilyKind::First => {
                    out.push((self.kind.lower_label(k), &self.g_parts[k]));
                    out.push((self.kind.upper_label(k), &self.f_parts[k]));
                }
                FamilyKind::Second => {
                    out.push((self.kind.upper_label(k), &self.f_parts[k]));
                    out.push((self.kind.lower_label(k), &self.g_parts[k]));
                }
            }
        }
        out
    }

    /// Residuals `(s⁻²(s²F̃)' − (1−s⁻¹)αG̃, −G̃' − (1−s⁻¹)αF̃)` of the truncated
    /// sums. Both should start at an α power beyond the retained order.
    pub fn residuals(&self) -> (LogPolySeries, LogPolySeries) {
        let f = self.f_sum();
        let g = self.g_sum();
        let w = &LogPolySeries::alpha_pow(1) - &LogPolySeries::term(1, 1, 1, -1, 0);
        let ra = &f.shift_s(2).differentiate().shift_s(-2) - &(&w * &g);
        let rb = &(-g.differentiate()) - &(&w * &f);
        (ra, rb)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let iterates: Vec<serde_json::Value> = self
            .iterates()
            .into_iter()
            .map(|(name, s)| {
                serde_json::json!({
                    "name": name,
                    "text": s.to_string(),
                    "terms": s.to_json(),
                })
            })
            .collect();
        serde_json::json!({
            "family": self.kind.name(),
            "order": self.order,
            "iterates": iterates,
        })
    }
}

/// Which product density to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ProductKind {
    /// `s² G̃ g̃`
    GG,
    /// `s² F̃ f̃`
    FF,
}

impl ProductKind {
    /// `2/α` for `GG` and `6/α` for `FF`: the factor that makes the leading
    /// bracket have unit-scale integer coefficients.
    pub fn normalization(self) -> i64 {
        match self {
            ProductKind::GG => 2,
            ProductKind::FF => 6,
        }
    }
}

/// An α-truncated product together with its truncation bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSeries {
    pub kind: ProductKind,
    /// `s² G̃ g̃` or `s² F̃ f̃`, exact through α^`complete_through`.
    pub series: LogPolySeries,
    pub complete_through: u32,
    /// Lowest α power that was dropped.
    pub discarded_from: u32,
}

impl ProductSeries {
    /// `(2/α) s² G̃ g̃` or `(6/α) s² F̃ f̃`.
    pub fn normalized(&self) -> LogPolySeries {
        let scaled = self
            .series
            .scale(&crate::algebra::rat(self.kind.normalization(), 1));
        scaled
            .shift_alpha(-1)
            .expect("every product term carries at least one power of α")
    }

    /// The α^{2k} bracket of [`normalized`](Self::normalized), with α removed.
    pub fn bracket(&self, k: u32) -> LogPolySeries {
        self.normalized()
            .alpha_part(2 * k)
            .shift_alpha(-(2 * k as i32))
            .expect("α part shift is exact")
    }
}

/// The largest α power complete in a product of two families truncated at
/// index `order` (both kinds give `2·order + 1`).
fn complete_alpha(order: usize) -> u32 {
    2 * order as u32 + 1
}

/// Exact product density, truncated at the highest α power complete in both
/// factors.
pub fn product_density(
    first: &SolutionFamily,
    second: &SolutionFamily,
    which: ProductKind,
) -> Result<ProductSeries> {
    let order = first.order.min(second.order);
    product_density_to(first, second, which, order)
}

/// As [`product_density`] but keeping brackets up to `α^{2·bracket_order}`
/// of the normalized product; errors if the families are too short.
pub fn product_density_to(
    first: &SolutionFamily,
    second: &SolutionFamily,
    which: ProductKind,
    bracket_order: usize,
) -> Result<ProductSeries> {
    if first.kind != FamilyKind::First {
        return Err(Error::WrongFamily {
            expected: "first",
            got: first.kind.name(),
        });
    }
    if second.kind != FamilyKind::Second {
        return Err(Error::WrongFamily {
            expected: "second",
            got: second.kind.name(),
        });
    }
    let available = first.order.min(second.order);
    if bracket_order > available {
        return Err(Error::OrderMismatch {
            requested: 2 * bracket_order as u32,
            available: 2 * available as u32,
        });
    }
    let complete = complete_alpha(bracket_order);
    // Only iterates that can contribute below the cut are multiplied.
    let keep = |parts: &[LogPolySeries]| -> LogPolySeries {
        parts
            .iter()
            .take(bracket_order + 1)
            .map(|p| p.truncate_alpha(complete))
            .sum()
    };
    let product = match which {
        ProductKind::GG => &keep(&first.g_parts) * &keep(&second.g_parts),
        ProductKind::FF => &keep(&first.f_parts) * &keep(&second.f_parts),
    };
    Ok(ProductSeries {
        kind: which,
        series: product.truncate_alpha(complete).shift_s(2),
        complete_through: complete,
        discarded_from: complete + 2,
    })
}

/// Both families to `order` and their product of the given kind, memoized
/// per `(kind, order)` for the lifetime of the process.
pub fn cached_product(kind: ProductKind, order: usize) -> Arc<ProductSeries> {
    type Cache = Mutex<HashMap<(ProductKind, usize), Arc<ProductSeries>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache poisoned").get(&(kind, order)) {
        return hit.clone();
    }
    let first = generate_family(FamilyKind::First, order);
    let second = generate_family(FamilyKind::Second, order);
    let product = Arc::new(
        product_density(&first, &second, kind).expect("families are generated with matching kinds"),
    );
    cache
        .lock()
        .expect("cache poisoned")
        .insert((kind, order), product.clone());
    product
}

/// Which closed-form exterior solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExternalBranch {
    /// `G = exp(−β/s)`, `F = 0`.
    GfBranch,
    /// `f = s⁻² exp(−β/s)`, `g = 0`.
    FgBranch,
}

/// Value of a radial pair at one radius. For the first solution `upper`
/// is `F` and `lower` is `G`; for the second, `f` and `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialValues {
    pub upper: f64,
    pub lower: f64,
}

/// Exterior solution, valid for `s ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExternalSolution {
    pub beta: f64,
    pub branch: ExternalBranch,
}

impl ExternalSolution {
    pub fn eval(&self, s: f64) -> Result<RadialValues> {
        if !(s >= 1.0) {
            return Err(Error::Domain(format!(
                "exterior solution evaluated at s = {s}; need s ≥ 1"
            )));
        }
        let damp = (-self.beta / s).exp();
        Ok(match self.branch {
            ExternalBranch::GfBranch => RadialValues {
                upper: 0.0,
                lower: damp,
            },
            ExternalBranch::FgBranch => RadialValues {
                upper: damp / (s * s),
                lower: 0.0,
            },
        })
    }
}

/// Both exterior branches for a given `β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExternalPair {
    pub first: ExternalSolution,
    pub second: ExternalSolution,
}

impl ExternalPair {
    /// `G·g + F·f` outside the matching radius.
    pub fn product(&self, s: f64) -> Result<f64> {
        let a = self.first.eval(s)?;
        let b = self.second.eval(s)?;
        Ok(a.lower * b.lower + a.upper * b.upper)
    }
}

pub fn external_solution(beta: f64) -> Result<ExternalPair> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β = {beta}; need β > 0")));
    }
    Ok(ExternalPair {
        first: ExternalSolution {
            beta,
            branch: ExternalBranch::GfBranch,
        },
        second: ExternalSolution {
            beta,
            branch: ExternalBranch::FgBranch,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn t(n: i64, d: i64, a: u32, p: i32, q: u32) -> LogPolySeries {
        LogPolySeries::term(n, d, a, p, q)
    }

    #[test]
    fn f_step_of_one() {
        let expect = t(1, 6, 1, -2, 0) + t(-1, 2, 1, 0, 0) + t(1, 3, 1, 1, 0);
        assert_eq!(f_step(&LogPolySeries::one()), expect);
        assert!(f_step(&LogPolySeries::zero()).is_zero());
    }

    #[test]
    fn g_step_of_inverse_square() {
        // −(α/2)(1 − s)² s⁻²
        let expect = t(-1, 2, 1, -2, 0) + t(1, 1, 1, -1, 0) + t(-1, 2, 1, 0, 0);
        assert_eq!(g_step(&LogPolySeries::s_pow(-2)), expect);
    }

    #[test]
    fn order_zero_family() {
        let fam = generate_family(FamilyKind::First, 0);
        assert_eq!(fam.g_parts, vec![LogPolySeries::one()]);
        assert_eq!(fam.f_parts.len(), 1);
        let fam = generate_family(FamilyKind::Second, 0);
        assert_eq!(fam.f_parts, vec![LogPolySeries::s_pow(-2)]);
    }

    #[test]
    fn alpha_exponents_follow_the_index() {
        let first = generate_family(FamilyKind::First, 3);
        for (k, (f, g)) in first.f_parts.iter().zip(&first.g_parts).enumerate() {
            assert_eq!(f.alpha_pows(), vec![2 * k as u32 + 1]);
            assert_eq!(g.alpha_pows(), vec![2 * k as u32]);
        }
        let second = generate_family(FamilyKind::Second, 3);
        for (k, (f, g)) in second.f_parts.iter().zip(&second.g_parts).enumerate() {
            assert_eq!(f.alpha_pows(), vec![2 * k as u32]);
            assert_eq!(g.alpha_pows(), vec![2 * k as u32 + 1]);
        }
    }

    #[test]
    fn iterates_vanish_with_first_derivative_at_one() {
        let first = generate_family(FamilyKind::First, 3);
        for (k, f) in first.f_parts.iter().enumerate() {
            assert!(f.eval_at_one().is_zero(), "F{k}(1)");
        }
        for g in first.g_parts.iter().skip(1) {
            assert!(g.eval_at_one().is_zero());
            assert!(g.differentiate().eval_at_one().is_zero());
        }
        let second = generate_family(FamilyKind::Second, 3);
        for f in second.f_parts.iter().skip(1) {
            assert!(f.eval_at_one().is_zero());
            assert!(f.differentiate().eval_at_one().is_zero());
        }
        for g in &second.g_parts {
            assert!(g.eval_at_one().is_zero());
            assert!(g.differentiate().eval_at_one().is_zero());
        }
    }

    #[test]
    fn truncation_residual_lies_beyond_retained_order() {
        for order in 0..=3 {
            for kind in [FamilyKind::First, FamilyKind::Second] {
                let fam = generate_family(kind, order);
                let (ra, rb) = fam.residuals();
                let retained = fam
                    .f_sum()
                    .max_alpha_pow()
                    .max(fam.g_sum().max_alpha_pow())
                    .unwrap();
                for r in [ra, rb] {
                    if let Some(min) = r.min_alpha_pow() {
                        assert!(min > retained, "{kind} order {order}: {min} ≤ {retained}");
                    }
                }
            }
        }
    }

    #[test]
    fn leading_products() {
        let first = generate_family(FamilyKind::First, 1);
        let second = generate_family(FamilyKind::Second, 1);
        let gg = product_density(&first, &second, ProductKind::GG).unwrap();
        // −(1 − s)²
        assert_eq!(gg.bracket(0), t(-1, 1, 0, 0, 0) + t(2, 1, 0, 1, 0) + t(-1, 1, 0, 2, 0));
        let ff = product_density(&first, &second, ProductKind::FF).unwrap();
        assert_eq!(ff.bracket(0), t(1, 1, 0, -2, 0) + t(-3, 1, 0, 0, 0) + t(2, 1, 0, 1, 0));
        assert_eq!(gg.complete_through, 3);
        assert_eq!(gg.discarded_from, 5);
        // G̃₀·g̃₀ is the whole α¹ part of G̃g̃
        let g0g0 = &first.g_parts[0] * &second.g_parts[0];
        assert_eq!(gg.series.alpha_part(1), g0g0.shift_s(2));
    }

    #[test]
    fn product_order_errors() {
        let first = generate_family(FamilyKind::First, 1);
        let second = generate_family(FamilyKind::Second, 2);
        assert_eq!(
            product_density_to(&first, &second, ProductKind::GG, 2),
            Err(Error::OrderMismatch {
                requested: 4,
                available: 2
            })
        );
        assert!(matches!(
            product_density(&second, &first, ProductKind::GG),
            Err(Error::WrongFamily { .. })
        ));
    }

    #[test]
    fn products_vanish_at_one() {
        let first = generate_family(FamilyKind::First, 2);
        let second = generate_family(FamilyKind::Second, 2);
        for which in [ProductKind::GG, ProductKind::FF] {
            let p = product_density(&first, &second, which).unwrap();
            if which == ProductKind::GG {
                assert!(p.series.eval_at_one().is_zero());
            } else {
                // F̃f̃(1) = 0 since every F̃ₖ vanishes there
                assert!(p.series.eval_at_one().is_zero());
            }
            assert_ne!(p.normalized().coeff(crate::algebra::Monomial::ONE), rat(0, 1));
        }
    }

    #[test]
    fn exterior_branches() {
        let pair = external_solution(0.25).unwrap();
        assert_eq!(pair.first.eval(1.0).unwrap().lower, (-0.25f64).exp());
        for s in [1.0, 1.5, 3.0, 40.0] {
            assert_eq!(pair.first.eval(s).unwrap().upper, 0.0);
            assert_eq!(pair.second.eval(s).unwrap().lower, 0.0);
            assert_eq!(pair.product(s).unwrap(), 0.0);
        }
        assert!(pair.first.eval(0.9).is_err());
        assert!(external_solution(0.0).is_err());
    }
}
