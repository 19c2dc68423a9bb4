//! Exact log-polynomial series.
//!
//! A [`LogPolySeries`] is a finite sum of terms `c · α^a · s^p · (ln s)^q`
//! with `c` an arbitrary-precision rational, `a, q ≥ 0` and `p` any integer.
//! The set is closed under addition, multiplication, differentiation and
//! antidifferentiation in `s`, which is all the radial recursion needs.
//!
//! The coupling `α` is never substituted symbolically: it is carried as a
//! tracked exponent so one generated series serves every numeric `α`.
//!
//! Terms are stored keyed by [`Monomial`] whose ordering is
//! `(alpha_pow, s_pow, log_pow)` lexicographic. That ordering fixes both
//! the JSON serialization and the numeric summation order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::summation::neumaier_sum;

/// Exponent triple of a single term: `α^alpha_pow · s^s_pow · (ln s)^log_pow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub alpha_pow: u32,
    pub s_pow: i32,
    pub log_pow: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        alpha_pow: 0,
        s_pow: 0,
        log_pow: 0,
    };

    pub fn new(alpha_pow: u32, s_pow: i32, log_pow: u32) -> Self {
        Monomial {
            alpha_pow,
            s_pow,
            log_pow,
        }
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial {
            alpha_pow: self.alpha_pow + rhs.alpha_pow,
            s_pow: self.s_pow + rhs.s_pow,
            log_pow: self.log_pow + rhs.log_pow,
        }
    }
}

/// One stored term of a series. The coefficient is never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub alpha_pow: u32,
    pub s_pow: i32,
    pub log_pow: u32,
}

impl Term {
    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.alpha_pow, self.s_pow, self.log_pow)
    }
}

/// Shorthand for a small rational `num/den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Normalized finite sum of [`Term`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogPolySeries {
    terms: BTreeMap<Monomial, BigRational>,
}

impl LogPolySeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), Monomial::ONE)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    pub fn monomial(coeff: BigRational, m: Monomial) -> Self {
        let mut out = Self::zero();
        out.accumulate(m, coeff);
        out
    }

    /// `(num/den) · α^alpha_pow · s^s_pow · (ln s)^log_pow`.
    pub fn term(num: i64, den: i64, alpha_pow: u32, s_pow: i32, log_pow: u32) -> Self {
        Self::monomial(rat(num, den), Monomial::new(alpha_pow, s_pow, log_pow))
    }

    /// `s^k`
    pub fn s_pow(k: i32) -> Self {
        Self::term(1, 1, 0, k, 0)
    }

    /// `α^k`
    pub fn alpha_pow(k: u32) -> Self {
        Self::term(1, 1, k, 0, 0)
    }

    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut out = Self::zero();
        for t in terms {
            out.accumulate(t.monomial(), t.coeff);
        }
        out
    }

    fn accumulate(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in normalization-key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(m, c)| Term {
            coeff: c.clone(),
            alpha_pow: m.alpha_pow,
            s_pow: m.s_pow,
            log_pow: m.log_pow,
        })
    }

    pub fn coeff(&self, m: Monomial) -> BigRational {
        self.terms.get(&m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LogPolySeries {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiply by `α^delta`; `None` if a negative shift would leave a
    /// negative α exponent.
    pub fn shift_alpha(&self, delta: i32) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let a = i64::from(m.alpha_pow) + i64::from(delta);
            let a = u32::try_from(a).ok()?;
            terms.insert(Monomial::new(a, m.s_pow, m.log_pow), c.clone());
        }
        Some(LogPolySeries { terms })
    }

    /// Multiply by `s^delta`.
    pub fn shift_s(&self, delta: i32) -> Self {
        LogPolySeries {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.alpha_pow, m.s_pow + delta, m.log_pow), c.clone()))
                .collect(),
        }
    }

    /// Terms whose α exponent equals `k`.
    pub fn alpha_part(&self, k: u32) -> Self {
        LogPolySeries {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.alpha_pow == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Drop every term with α exponent above `max`.
    pub fn truncate_alpha(&self, max: u32) -> Self {
        LogPolySeries {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.alpha_pow <= max)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn min_alpha_pow(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.alpha_pow).min()
    }

    pub fn max_alpha_pow(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.alpha_pow).max()
    }

    pub fn max_log_pow(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.log_pow).max()
    }

    /// Distinct α exponents present, ascending.
    pub fn alpha_pows(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().map(|m| m.alpha_pow).collect();
        v.dedup();
        v
    }

    /// `d/ds` term by term:
    /// `d/ds[c s^p ln^q s] = c p s^{p−1} ln^q s + c q s^{p−1} ln^{q−1} s`.
    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.s_pow != 0 {
                out.accumulate(
                    Monomial::new(m.alpha_pow, m.s_pow - 1, m.log_pow),
                    c * BigInt::from(m.s_pow),
                );
            }
            if m.log_pow != 0 {
                out.accumulate(
                    Monomial::new(m.alpha_pow, m.s_pow - 1, m.log_pow - 1),
                    c * BigInt::from(m.log_pow),
                );
            }
        }
        out
    }

    /// Antiderivative in `s` with no integration constant.
    ///
    /// For `p ≠ −1` integration by parts unrolls to
    /// `∫ s^p ln^q s = s^{p+1} Σ_k (−1)^k q!/(q−k)! ln^{q−k} s / (p+1)^{k+1}`;
    /// for `p = −1`, `∫ s^{−1} ln^q s = ln^{q+1} s / (q+1)`.
    pub fn antiderivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.s_pow == -1 {
                out.accumulate(
                    Monomial::new(m.alpha_pow, 0, m.log_pow + 1),
                    c / BigInt::from(m.log_pow + 1),
                );
                continue;
            }
            let p1 = BigInt::from(m.s_pow + 1);
            // running factor (−1)^k q!/(q−k)! / (p+1)^{k+1}
            let mut factor = BigRational::new(BigInt::one(), p1.clone());
            for k in 0..=m.log_pow {
                out.accumulate(
                    Monomial::new(m.alpha_pow, m.s_pow + 1, m.log_pow - k),
                    c * &factor,
                );
                factor = -factor * BigInt::from(m.log_pow - k) / p1.clone();
            }
        }
        out
    }

    /// Set `s = 1`: every `ln s` term vanishes and every power of `s` is 1.
    /// The result depends on α only.
    pub fn eval_at_one(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.log_pow == 0 {
                out.accumulate(Monomial::new(m.alpha_pow, 0, 0), c.clone());
            }
        }
        out
    }

    /// Floating-point value at `s`, with `α` substituted. Summation is
    /// compensated and follows the normalization-key order.
    pub fn eval_numeric(&self, s: f64, alpha: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("series evaluated at s = {s}; need s > 0")));
        }
        let ln = s.ln();
        Ok(neumaier_sum(self.terms.iter().map(|(m, c)| {
            rational_to_f64(c)
                * powu(alpha, m.alpha_pow)
                * s.powi(m.s_pow)
                * powu(ln, m.log_pow)
        })))
    }

    /// Value of the series as a polynomial in α once `s = 1`; convenience
    /// for checks that compare exact rationals.
    pub fn constant_term(&self) -> BigRational {
        self.coeff(Monomial::ONE)
    }
}

fn powu(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for &LogPolySeries {
    type Output = LogPolySeries;

    fn add(self, rhs: &LogPolySeries) -> LogPolySeries {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(*m, c.clone());
        }
        out
    }
}

impl Add for LogPolySeries {
    type Output = LogPolySeries;

    fn add(mut self, rhs: LogPolySeries) -> LogPolySeries {
        for (m, c) in rhs.terms {
            self.accumulate(m, c);
        }
        self
    }
}

impl AddAssign<&LogPolySeries> for LogPolySeries {
    fn add_assign(&mut self, rhs: &LogPolySeries) {
        for (m, c) in &rhs.terms {
            self.accumulate(*m, c.clone());
        }
    }
}

impl Neg for &LogPolySeries {
    type Output = LogPolySeries;

    fn neg(self) -> LogPolySeries {
        LogPolySeries {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for LogPolySeries {
    type Output = LogPolySeries;

    fn neg(self) -> LogPolySeries {
        -&self
    }
}

impl Sub for &LogPolySeries {
    type Output = LogPolySeries;

    fn sub(self, rhs: &LogPolySeries) -> LogPolySeries {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(*m, -c);
        }
        out
    }
}

impl Sub for LogPolySeries {
    type Output = LogPolySeries;

    fn sub(self, rhs: LogPolySeries) -> LogPolySeries {
        &self - &rhs
    }
}

impl Mul for &LogPolySeries {
    type Output = LogPolySeries;

    fn mul(self, rhs: &LogPolySeries) -> LogPolySeries {
        let mut out = LogPolySeries::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.accumulate(*ma * *mb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LogPolySeries {
    type Output = LogPolySeries;

    fn mul(self, rhs: LogPolySeries) -> LogPolySeries {
        &self * &rhs
    }
}

impl std::iter::Sum for LogPolySeries {
    fn sum<I: Iterator<Item = LogPolySeries>>(iter: I) -> Self {
        iter.fold(LogPolySeries::zero(), Add::add)
    }
}

impl<'a> std::iter::Sum<&'a LogPolySeries> for LogPolySeries {
    fn sum<I: Iterator<Item = &'a LogPolySeries>>(iter: I) -> Self {
        let mut out = LogPolySeries::zero();
        for s in iter {
            out += s;
        }
        out
    }
}

// ---------------------------------------------------------------------------
// JSON form: an array of {num, den, alpha_pow, s_pow, log_pow}, sorted by the
// normalization key. Integers that overflow i64 are written as strings.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(n.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => s
                .parse()
                .map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    num: IntRepr,
    den: IntRepr,
    alpha_pow: u32,
    s_pow: i32,
    log_pow: u32,
}

impl Serialize for LogPolySeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(m, c)| TermRecord {
                num: IntRepr::from_big(c.numer()),
                den: IntRepr::from_big(c.denom()),
                alpha_pow: m.alpha_pow,
                s_pow: m.s_pow,
                log_pow: m.log_pow,
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LogPolySeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        let mut out = LogPolySeries::zero();
        for r in records {
            let num = r.num.to_big().map_err(D::Error::custom)?;
            let den = r.den.to_big().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out.accumulate(
                Monomial::new(r.alpha_pow, r.s_pow, r.log_pow),
                BigRational::new(num, den),
            );
        }
        Ok(out)
    }
}

impl LogPolySeries {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serialization is infallible")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("malformed series JSON: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Human-readable form, e.g. `−(α²/12)(s⁻² − 2s⁻¹ + 9 + 6 ln s − 10s + 2s²)`.
// Each α-power group is written as a rational prefactor times a bracket with
// coprime integer coefficients whose first entry is positive.

pub(crate) fn superscript(n: i64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let mut out = String::new();
    if n < 0 {
        out.push('⁻');
    }
    for ch in n.unsigned_abs().to_string().chars() {
        out.push(DIGITS[ch as usize - '0' as usize]);
    }
    out
}

fn monomial_body(s_pow: i32, log_pow: u32) -> String {
    let s_part = match s_pow {
        0 => String::new(),
        1 => "s".to_string(),
        p => format!("s{}", superscript(i64::from(p))),
    };
    let log_part = match log_pow {
        0 => String::new(),
        1 => "ln s".to_string(),
        q => format!("(ln s){}", superscript(i64::from(q))),
    };
    match (s_part.is_empty(), log_part.is_empty()) {
        (true, true) => String::new(),
        (false, true) => s_part,
        (true, false) => log_part,
        (false, false) => format!("{s_part} {log_part}"),
    }
}

fn signed_integer_term(k: &BigInt, s_pow: i32, log_pow: u32, first: bool) -> String {
    let body = monomial_body(s_pow, log_pow);
    let mag = k.abs();
    let coeff = if body.is_empty() {
        mag.to_string()
    } else if mag.is_one() {
        String::new()
    } else if body.starts_with('(') || body.starts_with('l') {
        format!("{mag} ")
    } else {
        mag.to_string()
    };
    let sign = match (k.is_negative(), first) {
        (true, true) => "−",
        (false, true) => "",
        (true, false) => " − ",
        (false, false) => " + ",
    };
    format!("{sign}{coeff}{body}")
}

fn prefactor(alpha_pow: u32, factor: &BigRational) -> String {
    let alpha = match alpha_pow {
        0 => String::new(),
        1 => "α".to_string(),
        a => format!("α{}", superscript(i64::from(a))),
    };
    let num = factor.numer().abs();
    let den = factor.denom();
    let num_s = if num.is_one() && !alpha.is_empty() {
        String::new()
    } else {
        num.to_string()
    };
    if den.is_one() {
        format!("{num_s}{alpha}")
    } else {
        format!("{num_s}{alpha}/{den}")
    }
}

impl fmt::Display for LogPolySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first_group = true;
        for a in self.alpha_pows() {
            let group = self.alpha_part(a);
            let lcm_den = group
                .terms
                .values()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let gcd_num = group
                .terms
                .values()
                .fold(BigInt::zero(), |acc, c| acc.gcd(&(c * &lcm_den).to_integer()));
            let lead_negative = group.terms.values().next().is_some_and(|c| c.is_negative());
            let mut factor = BigRational::new(gcd_num, lcm_den);
            if lead_negative {
                factor = -factor;
            }
            let sign = match (factor.is_negative(), first_group) {
                (true, true) => "−",
                (false, true) => "",
                (true, false) => " − ",
                (false, false) => " + ",
            };
            f.write_str(sign)?;
            let pre = prefactor(a, &factor);
            if group.len() == 1 {
                let (m, _) = group.terms.iter().next().expect("non-empty group");
                let body = monomial_body(m.s_pow, m.log_pow);
                match (pre == "1", body.is_empty()) {
                    (true, true) => f.write_str("1")?,
                    (true, false) => f.write_str(&body)?,
                    (false, true) => write!(f, "{pre}")?,
                    (false, false) => write!(f, "({pre}){body}")?,
                }
            } else {
                if pre != "1" {
                    write!(f, "({pre})")?;
                }
                f.write_str("(")?;
                for (i, (m, c)) in group.terms.iter().enumerate() {
                    let k = (c / &factor).to_integer();
                    f.write_str(&signed_integer_term(&k, m.s_pow, m.log_pow, i == 0))?;
                }
                f.write_str(")")?;
            }
            first_group = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: i32) -> LogPolySeries {
        LogPolySeries::s_pow(k)
    }

    fn ln() -> LogPolySeries {
        LogPolySeries::term(1, 1, 0, 0, 1)
    }

    #[test]
    fn addition_cancels_and_combines() {
        assert!((&s(-1) + &(-&s(-1))).is_zero());
        let two_s = LogPolySeries::term(2, 1, 0, 1, 0);
        let three_s = LogPolySeries::term(3, 1, 0, 1, 0);
        assert_eq!(&two_s + &three_s, LogPolySeries::term(5, 1, 0, 1, 0));
    }

    #[test]
    fn multiplication_adds_exponents() {
        let a = s(-1);
        let b = LogPolySeries::term(1, 1, 0, -1, 1);
        assert_eq!(&a * &b, LogPolySeries::term(1, 1, 0, -2, 1));
        let x = &(&s(2) + &ln()) + &LogPolySeries::term(-3, 7, 2, -1, 0);
        assert_eq!(&LogPolySeries::one() * &x, x);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(ln().differentiate(), s(-1));
        let s2ln = LogPolySeries::term(1, 1, 0, 2, 1);
        let expect = &LogPolySeries::term(2, 1, 0, 1, 1) + &s(1);
        assert_eq!(s2ln.differentiate(), expect);
        assert!(LogPolySeries::one().differentiate().is_zero());
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(s(-1).antiderivative(), ln());
        let s_m2_ln = LogPolySeries::term(1, 1, 0, -2, 1);
        let expect = &LogPolySeries::term(-1, 1, 0, -1, 1) + &LogPolySeries::term(-1, 1, 0, -1, 0);
        assert_eq!(s_m2_ln.antiderivative(), expect);
        // ∫(α s² − α s) ds = α s³/3 − α s²/2
        let integrand = &LogPolySeries::term(1, 1, 1, 2, 0) - &LogPolySeries::term(1, 1, 1, 1, 0);
        let expect = &LogPolySeries::term(1, 3, 1, 3, 0) - &LogPolySeries::term(1, 2, 1, 2, 0);
        assert_eq!(integrand.antiderivative(), expect);
    }

    #[test]
    fn eval_at_one_drops_logs() {
        let x = &(&s(-2) - &LogPolySeries::term(2, 1, 0, -1, 0)) + &LogPolySeries::one();
        assert!(x.eval_at_one().is_zero());
        let y = &LogPolySeries::term(5, 2, 3, 4, 1) + &LogPolySeries::term(1, 3, 3, -7, 0);
        assert_eq!(y.eval_at_one(), LogPolySeries::term(1, 3, 3, 0, 0));
    }

    #[test]
    fn numeric_evaluation() {
        assert_eq!(LogPolySeries::one().eval_numeric(0.5, 0.0073).unwrap(), 1.0);
        // g̃₀ = −(α/2)(s⁻² − 2s⁻¹ + 1) at s = 1/2: −(α/2)(4 − 4 + 1)
        let g0 = LogPolySeries::term(-1, 2, 1, -2, 0)
            + LogPolySeries::term(1, 1, 1, -1, 0)
            + LogPolySeries::term(-1, 2, 1, 0, 0);
        let v = g0.eval_numeric(0.5, 0.0073).unwrap();
        assert!((v - (-0.0073 / 2.0)).abs() < 1e-18);
        assert!(matches!(g0.eval_numeric(0.0, 0.1), Err(Error::Domain(_))));
        assert!(matches!(g0.eval_numeric(-1.0, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn text_form_matches_conventional_notation() {
        let bracket = [(1, -2, 0), (-2, -1, 0), (6, 0, 1), (9, 0, 0), (-10, 1, 0), (2, 2, 0)];
        let g1: LogPolySeries = bracket
            .iter()
            .map(|&(c, p, q)| LogPolySeries::term(-c, 12, 2, p, q))
            .sum();
        assert_eq!(g1.to_string(), "−(α²/12)(s⁻² − 2s⁻¹ + 9 + 6 ln s − 10s + 2s²)");
        assert_eq!(LogPolySeries::one().to_string(), "1");
        assert_eq!(s(-2).to_string(), "s⁻²");
        assert_eq!(LogPolySeries::zero().to_string(), "0");
        let mixed = &LogPolySeries::one() + &LogPolySeries::term(-1, 2, 1, -2, 2);
        assert_eq!(mixed.to_string(), "1 − (α/2)s⁻² (ln s)²");
    }

    #[test]
    fn json_is_sorted_by_key() {
        let x = &LogPolySeries::term(3, 4, 2, 1, 0) + &LogPolySeries::term(-1, 6, 1, -2, 1);
        let v = x.to_json();
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"[{"num":-1,"den":6,"alpha_pow":1,"s_pow":-2,"log_pow":1},{"num":3,"den":4,"alpha_pow":2,"s_pow":1,"log_pow":0}]"#
        );
        assert_eq!(LogPolySeries::from_json(&v).unwrap(), x);
    }

    #[test]
    fn json_accepts_big_integers_as_strings() {
        let v: serde_json::Value = serde_json::from_str(
            r#"[{"num":"123456789012345678901234567891","den":7,"alpha_pow":0,"s_pow":0,"log_pow":0}]"#,
        )
        .unwrap();
        let x = LogPolySeries::from_json(&v).unwrap();
        assert_eq!(x.to_json(), v);
        let bad: serde_json::Value =
            serde_json::from_str(r#"[{"num":1,"den":0,"alpha_pow":0,"s_pow":0,"log_pow":0}]"#).unwrap();
        assert!(LogPolySeries::from_json(&bad).is_err());
    }
}
