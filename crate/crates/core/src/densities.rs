//! Bispinor bilinear densities of the two j-shell solutions.
//!
//! Component coefficients are kept exact as a unit phase times the square
//! root of a rational, so sphere-integrated densities come out as exact
//! fractions. Gamma matrices are the explicit 4×4 forms with entries in
//! `{0, ±1, ±i}`, held as `Complex<i32>`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::LogPolySeries;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::series::{RadialValues, SolutionFamily};

type CMat = [[Complex<i32>; 4]; 4];

const O: Complex<i32> = Complex::new(0, 0);
const P: Complex<i32> = Complex::new(1, 0);
const N: Complex<i32> = Complex::new(-1, 0);
const I: Complex<i32> = Complex::new(0, 1);
const NI: Complex<i32> = Complex::new(0, -1);

const GAMMA_T: CMat = [[P, O, O, O], [O, P, O, O], [O, O, P, O], [O, O, O, P]];
const GAMMA_X: CMat = [[O, O, O, P], [O, O, P, O], [O, P, O, O], [P, O, O, O]];
const GAMMA_Y: CMat = [[O, O, O, NI], [O, O, I, O], [O, NI, O, O], [I, O, O, O]];
const GAMMA_Z: CMat = [[O, O, P, O], [O, O, O, N], [P, O, O, O], [O, N, O, O]];
const GAMMA_5: CMat = [[P, O, O, O], [O, P, O, O], [O, O, N, O], [O, O, O, N]];

/// Non-zero entries `(value, row, column)` of a 4×4 matrix, 1-based.
pub type Pattern = Vec<(Complex<i32>, usize, usize)>;

/// `γ₁ … γ₅` with `γ₁ = γ_t`, `γ₂ = γ_x`, `γ₃ = γ_y`, `γ₄ = γ_z`.
pub fn gamma(index: usize) -> Result<[[Complex<i32>; 4]; 4]> {
    match index {
        1 => Ok(GAMMA_T),
        2 => Ok(GAMMA_X),
        3 => Ok(GAMMA_Y),
        4 => Ok(GAMMA_Z),
        5 => Ok(GAMMA_5),
        _ => Err(Error::Domain(format!("no gamma matrix with index {index}"))),
    }
}

fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let mut out = [[O; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

/// The sixteen bilinear operators, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Operator {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
    Gamma234,
    IGamma34,
    IGamma42,
    IGamma23,
    Gamma5,
    Gamma2345,
    IGamma345,
    IGamma425,
    IGamma235,
    IGamma25,
    IGamma35,
    IGamma45,
}

impl Operator {
    pub const ALL: [Operator; 16] = [
        Operator::Gamma1,
        Operator::Gamma2,
        Operator::Gamma3,
        Operator::Gamma4,
        Operator::Gamma234,
        Operator::IGamma34,
        Operator::IGamma42,
        Operator::IGamma23,
        Operator::Gamma5,
        Operator::Gamma2345,
        Operator::IGamma345,
        Operator::IGamma425,
        Operator::IGamma235,
        Operator::IGamma25,
        Operator::IGamma35,
        Operator::IGamma45,
    ];

    /// 1-based row number.
    pub fn id(self) -> usize {
        Operator::ALL.iter().position(|&o| o == self).expect("listed") + 1
    }

    pub fn from_id(id: usize) -> Result<Operator> {
        id.checked_sub(1)
            .and_then(|i| Operator::ALL.get(i).copied())
            .ok_or_else(|| Error::Domain(format!("operator id must be 1..=16, got {id}")))
    }

    /// Leading `i` and gamma indices of the product.
    fn factors(self) -> (bool, &'static [usize]) {
        use Operator::*;
        match self {
            Gamma1 => (false, &[1]),
            Gamma2 => (false, &[2]),
            Gamma3 => (false, &[3]),
            Gamma4 => (false, &[4]),
            Gamma234 => (false, &[2, 3, 4]),
            IGamma34 => (true, &[3, 4]),
            IGamma42 => (true, &[4, 2]),
            IGamma23 => (true, &[2, 3]),
            Gamma5 => (false, &[5]),
            Gamma2345 => (false, &[2, 3, 4, 5]),
            IGamma345 => (true, &[3, 4, 5]),
            IGamma425 => (true, &[4, 2, 5]),
            IGamma235 => (true, &[2, 3, 5]),
            IGamma25 => (true, &[2, 5]),
            IGamma35 => (true, &[3, 5]),
            IGamma45 => (true, &[4, 5]),
        }
    }

    pub fn label(self) -> String {
        let (imag, idx) = self.factors();
        let digits: String = idx
            .iter()
            .map(|&i| format!("γ{}", char::from_u32(0x2080 + i as u32).expect("subscript digit")))
            .collect();
        if imag {
            format!("i{digits}")
        } else {
            digits
        }
    }

    /// Physical name for the four rows that survive volume integration.
    pub fn quantity(self) -> Option<&'static str> {
        match self {
            Operator::Gamma1 => Some("E"),
            Operator::IGamma23 => Some("S_z"),
            Operator::Gamma5 => Some("e"),
            Operator::IGamma235 => Some("M_z"),
            _ => None,
        }
    }

    pub fn involves_gamma5(self) -> bool {
        self.factors().1.contains(&5)
    }

    pub fn matrix(self) -> CMat {
        let (imag, idx) = self.factors();
        let mut m = GAMMA_T;
        for &i in idx {
            m = mat_mul(&m, &gamma(i).expect("valid index"));
        }
        if imag {
            for row in m.iter_mut() {
                for cell in row.iter_mut() {
                    *cell *= I;
                }
            }
        }
        m
    }

    /// Nonzero entries as `(coefficient, row, column)`, 1-based; the pair
    /// `(a, b)` stands for `ψ_a* ψ_b`.
    pub fn pattern(self) -> Pattern {
        let m = self.matrix();
        let mut out = Vec::new();
        for (r, row) in m.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != O {
                    out.push((v, r + 1, c + 1));
                }
            }
        }
        out
    }

    /// The reference listing of each density in `a·b` notation.
    pub fn reference_pattern(self) -> Pattern {
        use Operator::*;
        let (factor, pairs): (Complex<i32>, &[(i32, usize, usize)]) = match self {
            Gamma1 => (P, &[(1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4)]),
            Gamma2 => (P, &[(1, 1, 4), (1, 2, 3), (1, 3, 2), (1, 4, 1)]),
            Gamma3 => (I, &[(-1, 1, 4), (1, 2, 3), (-1, 3, 2), (1, 4, 1)]),
            Gamma4 => (P, &[(1, 1, 3), (-1, 2, 4), (1, 3, 1), (-1, 4, 2)]),
            Gamma234 => (I, &[(1, 1, 3), (1, 2, 4), (1, 3, 1), (1, 4, 2)]),
            IGamma34 => (P, &[(-1, 1, 2), (-1, 2, 1), (-1, 3, 4), (-1, 4, 3)]),
            IGamma42 => (I, &[(1, 1, 2), (-1, 2, 1), (1, 3, 4), (-1, 4, 3)]),
            IGamma23 => (P, &[(-1, 1, 1), (1, 2, 2), (-1, 3, 3), (1, 4, 4)]),
            Gamma5 => (P, &[(1, 1, 1), (1, 2, 2), (-1, 3, 3), (-1, 4, 4)]),
            Gamma2345 => (I, &[(-1, 1, 3), (-1, 2, 4), (1, 3, 4), (1, 4, 2)]),
            IGamma345 => (P, &[(-1, 1, 2), (-1, 2, 1), (1, 3, 4), (1, 4, 3)]),
            IGamma425 => (I, &[(1, 1, 2), (-1, 2, 1), (-1, 3, 4), (1, 4, 3)]),
            IGamma235 => (P, &[(-1, 1, 1), (1, 2, 2), (1, 3, 3), (-1, 4, 4)]),
            IGamma25 => (I, &[(-1, 1, 4), (-1, 2, 3), (1, 3, 2), (1, 4, 1)]),
            IGamma35 => (P, &[(-1, 1, 4), (1, 2, 3), (1, 3, 2), (-1, 4, 1)]),
            IGamma45 => (I, &[(-1, 1, 3), (1, 2, 4), (1, 3, 1), (-1, 4, 2)]),
        };
        let mut out: Vec<_> = pairs
            .iter()
            .map(|&(c, a, b)| (factor * Complex::new(c, 0), a, b))
            .collect();
        out.sort_by_key(|&(_, a, b)| (a, b));
        out
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Compare every computed operator pattern with the reference listing.
pub fn reference_mismatches() -> Vec<(Operator, Pattern)> {
    Operator::ALL
        .iter()
        .filter(|op| op.pattern() != op.reference_pattern())
        .map(|&op| (op, op.reference_pattern()))
        .collect()
}

/// Render a pattern as `i(−1·3−2·4+3·1+4·2)`.
pub fn format_pattern(pattern: &[(Complex<i32>, usize, usize)]) -> String {
    let imag = pattern.iter().all(|(c, _, _)| c.re == 0);
    let mut body = String::new();
    for (k, &(c, a, b)) in pattern.iter().enumerate() {
        let v = if imag { c.im } else { c.re };
        if v < 0 {
            body.push('−');
        } else if k > 0 {
            body.push('+');
        }
        body.push_str(&format!("{a}·{b}"));
    }
    if imag {
        format!("i({body})")
    } else {
        body
    }
}

/// `Y_l^m(θ, φ)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let am = m.unsigned_abs();
    let x = theta.cos();
    let plm = assoc_legendre(l, am, x);
    // (l−m)!/(l+m)!
    let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| 1.0 / k as f64).product();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    let y = Complex64::from_polar(norm * plm, am as f64 * phi);
    if m >= 0 {
        Ok(y)
    } else {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        Ok(y.conj() * sign)
    }
}

/// `P_l^m(x)` including the `(−1)^m` factor, `m ≥ 0`.
fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = ((2 * ll - 1) as f64 * x * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BispinorKind {
    /// Upper pair `(F, G)`; the electron.
    First,
    /// Upper and lower roles exchanged, pair `(K, L)`; the positron.
    Second,
}

impl BispinorKind {
    pub fn particle(self) -> &'static str {
        match self {
            BispinorKind::First => "electron",
            BispinorKind::Second => "positron",
        }
    }

    /// Radial symbols `(upper, lower)` for the left (conjugated) state;
    /// right-state symbols are their lowercase forms.
    fn symbols(self) -> (char, char) {
        match self {
            BispinorKind::First => ('F', 'G'),
            BispinorKind::Second => ('K', 'L'),
        }
    }
}

/// Total angular momentum and its projection, stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AngularMomentum {
    pub j2: i32,
    pub m2: i32,
}

impl AngularMomentum {
    pub fn new(j2: i32, m2: i32) -> Result<Self> {
        if j2 <= 0 || j2 % 2 == 0 || m2.abs() > j2 || (j2 - m2) % 2 != 0 {
            return Err(Error::Domain(format!("invalid (2j, 2m) = ({j2}, {m2})")));
        }
        Ok(AngularMomentum { j2, m2 })
    }

    /// `j = 1/2` with `m = ±1/2`.
    pub fn half(up: bool) -> Self {
        AngularMomentum {
            j2: 1,
            m2: if up { 1 } else { -1 },
        }
    }

    pub fn label(self) -> String {
        format!("{}/2", self.m2).replace('-', "−")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RadialSlot {
    Upper,
    Lower,
}

/// `phase · √weight · R(s) · Y_l^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    #[serde(serialize_with = "ser_complex")]
    pub phase: Complex<i32>,
    #[serde(serialize_with = "ser_ratio")]
    pub weight: Rational64,
    pub radial: RadialSlot,
    pub l: u32,
    pub m: i32,
}

fn ser_complex<S: serde::Serializer>(c: &Complex<i32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    format!("{}{:+}i", c.re, c.im).serialize(s)
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    r.to_string().serialize(s)
}

impl Component {
    fn coefficient(&self) -> Complex64 {
        let w = *self.weight.numer() as f64 / *self.weight.denom() as f64;
        Complex64::new(self.phase.re as f64, self.phase.im as f64) * w.sqrt()
    }
}

/// The four-component state of one solution kind at fixed `(j, m)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BispinorState {
    pub kind: BispinorKind,
    pub spin: AngularMomentum,
    pub components: [Option<Component>; 4],
}

fn half_ratio(num2: i32, den2: i32) -> Rational64 {
    Rational64::new(num2 as i64, den2 as i64)
}

pub fn build_bispinor(kind: BispinorKind, spin: AngularMomentum) -> BispinorState {
    let AngularMomentum { j2, m2 } = spin;
    // weights with j, m doubled: (j+1∓m)/(2(j+1)) and (j±m)/(2j)
    let big_minus = half_ratio(j2 + 2 - m2, 2 * (j2 + 2));
    let big_plus = half_ratio(j2 + 2 + m2, 2 * (j2 + 2));
    let small_plus = half_ratio(j2 + m2, 2 * j2);
    let small_minus = half_ratio(j2 - m2, 2 * j2);
    let l_big = ((j2 + 1) / 2) as u32;
    let l_small = ((j2 - 1) / 2) as u32;
    let m_lo = (m2 - 1) / 2;
    let m_hi = (m2 + 1) / 2;
    let make = |phase, weight: Rational64, radial, l: u32, m: i32| {
        (!weight.is_zero() && m.unsigned_abs() <= l).then_some(Component {
            phase,
            weight,
            radial,
            l,
            m,
        })
    };
    let upper_pair = [
        make(P, big_minus, RadialSlot::Upper, l_big, m_lo),
        make(N, big_plus, RadialSlot::Upper, l_big, m_hi),
    ];
    let lower_pair = [
        make(I, small_plus, RadialSlot::Lower, l_small, m_lo),
        make(I, small_minus, RadialSlot::Lower, l_small, m_hi),
    ];
    let components = match kind {
        BispinorKind::First => [upper_pair[0], upper_pair[1], lower_pair[0], lower_pair[1]],
        BispinorKind::Second => [lower_pair[0], lower_pair[1], upper_pair[0], upper_pair[1]],
    };
    BispinorState {
        kind,
        spin,
        components,
    }
}

impl BispinorState {
    /// Component values for the given radial values.
    pub fn evaluate(&self, radial: RadialValues, theta: f64, phi: f64) -> Result<[Complex64; 4]> {
        let mut out = [Complex64::zero(); 4];
        for (slot, c) in out.iter_mut().zip(&self.components) {
            if let Some(c) = c {
                let r = match c.radial {
                    RadialSlot::Upper => radial.upper,
                    RadialSlot::Lower => radial.lower,
                };
                *slot = c.coefficient() * r * spherical_harmonic(c.l, c.m, theta, phi)?;
            }
        }
        Ok(out)
    }
}

/// `ψ_left† Γ ψ_right` at one angular point.
pub fn bilinear_density(
    left: &BispinorState,
    left_radial: RadialValues,
    op: Operator,
    right: &BispinorState,
    right_radial: RadialValues,
    theta: f64,
    phi: f64,
) -> Result<Complex64> {
    let a = left.evaluate(left_radial, theta, phi)?;
    let b = right.evaluate(right_radial, theta, phi)?;
    Ok(apply(&op.matrix(), &a, &b))
}

fn apply(m: &CMat, a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    let mut acc = Complex64::zero();
    for r in 0..4 {
        for c in 0..4 {
            if m[r][c] != O {
                let g = Complex64::new(m[r][c].re as f64, m[r][c].im as f64);
                acc += a[r].conj() * g * b[c];
            }
        }
    }
    acc
}

/// Product rule on the sphere: Gauss–Legendre in `cos θ`, trapezoid in φ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SphereQuadrature {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature {
            n_theta: 8,
            n_phi: 16,
        }
    }
}

impl SphereQuadrature {
    /// Rejects rules that cannot integrate products of `l ≤ 1` harmonics.
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 3 || self.n_phi < 5 {
            return Err(Error::QuadratureResolution(format!(
                "sphere rule {}×{} is too coarse; need at least 3×5",
                self.n_theta, self.n_phi
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        let (x, w) = gauss_legendre(self.n_theta);
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.n_theta * self.n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.acos();
            for k in 0..self.n_phi {
                out.push((theta, k as f64 * dphi, wi * dphi));
            }
        }
        out
    }

    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(f64, f64) -> Result<Complex64>,
    {
        self.validate()?;
        let mut acc = Complex64::zero();
        for (theta, phi, w) in self.nodes() {
            acc += f(theta, phi)? * w;
        }
        Ok(acc)
    }
}

/// One term of a density: a radial product times an angular product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEntry {
    /// For example `Ff` or `Gg`.
    pub radial: String,
    /// Harmonics `(l, m)` of the left and right factors.
    pub left_harmonic: (u32, i32),
    pub right_harmonic: (u32, i32),
    /// Exact coefficient for diagonal (`|Y_lm|²`) terms.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub fraction: Option<Rational64>,
    /// Sphere integral of the angular factor times the coefficient.
    pub integral_re: f64,
    pub integral_im: f64,
}

fn ser_opt_ratio<S: serde::Serializer>(
    r: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    r.map(|r| r.to_string()).serialize(s)
}

impl DensityEntry {
    pub fn is_diagonal(&self) -> bool {
        self.left_harmonic == self.right_harmonic
    }

    /// `(1/3)Ff|Y₁₀|²` style rendering, with the sign leading.
    pub fn render(&self) -> String {
        let (l, m) = self.left_harmonic;
        let frac = self.fraction.unwrap_or_else(Rational64::zero);
        let sign = if frac < Rational64::zero() { "−" } else { "" };
        let abs = frac.abs();
        let coef = if abs.is_one() {
            String::new()
        } else {
            format!("({abs})")
        };
        let mm = if m < 0 {
            format!("−{}", -m)
        } else {
            m.to_string()
        };
        format!("{sign}{coef}{}|Y{l},{mm}|²", self.radial)
    }
}

/// Sphere-reduced density for one operator between equal-kind states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub operator: Operator,
    pub particle: &'static str,
    pub spin: AngularMomentum,
    pub entries: Vec<DensityEntry>,
}

impl DensityTable {
    /// Diagonal terms with nonzero coefficient.
    pub fn surviving(&self) -> impl Iterator<Item = &DensityEntry> {
        self.entries
            .iter()
            .filter(|e| e.is_diagonal() && e.fraction.is_some_and(|f| !f.is_zero()))
    }

    /// Surviving terms excluding the s-wave lower-component product, whose
    /// radial integral is tuned to zero separately.
    pub fn listed(&self) -> Vec<&DensityEntry> {
        self.surviving().filter(|e| e.left_harmonic.0 > 0).collect()
    }

    pub fn max_cross_integral(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !e.is_diagonal())
            .map(|e| e.integral_re.hypot(e.integral_im))
            .fold(0.0, f64::max)
    }

    pub fn survives(&self) -> bool {
        self.surviving().next().is_some()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.listed().iter().map(|e| e.render()).collect();
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('−') {
                Some(rest) => out.push_str(&format!(" − {rest}")),
                None => out.push_str(&format!(" + {p}")),
            }
        }
        out
    }
}

/// Decompose `ψ†Γψ` for a state of `kind` into radial × angular terms and
/// integrate each angular factor over the sphere.
pub fn angular_reduce(
    op: Operator,
    kind: BispinorKind,
    spin: AngularMomentum,
    quad: &SphereQuadrature,
) -> Result<DensityTable> {
    quad.validate()?;
    let state = build_bispinor(kind, spin);
    let (up, low) = kind.symbols();
    let symbol = |slot: RadialSlot| match slot {
        RadialSlot::Upper => up,
        RadialSlot::Lower => low,
    };
    let matrix = op.matrix();
    let mut entries = Vec::new();
    for (a, ca) in state.components.iter().enumerate() {
        for (b, cb) in state.components.iter().enumerate() {
            let (Some(ca), Some(cb)) = (ca, cb) else {
                continue;
            };
            let g = matrix[a][b];
            if g == O {
                continue;
            }
            let phase = ca.phase.conj() * g * cb.phase;
            let diagonal = (ca.l, ca.m) == (cb.l, cb.m);
            let fraction = if diagonal && ca.weight == cb.weight && phase.im == 0 {
                Some(ca.weight * phase.re as i64)
            } else {
                None
            };
            let coef = ca.coefficient().conj()
                * Complex64::new(g.re as f64, g.im as f64)
                * cb.coefficient();
            let integral = quad.integrate(|t, p| {
                Ok(spherical_harmonic(ca.l, ca.m, t, p)?.conj()
                    * spherical_harmonic(cb.l, cb.m, t, p)?)
            })? * coef;
            let radial = format!("{}{}", symbol(ca.radial), symbol(cb.radial).to_ascii_lowercase());
            entries.push(DensityEntry {
                radial,
                left_harmonic: (ca.l, ca.m),
                right_harmonic: (cb.l, cb.m),
                fraction,
                integral_re: integral.re,
                integral_im: integral.im,
            });
        }
    }
    Ok(DensityTable {
        operator: op,
        particle: kind.particle(),
        spin,
        entries,
    })
}

/// Both sides of the pointwise identity
/// `(1/3)|Y₁₀|² Ff + (2/3)|Y₁₁|² Ff + Y₀₀² Gg = Y₀₀² (Ff + Gg)`, the left
/// side computed as the `γ₁` bilinear.
pub fn time_component_collapse(
    left: RadialValues,
    right: RadialValues,
    theta: f64,
    phi: f64,
) -> Result<(f64, f64)> {
    let state = build_bispinor(BispinorKind::First, AngularMomentum::half(true));
    let d = bilinear_density(&state, left, Operator::Gamma1, &state, right, theta, phi)?;
    let y00 = 1.0 / (4.0 * PI);
    Ok((d.re, y00 * (left.upper * right.upper + left.lower * right.lower)))
}

/// `2π(ψ†γ₁ψ − ψ†γ₅ψ)` and `2π(ψ†γ₁ψ + ψ†γ₅ψ)` at one point; for the
/// j = 1/2 first-kind state these equal `Gg` and `Ff`.
pub fn invariant_densities(
    left: RadialValues,
    right: RadialValues,
    theta: f64,
    phi: f64,
) -> Result<(f64, f64)> {
    let state = build_bispinor(BispinorKind::First, AngularMomentum::half(true));
    let v = bilinear_density(&state, left, Operator::Gamma1, &state, right, theta, phi)?;
    let c = bilinear_density(&state, left, Operator::Gamma5, &state, right, theta, phi)?;
    Ok((2.0 * PI * (v.re - c.re), 2.0 * PI * (v.re + c.re)))
}

/// Undamped series of the invariants `I₁ = G̃g̃` and `I₂ = F̃f̃`, truncated
/// at the highest α power complete in both families.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants {
    pub i1: LogPolySeries,
    pub i2: LogPolySeries,
    pub complete_through: u32,
}

pub fn invariants_i1_i2(first: &SolutionFamily, second: &SolutionFamily) -> Result<Invariants> {
    use crate::series::{product_density, ProductKind};
    let gg = product_density(first, second, ProductKind::GG)?;
    let ff = product_density(first, second, ProductKind::FF)?;
    Ok(Invariants {
        i1: gg.series.shift_s(-2),
        i2: ff.series.shift_s(-2),
        complete_through: gg.complete_through,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn harmonics() {
        let y = spherical_harmonic(0, 0, 0.3, 1.1).unwrap();
        assert!((y.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y.im == 0.0);
        let q = SphereQuadrature::default();
        let n = q
            .integrate(|t, p| Ok(Complex64::from(spherical_harmonic(1, 1, t, p)?.norm_sqr())))
            .unwrap();
        assert!((n.re - 1.0).abs() < 1e-12);
        let o = q
            .integrate(|t, p| {
                Ok(spherical_harmonic(1, 0, t, p)?.conj() * spherical_harmonic(1, 1, t, p)?)
            })
            .unwrap();
        assert!(o.norm() < 1e-12);
        // Condon–Shortley: Y₁₁ = −√(3/8π) sin θ e^{iφ}
        let y11 = spherical_harmonic(1, 1, 0.7, 0.2).unwrap();
        let want = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * 0.7f64.sin(), 0.2);
        assert!((y11 - want).norm() < 1e-15);
        assert!(spherical_harmonic(1, 2, 0.0, 0.0).is_err());
    }

    #[test]
    fn higher_harmonics_are_orthonormal() {
        let q = SphereQuadrature {
            n_theta: 12,
            n_phi: 24,
        };
        let lm: Vec<(u32, i32)> = (0..=3).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
        for &(l1, m1) in &lm {
            for &(l2, m2) in &lm {
                let v = q
                    .integrate(|t, p| {
                        Ok(spherical_harmonic(l1, m1, t, p)?.conj() * spherical_harmonic(l2, m2, t, p)?)
                    })
                    .unwrap();
                let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((v - want).norm() < 1e-12, "({l1},{m1}) ({l2},{m2}) {v}");
            }
        }
    }

    #[test]
    fn bispinor_templates() {
        let e = build_bispinor(BispinorKind::First, AngularMomentum::half(true));
        let c = e.components;
        assert_eq!((c[0].unwrap().weight, c[0].unwrap().phase, c[0].unwrap().l, c[0].unwrap().m), (r(1, 3), P, 1, 0));
        assert_eq!((c[1].unwrap().weight, c[1].unwrap().phase, c[1].unwrap().m), (r(2, 3), N, 1));
        assert_eq!((c[2].unwrap().weight, c[2].unwrap().phase, c[2].unwrap().l), (r(1, 1), I, 0));
        assert!(c[3].is_none());
        let p = build_bispinor(BispinorKind::Second, AngularMomentum::half(true));
        let c = p.components;
        assert_eq!((c[0].unwrap().phase, c[0].unwrap().radial), (I, RadialSlot::Lower));
        assert!(c[1].is_none());
        assert_eq!((c[2].unwrap().weight, c[2].unwrap().m), (r(1, 3), 0));
        assert_eq!((c[3].unwrap().weight, c[3].unwrap().phase, c[3].unwrap().m), (r(2, 3), N, 1));
        let down = build_bispinor(BispinorKind::First, AngularMomentum::half(false)).components;
        assert_eq!((down[0].unwrap().weight, down[0].unwrap().m), (r(2, 3), -1));
        assert_eq!((down[1].unwrap().weight, down[1].unwrap().phase), (r(1, 3), N));
        assert!(down[2].is_none());
        assert_eq!(down[3].unwrap().l, 0);
    }

    #[test]
    fn general_j_weights() {
        let s = build_bispinor(BispinorKind::First, AngularMomentum::new(3, 1).unwrap());
        // (j+1−m)/(2(j+1)) at j = 3/2, m = 1/2
        assert_eq!(s.components[0].unwrap().weight, r(2, 5));
        assert_eq!(s.components[2].unwrap().weight, r(2, 3));
        assert!(AngularMomentum::new(2, 0).is_err());
    }

    #[test]
    fn zero_state_gives_zero() {
        let s = build_bispinor(BispinorKind::First, AngularMomentum::half(true));
        let z = RadialValues { upper: 0.0, lower: 0.0 };
        for op in Operator::ALL {
            assert_eq!(bilinear_density(&s, z, op, &s, z, 0.4, 0.9).unwrap(), Complex64::zero());
        }
    }

    #[test]
    fn operators_are_hermitian_or_antihermitian() {
        let mut anti = Vec::new();
        for op in Operator::ALL {
            let m = op.matrix();
            let herm = (0..4).all(|a| (0..4).all(|b| m[a][b] == m[b][a].conj()));
            let skew = (0..4).all(|a| (0..4).all(|b| m[a][b] == -m[b][a].conj()));
            assert!(herm ^ skew, "{op}");
            if skew {
                anti.push(op);
            }
        }
        assert_eq!(anti, [Operator::Gamma234]);
    }

    #[test]
    fn only_pseudoscalar_row_differs_from_reference() {
        let bad = reference_mismatches();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].0, Operator::Gamma2345);
        assert_eq!(format_pattern(&Operator::Gamma2345.pattern()), "i(−1·3−2·4+3·1+4·2)");
    }

    #[test]
    fn reduce_rejects_coarse_rule() {
        let q = SphereQuadrature { n_theta: 2, n_phi: 16 };
        assert!(matches!(
            angular_reduce(Operator::Gamma1, BispinorKind::First, AngularMomentum::half(true), &q),
            Err(Error::QuadratureResolution(_))
        ));
    }
}
