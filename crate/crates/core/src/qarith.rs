//! Exact arithmetic in the formal variable `q`.
//!
//! [`LaurentPoly`] is `Z[q, q^-1]` with arbitrary-precision coefficients.
//! [`QSeries`] is a Laurent series known exactly up to a cap. [`ClosedForm`]
//! is a rational function `N(q) / (D(q) · Π (1 - q^c))` with `D` having unit
//! lowest coefficient, which covers every graded dimension in this crate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default series cap used by the CLI and reports.
pub const DEFAULT_CAP: i64 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QArithError {
    #[error("invalid argument: {0}")]
    InvalidArg(String),
    #[error("lowest coefficient of the divisor is {0}, not ±1")]
    NotInvertibleLeading(BigInt),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("{0} is not divisible by {1}")]
    NotDivisible(String, String),
    #[error("cannot parse {0:?} as a Laurent polynomial")]
    Parse(String),
}

/// A Laurent polynomial with integer coefficients. Zero coefficients are
/// never stored, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c · q^e`.
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// The bar involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Exact division; fails unless `self = quotient · den` with `quotient`
    /// a Laurent polynomial.
    pub fn div_exact(&self, den: &LaurentPoly) -> Result<LaurentPoly, QArithError> {
        let (dlo, dhi) = match (den.min_exp(), den.max_exp()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Err(QArithError::ZeroDivisor),
        };
        let lead = den.coeff(dhi);
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        while let Some(top) = rem.max_exp() {
            let c = rem.coeff(top);
            if top - dhi < rem.min_exp().unwrap() - dlo || (&c % &lead) != BigInt::zero() {
                return Err(QArithError::NotDivisible(self.to_string(), den.to_string()));
            }
            let qc = &c / &lead;
            let term = LaurentPoly::monomial(qc.clone(), top - dhi);
            rem = &rem - &(&term * den);
            quot.add_term(top - dhi, qc);
        }
        Ok(quot)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Renders as `q^-2 + 2 + 3q^4 - q^5`, ascending exponents; zero is `0`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (&e, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = abs.is_one();
            match e {
                0 => write!(f, "{abs}")?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{abs}q")?,
                _ if unit => write!(f, "q^{e}")?,
                _ => write!(f, "{abs}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = QArithError;

    /// Accepts the grammar produced by `Display`, with optional spaces.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QArithError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let bytes = compact.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            // a sign starts a new term unless it is the exponent's sign
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut p = LaurentPoly::zero();
        for t in terms {
            let (sign, body) = match t.as_bytes()[0] {
                b'+' => (1, &t[1..]),
                b'-' => (-1, &t[1..]),
                _ => (1, t),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (coeff, exp) = match body.find('q') {
                None => (body.parse::<BigInt>().map_err(|_| err())?, 0),
                Some(pos) => {
                    let c = if pos == 0 {
                        BigInt::one()
                    } else {
                        body[..pos].parse::<BigInt>().map_err(|_| err())?
                    };
                    let rest = &body[pos + 1..];
                    let e = if rest.is_empty() {
                        1
                    } else if let Some(x) = rest.strip_prefix('^') {
                        x.parse::<i64>().map_err(|_| err())?
                    } else {
                        return Err(err());
                    };
                    (c, e)
                }
            };
            p.add_term(exp, coeff * sign);
        }
        Ok(p)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (&e, c) in &rhs.coeffs {
            self.add_term(e, c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.coeffs {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&BigInt::from(-1))
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// `[n]_i = q_i^{n-1} + q_i^{n-3} + ... + q_i^{1-n}` with `q_i = q^r`.
pub fn quantum_int(n: i64, r: i64) -> Result<LaurentPoly, QArithError> {
    if n <= 0 || r <= 0 {
        return Err(QArithError::InvalidArg(format!(
            "quantum integer needs n ≥ 1 and r ≥ 1, got n = {n}, r = {r}"
        )));
    }
    Ok(LaurentPoly::from_terms(
        (0..n).map(|t| (r * (n - 1 - 2 * t), BigInt::one())),
    ))
}

/// `[n]_i! = [n]_i [n-1]_i ... [1]_i`; the empty product is 1.
pub fn quantum_factorial(n: i64, r: i64) -> Result<LaurentPoly, QArithError> {
    if n < 0 || r <= 0 {
        return Err(QArithError::InvalidArg(format!(
            "quantum factorial needs n ≥ 0 and r ≥ 1, got n = {n}, r = {r}"
        )));
    }
    let mut acc = LaurentPoly::one();
    for k in 1..=n {
        acc = &acc * &quantum_int(k, r)?;
    }
    Ok(acc)
}

/// Quantum binomial `[n choose k]_i`, a Laurent polynomial.
pub fn quantum_binomial(n: i64, k: i64, r: i64) -> Result<LaurentPoly, QArithError> {
    if k < 0 || k > n {
        return Ok(LaurentPoly::zero());
    }
    let num = quantum_factorial(n, r)?;
    let den = &quantum_factorial(k, r)? * &quantum_factorial(n - k, r)?;
    num.div_exact(&den)
}

/// A Laurent series known exactly for all exponents `≤ cap`, with no
/// terms below `floor`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    floor: i64,
    cap: i64,
    coeffs: BTreeMap<i64, BigInt>,
}

impl QSeries {
    pub fn zero(cap: i64) -> Self {
        Self {
            floor: cap + 1,
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    /// Truncation of an exact Laurent polynomial.
    pub fn from_poly(p: &LaurentPoly, cap: i64) -> Self {
        let floor = p.min_exp().unwrap_or(cap + 1).min(cap + 1);
        Self {
            floor,
            cap,
            coeffs: p
                .terms()
                .filter(|(e, _)| *e <= cap)
                .map(|(e, c)| (e, c.clone()))
                .collect(),
        }
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        assert!(e <= self.cap, "coefficient q^{e} is beyond the cap {}", self.cap);
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// The known part as a Laurent polynomial.
    pub fn known_part(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.coeffs.iter().map(|(&e, c)| (e, c.clone())))
    }

    pub fn is_zero_to_cap(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drops everything above `cap`; a larger cap than the current one is
    /// clamped.
    pub fn truncate(&self, cap: i64) -> Self {
        let cap = cap.min(self.cap);
        Self {
            floor: self.floor.min(cap + 1),
            cap,
            coeffs: self.coeffs.range(..=cap).map(|(&e, c)| (e, c.clone())).collect(),
        }
    }

    fn insert(&mut self, e: i64, c: BigInt) {
        if e > self.cap || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let cap = self.cap.min(other.cap);
        let mut out = QSeries {
            floor: self.floor.min(other.floor).min(cap + 1),
            cap,
            coeffs: BTreeMap::new(),
        };
        for (&e, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.insert(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> QSeries {
        let mut out = QSeries {
            floor: self.floor,
            cap: self.cap,
            coeffs: BTreeMap::new(),
        };
        for (&e, x) in &self.coeffs {
            out.insert(e, x * c);
        }
        out
    }

    /// Series product; the result is exact up to
    /// `min(a.cap + b.floor, b.cap + a.floor)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let cap = (self.cap + other.floor).min(other.cap + self.floor);
        let mut out = QSeries {
            floor: (self.floor + other.floor).min(cap + 1),
            cap,
            coeffs: BTreeMap::new(),
        };
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &other.coeffs {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Product with an exact Laurent polynomial; the cap moves by the
    /// polynomial's lowest exponent.
    pub fn mul_poly(&self, p: &LaurentPoly) -> QSeries {
        let Some(lo) = p.min_exp() else {
            return QSeries::zero(self.cap);
        };
        let cap = self.cap + lo;
        let mut out = QSeries {
            floor: (self.floor + lo).min(cap + 1),
            cap,
            coeffs: BTreeMap::new(),
        };
        for (&e1, c1) in &self.coeffs {
            for (e2, c2) in p.terms() {
                out.insert(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// The largest exponent up to which both series are known and agree, or
    /// `None` if they differ somewhere below the common cap.
    pub fn agrees_with(&self, other: &QSeries) -> Option<i64> {
        let cap = self.cap.min(other.cap);
        let a = self.truncate(cap);
        let b = other.truncate(cap);
        (a.coeffs == b.coeffs).then_some(cap)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let known = self.known_part();
        if known.is_zero() {
            write!(f, "O(q^{})", self.cap + 1)
        } else {
            write!(f, "{known} + O(q^{})", self.cap + 1)
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[floor {}]({self})", self.floor)
    }
}

/// `1 + q^c + q^{2c} + ...` truncated at `cap`, i.e. `(1 - q^c)^{-1}`.
pub fn geom_inverse(c: i64, cap: i64) -> Result<QSeries, QArithError> {
    if c < 1 {
        return Err(QArithError::InvalidArg(format!(
            "geometric inverse needs exponent c ≥ 1, got {c}"
        )));
    }
    let mut s = QSeries {
        floor: 0,
        cap,
        coeffs: BTreeMap::new(),
    };
    let mut e = 0;
    while e <= cap {
        s.insert(e, BigInt::one());
        e += c;
    }
    if cap < 0 {
        s.floor = 0.min(cap + 1);
    }
    Ok(s)
}

/// Solves `s · den = num` for the series `s`. The lowest coefficient of
/// `den` must be ±1. The returned cap is `num.cap - max_exp(den)`.
pub fn series_div_exact(num: &QSeries, den: &LaurentPoly) -> Result<QSeries, QArithError> {
    let (lo, hi) = match (den.min_exp(), den.max_exp()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(QArithError::ZeroDivisor),
    };
    let lead = den.coeff(lo);
    if !lead.abs().is_one() {
        return Err(QArithError::NotInvertibleLeading(lead));
    }
    let cap = num.cap - hi;
    let floor = num.floor - lo;
    let mut s: BTreeMap<i64, BigInt> = BTreeMap::new();
    // coefficient of q^e in s: (num_{e+lo} - Σ_{t>lo} den_t s_{e+lo-t}) / den_lo
    let mut e = floor;
    while e <= cap {
        let mut acc = if e + lo <= num.cap {
            num.coeffs.get(&(e + lo)).cloned().unwrap_or_default()
        } else {
            BigInt::zero()
        };
        for (t, dt) in den.terms() {
            if t == lo {
                continue;
            }
            if let Some(sv) = s.get(&(e + lo - t)) {
                acc -= dt * sv;
            }
        }
        let v = &acc * &lead; // lead = ±1 is its own inverse
        if !v.is_zero() {
            s.insert(e, v);
        }
        e += 1;
    }
    Ok(QSeries {
        floor: floor.min(cap + 1),
        cap,
        coeffs: s,
    })
}

/// `numerator / (divisor · Π_c (1 - q^c))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedForm {
    pub numerator: LaurentPoly,
    /// Exponents `c ≥ 1` of the factors `(1 - q^c)` in the denominator,
    /// sorted ascending.
    pub geometric: Vec<i64>,
    /// Extra scalar divisor with lowest coefficient ±1.
    pub divisor: LaurentPoly,
}

impl ClosedForm {
    pub fn new(numerator: LaurentPoly, mut geometric: Vec<i64>) -> Self {
        geometric.sort_unstable();
        Self {
            numerator,
            geometric,
            divisor: LaurentPoly::one(),
        }
    }

    pub fn with_divisor(mut self, divisor: LaurentPoly) -> Self {
        self.divisor = &self.divisor * &divisor;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Divides the numerator by the divisor exactly when possible, leaving a
    /// unit divisor.
    pub fn reduce(&self) -> Result<ClosedForm, QArithError> {
        let numerator = self.numerator.div_exact(&self.divisor)?;
        Ok(ClosedForm {
            numerator,
            geometric: self.geometric.clone(),
            divisor: LaurentPoly::one(),
        })
    }

    /// Expansion around `q = 0`, exact up to `cap`.
    pub fn expand(&self, cap: i64) -> Result<QSeries, QArithError> {
        let nlo = self.numerator.min_exp().unwrap_or(0);
        let dhi = self.divisor.max_exp().unwrap_or(0);
        // every geometric factor has floor 0, so the product is exact to `inner`
        let inner = cap - nlo + dhi;
        let mut acc = QSeries::from_poly(&LaurentPoly::one(), inner);
        for &c in &self.geometric {
            acc = acc.mul(&geom_inverse(c, inner)?);
        }
        let acc = acc.mul_poly(&self.numerator);
        let out = if self.divisor.is_one() {
            acc
        } else {
            series_div_exact(&acc, &self.divisor)?
        };
        Ok(out.truncate(cap))
    }

    /// Sum of two closed forms over their common geometric denominator.
    pub fn add(&self, other: &ClosedForm) -> ClosedForm {
        let (mut a_extra, mut b_extra) = (Vec::new(), Vec::new());
        let mut common = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (ga, gb) = (&self.geometric, &other.geometric);
        while i < ga.len() || j < gb.len() {
            match (ga.get(i), gb.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    common.push(*x);
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    b_extra.push(*x);
                    common.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    a_extra.push(*y);
                    common.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    b_extra.push(*x);
                    common.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    a_extra.push(*y);
                    common.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let factor = |cs: &[i64]| {
            cs.iter().fold(LaurentPoly::one(), |acc, &c| {
                &acc * &(&LaurentPoly::one() - &LaurentPoly::q_pow(c))
            })
        };
        let na = &(&self.numerator * &factor(&a_extra)) * &other.divisor;
        let nb = &(&other.numerator * &factor(&b_extra)) * &self.divisor;
        ClosedForm {
            numerator: &na + &nb,
            geometric: common,
            divisor: &self.divisor * &other.divisor,
        }
    }
}

impl LaurentPoly {
    fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        if !self.divisor.is_one() {
            write!(f, " / ({})", self.divisor)?;
        }
        for c in &self.geometric {
            write!(f, " / (1 - q^{c})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(quantum_int(1, 1).unwrap(), LaurentPoly::one());
        assert_eq!(quantum_int(2, 1).unwrap(), lp("q^-1 + q"));
        // (q^6 - q^-6)/(q^2 - q^-2) = q^4 + 1 + q^-4
        assert_eq!(quantum_int(3, 2).unwrap(), lp("q^-4 + 1 + q^4"));
        assert!(quantum_int(0, 1).is_err());
        assert!(quantum_int(2, 0).is_err());
    }

    #[test]
    fn quantum_factorials() {
        assert_eq!(quantum_factorial(0, 1).unwrap(), LaurentPoly::one());
        assert_eq!(quantum_factorial(2, 1).unwrap(), lp("q^-1 + q"));
        let expect = &lp("q + q^-1") * &lp("q^2 + 1 + q^-2");
        assert_eq!(expect, lp("q^-3 + 2q^-1 + 2q + q^3"));
        assert_eq!(quantum_factorial(3, 1).unwrap(), expect);
        assert_eq!(quantum_binomial(4, 2, 1).unwrap(), lp("q^-4 + q^-2 + 2 + q^2 + q^4"));
    }

    #[test]
    fn evaluation_at_one() {
        for n in 1..=6 {
            for r in 1..=3 {
                assert_eq!(quantum_int(n, r).unwrap().eval_at_one(), BigInt::from(n));
                let fact: i64 = (1..=n).product();
                assert_eq!(quantum_factorial(n, r).unwrap().eval_at_one(), BigInt::from(fact));
            }
        }
    }

    #[test]
    fn geometric_series() {
        let s = geom_inverse(2, 6).unwrap();
        assert_eq!(s.known_part(), lp("1 + q^2 + q^4 + q^6"));
        let t = geom_inverse(4, 6).unwrap();
        assert_eq!(t.known_part(), lp("1 + q^4"));
        // convolution of the two truncations by hand
        assert_eq!(s.mul(&t).known_part(), lp("1 + q^2 + 2q^4 + 2q^6"));
        assert_eq!(s.mul(&t).cap(), 6);
        assert!(geom_inverse(0, 6).is_err());
    }

    #[test]
    fn series_division() {
        let qq = lp("q + q^-1");
        let num = QSeries::from_poly(&qq, 10);
        let s = series_div_exact(&num, &qq).unwrap();
        assert_eq!(s.known_part(), LaurentPoly::one());
        assert_eq!(s.cap(), 9);

        let g = geom_inverse(2, 12).unwrap();
        let num = g.mul_poly(&qq);
        let s = series_div_exact(&num, &qq).unwrap();
        assert_eq!(s.agrees_with(&g), Some(s.cap()));
        assert_eq!(s.mul_poly(&qq).agrees_with(&num), Some(s.cap() - 1));

        let one = QSeries::from_poly(&LaurentPoly::one(), 5);
        let s = series_div_exact(&one, &LaurentPoly::q_pow(2)).unwrap();
        assert_eq!(s.known_part(), LaurentPoly::q_pow(-2));

        let e = series_div_exact(&one, &lp("2 + q")).unwrap_err();
        assert!(matches!(e, QArithError::NotInvertibleLeading(_)));
    }

    #[test]
    fn exact_division() {
        let a = lp("q^-3 + 2q^-1 + 2q + q^3");
        assert_eq!(a.div_exact(&lp("q + q^-1")).unwrap(), lp("q^-2 + 1 + q^2"));
        assert!(lp("1 + q").div_exact(&lp("1 - q")).is_err());
        assert!(lp("1").div_exact(&LaurentPoly::zero()).is_err());
    }

    #[test]
    fn rendering() {
        assert_eq!(lp("q^-2 + 2 + 3q^4 - q^5").to_string(), "q^-2 + 2 + 3q^4 - q^5");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(lp("-q").to_string(), "-q");
        assert_eq!(lp("-2q^-1+q^-1").to_string(), "-q^-1");
        assert!("q^".parse::<LaurentPoly>().is_err());
        assert!("".parse::<LaurentPoly>().is_err());
        assert!("3x".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn closed_forms() {
        // (1 + q^2) / (1 - q^2)^2 expanded to cap 6: 1 + 3q^2 + 5q^4 + 7q^6
        let c = ClosedForm::new(lp("1 + q^2"), vec![2, 2]);
        assert_eq!(c.expand(6).unwrap().known_part(), lp("1 + 3q^2 + 5q^4 + 7q^6"));
        // negative numerator exponents: q^-2 / (1 - q^2) = q^-2 + 1 + q^2 + ...
        let c = ClosedForm::new(lp("q^-2"), vec![2]);
        let s = c.expand(4).unwrap();
        assert_eq!(s.cap(), 4);
        assert_eq!(s.known_part(), lp("q^-2 + 1 + q^2 + q^4"));
        // 1/(1-q^2) + 1/(1-q^4) = (2 + q^2) / ((1-q^2)(1-q^4))
        let sum = ClosedForm::new(LaurentPoly::one(), vec![2]).add(&ClosedForm::new(LaurentPoly::one(), vec![4]));
        assert_eq!(sum.geometric, vec![2, 4]);
        let direct = geom_inverse(2, 10).unwrap().add(&geom_inverse(4, 10).unwrap());
        assert_eq!(sum.expand(10).unwrap().agrees_with(&direct), Some(10));
        let div = ClosedForm::new(lp("q^-1 + q"), vec![2]).with_divisor(lp("q^-1 + q"));
        assert_eq!(div.expand(8).unwrap().agrees_with(&geom_inverse(2, 8).unwrap()), Some(8));
        assert_eq!(div.reduce().unwrap().numerator, LaurentPoly::one());
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-4i64..=4, -3i64..=3), 0..5).prop_map(|ts| {
            LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, BigInt::from(c))))
        })
    }

    fn unit_lowest_poly() -> impl Strategy<Value = LaurentPoly> {
        (small_poly(), -3i64..=3, prop_oneof![Just(1i64), Just(-1)]).prop_map(|(p, lo, u)| {
            let mut q = LaurentPoly::from_terms(
                p.terms().map(|(e, c)| (e.abs() + lo + 1, c.clone())),
            );
            q.add_term(lo, BigInt::from(u));
            q
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn parse_render_round_trip(a in small_poly()) {
            prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a);
        }

        #[test]
        fn division_undoes_multiplication(a in small_poly(), b in unit_lowest_poly()) {
            let cap = 12;
            let prod = QSeries::from_poly(&(&a * &b), cap);
            let s = series_div_exact(&prod, &b).unwrap();
            let expect = QSeries::from_poly(&a, s.cap());
            prop_assert_eq!(s.agrees_with(&expect), Some(s.cap()));
            prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        }
    }
}
