//! The free algebra on `{f_i}`, the twisted coproduct `ρ`, and the bilinear
//! form `{ , }` computed by peeling letters through `{x, yz} = {ρ(x), y ⊗ z}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{gdim_corner_closed, KlrError};
use crate::datum::{BorcherdsCartanDatum, Index};
use crate::qarith::{quantum_binomial, quantum_factorial, ClosedForm, LaurentPoly, QArithError, QSeries};
use crate::wordcomb::{all_sequences, Sequence, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QGroupError {
    #[error("index {0} must be real")]
    RealIndexRequired(String),
    #[error("bad pair ({0}, {1}): {2}")]
    BadPair(String, String, String),
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error(transparent)]
    QArith(#[from] QArithError),
    #[error(transparent)]
    Klr(#[from] KlrError),
}

pub type FreeQWord = Vec<Index>;

fn word_weight(w: &[Index]) -> Weight {
    Sequence::new(w.to_vec()).weight()
}

/// `(1/divisor) · Σ c_w f_w` with Laurent coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeQElement {
    terms: BTreeMap<FreeQWord, LaurentPoly>,
    divisor: LaurentPoly,
}

impl FreeQElement {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            divisor: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn word(w: FreeQWord) -> Self {
        let mut e = Self::zero();
        e.terms.insert(w, LaurentPoly::one());
        e
    }

    pub fn generator(i: Index) -> Self {
        Self::word(vec![i])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeQWord, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn divisor(&self) -> &LaurentPoly {
        &self.divisor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_divisor(mut self, d: &LaurentPoly) -> Self {
        self.divisor = &self.divisor * d;
        self
    }

    fn add_term(&mut self, w: FreeQWord, c: &LaurentPoly) {
        let e = self.terms.entry(w.clone()).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &FreeQElement) -> FreeQElement {
        let mut out = FreeQElement {
            terms: BTreeMap::new(),
            divisor: &self.divisor * &other.divisor,
        };
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &(c * &other.divisor));
        }
        for (w, c) in &other.terms {
            out.add_term(w.clone(), &(c * &self.divisor));
        }
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> FreeQElement {
        let mut out = FreeQElement {
            terms: BTreeMap::new(),
            divisor: self.divisor.clone(),
        };
        for (w, x) in &self.terms {
            out.add_term(w.clone(), &(x * c));
        }
        out
    }

    pub fn sub(&self, other: &FreeQElement) -> FreeQElement {
        self.add(&other.scale(&-LaurentPoly::one()))
    }

    /// Concatenation product.
    pub fn mul(&self, other: &FreeQElement) -> FreeQElement {
        let mut out = FreeQElement {
            terms: BTreeMap::new(),
            divisor: &self.divisor * &other.divisor,
        };
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend(b);
                out.add_term(w, &(x * y));
            }
        }
        out
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let body = self
            .terms
            .iter()
            .map(|(w, c)| {
                let f = if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|&i| format!("f_{}", datum.label(i))).collect::<Vec<_>>().join("")
                };
                format!("({c}){f}")
            })
            .collect::<Vec<_>>()
            .join(" + ");
        if self.divisor == LaurentPoly::one() {
            body
        } else {
            format!("[{body}] / ({})", self.divisor)
        }
    }
}

/// `ρ(f_{i_1} ... f_{i_n})` as `(left, right, coefficient)` for every split
/// of the letters.
pub fn rho_expand(w: &[Index], datum: &BorcherdsCartanDatum) -> Vec<(FreeQWord, FreeQWord, LaurentPoly)> {
    let n = w.len();
    assert!(n < 64, "word too long to split");
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let in_right = |p: usize| mask >> p & 1 == 1;
        let mut e = 0;
        for p in 0..n {
            if !in_right(p) {
                continue;
            }
            for q in p + 1..n {
                if !in_right(q) {
                    e -= datum.bilinear(w[p], w[q]);
                }
            }
        }
        let left = (0..n).filter(|&p| !in_right(p)).map(|p| w[p]).collect();
        let right = (0..n).filter(|&p| in_right(p)).map(|p| w[p]).collect();
        out.push((left, right, LaurentPoly::q_pow(e)));
    }
    out
}

/// Which end of the second argument the recursion peels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeelStrategy {
    Last,
    First,
}

/// A pairing value: exact closed form and its expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingValue {
    pub closed: ClosedForm,
    pub series: QSeries,
}

/// The form with a shared memo of word-pair numerators.
pub struct Pairing {
    datum: BorcherdsCartanDatum,
    strategy: PeelStrategy,
    memo: RwLock<HashMap<(FreeQWord, FreeQWord), LaurentPoly>>,
}

impl Pairing {
    pub fn new(datum: BorcherdsCartanDatum) -> Self {
        Self::with_strategy(datum, PeelStrategy::Last)
    }

    pub fn with_strategy(datum: BorcherdsCartanDatum, strategy: PeelStrategy) -> Self {
        Self {
            datum,
            strategy,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn datum(&self) -> &BorcherdsCartanDatum {
        &self.datum
    }

    /// Denominator factors `(1 − q^{2 r_i})` for each letter of the weight.
    fn geometric(&self, w: &[Index]) -> Vec<i64> {
        w.iter().map(|&i| 2 * self.datum.r(i)).collect()
    }

    /// `{f_a, f_b} · Π (1 − q^{2 r})`, a Laurent polynomial.
    pub fn word_numerator(&self, a: &[Index], b: &[Index]) -> LaurentPoly {
        if a.len() != b.len() || word_weight(a) != word_weight(b) {
            return LaurentPoly::zero();
        }
        if a.is_empty() {
            return LaurentPoly::one();
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return v.clone();
        }
        let n = a.len();
        let mut out = LaurentPoly::zero();
        match self.strategy {
            PeelStrategy::Last => {
                let (rest, z) = (&b[..n - 1], b[n - 1]);
                for p in (0..n).filter(|&p| a[p] == z) {
                    let e: i64 = (p + 1..n).map(|q| -self.datum.bilinear(a[p], a[q])).sum();
                    let mut left = a.to_vec();
                    left.remove(p);
                    out = &out + &self.word_numerator(&left, rest).shift(e);
                }
            }
            PeelStrategy::First => {
                let (y, rest) = (b[0], &b[1..]);
                for p in (0..n).filter(|&p| a[p] == y) {
                    let e: i64 = (0..p).map(|q| -self.datum.bilinear(a[q], a[p])).sum();
                    let mut right = a.to_vec();
                    right.remove(p);
                    out = &out + &self.word_numerator(&right, rest).shift(e);
                }
            }
        }
        self.memo.write().unwrap().insert(key, out.clone());
        out
    }

    /// `{x, y}` as a closed form over the weight's geometric denominator.
    pub fn pair_closed(&self, x: &FreeQElement, y: &FreeQElement) -> ClosedForm {
        let mut by_weight: BTreeMap<Weight, (Vec<i64>, LaurentPoly)> = BTreeMap::new();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let num = self.word_numerator(a, b);
                if num.is_zero() {
                    continue;
                }
                let entry = by_weight
                    .entry(word_weight(a))
                    .or_insert_with(|| (self.geometric(a), LaurentPoly::zero()));
                entry.1 = &entry.1 + &(&(ca * cb) * &num);
            }
        }
        let divisor = x.divisor() * y.divisor();
        let mut acc = ClosedForm::new(LaurentPoly::zero(), Vec::new());
        for (_, (geo, num)) in by_weight {
            acc = acc.add(&ClosedForm::new(num, geo));
        }
        acc.with_divisor(divisor)
    }

    pub fn pair(&self, x: &FreeQElement, y: &FreeQElement, cap: i64) -> Result<PairingValue, QGroupError> {
        let closed = self.pair_closed(x, y);
        let closed = closed.reduce().unwrap_or(closed);
        let series = closed.expand(cap)?;
        Ok(PairingValue { closed, series })
    }

    pub fn pair_words(&self, a: &[Index], b: &[Index], cap: i64) -> Result<PairingValue, QGroupError> {
        self.pair(&FreeQElement::word(a.to_vec()), &FreeQElement::word(b.to_vec()), cap)
    }

    /// `Σ_{r+s=m} (−1)^r f_i^{(r)} f_j f_i^{(s)}` with `m = 1 − a_ij`,
    /// stored as `[m]_i!`-scaled integer combination over the divisor `[m]_i!`.
    pub fn serre_element(&self, i: Index, j: Index) -> Result<FreeQElement, QGroupError> {
        let d = &self.datum;
        if !d.is_real(i) {
            return Err(QGroupError::RealIndexRequired(d.label(i).to_string()));
        }
        if i == j {
            return Err(QGroupError::BadPair(d.label(i).into(), d.label(j).into(), "j must differ from i".into()));
        }
        let m = 1 - d.cartan(i, j);
        let r_i = d.r(i);
        let mut out = FreeQElement::zero();
        for r in 0..=m {
            let mut w = vec![i; r as usize];
            w.push(j);
            w.extend(std::iter::repeat_n(i, (m - r) as usize));
            let c = quantum_binomial(m, r, r_i)?;
            let c = if r % 2 == 0 { c } else { -c };
            out.add_term(w, &c);
        }
        Ok(out.with_divisor(&quantum_factorial(m, r_i)?))
    }

    /// `{x, u} = 0` for every word `u` of the weight of `x` (homogeneous `x`).
    pub fn is_in_radical_against_words(&self, x: &FreeQElement) -> bool {
        let Some((w, _)) = x.terms().next() else {
            return true;
        };
        all_sequences(&word_weight(w))
            .par_iter()
            .all(|u| self.pair_closed(x, &FreeQElement::word(u.0.clone())).is_zero())
    }

    /// Checks `{S·w, u} = 0` and `{w·S, u} = 0` for the Serre element `S` of
    /// `(i, j)`, every word `w` with `ht(S) + |w| ≤ max_ht` and every `u`.
    pub fn serre_radical_check(&self, i: Index, j: Index, max_ht: usize) -> Result<RadicalReport, QGroupError> {
        let s = self.serre_element(i, j)?;
        let base = (1 - self.datum.cartan(i, j)) as usize + 1;
        let mut report = RadicalReport::default();
        for extra in 0..=max_ht.saturating_sub(base) {
            for w in all_words(self.datum.rank(), extra) {
                let fw = FreeQElement::word(w.clone());
                for (side, x) in [("left", s.mul(&fw)), ("right", fw.mul(&s))] {
                    report.elements += 1;
                    if !self.is_in_radical_against_words(&x) {
                        report.failures.push(format!("{side} {:?}", w));
                    }
                }
            }
        }
        Ok(report)
    }

    /// `{f_i f_j − f_j f_i, u} = 0` for `i · j = 0`.
    pub fn commutation_check(&self, i: Index, j: Index) -> Result<bool, QGroupError> {
        let d = &self.datum;
        if d.bilinear(i, j) != 0 {
            return Err(QGroupError::BadPair(d.label(i).into(), d.label(j).into(), "i · j ≠ 0".into()));
        }
        let x = FreeQElement::word(vec![i, j]).sub(&FreeQElement::word(vec![j, i]));
        Ok(self.is_in_radical_against_words(&x))
    }

    /// `{f_𝐢, f_𝐣}` against `gdim 1_𝐢 R 1_𝐣`.
    pub fn match_pairing_with_gdim(&self, i: &Sequence, j: &Sequence, cap: i64) -> Result<PairingMatch, QGroupError> {
        if i.weight() != j.weight() {
            return Err(QGroupError::WeightMismatch(format!("{:?} vs {:?}", i.0, j.0)));
        }
        let algebra = gdim_corner_closed(&self.datum, j, i)?;
        let quantum = self.pair_words(&i.0, &j.0, cap)?;
        let algebra_series = algebra.expand(cap)?;
        let equal_to_cap = algebra_series.agrees_with(&quantum.series);
        let exact = algebra.geometric == quantum.closed.geometric && algebra.numerator == quantum.closed.numerator;
        Ok(PairingMatch {
            pair: [i.render(&self.datum), j.render(&self.datum)],
            algebra_side: algebra_series.to_string(),
            quantum_side: quantum.series.to_string(),
            closed_form: quantum.closed.to_string(),
            equal_to_cap,
            exact,
        })
    }

    /// Every ordered pair of sequences of one weight.
    pub fn sweep(&self, nu: &Weight, cap: i64) -> Result<Vec<PairingMatch>, QGroupError> {
        let seqs = all_sequences(nu);
        let pairs: Vec<(&Sequence, &Sequence)> = seqs.iter().flat_map(|a| seqs.iter().map(move |b| (a, b))).collect();
        pairs.par_iter().map(|(a, b)| self.match_pairing_with_gdim(a, b, cap)).collect()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RadicalReport {
    pub elements: usize,
    pub failures: Vec<String>,
}

impl RadicalReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairingMatch {
    pub pair: [String; 2],
    pub algebra_side: String,
    pub quantum_side: String,
    pub closed_form: String,
    pub equal_to_cap: Option<i64>,
    pub exact: bool,
}

impl PairingMatch {
    pub fn holds(&self) -> bool {
        self.equal_to_cap.is_some() && self.exact
    }
}

/// All words of length `n` over `0..rank`.
pub fn all_words(rank: usize, n: usize) -> Vec<FreeQWord> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Index>| {
                (0..rank).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// `{f_i, f_i} = (1 − q_i²)^{-1}` as a closed form.
pub fn generator_norm(datum: &BorcherdsCartanDatum, i: Index) -> ClosedForm {
    ClosedForm::new(LaurentPoly::monomial(BigInt::one(), 0), vec![2 * datum.r(i)])
}

#[cfg(test)]
mod tests;
