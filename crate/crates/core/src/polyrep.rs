//! The faithful polynomial representation.
//!
//! Each sequence `𝐢` of weight `ν` carries a copy of
//! `Q[x_1..x_n, y_1..y_n]`; dots multiply by `x_k` and crossings act by
//! swaps and divided differences depending on the two labels crossed.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::datum::BorcherdsCartanDatum;
use crate::linalg::Rat;
use crate::wordcomb::Sequence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyRepError {
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("position {k} out of range for a sequence of length {n}")]
    PositionOutOfRange { k: usize, n: usize },
    #[error("height {ht} exceeds the guard {guard}")]
    GuardExceeded { ht: usize, guard: usize },
    #[error("divided difference left remainder {0}")]
    InternalDivisionFailure(String),
}

/// A polynomial in `x_1..x_n, y_1..y_n`. Exponent vectors have length
/// `2n`: the `x` exponents first, then the `y` exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, vec![0; 2 * n], Rat::one())
    }

    pub fn monomial(n: usize, exps: Vec<u16>, c: Rat) -> Self {
        assert_eq!(exps.len(), 2 * n);
        let mut p = Self::zero(n);
        p.add_term(exps, c);
        p
    }

    /// `x^a y^b`.
    pub fn xy_monomial(xs: &[u16], ys: &[u16]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let mut e = xs.to_vec();
        e.extend_from_slice(ys);
        Self::monomial(xs.len(), e, Rat::one())
    }

    pub fn x(n: usize, k: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[k] = 1;
        Self::monomial(n, e, Rat::one())
    }

    pub fn y(n: usize, k: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[n + k] = 1;
        Self::monomial(n, e, Rat::one())
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &MultiPoly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.n);
        }
        MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by `x_k^e`.
    pub fn mul_x_pow(&self, k: usize, e: u16) -> MultiPoly {
        if e == 0 {
            return self.clone();
        }
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| {
                    let mut ex = ex.clone();
                    ex[k] += e;
                    (ex, c.clone())
                })
                .collect(),
        }
    }

    /// Multiplies by `Π_k x_k^{e_k}`.
    pub fn mul_x_monomial(&self, exps: &[u16]) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| {
                    let mut ex = ex.clone();
                    for (a, &b) in ex.iter_mut().zip(exps) {
                        *a += b;
                    }
                    (ex, c.clone())
                })
                .collect(),
        }
    }

    fn permute_vars(&self, a: usize, b: usize) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| {
                    let mut ex = ex.clone();
                    ex.swap(a, b);
                    (ex, c.clone())
                })
                .collect(),
        }
    }

    /// `s̃_k`: swaps `x_k` and `x_{k+1}` only.
    pub fn swap_x(&self, k: usize) -> MultiPoly {
        self.permute_vars(k, k + 1)
    }

    /// `s_k`: swaps `x_k, x_{k+1}` and `y_k, y_{k+1}`.
    pub fn swap_xy(&self, k: usize) -> MultiPoly {
        self.permute_vars(k, k + 1).permute_vars(self.n + k, self.n + k + 1)
    }

    /// Exact quotient by `v_a − v_b` (variable slots `a`, `b`) via
    /// synthetic division in `v_a`.
    fn div_by_difference(&self, a: usize, b: usize) -> Result<MultiPoly, PolyRepError> {
        let n = self.n;
        // coefficients of v_a^d, as polynomials free of v_a
        let mut by_deg: BTreeMap<u16, MultiPoly> = BTreeMap::new();
        for (ex, c) in &self.terms {
            let d = ex[a];
            let mut rest = ex.clone();
            rest[a] = 0;
            by_deg.entry(d).or_insert_with(|| MultiPoly::zero(n)).add_term(rest, c.clone());
        }
        let Some(&top) = by_deg.keys().next_back() else {
            return Ok(MultiPoly::zero(n));
        };
        let mut quotient = MultiPoly::zero(n);
        let mut g = MultiPoly::zero(n);
        for d in (0..=top).rev() {
            // g_{d-1} = c_d + v_b g_d
            let coeff = by_deg.remove(&d).unwrap_or_else(|| MultiPoly::zero(n));
            let shifted = g.mul_var(b);
            g = coeff.add(&shifted);
            if d == 0 {
                break;
            }
            for (ex, c) in &g.terms {
                let mut ex = ex.clone();
                ex[a] += d - 1;
                quotient.add_term(ex, c.clone());
            }
        }
        if !g.is_zero() {
            return Err(PolyRepError::InternalDivisionFailure(g.to_string()));
        }
        Ok(quotient)
    }

    fn mul_var(&self, slot: usize) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| {
                    let mut ex = ex.clone();
                    ex[slot] += 1;
                    (ex, c.clone())
                })
                .collect(),
        }
    }

    /// `(f − s̃_k f) / (x_k − x_{k+1})`.
    pub fn demazure_x(&self, k: usize) -> Result<MultiPoly, PolyRepError> {
        self.sub(&self.swap_x(k)).div_by_difference(k, k + 1)
    }

    /// `(s̃_k f − s_k f) / (y_k − y_{k+1})`.
    pub fn demazure_y(&self, k: usize) -> Result<MultiPoly, PolyRepError> {
        self.swap_x(k)
            .sub(&self.swap_xy(k))
            .div_by_difference(self.n + k, self.n + k + 1)
    }

    /// All monomials of total degree `≤ d` in the `2n` variables.
    pub fn monomials_up_to(n: usize, d: u16) -> Vec<MultiPoly> {
        fn rec(slot: usize, left: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if slot == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur[slot] = e;
                rec(slot + 1, left - e, cur, out);
            }
            cur[slot] = 0;
        }
        let mut exps = Vec::new();
        rec(0, d, &mut vec![0; 2 * n], &mut exps);
        exps.into_iter().map(|e| MultiPoly::monomial(n, e, Rat::one())).collect()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (ex, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            for (slot, &e) in ex.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let var = if slot < self.n {
                    format!("x{}", slot + 1)
                } else {
                    format!("y{}", slot - self.n + 1)
                };
                factors.push(if e == 1 { var } else { format!("{var}^{e}") });
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "({c})*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// An element of `⊕_𝐢 P_𝐢`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PolyVector {
    components: BTreeMap<Sequence, MultiPoly>,
}

impl PolyVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(seq: Sequence, f: MultiPoly) -> Self {
        let mut v = Self::zero();
        v.add_component(seq, f);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, seq: &Sequence) -> Option<&MultiPoly> {
        self.components.get(seq)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Sequence, &MultiPoly)> {
        self.components.iter()
    }

    pub fn add_component(&mut self, seq: Sequence, f: MultiPoly) {
        if f.is_zero() {
            return;
        }
        match self.components.entry(seq) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&f);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &PolyVector) -> PolyVector {
        let mut out = self.clone();
        for (s, f) in &other.components {
            out.add_component(s.clone(), f.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> PolyVector {
        let mut out = PolyVector::zero();
        for (s, f) in &self.components {
            out.add_component(s.clone(), f.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &PolyVector) -> PolyVector {
        self.add(&other.scale(&-BigRational::one()))
    }

    fn check_weight(&self, seq: &Sequence) -> Result<(), PolyRepError> {
        match self.components.keys().next() {
            Some(s) if s.weight() != seq.weight() => Err(PolyRepError::WeightMismatch(format!(
                "{:?} against a vector on {:?}",
                seq.0, s.0
            ))),
            _ => Ok(()),
        }
    }
}

/// Projection onto the `𝐢` component.
pub fn act_idempotent(seq: &Sequence, v: &PolyVector) -> Result<PolyVector, PolyRepError> {
    v.check_weight(seq)?;
    Ok(match v.component(seq) {
        Some(f) => PolyVector::single(seq.clone(), f.clone()),
        None => PolyVector::zero(),
    })
}

/// `x_{k,𝐢}`: multiplies the `𝐢` component by `x_k` and kills the rest.
pub fn act_dot(k: usize, seq: &Sequence, v: &PolyVector) -> Result<PolyVector, PolyRepError> {
    check_pos(k, seq.len())?;
    let p = act_idempotent(seq, v)?;
    Ok(match p.component(seq) {
        Some(f) => PolyVector::single(seq.clone(), f.mul_x_pow(k, 1)),
        None => PolyVector::zero(),
    })
}

/// `τ_{k,𝐢}` applied to the `𝐢` component.
pub fn act_crossing(
    k: usize,
    seq: &Sequence,
    v: &PolyVector,
    datum: &BorcherdsCartanDatum,
) -> Result<PolyVector, PolyRepError> {
    check_pos(k + 1, seq.len())?;
    let p = act_idempotent(seq, v)?;
    let Some(f) = p.component(seq) else {
        return Ok(PolyVector::zero());
    };
    let (target, g) = crossing_on_poly(k, seq, f, datum)?;
    Ok(PolyVector::single(target, g))
}

/// The crossing action on a single component; returns the target
/// sequence and the image polynomial.
pub fn crossing_on_poly(
    k: usize,
    seq: &Sequence,
    f: &MultiPoly,
    datum: &BorcherdsCartanDatum,
) -> Result<(Sequence, MultiPoly), PolyRepError> {
    let (i, j) = (seq.0[k], seq.0[k + 1]);
    let target = seq.swapped(k);
    let g = if i == j {
        if datum.is_real(i) {
            f.demazure_x(k)?
        } else {
            f.demazure_y(k)?
        }
    } else if datum.bilinear(i, j) == 0 || !datum.has_arrow(i, j) {
        f.swap_xy(k)
    } else {
        // i → j: multiply s_k f by x_k^{−a_ji} + x_{k+1}^{−a_ij} on s_k 𝐢
        let n = f.nvars();
        let mut factor = MultiPoly::zero(n);
        factor.add_assign(&MultiPoly::one(n).mul_x_pow(k, (-datum.cartan(j, i)) as u16));
        factor.add_assign(&MultiPoly::one(n).mul_x_pow(k + 1, (-datum.cartan(i, j)) as u16));
        factor.mul(&f.swap_xy(k))
    };
    Ok((target, g))
}

fn check_pos(k: usize, n: usize) -> Result<(), PolyRepError> {
    if k >= n {
        Err(PolyRepError::PositionOutOfRange { k, n })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn seq(v: &[usize]) -> Sequence {
        Sequence::new(v.to_vec())
    }

    #[test]
    fn demazure_examples() {
        let d = BorcherdsCartanDatum::from_matrix(vec![vec![2]]).unwrap();
        let v = PolyVector::single(seq(&[0, 0]), MultiPoly::x(2, 0));
        let out = act_crossing(0, &seq(&[0, 0]), &v, &d).unwrap();
        assert_eq!(out, PolyVector::single(seq(&[0, 0]), MultiPoly::one(2)));

        let d = BorcherdsCartanDatum::from_matrix(vec![vec![-2]]).unwrap();
        let f = MultiPoly::x(2, 0).mul(&MultiPoly::y(2, 0));
        let out = act_crossing(0, &seq(&[0, 0]), &PolyVector::single(seq(&[0, 0]), f), &d).unwrap();
        assert_eq!(out, PolyVector::single(seq(&[0, 0]), MultiPoly::x(2, 1)));
        let f = MultiPoly::x(2, 0).mul(&MultiPoly::x(2, 0)).add(&MultiPoly::x(2, 1));
        let out = act_crossing(0, &seq(&[0, 0]), &PolyVector::single(seq(&[0, 0]), f), &d).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn swap_and_arrow_cases() {
        let d = BorcherdsCartanDatum::from_matrix(vec![vec![2, 0], vec![0, 2]]).unwrap();
        let v = PolyVector::single(seq(&[0, 1]), MultiPoly::x(2, 0));
        let out = act_crossing(0, &seq(&[0, 1]), &v, &d).unwrap();
        assert_eq!(out, PolyVector::single(seq(&[1, 0]), MultiPoly::x(2, 1)));

        // default orientation i0 → i1
        let d = BorcherdsCartanDatum::from_matrix(vec![vec![2, -1], vec![-2, 2]]).unwrap();
        let v = PolyVector::single(seq(&[0, 1]), MultiPoly::one(2));
        let out = act_crossing(0, &seq(&[0, 1]), &v, &d).unwrap();
        // x_1^{2} + x_2^{1} on (i1, i0)
        let expect = MultiPoly::one(2).mul_x_pow(0, 2).add(&MultiPoly::x(2, 1));
        assert_eq!(out, PolyVector::single(seq(&[1, 0]), expect));
        let back = act_crossing(0, &seq(&[1, 0]), &out, &d).unwrap();
        let expect = MultiPoly::one(2).mul_x_pow(1, 2).add(&MultiPoly::x(2, 0));
        assert_eq!(back, PolyVector::single(seq(&[0, 1]), expect));
    }

    #[test]
    fn projections() {
        let f = MultiPoly::x(2, 0);
        let v = PolyVector::single(seq(&[0, 1]), f.clone()).add(&PolyVector::single(seq(&[1, 0]), f.clone()));
        assert_eq!(act_idempotent(&seq(&[1, 1]), &v).unwrap_err(), PolyRepError::WeightMismatch("[1, 1] against a vector on [0, 1]".into()));
        let p = act_idempotent(&seq(&[0, 1]), &v).unwrap();
        let q = act_idempotent(&seq(&[1, 0]), &v).unwrap();
        assert_eq!(p.add(&q), v);
        assert_eq!(act_idempotent(&seq(&[0, 1]), &p).unwrap(), p);
        let xv = act_dot(1, &seq(&[0, 1]), &v).unwrap();
        assert_eq!(xv, PolyVector::single(seq(&[0, 1]), f.mul_x_pow(1, 1)));
    }

    #[test]
    fn division_detects_remainder() {
        let f = MultiPoly::x(2, 0).add(&MultiPoly::one(2));
        assert!(f.div_by_difference(0, 1).is_err());
        let g = MultiPoly::x(2, 0).sub(&MultiPoly::x(2, 1)).mul(&MultiPoly::y(2, 1).add(&MultiPoly::x(2, 0)));
        let q = g.div_by_difference(0, 1).unwrap();
        assert_eq!(q, MultiPoly::y(2, 1).add(&MultiPoly::x(2, 0)));
        assert_eq!(MultiPoly::monomials_up_to(1, 2).len(), 6);
        assert_eq!(f.scale(&rat(0)), MultiPoly::zero(2));
    }
}
