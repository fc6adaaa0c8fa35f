//! The algebra `R(ν)`: normal forms, multiplication by straightening,
//! graded dimensions, the anti-involution `ψ`, divided-power idempotents
//! and the center.
//!
//! A basis element is `τ_{ŵ} x^r 1_𝐢`: the lex-min reduced word of `w`
//! on top of a dot monomial indexed by source positions. Right
//! multiplication by dots is free, so every primitive step multiplies a
//! dotless `τ_ŵ 1_𝐢` on the left by one generator and is memoized on
//! `(𝐢, generator, w)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::braid::{apply_move, plan_to_canonical, BraidStrategy, Move};
use crate::datum::{BorcherdsCartanDatum, Index};
use crate::linalg::{rat, Matrix, Rat};
use crate::polyrep::{crossing_on_poly, PolyRepError, PolyVector};
use crate::qarith::{geom_inverse, series_div_exact, ClosedForm, LaurentPoly, QArithError, QSeries};
use crate::relations::Gen;
use crate::wordcomb::{
    all_sequences, crossing_degree, lexmin_reduced_word, render_word, transport_set, DividedSequence,
    Permutation, Sequence, Weight, WordError,
};

pub type Dots = Vec<u16>;
type Lin = BTreeMap<(Permutation, Dots), Rat>;
type MemoKey = (Sequence, Gen, Permutation);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlrError {
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("position {k} out of range for a sequence of length {n}")]
    PositionOutOfRange { k: usize, n: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    QArith(#[from] QArithError),
    #[error(transparent)]
    PolyRep(#[from] PolyRepError),
    #[error("element is not idempotent: {0}")]
    NotIdempotent(String),
    #[error("index {0} must be real")]
    RealIndexRequired(String),
    #[error("height {ht} exceeds the guard {guard}")]
    GuardExceeded { ht: usize, guard: usize },
}

/// `τ_ŵ x^r 1_𝐢`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub source: Sequence,
    pub w: Permutation,
    pub dots: Dots,
}

impl BasisElement {
    pub fn target(&self) -> Sequence {
        self.w.act(&self.source)
    }

    pub fn word(&self) -> Vec<usize> {
        lexmin_reduced_word(&self.w)
    }

    pub fn degree(&self, datum: &BorcherdsCartanDatum) -> i64 {
        crossing_degree(&self.w, &self.source, datum) + dot_degree(&self.source, &self.dots, datum)
    }
}

fn dot_degree(src: &Sequence, dots: &[u16], datum: &BorcherdsCartanDatum) -> i64 {
    src.0.iter().zip(dots).map(|(&i, &e)| 2 * datum.r(i) * e as i64).sum()
}

/// A finite combination of basis elements in one corner `1_𝐣 R 1_𝐢`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    source: Sequence,
    target: Sequence,
    terms: Lin,
}

impl AlgebraElement {
    pub fn zero(source: Sequence, target: Sequence) -> Self {
        Self {
            source,
            target,
            terms: Lin::new(),
        }
    }

    pub fn from_basis(b: &BasisElement) -> Self {
        let mut terms = Lin::new();
        terms.insert((b.w.clone(), b.dots.clone()), Rat::one());
        Self {
            target: b.target(),
            source: b.source.clone(),
            terms,
        }
    }

    fn from_lin(source: Sequence, target: Sequence, terms: Lin) -> Self {
        Self { source, target, terms }
    }

    pub fn source(&self) -> &Sequence {
        &self.source
    }

    pub fn target(&self) -> &Sequence {
        &self.target
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

    pub fn terms(&self) -> impl Iterator<Item = (BasisElement, &Rat)> + '_ {
        self.terms.iter().map(|((w, d), c)| {
            (
                BasisElement {
                    source: self.source.clone(),
                    w: w.clone(),
                    dots: d.clone(),
                },
                c,
            )
        })
    }

    pub fn coeff(&self, b: &BasisElement) -> Rat {
        if b.source != self.source {
            return Rat::zero();
        }
        self.terms
            .get(&(b.w.clone(), b.dots.clone()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn same_corner(&self, other: &AlgebraElement) {
        assert!(
            self.source == other.source && self.target == other.target,
            "elements live in different corners"
        );
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        self.same_corner(other);
        let mut terms = self.terms.clone();
        lin_add(&mut terms, &other.terms, &Rat::one(), None);
        Self::from_lin(self.source.clone(), self.target.clone(), terms)
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.same_corner(other);
        let mut terms = self.terms.clone();
        lin_add(&mut terms, &other.terms, &-Rat::one(), None);
        Self::from_lin(self.source.clone(), self.target.clone(), terms)
    }

    pub fn scale(&self, c: &Rat) -> AlgebraElement {
        let mut terms = Lin::new();
        lin_add(&mut terms, &self.terms, c, None);
        Self::from_lin(self.source.clone(), self.target.clone(), terms)
    }

    /// Right multiplication by `x^e` (dots at source positions).
    pub fn mul_dots_right(&self, e: &[u16]) -> AlgebraElement {
        let mut terms = Lin::new();
        lin_add(&mut terms, &self.terms, &Rat::one(), Some(e));
        Self::from_lin(self.source.clone(), self.target.clone(), terms)
    }

    /// The common degree of all terms, if homogeneous and nonzero.
    pub fn degree(&self, datum: &BorcherdsCartanDatum) -> Option<i64> {
        let mut degs = self.terms().map(|(b, _)| b.degree(datum));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Coordinates along `basis`; `None` if some term lies outside it.
    pub fn coordinates(&self, basis: &[BasisElement]) -> Option<Vec<Rat>> {
        let index: HashMap<(&Permutation, &Dots), usize> = basis
            .iter()
            .enumerate()
            .map(|(k, b)| ((&b.w, &b.dots), k))
            .collect();
        let mut v = vec![Rat::zero(); basis.len()];
        for ((w, d), c) in &self.terms {
            v[*index.get(&(w, d))?] = c.clone();
        }
        Some(v)
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        let corner = format!("{} → {}", self.source.render(datum), self.target.render(datum));
        if self.is_zero() {
            return format!("0 : {corner}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((w, d), c)| {
                let dots: Vec<String> = d.iter().map(|e| e.to_string()).collect();
                format!(
                    "{c} · τ[w={}; word={}] x^[{}]",
                    w.render(),
                    render_word(&lexmin_reduced_word(w)),
                    dots.join(",")
                )
            })
            .collect();
        format!("{} : {corner}", parts.join(" + "))
    }
}

fn lin_add(acc: &mut Lin, other: &Lin, c: &Rat, shift: Option<&[u16]>) {
    if c.is_zero() {
        return;
    }
    for ((w, d), x) in other {
        let d = match shift {
            Some(s) => d.iter().zip(s).map(|(a, b)| a + b).collect(),
            None => d.clone(),
        };
        let key = (w.clone(), d);
        let val = x * c;
        match acc.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(val);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += val;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

fn unit_lin(w: Permutation, n: usize) -> Lin {
    let mut l = Lin::new();
    l.insert((w, vec![0; n]), Rat::one());
    l
}

/// Which side an idempotent multiplies from in [`KlrAlgebra::gdim_truncation_by_rank`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `e · (1_𝐢̂ R 1_𝐣)`.
    Left,
    /// `(1_𝐣 R 1_𝐢̂) · e`.
    Right,
}

/// A divided-power idempotent `1_𝐢` for `𝐢` a divided sequence.
#[derive(Debug, Clone)]
pub struct DividedIdempotent {
    pub shape: DividedSequence,
    pub element: AlgebraElement,
}

/// One plain sequence of a Serre check: the even and odd sums of
/// divided-power projective graded dimensions.
#[derive(Debug, Clone)]
pub struct SerreLine {
    pub sequence: Sequence,
    pub even: ClosedForm,
    pub odd: ClosedForm,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SerreReport {
    pub i: Index,
    pub j: Index,
    pub m: usize,
    pub lines: Vec<SerreLine>,
}

impl SerreReport {
    pub fn holds(&self) -> bool {
        self.lines.iter().all(|l| l.holds)
    }
}

/// A candidate central element: for each label a polynomial in as many
/// variables as the label's multiplicity, evaluated on the dots carrying
/// that label. Missing labels contribute the constant 1.
pub type CenterCandidate = BTreeMap<Index, BTreeMap<Vec<u16>, Rat>>;

/// `R(ν)` for all `ν` at once, sharing one memo of primitive steps.
pub struct KlrAlgebra {
    datum: BorcherdsCartanDatum,
    strategy: BraidStrategy,
    memo: RwLock<HashMap<MemoKey, Arc<Lin>>>,
}

impl KlrAlgebra {
    pub fn new(datum: BorcherdsCartanDatum) -> Self {
        Self::with_strategy(datum, BraidStrategy::Constructive)
    }

    pub fn with_strategy(datum: BorcherdsCartanDatum, strategy: BraidStrategy) -> Self {
        Self {
            datum,
            strategy,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn datum(&self) -> &BorcherdsCartanDatum {
        &self.datum
    }

    pub fn memo_size(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn idempotent(&self, seq: &Sequence) -> AlgebraElement {
        let n = seq.len();
        AlgebraElement::from_lin(seq.clone(), seq.clone(), unit_lin(Permutation::identity(n), n))
    }

    /// `x_{k,𝐢}`.
    pub fn dot(&self, k: usize, seq: &Sequence) -> Result<AlgebraElement, KlrError> {
        check_pos(k, seq.len())?;
        let mut d = vec![0; seq.len()];
        d[k] = 1;
        Ok(AlgebraElement::from_basis(&BasisElement {
            source: seq.clone(),
            w: Permutation::identity(seq.len()),
            dots: d,
        }))
    }

    /// `τ_{k,𝐢}`, from `𝐢` to `s_k 𝐢`.
    pub fn crossing(&self, k: usize, seq: &Sequence) -> Result<AlgebraElement, KlrError> {
        check_pos(k + 1, seq.len())?;
        Ok(AlgebraElement::from_basis(&BasisElement {
            source: seq.clone(),
            w: Permutation::simple(seq.len(), k),
            dots: vec![0; seq.len()],
        }))
    }

    pub fn generator(&self, g: Gen, seq: &Sequence) -> Result<AlgebraElement, KlrError> {
        match g {
            Gen::Dot(k) => self.dot(k, seq),
            Gen::Cross(k) => self.crossing(k, seq),
        }
    }

    /// All generators with bottom sequence `seq`.
    pub fn generators_on(&self, seq: &Sequence) -> Vec<Gen> {
        let n = seq.len();
        (0..n)
            .map(Gen::Dot)
            .chain((0..n.saturating_sub(1)).map(Gen::Cross))
            .collect()
    }

    fn memo_get(&self, key: &MemoKey) -> Option<Arc<Lin>> {
        self.memo.read().unwrap().get(key).cloned()
    }

    /// `g · τ_ŵ 1_src`, with `g` sitting on `w(src)`.
    fn gen_on_basis(&self, src: &Sequence, g: Gen, w: &Permutation) -> Arc<Lin> {
        let key = (src.clone(), g, w.clone());
        if let Some(v) = self.memo_get(&key) {
            return v;
        }
        let lin = match g {
            Gen::Dot(p) => self.dot_on_basis(src, p, w),
            Gen::Cross(k) => self.cross_on_basis(src, k, w),
        };
        let lin = Arc::new(lin);
        self.memo.write().unwrap().insert(key, lin.clone());
        lin
    }

    fn left_mul_lin(&self, g: Gen, src: &Sequence, lin: &Lin) -> Lin {
        let mut out = Lin::new();
        for ((w, d), c) in lin {
            let base = self.gen_on_basis(src, g, w);
            lin_add(&mut out, &base, c, Some(d));
        }
        out
    }

    fn left_mul_dots_lin(&self, src: &Sequence, exps: &[(usize, u16)], mut lin: Lin) -> Lin {
        for &(p, e) in exps {
            for _ in 0..e {
                lin = self.left_mul_lin(Gen::Dot(p), src, &lin);
            }
        }
        lin
    }

    fn left_mul_word_lin(&self, src: &Sequence, word: &[usize], mut lin: Lin) -> Lin {
        for &c in word.iter().rev() {
            lin = self.left_mul_lin(Gen::Cross(c), src, &lin);
        }
        lin
    }

    fn normalize_word_lin(&self, src: &Sequence, word: &[usize]) -> Lin {
        let n = src.len();
        self.left_mul_word_lin(src, word, unit_lin(Permutation::identity(n), n))
    }

    /// Slides a dot at top position `p` down through `τ_ŵ`.
    fn dot_on_basis(&self, src: &Sequence, p: usize, w: &Permutation) -> Lin {
        let n = src.len();
        let word = lexmin_reduced_word(w);
        let l = word.len();
        let mut below = vec![src.clone(); l];
        let mut seq = src.clone();
        for t in (0..l).rev() {
            below[t] = seq.clone();
            seq = seq.swapped(word[t]);
        }
        let mut out = Lin::new();
        let mut pos = p;
        for t in 0..l {
            let c = word[t];
            let sigma = &below[t];
            let equal_real = sigma.0[c] == sigma.0[c + 1] && self.datum.is_real(sigma.0[c]);
            let sign = if pos == c {
                pos = c + 1;
                1
            } else if pos == c + 1 {
                pos = c;
                -1
            } else {
                continue;
            };
            if equal_real {
                let mut shorter = word.clone();
                shorter.remove(t);
                let corr = self.normalize_word_lin(src, &shorter);
                lin_add(&mut out, &corr, &rat(sign), None);
            }
        }
        let mut d = vec![0; n];
        d[pos] = 1;
        let mut main = Lin::new();
        main.insert((w.clone(), d), Rat::one());
        lin_add(&mut out, &main, &Rat::one(), None);
        out
    }

    fn cross_on_basis(&self, src: &Sequence, k: usize, w: &Permutation) -> Lin {
        let n = src.len();
        let sw = w.left_mul_simple(k);
        if !w.is_left_descent(k) {
            let mut word = vec![k];
            word.extend(lexmin_reduced_word(w));
            let mut out = unit_lin(sw, n);
            for mv in plan_to_canonical(n, &word, self.strategy) {
                if let Move::Braid(t) = mv {
                    let corr = self.braid_correction(src, &word, t);
                    lin_add(&mut out, &corr, &Rat::one(), None);
                }
                apply_move(&mut word, mv);
            }
            out
        } else {
            // τ_k τ_ŵ = τ_k² τ_û − τ_k C with τ_k τ_û = τ_ŵ + C
            let u = sw;
            let sigma = u.act(src);
            let (i, j) = (sigma.0[k], sigma.0[k + 1]);
            let mut out = Lin::new();
            if i != j {
                let base = unit_lin(u.clone(), n);
                if self.datum.bilinear(i, j) == 0 {
                    lin_add(&mut out, &base, &Rat::one(), None);
                } else {
                    let a = (-self.datum.cartan(i, j)) as u16;
                    let b = (-self.datum.cartan(j, i)) as u16;
                    let t1 = self.left_mul_dots_lin(src, &[(k, a)], base.clone());
                    let t2 = self.left_mul_dots_lin(src, &[(k + 1, b)], base);
                    lin_add(&mut out, &t1, &Rat::one(), None);
                    lin_add(&mut out, &t2, &Rat::one(), None);
                }
            }
            let mut c = (*self.gen_on_basis(src, Gen::Cross(k), &u)).clone();
            lin_add(&mut c, &unit_lin(w.clone(), n), &-Rat::one(), None);
            let kc = self.left_mul_lin(Gen::Cross(k), src, &c);
            lin_add(&mut out, &kc, &-Rat::one(), None);
            out
        }
    }

    /// Correction emitted by the braid move at offset `t` of `word`:
    /// `±A · Σ x_k^a x_{k+2}^b · B` when the triple meets an `iji` pattern
    /// with `i` real, zero otherwise.
    fn braid_correction(&self, src: &Sequence, word: &[usize], t: usize) -> Lin {
        let n = src.len();
        let kk = word[t].min(word[t + 1]);
        let sigma = Permutation::from_word(n, &word[t + 3..]).act(src);
        let (i, j, l) = (sigma.0[kk], sigma.0[kk + 1], sigma.0[kk + 2]);
        if !(i == l && i != j && self.datum.is_real(i) && self.datum.bilinear(i, j) != 0) {
            return Lin::new();
        }
        let sign = if word[t] == kk { Rat::one() } else { -Rat::one() };
        let m = (-self.datum.cartan(i, j) - 1) as u16;
        let below = self.normalize_word_lin(src, &word[t + 3..]);
        let mut out = Lin::new();
        for a in 0..=m {
            let dotted = self.left_mul_dots_lin(src, &[(kk, a), (kk + 2, m - a)], below.clone());
            let full = self.left_mul_word_lin(src, &word[..t], dotted);
            lin_add(&mut out, &full, &sign, None);
        }
        out
    }

    /// `g · a` with `g` sitting on the target of `a`.
    pub fn left_mul_gen(&self, g: Gen, a: &AlgebraElement) -> AlgebraElement {
        let lin = self.left_mul_lin(g, &a.source, &a.terms);
        AlgebraElement::from_lin(a.source.clone(), g.target(&a.target), lin)
    }

    /// Normal form of the word `τ_{c_1} ... τ_{c_l} 1_src` (any word).
    pub fn normalize_word(&self, src: &Sequence, word: &[usize]) -> AlgebraElement {
        let lin = self.normalize_word_lin(src, word);
        let tgt = Permutation::from_word(src.len(), word).act(src);
        AlgebraElement::from_lin(src.clone(), tgt, lin)
    }

    /// The product `a · b`; zero unless the source of `a` is the target of `b`.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        if a.source != b.target {
            return AlgebraElement::zero(b.source.clone(), a.target.clone());
        }
        let src = &b.source;
        let mut out = Lin::new();
        for ((w, d), c) in &a.terms {
            let dots: Vec<(usize, u16)> = d.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
            let lin = self.left_mul_dots_lin(src, &dots, b.terms.clone());
            let lin = self.left_mul_word_lin(src, &lexmin_reduced_word(w), lin);
            lin_add(&mut out, &lin, c, None);
        }
        AlgebraElement::from_lin(src.clone(), a.target.clone(), out)
    }

    /// The anti-involution flipping diagrams upside down.
    pub fn psi(&self, a: &AlgebraElement) -> AlgebraElement {
        let src = &a.target;
        let mut out = Lin::new();
        for ((w, d), c) in &a.terms {
            let mut word = lexmin_reduced_word(w);
            word.reverse();
            let lin = self.normalize_word_lin(src, &word);
            let dots: Vec<(usize, u16)> = d.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
            let lin = self.left_mul_dots_lin(src, &dots, lin);
            lin_add(&mut out, &lin, c, None);
        }
        AlgebraElement::from_lin(a.target.clone(), a.source.clone(), out)
    }

    /// Action on the polynomial representation, one generator at a time.
    pub fn act_on_polyrep(&self, a: &AlgebraElement, v: &PolyVector) -> Result<PolyVector, KlrError> {
        if let Some((s, _)) = v.components().next() {
            if s.weight() != a.source.weight() {
                return Err(KlrError::WeightMismatch(format!("{:?} vs {:?}", s.0, a.source.0)));
            }
        }
        let Some(f) = v.component(&a.source) else {
            return Ok(PolyVector::zero());
        };
        let mut out = PolyVector::zero();
        for ((w, d), c) in &a.terms {
            let mut g = f.mul_x_monomial(d);
            let mut seq = a.source.clone();
            for &k in lexmin_reduced_word(w).iter().rev() {
                let (t, h) = crossing_on_poly(k, &seq, &g, &self.datum)?;
                seq = t;
                g = h;
            }
            out.add_component(seq, g.scale(c));
        }
        Ok(out)
    }

    /// Closed form of `gdim 1_tgt R(ν) 1_src`.
    pub fn gdim_corner_closed(&self, src: &Sequence, tgt: &Sequence) -> Result<ClosedForm, KlrError> {
        gdim_corner_closed(&self.datum, src, tgt)
    }

    pub fn gdim_corner(&self, src: &Sequence, tgt: &Sequence, cap: i64) -> Result<QSeries, KlrError> {
        Ok(self.gdim_corner_closed(src, tgt)?.expand(cap)?)
    }

    /// Basis elements `1_tgt R 1_src` of degree `d`, sorted.
    pub fn basis_of_degree(&self, src: &Sequence, tgt: &Sequence, d: i64) -> Result<Vec<BasisElement>, KlrError> {
        let mut out = Vec::new();
        let weights: Vec<i64> = src.0.iter().map(|&i| 2 * self.datum.r(i)).collect();
        for w in transport_set(src, tgt)? {
            let rem = d - crossing_degree(&w, src, &self.datum);
            if rem < 0 {
                continue;
            }
            for dots in compositions(&weights, rem) {
                out.push(BasisElement {
                    source: src.clone(),
                    w: w.clone(),
                    dots,
                });
            }
        }
        out.sort();
        Ok(out)
    }

    /// Lowest degree present in `1_tgt R 1_src`.
    pub fn min_degree(&self, src: &Sequence, tgt: &Sequence) -> Result<Option<i64>, KlrError> {
        Ok(transport_set(src, tgt)?
            .iter()
            .map(|w| crossing_degree(w, src, &self.datum))
            .min())
    }

    /// `x_1^{n-1} ... x_{n-1} τ_{w_0}` on each block, tensored together.
    pub fn divided_idempotent(&self, shape: &DividedSequence) -> Result<DividedIdempotent, KlrError> {
        let shape = DividedSequence::new(shape.blocks().to_vec(), &self.datum)?;
        let hat = shape.hat();
        let n = hat.len();
        let mut images = Vec::with_capacity(n);
        let mut dots = Vec::new();
        let mut off = 0;
        for &(_, m) in shape.blocks() {
            images.extend((0..m).rev().map(|a| off + a));
            for a in 0..m {
                dots.push((off + a, (m - 1 - a) as u16));
            }
            off += m;
        }
        let w0 = Permutation::from_images(images)?;
        let lin = self.left_mul_dots_lin(&hat, &dots, unit_lin(w0, n));
        let element = AlgebraElement::from_lin(hat.clone(), hat.clone(), lin);
        if self.mul(&element, &element) != element {
            return Err(KlrError::NotIdempotent(element.render(&self.datum)));
        }
        Ok(DividedIdempotent { shape, element })
    }

    /// `gdim 1_𝐢 R 1_𝐣` for a divided sequence `𝐢`.
    pub fn gdim_divided_corner(&self, shape: &DividedSequence, j: &Sequence, cap: i64) -> Result<QSeries, KlrError> {
        let closed = self.gdim_divided_corner_closed(shape, j)?;
        Ok(closed.expand(cap)?)
    }

    pub fn gdim_divided_corner_closed(&self, shape: &DividedSequence, j: &Sequence) -> Result<ClosedForm, KlrError> {
        let plain = self.gdim_corner_closed(&shape.hat(), j)?;
        let numerator = plain.numerator.div_exact(&shape.factorial(&self.datum))?;
        Ok(ClosedForm::new(numerator.shift(shape.angle(&self.datum)), plain.geometric))
    }

    /// The same graded dimension through the series division route.
    pub fn gdim_divided_corner_by_series(&self, shape: &DividedSequence, j: &Sequence, cap: i64) -> Result<QSeries, KlrError> {
        let fact = shape.factorial(&self.datum);
        let extra = fact.max_exp().unwrap_or(0);
        let num = self.gdim_corner(&shape.hat(), j, cap + extra + shape.angle(&self.datum))?;
        let s = series_div_exact(&num, &fact)?;
        Ok(s.mul_poly(&LaurentPoly::q_pow(shape.angle(&self.datum))).truncate(cap))
    }

    /// `gdim 1_𝐤 P_shape` for the projective `R 1_shape`, as
    /// `gdim_corner(𝐤, shape-hat) / shape!`.
    pub fn divided_projective_closed(&self, k: &Sequence, shape: &DividedSequence) -> Result<ClosedForm, KlrError> {
        let plain = self.gdim_corner_closed(k, &shape.hat())?;
        let numerator = plain.numerator.div_exact(&shape.factorial(&self.datum))?;
        Ok(ClosedForm::new(numerator, plain.geometric))
    }

    /// Compares `Σ_c even P_{i^(c) j i^(m-c)}` with the odd sum on every
    /// plain sequence of weight `m i + j`, `m = 1 − a_ij`.
    pub fn serre_character_check(&self, i: Index, j: Index) -> Result<SerreReport, KlrError> {
        if !self.datum.is_real(i) {
            return Err(KlrError::RealIndexRequired(self.datum.label(i).to_string()));
        }
        if i == j {
            return Err(KlrError::WeightMismatch("the Serre check needs j ≠ i".into()));
        }
        let m = (1 - self.datum.cartan(i, j)) as usize;
        let mut shapes = Vec::new();
        for c in 0..=m {
            let mut blocks = Vec::new();
            if c > 0 {
                blocks.push((i, c));
            }
            blocks.push((j, 1));
            if m - c > 0 {
                blocks.push((i, m - c));
            }
            shapes.push((c, DividedSequence::new(blocks, &self.datum)?));
        }
        let nu = Weight::from_pairs([(i, m), (j, 1)]);
        let mut lines = Vec::new();
        for k in all_sequences(&nu) {
            let geometric: Vec<i64> = k.0.iter().map(|&l| 2 * self.datum.r(l)).collect();
            let mut even = ClosedForm::new(LaurentPoly::zero(), geometric.clone());
            let mut odd = ClosedForm::new(LaurentPoly::zero(), geometric);
            for (c, shape) in &shapes {
                let g = self.divided_projective_closed(&k, shape)?;
                if c % 2 == 0 {
                    even = even.add(&g);
                } else {
                    odd = odd.add(&g);
                }
            }
            let holds = even.numerator == odd.numerator && even.geometric == odd.geometric;
            lines.push(SerreLine {
                sequence: k,
                even,
                odd,
                holds,
            });
        }
        Ok(SerreReport { i, j, m, lines })
    }

    /// Graded dimension of `e · 1_𝐢̂ R 1_𝐣` (or `1_𝐣 R 1_𝐢̂ · e`) up to
    /// `cap`, by exact rank of multiplication on each graded piece.
    pub fn gdim_truncation_by_rank(
        &self,
        e: &AlgebraElement,
        j: &Sequence,
        side: Side,
        cap: i64,
    ) -> Result<LaurentPoly, KlrError> {
        let hat = e.source().clone();
        let (src, tgt) = match side {
            Side::Left => (j.clone(), hat.clone()),
            Side::Right => (hat.clone(), j.clone()),
        };
        let mut out = LaurentPoly::zero();
        let Some(lo) = self.min_degree(&src, &tgt)? else {
            return Ok(out);
        };
        for d in lo..=cap {
            let basis = self.basis_of_degree(&src, &tgt, d)?;
            if basis.is_empty() {
                continue;
            }
            let rows: Vec<Vec<Rat>> = basis
                .iter()
                .map(|b| {
                    let be = AlgebraElement::from_basis(b);
                    let prod = match side {
                        Side::Left => self.mul(e, &be),
                        Side::Right => self.mul(&be, e),
                    };
                    prod.coordinates(&basis).expect("degree-zero idempotent preserves the graded piece")
                })
                .collect();
            let r = Matrix::from_rows(basis.len(), rows).rank();
            out.add_term(d, BigInt::from(r));
        }
        Ok(out)
    }

    /// The diagonal element `Σ_𝐢 z_𝐢` of a candidate, on one sequence.
    pub fn candidate_on(&self, cand: &CenterCandidate, seq: &Sequence) -> AlgebraElement {
        let n = seq.len();
        let mut acc: BTreeMap<Vec<u16>, Rat> = BTreeMap::from([(vec![0; n], Rat::one())]);
        for (&label, poly) in cand {
            let positions: Vec<usize> = (0..n).filter(|&p| seq.0[p] == label).collect();
            let mut next = BTreeMap::new();
            for (e1, c1) in &acc {
                for (mono, c2) in poly {
                    assert_eq!(mono.len(), positions.len(), "candidate arity must match the multiplicity");
                    let mut e = e1.clone();
                    for (&p, &x) in positions.iter().zip(mono) {
                        e[p] += x;
                    }
                    let v: &mut Rat = next.entry(e).or_insert_with(Rat::zero);
                    *v += c1 * c2;
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
        let lin = acc
            .into_iter()
            .map(|(e, c)| ((Permutation::identity(n), e), c))
            .collect();
        AlgebraElement::from_lin(seq.clone(), seq.clone(), lin)
    }

    /// Whether the candidate commutes with every generator of `R(ν)`.
    pub fn center_check(&self, cand: &CenterCandidate, nu: &Weight) -> Result<bool, KlrError> {
        Ok(self.center_failure(cand, nu)?.is_none())
    }

    /// The first generator failing to commute with the candidate.
    pub fn center_failure(&self, cand: &CenterCandidate, nu: &Weight) -> Result<Option<(Sequence, Gen)>, KlrError> {
        for (&label, poly) in cand {
            for mono in poly.keys() {
                if mono.len() != nu.get(label) {
                    return Err(KlrError::WeightMismatch(format!(
                        "candidate for {} has arity {}, weight has {}",
                        self.datum.label(label),
                        mono.len(),
                        nu.get(label)
                    )));
                }
            }
        }
        for seq in all_sequences(nu) {
            let z = self.candidate_on(cand, &seq);
            for g in self.generators_on(&seq) {
                let ge = self.generator(g, &seq)?;
                let zt = self.candidate_on(cand, ge.target());
                if self.mul(&zt, &ge) != self.mul(&ge, &z) {
                    return Ok(Some((seq, g)));
                }
            }
        }
        Ok(None)
    }

    /// `Π_i Π_{c=1}^{ν_i} (1 − q_i^{2c})^{-1}`.
    pub fn gdim_center(&self, nu: &Weight, cap: i64) -> Result<QSeries, KlrError> {
        let mut s = QSeries::from_poly(&LaurentPoly::one(), cap);
        for (i, m) in nu.support() {
            for c in 1..=m as i64 {
                s = s.mul(&geom_inverse(2 * self.datum.r(i) * c, cap)?);
            }
        }
        Ok(s)
    }

    /// Graded dimension of the centre up to `cap`, by solving the
    /// commutation equations degree by degree.
    pub fn centralizer_gdim(&self, nu: &Weight, cap: i64) -> Result<LaurentPoly, KlrError> {
        let seqs = all_sequences(nu);
        let mut lo = i64::MAX;
        for s in &seqs {
            if let Some(d) = self.min_degree(s, s)? {
                lo = lo.min(d);
            }
        }
        let mut out = LaurentPoly::zero();
        for d in lo..=cap {
            let mut unknowns: Vec<BasisElement> = Vec::new();
            for s in &seqs {
                unknowns.extend(self.basis_of_degree(s, s, d)?);
            }
            if unknowns.is_empty() {
                continue;
            }
            // one block of equations per generator
            let mut columns: Vec<Vec<Rat>> = vec![Vec::new(); unknowns.len()];
            for s in &seqs {
                for g in self.generators_on(s) {
                    let ge = self.generator(g, s)?;
                    let deg = d + ge.degree(&self.datum).unwrap_or(0);
                    let tgt = ge.target().clone();
                    let basis = self.basis_of_degree(s, &tgt, deg)?;
                    for (col, b) in unknowns.iter().enumerate() {
                        let be = AlgebraElement::from_basis(b);
                        let mut v = AlgebraElement::zero(s.clone(), tgt.clone());
                        if b.source == tgt {
                            v = v.add(&self.mul(&be, &ge));
                        }
                        if &b.source == s {
                            v = v.sub(&self.mul(&ge, &be));
                        }
                        columns[col].extend(v.coordinates(&basis).expect("commutator stays homogeneous"));
                    }
                }
            }
            let rows = columns[0].len();
            let m = Matrix::from_columns(rows, &columns);
            let kernel = unknowns.len() - m.rank();
            out.add_term(d, BigInt::from(kernel));
        }
        Ok(out)
    }

    /// A random element of `1_tgt R 1_src` with small integer coefficients.
    pub fn random_element<R: Rng>(
        &self,
        src: &Sequence,
        tgt: &Sequence,
        rng: &mut R,
        max_terms: usize,
        max_dot: u16,
    ) -> Result<AlgebraElement, KlrError> {
        let perms = transport_set(src, tgt)?;
        let n = src.len();
        let mut lin = Lin::new();
        let terms = rng.gen_range(1..=max_terms.max(1));
        for _ in 0..terms {
            let w = perms[rng.gen_range(0..perms.len())].clone();
            let dots: Dots = (0..n).map(|_| rng.gen_range(0..=max_dot)).collect();
            let mut c = rng.gen_range(-3i64..=3);
            if c == 0 {
                c = 1;
            }
            let e = lin.entry((w, dots)).or_insert_with(Rat::zero);
            *e += rat(c);
        }
        lin.retain(|_, v| !v.is_zero());
        Ok(AlgebraElement::from_lin(src.clone(), tgt.clone(), lin))
    }
}

fn check_pos(k: usize, n: usize) -> Result<(), KlrError> {
    if k >= n {
        Err(KlrError::PositionOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// `Σ_{w: src → tgt} q^{deg w} / Π_k (1 − q^{2 r_{src_k}})`.
pub fn gdim_corner_closed(datum: &BorcherdsCartanDatum, src: &Sequence, tgt: &Sequence) -> Result<ClosedForm, KlrError> {
    let mut num = LaurentPoly::zero();
    for w in transport_set(src, tgt)? {
        num.add_term(crossing_degree(&w, src, datum), BigInt::one());
    }
    let geometric = src.0.iter().map(|&i| 2 * datum.r(i)).collect();
    Ok(ClosedForm::new(num, geometric))
}

/// Exponent vectors `e ≥ 0` with `Σ weights_k e_k = total`.
fn compositions(weights: &[i64], total: i64) -> Vec<Dots> {
    fn rec(weights: &[i64], k: usize, left: i64, cur: &mut Dots, out: &mut Vec<Dots>) {
        if k == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut e = 0;
        while e * weights[k] <= left {
            cur[k] = e as u16;
            rec(weights, k + 1, left - e * weights[k], cur, out);
            e += 1;
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    rec(weights, 0, total, &mut vec![0; weights.len()], &mut out);
    out
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dots: Vec<String> = self.dots.iter().map(|e| e.to_string()).collect();
        write!(
            f,
            "τ[w={}; word={}] x^[{}] on {:?}",
            self.w.render(),
            render_word(&self.word()),
            dots.join(","),
            self.source.0
        )
    }
}

/// Elementary symmetric polynomial `e_k` in `m` variables.
pub fn elementary_symmetric(m: usize, k: usize) -> BTreeMap<Vec<u16>, Rat> {
    let mut out = BTreeMap::new();
    fn rec(start: usize, left: usize, cur: &mut Vec<u16>, out: &mut BTreeMap<Vec<u16>, Rat>) {
        if left == 0 {
            out.insert(cur.clone(), Rat::one());
            return;
        }
        for p in start..cur.len() {
            cur[p] = 1;
            rec(p + 1, left - 1, cur, out);
            cur[p] = 0;
        }
    }
    rec(0, k, &mut vec![0; m], &mut out);
    out
}

#[cfg(test)]
mod tests;
