//! Finite-dimensional graded modules at desk scale and the character
//! calculus around them: restriction to idempotent truncations, shuffle
//! induction, `ε_i`, `Δ_{i^n}` and the Mackey filtration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::convert::Infallible;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::algebra::{AlgebraElement, BasisElement, KlrAlgebra, KlrError};
use crate::datum::{BorcherdsCartanDatum, Index};
use crate::linalg::{invariant_closure, nullspace, unit_vec, Matrix, Rat, Subspace};
use crate::qarith::{quantum_factorial, LaurentPoly, QArithError, QSeries};
use crate::relations::{relation_instances, residual, Gen, GeneratorAction};
use crate::wordcomb::{
    all_permutations, all_sequences, coset_reps_min, crossing_degree, shuffles, Permutation, Sequence, Weight,
    WordError,
};

/// Default bound on `n` (or `n + m`) for module constructions.
pub const DEFAULT_MODULE_GUARD: usize = 5;
/// Hard limit accepted for any guard.
pub const MAX_MODULE_GUARD: usize = 6;
/// Largest dimension the lattice probe accepts.
pub const PROBE_GUARD: usize = 720;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("index {0} is real; an imaginary index is required")]
    RealIndex(String),
    #[error("index {0} is imaginary; a real index is required")]
    ImaginaryIndex(String),
    #[error("size {n} exceeds the guard {guard}")]
    GuardExceeded { n: usize, guard: usize },
    #[error("relation {relation} fails on {sequence} at basis vector {basis}")]
    RelationViolated {
        relation: &'static str,
        sequence: String,
        basis: usize,
    },
    #[error("generator {generator} is not homogeneous on basis vector {basis}")]
    NotHomogeneous { generator: String, basis: usize },
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("the generators do not act nilpotently; the probe needs a nilpotent action")]
    NotNilpotent,
    #[error("subspace is not a submodule")]
    NotSubmodule,
    #[error("the module has no unique maximal submodule")]
    NoUniqueHead,
    #[error("malformed module: {0}")]
    Malformed(String),
    #[error("straightening disagrees with the coset factorization of {0}")]
    CosetFactorization(String),
    #[error(transparent)]
    Klr(#[from] KlrError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    QArith(#[from] QArithError),
}

pub type SparseVec = BTreeMap<usize, Rat>;

fn sparse_unit(b: usize) -> SparseVec {
    BTreeMap::from([(b, Rat::one())])
}

fn sparse_axpy(acc: &mut SparseVec, c: &Rat, v: &SparseVec) {
    for (&k, x) in v {
        let e = acc.entry(k).or_insert_with(Rat::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(&k);
        }
    }
}

fn check_guard(n: usize, guard: usize) -> Result<(), RepError> {
    let guard = guard.min(MAX_MODULE_GUARD);
    if n > guard {
        Err(RepError::GuardExceeded { n, guard })
    } else {
        Ok(())
    }
}

/// A finite-dimensional graded module over `R(ν)`. Generators are stored as
/// images of basis vectors; `x_{k,𝐢}` acts by the dot matrix after
/// projecting onto the `𝐢` component.
#[derive(Debug, Clone)]
pub struct FinModule {
    datum: BorcherdsCartanDatum,
    weight: Weight,
    components: Vec<Sequence>,
    degrees: Vec<i64>,
    dots: Vec<Vec<SparseVec>>,
    crosses: Vec<Vec<SparseVec>>,
}

impl FinModule {
    /// Builds a module, checking homogeneity and every defining relation.
    pub fn new(
        datum: &BorcherdsCartanDatum,
        weight: Weight,
        components: Vec<Sequence>,
        degrees: Vec<i64>,
        dots: Vec<Vec<SparseVec>>,
        crosses: Vec<Vec<SparseVec>>,
    ) -> Result<Self, RepError> {
        let n = weight.ht();
        let dim = components.len();
        if degrees.len() != dim || dots.len() != n || crosses.len() != n.saturating_sub(1) {
            return Err(RepError::Malformed("inconsistent lengths".into()));
        }
        if dots.iter().chain(&crosses).any(|m| m.len() != dim) {
            return Err(RepError::Malformed("action with the wrong number of columns".into()));
        }
        if let Some(c) = components.iter().find(|c| c.weight() != weight) {
            return Err(RepError::WeightMismatch(format!("component {:?}", c.0)));
        }
        let m = Self {
            datum: datum.clone(),
            weight,
            components,
            degrees,
            dots,
            crosses,
        };
        m.check_homogeneous()?;
        m.check_relations()?;
        Ok(m)
    }

    fn check_homogeneous(&self) -> Result<(), RepError> {
        for b in 0..self.dim() {
            let src = &self.components[b];
            let gens = (0..self.dots.len()).map(Gen::Dot).chain((0..self.crosses.len()).map(Gen::Cross));
            for g in gens {
                let (img, deg) = match g {
                    Gen::Dot(k) => (&self.dots[k][b], 2 * self.datum.r(src.0[k])),
                    Gen::Cross(k) => (&self.crosses[k][b], -self.datum.bilinear(src.0[k], src.0[k + 1])),
                };
                let tgt = g.target(src);
                for &c in img.keys() {
                    if c >= self.dim() || self.components[c] != tgt || self.degrees[c] != self.degrees[b] + deg {
                        return Err(RepError::NotHomogeneous {
                            generator: format!("{g:?}"),
                            basis: b,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_relations(&self) -> Result<(), RepError> {
        let seqs: BTreeSet<&Sequence> = self.components.iter().collect();
        let jobs: Vec<_> = seqs
            .into_iter()
            .flat_map(|s| relation_instances(&self.datum, s))
            .collect();
        jobs.par_iter().try_for_each(|rel| {
            for b in (0..self.dim()).filter(|&b| self.components[b] == rel.seq) {
                let Ok(r) = residual(self, rel, &sparse_unit(b));
                if !r.is_empty() {
                    return Err(RepError::RelationViolated {
                        relation: rel.family.name(),
                        sequence: rel.seq.render(&self.datum),
                        basis: b,
                    });
                }
            }
            Ok(())
        })
    }

    pub fn datum(&self) -> &BorcherdsCartanDatum {
        &self.datum
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn components(&self) -> &[Sequence] {
        &self.components
    }

    fn images(&self, g: Gen) -> &[SparseVec] {
        match g {
            Gen::Dot(k) => &self.dots[k],
            Gen::Cross(k) => &self.crosses[k],
        }
    }

    /// Full-space matrix of `g` summed over all components.
    pub fn generator_matrix(&self, g: Gen) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zero(dim, dim);
        for (b, img) in self.images(g).iter().enumerate() {
            for (&c, x) in img {
                m.set(c, b, x.clone());
            }
        }
        m
    }

    /// `g · 1_seq` as a full-space matrix.
    fn generator_on(&self, g: Gen, seq: &Sequence) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zero(dim, dim);
        for (b, img) in self.images(g).iter().enumerate() {
            if &self.components[b] != seq {
                continue;
            }
            for (&c, x) in img {
                m.set(c, b, x.clone());
            }
        }
        m
    }

    fn projection(&self, seq: &Sequence) -> Matrix {
        let dim = self.dim();
        let mut m = Matrix::zero(dim, dim);
        for b in 0..dim {
            if &self.components[b] == seq {
                m.set(b, b, Rat::one());
            }
        }
        m
    }

    fn distinct_components(&self) -> Vec<Sequence> {
        let s: BTreeSet<Sequence> = self.components.iter().cloned().collect();
        s.into_iter().collect()
    }

    /// Matrices of every `g 1_𝐢` with `g` a dot or crossing.
    fn positive_operators(&self) -> Vec<Matrix> {
        let mut ops = Vec::new();
        for s in self.distinct_components() {
            for k in 0..self.dots.len() {
                ops.push(self.generator_on(Gen::Dot(k), &s));
            }
            for k in 0..self.crosses.len() {
                ops.push(self.generator_on(Gen::Cross(k), &s));
            }
        }
        ops.retain(|m| !m.is_zero());
        ops
    }

    fn all_operators(&self) -> Vec<Matrix> {
        let mut ops = self.positive_operators();
        let comps = self.distinct_components();
        if comps.len() > 1 {
            ops.extend(comps.iter().map(|s| self.projection(s)));
        }
        ops
    }

    pub fn is_submodule(&self, sub: &Subspace) -> bool {
        self.all_operators()
            .iter()
            .all(|op| sub.basis().iter().all(|v| sub.contains(&op.apply(v))))
    }

    /// `M / sub` on the basis vectors not used as pivots of `sub`.
    pub fn quotient(&self, sub: &Subspace) -> Result<FinModule, RepError> {
        if sub.ambient() != self.dim() || !self.is_submodule(sub) {
            return Err(RepError::NotSubmodule);
        }
        let pivots: BTreeSet<usize> = sub.pivots().iter().copied().collect();
        let keep: Vec<usize> = (0..self.dim()).filter(|b| !pivots.contains(b)).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let project = |img: &SparseVec| -> SparseVec {
            let mut dense = vec![Rat::zero(); self.dim()];
            for (&c, x) in img {
                dense[c] = x.clone();
            }
            let r = sub.reduce(&dense);
            r.into_iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(c, x)| (pos[&c], x))
                .collect()
        };
        let act = |ms: &Vec<Vec<SparseVec>>| -> Vec<Vec<SparseVec>> {
            ms.iter()
                .map(|cols| keep.iter().map(|&b| project(&cols[b])).collect())
                .collect()
        };
        FinModule::new(
            &self.datum,
            self.weight.clone(),
            keep.iter().map(|&b| self.components[b].clone()).collect(),
            keep.iter().map(|&b| self.degrees[b]).collect(),
            act(&self.dots),
            act(&self.crosses),
        )
    }

    /// Whether every generator acts by zero.
    pub fn acts_trivially(&self) -> bool {
        self.dots.iter().chain(&self.crosses).all(|cols| cols.iter().all(|c| c.is_empty()))
    }

    /// One-dimensional with all generators zero on the given sequence.
    pub fn is_trivial_on(&self, seq: &Sequence) -> bool {
        self.dim() == 1 && self.components[0] == *seq && self.acts_trivially()
    }
}

impl GeneratorAction for FinModule {
    type Vector = SparseVec;
    type Error = Infallible;

    fn act(&self, g: Gen, seq: &Sequence, v: &SparseVec) -> Result<SparseVec, Infallible> {
        let images = self.images(g);
        let mut out = SparseVec::new();
        for (&b, c) in v {
            if &self.components[b] == seq {
                sparse_axpy(&mut out, c, &images[b]);
            }
        }
        Ok(out)
    }

    fn combine(&self, terms: Vec<(Rat, SparseVec)>) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, v) in &terms {
            sparse_axpy(&mut out, c, v);
        }
        out
    }

    fn is_zero(&self, v: &SparseVec) -> bool {
        v.is_empty()
    }
}

fn require_imaginary(datum: &BorcherdsCartanDatum, i: Index) -> Result<(), RepError> {
    if datum.is_real(i) {
        Err(RepError::RealIndex(datum.label(i).to_string()))
    } else {
        Ok(())
    }
}

fn empty_actions(n: usize, dim: usize) -> (Vec<Vec<SparseVec>>, Vec<Vec<SparseVec>>) {
    (
        vec![vec![SparseVec::new(); dim]; n],
        vec![vec![SparseVec::new(); dim]; n.saturating_sub(1)],
    )
}

/// The one-dimensional module `V(i^n)` for imaginary `i`.
pub fn trivial_v(datum: &BorcherdsCartanDatum, i: Index, n: usize) -> Result<FinModule, RepError> {
    require_imaginary(datum, i)?;
    let (dots, crosses) = empty_actions(n, 1);
    FinModule::new(datum, Weight::single(i, n), vec![Sequence::repeat(i, n)], vec![0], dots, crosses)
}

/// `[n]_i! · (i^n)`, the character of the nil-Hecke irreducible.
pub fn char_v_real(datum: &BorcherdsCartanDatum, i: Index, n: usize) -> Result<Character, RepError> {
    if !datum.is_real(i) {
        return Err(RepError::ImaginaryIndex(datum.label(i).to_string()));
    }
    let f = quantum_factorial(n as i64, datum.r(i))?;
    Ok(Character::single(Sequence::repeat(i, n), f))
}

/// `Ch V(i^n)` for either kind of index.
pub fn char_v(datum: &BorcherdsCartanDatum, i: Index, n: usize) -> Result<Character, RepError> {
    if datum.is_real(i) {
        char_v_real(datum, i, n)
    } else {
        Ok(Character::single(Sequence::repeat(i, n), LaurentPoly::one()))
    }
}

/// `L̄ = R_n ⊗_{P_n} L` for imaginary `i`, on the basis `τ_ω ⊗ v` in the
/// order of [`all_permutations`].
pub fn lbar(datum: &BorcherdsCartanDatum, i: Index, n: usize, guard: usize) -> Result<FinModule, RepError> {
    require_imaginary(datum, i)?;
    check_guard(n, guard)?;
    let perms = all_permutations(n);
    let index: HashMap<&Permutation, usize> = perms.iter().enumerate().map(|(a, w)| (w, a)).collect();
    let seq = Sequence::repeat(i, n);
    let dim = perms.len();
    let (dots, mut crosses) = empty_actions(n, dim);
    for (b, w) in perms.iter().enumerate() {
        for (k, col) in crosses.iter_mut().enumerate() {
            if !w.is_left_descent(k) {
                col[b] = sparse_unit(index[&w.left_mul_simple(k)]);
            }
        }
    }
    FinModule::new(
        datum,
        Weight::single(i, n),
        vec![seq.clone(); dim],
        perms.iter().map(|w| crossing_degree(w, &seq, datum)).collect(),
        dots,
        crosses,
    )
}

/// `R_n ⊗_{P_n} L` built by straightening: `g · τ_ω ⊗ v` keeps the
/// dotless terms of the normal form of `g τ_ω`. Works for either kind of
/// index.
pub fn polynomial_induced(alg: &KlrAlgebra, i: Index, n: usize, guard: usize) -> Result<FinModule, RepError> {
    check_guard(n, guard)?;
    let datum = alg.datum();
    let perms = all_permutations(n);
    let index: HashMap<&Permutation, usize> = perms.iter().enumerate().map(|(a, w)| (w, a)).collect();
    let seq = Sequence::repeat(i, n);
    let dim = perms.len();
    let (mut dots, mut crosses) = empty_actions(n, dim);
    for (b, w) in perms.iter().enumerate() {
        let base = AlgebraElement::from_basis(&BasisElement {
            source: seq.clone(),
            w: w.clone(),
            dots: vec![0; n],
        });
        let gens = (0..n).map(Gen::Dot).chain((0..n.saturating_sub(1)).map(Gen::Cross));
        for g in gens {
            let prod = alg.left_mul_gen(g, &base);
            let mut img = SparseVec::new();
            for (t, c) in prod.terms() {
                if t.dots.iter().all(|&e| e == 0) {
                    img.insert(index[&t.w], c.clone());
                }
            }
            match g {
                Gen::Dot(k) => dots[k][b] = img,
                Gen::Cross(k) => crosses[k][b] = img,
            }
        }
    }
    FinModule::new(
        datum,
        Weight::single(i, n),
        vec![seq.clone(); dim],
        perms.iter().map(|w| crossing_degree(w, &seq, datum)).collect(),
        dots,
        crosses,
    )
}

/// `Ind_{n,m} V(i^n) ⊗ V(i^m)` on the basis `τ_u ⊗ v`, `u` running over the
/// minimal left coset representatives, with actions from straightening
/// `g τ_u` in `R_{n+m}`.
pub fn induced_trivials(alg: &KlrAlgebra, i: Index, n: usize, m: usize, guard: usize) -> Result<FinModule, RepError> {
    let datum = alg.datum();
    require_imaginary(datum, i)?;
    check_guard(n + m, guard)?;
    let total = n + m;
    let reps = coset_reps_min(n, m);
    let index: HashMap<&Permutation, usize> = reps.iter().enumerate().map(|(a, w)| (w, a)).collect();
    let seq = Sequence::repeat(i, total);
    let dim = reps.len();
    let (mut dots, mut crosses) = empty_actions(total, dim);
    let basis_of = |w: &Permutation| {
        AlgebraElement::from_basis(&BasisElement {
            source: seq.clone(),
            w: w.clone(),
            dots: vec![0; total],
        })
    };
    for (b, u) in reps.iter().enumerate() {
        let base = basis_of(u);
        let gens = (0..total).map(Gen::Dot).chain((0..total.saturating_sub(1)).map(Gen::Cross));
        for g in gens {
            let prod = alg.left_mul_gen(g, &base);
            let mut img = SparseVec::new();
            for (t, c) in prod.terms() {
                if t.dots.iter().any(|&e| e > 0) {
                    continue;
                }
                if let Some(&a) = index.get(&t.w) {
                    img.insert(a, c.clone());
                    continue;
                }
                // τ_w = τ_{u'} τ_σ with σ ≠ e in the parabolic, which kills v
                let (rep, sigma) = factor_coset(&t.w, n);
                if alg.mul(&basis_of(&rep), &basis_of(&sigma)) != basis_of(&t.w) {
                    return Err(RepError::CosetFactorization(t.w.render()));
                }
            }
            match g {
                Gen::Dot(k) => dots[k][b] = img,
                Gen::Cross(k) => crosses[k][b] = img,
            }
        }
    }
    FinModule::new(
        datum,
        Weight::single(i, total),
        vec![seq.clone(); dim],
        reps.iter().map(|w| crossing_degree(w, &seq, datum)).collect(),
        dots,
        crosses,
    )
}

/// `w = u σ` with `u` increasing on the blocks `0..n` and `n..` and `σ`
/// preserving them.
fn factor_coset(w: &Permutation, n: usize) -> (Permutation, Permutation) {
    let img = w.images();
    let mut first: Vec<usize> = img[..n].to_vec();
    let mut second: Vec<usize> = img[n..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    first.extend(second);
    let u = Permutation::from_images(first).expect("sorted blocks form a permutation");
    let sigma = u.inverse().compose(w);
    (u, sigma)
}

/// Result of [`probe`]. Submodules are graded and compatible with the
/// idempotents.
#[derive(Debug, Clone)]
pub struct LatticeProbe {
    /// The submodule generated by each basis vector.
    pub generated: Vec<Subspace>,
    pub radical: Subspace,
    pub socle: Subspace,
    pub maximal: Vec<Subspace>,
    /// False when some head block has dimension ≥ 2, so the maximal
    /// submodules form an infinite family and only `maximal` is listed.
    pub maximal_exhaustive: bool,
    pub minimal: Vec<Subspace>,
    pub minimal_exhaustive: bool,
}

impl LatticeProbe {
    pub fn unique_maximal(&self) -> Option<&Subspace> {
        (self.maximal_exhaustive && self.maximal.len() == 1).then(|| &self.maximal[0])
    }

    pub fn unique_minimal(&self) -> Option<&Subspace> {
        (self.minimal_exhaustive && self.minimal.len() == 1).then(|| &self.minimal[0])
    }
}

/// Maximal and minimal submodules of a module on which dots and crossings
/// act nilpotently. There the radical is `J·M` for the ideal `J` of
/// positive generators, the socle is their common kernel, and simple
/// modules are one-dimensional.
pub fn probe(module: &FinModule) -> Result<LatticeProbe, RepError> {
    let dim = module.dim();
    if dim > PROBE_GUARD {
        return Err(RepError::GuardExceeded { n: dim, guard: PROBE_GUARD });
    }
    let pos = module.positive_operators();
    let all = module.all_operators();
    let all_refs: Vec<&Matrix> = all.iter().collect();
    let image_of = |s: &Subspace| -> Subspace {
        let imgs: Vec<Vec<Rat>> = s
            .basis()
            .iter()
            .flat_map(|v| pos.iter().map(move |g| g.apply(v)))
            .collect();
        invariant_closure(dim, &all_refs, &imgs)
    };
    let full = Subspace::full(dim);
    let radical = image_of(&full);
    let mut layer = radical.clone();
    while layer.dim() > 0 {
        let next = image_of(&layer);
        if next.dim() == layer.dim() {
            return Err(RepError::NotNilpotent);
        }
        layer = next;
    }
    let rows: Vec<Vec<Rat>> = pos.iter().flat_map(|g| (0..dim).map(move |r| g.row(r).to_vec())).collect();
    let socle = Subspace::spanned_by(dim, &nullspace(&rows, dim));

    let mut blocks: BTreeMap<(Sequence, i64), Vec<usize>> = BTreeMap::new();
    for b in 0..dim {
        blocks
            .entry((module.components[b].clone(), module.degrees[b]))
            .or_default()
            .push(b);
    }
    let block_of: Vec<(Sequence, i64)> = (0..dim)
        .map(|b| (module.components[b].clone(), module.degrees[b]))
        .collect();

    let mut maximal = Vec::new();
    let mut maximal_exhaustive = true;
    for (key, members) in &blocks {
        let in_rad = radical.pivots().iter().filter(|&&p| block_of[p] == *key).count();
        let head_dim = members.len() - in_rad;
        if head_dim == 0 {
            continue;
        }
        if head_dim > 1 {
            maximal_exhaustive = false;
            continue;
        }
        let mut m = radical.clone();
        for b in (0..dim).filter(|&b| block_of[b] != *key) {
            m.insert(&unit_vec(dim, b));
        }
        maximal.push(m);
    }

    let mut minimal = Vec::new();
    let mut minimal_exhaustive = true;
    for key in blocks.keys() {
        let rows: Vec<&Vec<Rat>> = socle
            .basis()
            .iter()
            .zip(socle.pivots())
            .filter(|(_, &p)| block_of[p] == *key)
            .map(|(r, _)| r)
            .collect();
        match rows.len() {
            0 => {}
            1 => minimal.push(Subspace::spanned_by(dim, rows)),
            _ => minimal_exhaustive = false,
        }
    }

    let generated = (0..dim)
        .into_par_iter()
        .map(|b| invariant_closure(dim, &all_refs, &[unit_vec(dim, b)]))
        .collect();

    Ok(LatticeProbe {
        generated,
        radical,
        socle,
        maximal,
        maximal_exhaustive,
        minimal,
        minimal_exhaustive,
    })
}

/// The quotient by the unique maximal submodule.
pub fn head(module: &FinModule) -> Result<FinModule, RepError> {
    let p = probe(module)?;
    let m = p.unique_maximal().ok_or(RepError::NoUniqueHead)?;
    module.quotient(m)
}

/// `Ch M = Σ_𝐢 gdim(1_𝐢 M) 𝐢`, supported on one weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    weight: Weight,
    entries: BTreeMap<Sequence, LaurentPoly>,
}

impl Character {
    pub fn zero(weight: Weight) -> Self {
        Self {
            weight,
            entries: BTreeMap::new(),
        }
    }

    pub fn single(seq: Sequence, coeff: LaurentPoly) -> Self {
        let mut c = Self::zero(seq.weight());
        c.add_entry(seq, &coeff);
        c
    }

    /// The character `1 · ()` of the weight-zero module.
    pub fn unit() -> Self {
        Self::single(Sequence::empty(), LaurentPoly::one())
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn get(&self, seq: &Sequence) -> LaurentPoly {
        self.entries.get(seq).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Sequence, &LaurentPoly)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, seq: Sequence, coeff: &LaurentPoly) {
        assert_eq!(seq.weight(), self.weight, "character entries share one weight");
        let e = self.entries.entry(seq.clone()).or_default();
        *e = &*e + coeff;
        if e.is_zero() {
            self.entries.remove(&seq);
        }
    }

    pub fn add(&self, other: &Character) -> Character {
        let mut out = self.clone();
        for (s, c) in &other.entries {
            out.add_entry(s.clone(), c);
        }
        out
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Character {
        let mut out = Character::zero(self.weight.clone());
        for (s, c) in &self.entries {
            out.add_entry(s.clone(), &(c * p));
        }
        out
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|(s, c)| format!("({c})·({})", s.render(datum)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// `{"i j i": "q^-1 + q", ...}`.
    pub fn to_json(&self, datum: &BorcherdsCartanDatum) -> Value {
        let mut m = Map::new();
        for (s, c) in &self.entries {
            m.insert(s.render(datum), Value::String(c.to_string()));
        }
        Value::Object(m)
    }
}

pub fn character_of(module: &FinModule) -> Character {
    let mut ch = Character::zero(module.weight.clone());
    for (s, &d) in module.components.iter().zip(&module.degrees) {
        ch.add_entry(s.clone(), &LaurentPoly::q_pow(d));
    }
    ch
}

/// `Ch Ind M ⊗ N` by the quantum shuffle lemma.
pub fn induce_characters(a: &Character, b: &Character, datum: &BorcherdsCartanDatum) -> Character {
    let weight = a.weight.add(&b.weight);
    let mut out = Character::zero(weight.clone());
    let targets = all_sequences(&weight);
    for (i, p) in &a.entries {
        for (j, r) in &b.entries {
            let pr = p * r;
            for k in &targets {
                let sh = shuffle_poly(i, j, k, datum);
                if !sh.is_zero() {
                    out.add_entry(k.clone(), &(&sh * &pr));
                }
            }
        }
    }
    out
}

/// `Σ_{u ∈ Sh(𝐢,𝐣;𝐤)} q^{|u|}`.
pub fn shuffle_poly(i: &Sequence, j: &Sequence, k: &Sequence, datum: &BorcherdsCartanDatum) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    if let Ok(list) = shuffles(i, j, k, datum) {
        for (_, d) in list {
            out.add_term(d, BigInt::one());
        }
    }
    out
}

/// Longest `i`-tail among supported sequences.
pub fn epsilon_i(ch: &Character, i: Index) -> usize {
    ch.entries.keys().map(|s| s.tail_len(i)).max().unwrap_or(0)
}

/// `Ch Δ_{i^n}`: the entries ending in `i^n` with the tail stripped. Zero
/// (on the original weight) when `ν − ni` is not a weight.
pub fn delta_character(ch: &Character, i: Index, n: usize) -> Character {
    let Some(rest) = ch.weight.checked_sub(&Weight::single(i, n)) else {
        return Character::zero(ch.weight.clone());
    };
    let mut out = Character::zero(rest);
    for (s, c) in &ch.entries {
        if s.tail_len(i) >= n {
            let (head, _) = s.split_at(s.len() - n);
            out.add_entry(head, c);
        }
    }
    out
}

/// `Δ_{i^n}(Ch N ∘ Ch V(i^n)) = Ch N · gdim V(i^n)` for `ε_i(N) = 0`.
pub fn delta_of_induced_check(n_char: &Character, i: Index, n: usize, datum: &BorcherdsCartanDatum) -> Result<bool, RepError> {
    if epsilon_i(n_char, i) != 0 {
        return Err(RepError::WeightMismatch(format!(
            "ε_{}(N) must vanish",
            datum.label(i)
        )));
    }
    let v = char_v(datum, i, n)?;
    let gdim_v = v.get(&Sequence::repeat(i, n));
    let induced = induce_characters(n_char, &v, datum);
    Ok(delta_character(&induced, i, n) == n_char.mul_poly(&gdim_v))
}

/// `Res_{ν,ν'} P_𝐤`: for each `(𝐢,𝐣)` the multiplicity `Σ_u q^{|u|}` of
/// `P_𝐢 ⊗ P_𝐣`.
pub fn res_projective_character(
    k: &Sequence,
    nu: &Weight,
    nu2: &Weight,
    datum: &BorcherdsCartanDatum,
) -> Result<BTreeMap<(Sequence, Sequence), LaurentPoly>, RepError> {
    if nu.add(nu2) != k.weight() {
        return Err(RepError::WeightMismatch(format!("{:?} does not split", k.0)));
    }
    let mut out = BTreeMap::new();
    for i in all_sequences(nu) {
        for j in all_sequences(nu2) {
            let p = shuffle_poly(&i, &j, k, datum);
            if !p.is_zero() {
                out.insert((i.clone(), j), p);
            }
        }
    }
    Ok(out)
}

/// Checks `gdim 1_{𝐚𝐛} P_𝐤 = Σ mult · gdim 1_𝐚 P_𝐢 · gdim 1_𝐛 P_𝐣` for all
/// `𝐚, 𝐛`; returns the first failing pair.
pub fn res_projective_gdim_check(
    alg: &KlrAlgebra,
    k: &Sequence,
    nu: &Weight,
    nu2: &Weight,
    cap: i64,
) -> Result<Option<(Sequence, Sequence)>, RepError> {
    let mult = res_projective_character(k, nu, nu2, alg.datum())?;
    for a in all_sequences(nu) {
        for b in all_sequences(nu2) {
            let lhs = alg.gdim_corner(k, &a.concat(&b), cap)?;
            let mut rhs = QSeries::zero(cap);
            for ((i, j), m) in &mult {
                let g1 = alg.gdim_corner(i, &a, cap)?;
                let g2 = alg.gdim_corner(j, &b, cap)?;
                let prod = g1.mul(&g2).mul_poly(m);
                rhs = rhs.add(&prod);
            }
            if lhs.agrees_with(&rhs).is_none() {
                return Err(RepError::Malformed(format!("cap too small for {:?}", a.0)));
            }
            let c = lhs.cap().min(rhs.cap());
            if lhs.truncate(c) != rhs.truncate(c) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Both sides of the Mackey identity for one split.
#[derive(Debug, Clone)]
pub struct MackeyReport {
    pub holds: bool,
    /// Entries keyed by `(𝐚, 𝐛)`.
    pub restricted: BTreeMap<(Sequence, Sequence), LaurentPoly>,
    pub filtered: BTreeMap<(Sequence, Sequence), LaurentPoly>,
    /// λ values contributing with a nontrivial twist `q^{−λ·(ν'+λ−μ')}`.
    pub twisted: Vec<(Weight, i64)>,
}

fn insert_poly(map: &mut BTreeMap<(Sequence, Sequence), LaurentPoly>, key: (Sequence, Sequence), p: &LaurentPoly) {
    let e = map.entry(key.clone()).or_default();
    *e = &*e + p;
    if e.is_zero() {
        map.remove(&key);
    }
}

/// `Ch Res_{ν,ν'} Ind_{μ,μ'} M ⊗ N` computed directly and through the
/// Mackey filtration.
pub fn mackey_character_check(
    ch_m: &Character,
    ch_n: &Character,
    nu: &Weight,
    nu2: &Weight,
    datum: &BorcherdsCartanDatum,
) -> Result<MackeyReport, RepError> {
    let (mu, mu2) = (ch_m.weight(), ch_n.weight());
    if nu.add(nu2) != mu.add(mu2) {
        return Err(RepError::WeightMismatch("ν + ν' must equal μ + μ'".into()));
    }
    let induced = induce_characters(ch_m, ch_n, datum);
    let mut restricted = BTreeMap::new();
    let alist = all_sequences(nu);
    let blist = all_sequences(nu2);
    for a in &alist {
        for b in &blist {
            let c = induced.get(&a.concat(b));
            if !c.is_zero() {
                insert_poly(&mut restricted, (a.clone(), b.clone()), &c);
            }
        }
    }

    let mut filtered = BTreeMap::new();
    let mut twisted = Vec::new();
    for lambda in mu2.sub_weights() {
        let (Some(p_w), Some(s_w), Some(q_w)) = (
            nu.checked_sub(&lambda),
            mu2.checked_sub(&lambda),
            nu2.add(&lambda).checked_sub(mu2),
        ) else {
            continue;
        };
        let shift = -lambda.dot(&q_w, datum);
        if shift != 0 {
            twisted.push((lambda.clone(), shift));
        }
        let twist = LaurentPoly::q_pow(shift);
        for (m_seq, m_c) in ch_m.entries() {
            let (p, q) = m_seq.split_at(p_w.ht());
            if p.weight() != p_w || q.weight() != q_w {
                continue;
            }
            for (n_seq, n_c) in ch_n.entries() {
                let (r, s) = n_seq.split_at(lambda.ht());
                if r.weight() != lambda || s.weight() != s_w {
                    continue;
                }
                let coeff = &(m_c * n_c) * &twist;
                for a in &alist {
                    let sa = shuffle_poly(&p, &r, a, datum);
                    if sa.is_zero() {
                        continue;
                    }
                    for b in &blist {
                        let sb = shuffle_poly(&q, &s, b, datum);
                        if sb.is_zero() {
                            continue;
                        }
                        insert_poly(&mut filtered, (a.clone(), b.clone()), &(&(&sa * &sb) * &coeff));
                    }
                }
            }
        }
    }
    Ok(MackeyReport {
        holds: restricted == filtered,
        restricted,
        filtered,
        twisted,
    })
}
