//! Weights, sequences and symmetric-group combinatorics.
//!
//! Positions and generators are 0-based internally: `s_k` swaps positions
//! `k` and `k + 1`. Rendering is 1-based. A permutation `w` moves the entry
//! at position `a` to position `w(a)`, so `(w·src)[w(a)] = src[a]`. A word
//! `[c_1, ..., c_l]` denotes `s_{c_1} ∘ ... ∘ s_{c_l}`; read as a diagram,
//! the last letter is the bottom crossing.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datum::{BorcherdsCartanDatum, Index};
use crate::qarith::{quantum_factorial, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("unknown index label {0:?}")]
    UnknownIndex(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("divided power {n} on imaginary index {label}")]
    ImaginaryDividedPower { label: String, n: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
}

/// An element of `N[I]`, stored without zero multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Weight {
    mult: BTreeMap<Index, usize>,
}

impl Weight {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Index, usize)>) -> Self {
        let mut w = Self::zero();
        for (i, n) in pairs {
            w.add_index(i, n);
        }
        w
    }

    /// `n · i`.
    pub fn single(i: Index, n: usize) -> Self {
        Self::from_pairs([(i, n)])
    }

    pub fn add_index(&mut self, i: Index, n: usize) {
        if n > 0 {
            *self.mult.entry(i).or_insert(0) += n;
        }
    }

    pub fn get(&self, i: Index) -> usize {
        self.mult.get(&i).copied().unwrap_or(0)
    }

    pub fn ht(&self) -> usize {
        self.mult.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (Index, usize)> + '_ {
        self.mult.iter().map(|(&i, &n)| (i, n))
    }

    pub fn add(&self, other: &Weight) -> Weight {
        let mut out = self.clone();
        for (i, n) in other.support() {
            out.add_index(i, n);
        }
        out
    }

    /// `self − other`, if it stays in `N[I]`.
    pub fn checked_sub(&self, other: &Weight) -> Option<Weight> {
        let mut out = self.clone();
        for (i, n) in other.support() {
            let have = out.get(i);
            if have < n {
                return None;
            }
            if have == n {
                out.mult.remove(&i);
            } else {
                out.mult.insert(i, have - n);
            }
        }
        Some(out)
    }

    /// `λ · μ` for the symmetric bilinear form of the datum.
    pub fn dot(&self, other: &Weight, datum: &BorcherdsCartanDatum) -> i64 {
        let mut s = 0;
        for (i, a) in self.support() {
            for (j, b) in other.support() {
                s += (a * b) as i64 * datum.bilinear(i, j);
            }
        }
        s
    }

    /// All weights `λ` with `0 ≤ λ ≤ self` coordinatewise.
    pub fn sub_weights(&self) -> Vec<Weight> {
        let mut out = vec![Weight::zero()];
        for (i, n) in self.support() {
            let mut next = Vec::with_capacity(out.len() * (n + 1));
            for w in &out {
                for k in 0..=n {
                    let mut v = w.clone();
                    v.add_index(i, k);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Parses the `i:2,j:1` grammar; a bare label means multiplicity 1.
    pub fn parse(s: &str, datum: &BorcherdsCartanDatum) -> Result<Weight, WordError> {
        let mut w = Weight::zero();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, n) = match part.rsplit_once(':') {
                Some((l, n)) => (
                    l.trim(),
                    n.trim().parse::<usize>().map_err(|_| WordError::Parse(s.to_string()))?,
                ),
                None => (part, 1),
            };
            let i = datum
                .index_of(label)
                .map_err(|_| WordError::UnknownIndex(label.to_string()))?;
            w.add_index(i, n);
        }
        Ok(w)
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        self.support()
            .map(|(i, n)| format!("{}:{}", datum.label(i), n))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A sequence `i_1 ... i_n` of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Sequence(pub Vec<Index>);

impl Sequence {
    pub fn new(entries: Vec<Index>) -> Self {
        Self(entries)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn repeat(i: Index, n: usize) -> Self {
        Self(vec![i; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Index] {
        &self.0
    }

    pub fn weight(&self) -> Weight {
        Weight::from_pairs(self.0.iter().map(|&i| (i, 1)))
    }

    /// `s_k 𝐢`.
    pub fn swapped(&self, k: usize) -> Sequence {
        let mut v = self.0.clone();
        v.swap(k, k + 1);
        Sequence(v)
    }

    pub fn concat(&self, other: &Sequence) -> Sequence {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Sequence(v)
    }

    /// Splits into the first `n` entries and the rest.
    pub fn split_at(&self, n: usize) -> (Sequence, Sequence) {
        (Sequence(self.0[..n].to_vec()), Sequence(self.0[n..].to_vec()))
    }

    /// Length of the longest suffix consisting of `i`.
    pub fn tail_len(&self, i: Index) -> usize {
        self.0.iter().rev().take_while(|&&x| x == i).count()
    }

    pub fn parse(s: &str, datum: &BorcherdsCartanDatum) -> Result<Sequence, WordError> {
        s.split_whitespace()
            .map(|t| datum.index_of(t).map_err(|_| WordError::UnknownIndex(t.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Sequence)
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        self.0.iter().map(|&i| datum.label(i)).collect::<Vec<_>>().join(" ")
    }
}

/// All distinct sequences of a weight, in lexicographic order.
pub fn all_sequences(weight: &Weight) -> Vec<Sequence> {
    fn rec(counts: &mut Vec<(Index, usize)>, cur: &mut Vec<Index>, n: usize, out: &mut Vec<Sequence>) {
        if cur.len() == n {
            out.push(Sequence(cur.clone()));
            return;
        }
        for t in 0..counts.len() {
            if counts[t].1 == 0 {
                continue;
            }
            counts[t].1 -= 1;
            cur.push(counts[t].0);
            rec(counts, cur, n, out);
            cur.pop();
            counts[t].1 += 1;
        }
    }
    let mut counts: Vec<(Index, usize)> = weight.support().collect();
    let mut out = Vec::new();
    rec(&mut counts, &mut Vec::new(), weight.ht(), &mut out);
    out
}

/// A sequence with divided powers: blocks `i^{(n)}`, `n > 1` only for
/// real `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DividedSequence {
    blocks: Vec<(Index, usize)>,
}

impl DividedSequence {
    pub fn new(blocks: Vec<(Index, usize)>, datum: &BorcherdsCartanDatum) -> Result<Self, WordError> {
        for &(i, n) in &blocks {
            if n == 0 {
                return Err(WordError::Parse(format!("empty block for {}", datum.label(i))));
            }
            if n > 1 && !datum.is_real(i) {
                return Err(WordError::ImaginaryDividedPower {
                    label: datum.label(i).to_string(),
                    n,
                });
            }
        }
        Ok(Self { blocks })
    }

    /// The shape with all blocks of size one.
    pub fn plain(seq: &Sequence) -> Self {
        Self {
            blocks: seq.0.iter().map(|&i| (i, 1)).collect(),
        }
    }

    pub fn blocks(&self) -> &[(Index, usize)] {
        &self.blocks
    }

    /// The expanded sequence `𝐢̂`.
    pub fn hat(&self) -> Sequence {
        Sequence(self.blocks.iter().flat_map(|&(i, n)| std::iter::repeat_n(i, n)).collect())
    }

    pub fn weight(&self) -> Weight {
        self.hat().weight()
    }

    /// `⟨𝐢⟩ = Σ n_k (n_k − 1)/2 · r_{i_k}`.
    pub fn angle(&self, datum: &BorcherdsCartanDatum) -> i64 {
        self.blocks
            .iter()
            .map(|&(i, n)| (n * (n - 1) / 2) as i64 * datum.r(i))
            .sum()
    }

    /// `𝐢! = Π [n_k]_{i_k}!`.
    pub fn factorial(&self, datum: &BorcherdsCartanDatum) -> LaurentPoly {
        self.blocks.iter().fold(LaurentPoly::one(), |acc, &(i, n)| {
            &acc * &quantum_factorial(n as i64, datum.r(i)).expect("block sizes are positive")
        })
    }

    /// Parses tokens like `i(2) j i`.
    pub fn parse(s: &str, datum: &BorcherdsCartanDatum) -> Result<Self, WordError> {
        let mut blocks = Vec::new();
        for t in s.split_whitespace() {
            let (label, n) = match t.strip_suffix(')').and_then(|u| u.rsplit_once('(')) {
                Some((l, n)) => (l, n.parse::<usize>().map_err(|_| WordError::Parse(t.to_string()))?),
                None => (t, 1),
            };
            let i = datum
                .index_of(label)
                .map_err(|_| WordError::UnknownIndex(label.to_string()))?;
            blocks.push((i, n));
        }
        Self::new(blocks, datum)
    }

    pub fn render(&self, datum: &BorcherdsCartanDatum) -> String {
        self.blocks
            .iter()
            .map(|&(i, n)| {
                if n == 1 {
                    datum.label(i).to_string()
                } else {
                    format!("{}({n})", datum.label(i))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A permutation in one-line notation on 0-based positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, WordError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(WordError::NotAPermutation(images));
            }
            seen[x] = true;
        }
        Ok(Self(images))
    }

    /// One-line notation on `1..=n`.
    pub fn from_one_line(images: &[usize]) -> Result<Self, WordError> {
        if images.contains(&0) {
            return Err(WordError::NotAPermutation(images.to_vec()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// The simple transposition `s_k` in `S_n`.
    pub fn simple(n: usize, k: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(k, k + 1);
        p
    }

    /// `s_{c_1} ∘ ... ∘ s_{c_l}`.
    pub fn from_word(n: usize, word: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for &c in word.iter().rev() {
            p = p.left_mul_simple(c);
        }
        p
    }

    /// The longest element.
    pub fn longest(n: usize) -> Self {
        Self((0..n).rev().collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, a: usize) -> usize {
        self.0[a]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(a, &x)| a == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (a, &x) in self.0.iter().enumerate() {
            inv[x] = a;
        }
        Self(inv)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self(other.0.iter().map(|&x| self.0[x]).collect())
    }

    /// `s_k ∘ self`: swaps the values `k` and `k + 1`.
    pub fn left_mul_simple(&self, k: usize) -> Self {
        Self(
            self.0
                .iter()
                .map(|&x| if x == k { k + 1 } else if x == k + 1 { k } else { x })
                .collect(),
        )
    }

    /// `self ∘ s_k`: swaps the entries at `k` and `k + 1`.
    pub fn right_mul_simple(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v.swap(k, k + 1);
        Self(v)
    }

    /// `l(s_k w) < l(w)`.
    pub fn is_left_descent(&self, k: usize) -> bool {
        let inv = self.inverse();
        inv.0[k] > inv.0[k + 1]
    }

    /// `l(w s_k) < l(w)`.
    pub fn is_right_descent(&self, k: usize) -> bool {
        self.0[k] > self.0[k + 1]
    }

    pub fn length(&self) -> usize {
        let n = self.0.len();
        let mut l = 0;
        for p in 0..n {
            for q in p + 1..n {
                if self.0[p] > self.0[q] {
                    l += 1;
                }
            }
        }
        l
    }

    /// Pairs of positions `p < q` whose strands cross.
    pub fn inversions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).flat_map(move |p| (p + 1..n).filter(move |&q| self.0[p] > self.0[q]).map(move |q| (p, q)))
    }

    /// `w(src)`: the entry at position `a` moves to position `w(a)`.
    pub fn act(&self, src: &Sequence) -> Sequence {
        let mut out = vec![0; src.len()];
        for (a, &x) in src.0.iter().enumerate() {
            out[self.0[a]] = x;
        }
        Sequence(out)
    }

    /// Embeds `self ⊗ other` in `S_{n+m}` acting blockwise.
    pub fn tensor(&self, other: &Permutation) -> Self {
        let n = self.n();
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&x| x + n));
        Self(v)
    }

    /// 1-based one-line rendering, e.g. `[2,1,3]`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Lexicographically smallest reduced word (0-based letters).
pub fn lexmin_reduced_word(w: &Permutation) -> Vec<usize> {
    let n = w.n();
    let mut word = Vec::with_capacity(w.length());
    let mut cur = w.clone();
    while !cur.is_identity() {
        let k = (0..n - 1)
            .find(|&k| cur.is_left_descent(k))
            .expect("a non-identity permutation has a left descent");
        word.push(k);
        cur = cur.left_mul_simple(k);
    }
    word
}

/// 1-based rendering of a word, e.g. `[1,2,1]`.
pub fn render_word(word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(|x| (x + 1).to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// All of `S_n`, in lexicographic one-line order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        let n = used.len();
        if cur.len() == n {
            out.push(Permutation(cur.clone()));
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimal-length representatives of `S_{n+m} / (S_n × S_m)`: the
/// permutations increasing on each block.
pub fn coset_reps_min(n: usize, m: usize) -> Vec<Permutation> {
    interleavings(n, m)
}

/// Every way to place `n` first-block strands and `m` second-block strands
/// so each block keeps its order, as permutations of `0..n+m`.
pub fn interleavings(n: usize, m: usize) -> Vec<Permutation> {
    let total = n + m;
    let mut out = Vec::new();
    // choose the target positions of the first block
    fn rec(start: usize, left: usize, total: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(chosen.clone());
            return;
        }
        for p in start..=total - left {
            chosen.push(p);
            rec(p + 1, left - 1, total, chosen, out);
            chosen.pop();
        }
    }
    let mut choices = Vec::new();
    rec(0, n, total, &mut Vec::new(), &mut choices);
    for first in choices {
        let mut images = first.clone();
        let mut taken = vec![false; total];
        for &p in &first {
            taken[p] = true;
        }
        images.extend((0..total).filter(|&p| !taken[p]));
        out.push(Permutation(images));
    }
    out.sort();
    out
}

/// All `w` with `w(src) = dst`.
pub fn transport_set(src: &Sequence, dst: &Sequence) -> Result<Vec<Permutation>, WordError> {
    if src.weight() != dst.weight() {
        return Err(WordError::WeightMismatch(format!("{:?} vs {:?}", src.0, dst.0)));
    }
    let n = src.len();
    let mut out = Vec::new();
    fn rec(a: usize, src: &[Index], dst: &[Index], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if a == src.len() {
            out.push(Permutation(cur.clone()));
            return;
        }
        for t in 0..dst.len() {
            if !used[t] && dst[t] == src[a] {
                used[t] = true;
                cur.push(t);
                rec(a + 1, src, dst, used, cur, out);
                cur.pop();
                used[t] = false;
            }
        }
    }
    rec(0, &src.0, &dst.0, &mut vec![false; n], &mut Vec::new(), &mut out);
    Ok(out)
}

/// `Σ_{p<q, w(p)>w(q)} −(src_p · src_q)`.
pub fn crossing_degree(w: &Permutation, src: &Sequence, datum: &BorcherdsCartanDatum) -> i64 {
    w.inversions()
        .map(|(p, q)| -datum.bilinear(src.0[p], src.0[q]))
        .sum()
}

/// Degree of a crossing word read bottom to top from `src`, summing
/// `−i_k · i_{k+1}` for each crossing at the level where it occurs.
pub fn word_degree(word: &[usize], src: &Sequence, datum: &BorcherdsCartanDatum) -> i64 {
    let mut seq = src.clone();
    let mut deg = 0;
    for &c in word.iter().rev() {
        deg -= datum.bilinear(seq.0[c], seq.0[c + 1]);
        seq = seq.swapped(c);
    }
    deg
}

/// Shuffles of `a` and `b` producing `target`, each with its degree
/// `Σ −(a_p · b_q)` over crossed pairs.
pub fn shuffles(
    a: &Sequence,
    b: &Sequence,
    target: &Sequence,
    datum: &BorcherdsCartanDatum,
) -> Result<Vec<(Permutation, i64)>, WordError> {
    if a.weight().add(&b.weight()) != target.weight() {
        return Err(WordError::WeightMismatch(format!(
            "{:?} + {:?} vs {:?}",
            a.0, b.0, target.0
        )));
    }
    let ab = a.concat(b);
    let n = a.len();
    let mut out = Vec::new();
    for u in interleavings(n, b.len()) {
        if u.act(&ab) != *target {
            continue;
        }
        let mut deg = 0;
        for p in 0..n {
            for q in n..ab.len() {
                if u.apply(p) > u.apply(q) {
                    deg -= datum.bilinear(ab.0[p], ab.0[q]);
                }
            }
        }
        out.push((u, deg));
    }
    Ok(out)
}

/// The `n` choose `k` binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for t in 0..k {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn datum(m: Vec<Vec<i64>>) -> BorcherdsCartanDatum {
        BorcherdsCartanDatum::from_matrix(m).unwrap()
    }

    /// All reduced words by brute force, as an oracle.
    fn all_reduced_words(w: &Permutation) -> Vec<Vec<usize>> {
        let n = w.n();
        if w.is_identity() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for k in 0..n - 1 {
            if w.is_left_descent(k) {
                for mut rest in all_reduced_words(&w.left_mul_simple(k)) {
                    rest.insert(0, k);
                    out.push(rest);
                }
            }
        }
        out
    }

    #[test]
    fn reduced_words() {
        assert!(lexmin_reduced_word(&Permutation::identity(3)).is_empty());
        let w0 = Permutation::longest(3);
        assert_eq!(lexmin_reduced_word(&w0), vec![0, 1, 0]);
        assert_eq!(Permutation::from_word(3, &[0, 1, 0]), Permutation::from_word(3, &[1, 0, 1]));
        let w = Permutation::from_one_line(&[2, 1, 4, 3]).unwrap();
        assert_eq!(lexmin_reduced_word(&w), vec![0, 2]);
        for n in 1..=5 {
            for w in all_permutations(n) {
                let words = all_reduced_words(&w);
                let min = words.iter().min().unwrap();
                assert_eq!(&lexmin_reduced_word(&w), min);
                for word in &words {
                    assert_eq!(Permutation::from_word(n, word), w);
                    assert_eq!(word.len(), w.length());
                }
            }
        }
    }

    #[test]
    fn descents_match_lengths() {
        for w in all_permutations(4) {
            for k in 0..3 {
                assert_eq!(w.is_left_descent(k), w.left_mul_simple(k).length() < w.length());
                assert_eq!(w.is_right_descent(k), w.right_mul_simple(k).length() < w.length());
                assert_eq!(w.left_mul_simple(k), Permutation::simple(4, k).compose(&w));
                assert_eq!(w.right_mul_simple(k), w.compose(&Permutation::simple(4, k)));
            }
        }
    }

    #[test]
    fn cosets() {
        assert_eq!(coset_reps_min(1, 1), vec![Permutation::identity(2), Permutation::simple(2, 0)]);
        let reps: BTreeSet<_> = coset_reps_min(2, 1).into_iter().collect();
        let expect: BTreeSet<_> = [vec![], vec![1], vec![0, 1]]
            .iter()
            .map(|w| Permutation::from_word(3, w))
            .collect();
        assert_eq!(reps, expect);
        assert_eq!(coset_reps_min(0, 3), vec![Permutation::identity(3)]);
        // minimality: filter S_{n+m} for minimal length in each coset
        for (n, m) in [(1, 2), (2, 2), (3, 1), (2, 3)] {
            let block: Vec<Permutation> = all_permutations(n)
                .iter()
                .flat_map(|a| all_permutations(m).into_iter().map(move |b| a.tensor(&b)))
                .collect();
            let mut mins = BTreeSet::new();
            for w in all_permutations(n + m) {
                let coset: Vec<Permutation> = block.iter().map(|h| w.compose(h)).collect();
                mins.insert(coset.into_iter().min_by_key(|x| (x.length(), x.clone())).unwrap());
            }
            let reps: BTreeSet<_> = coset_reps_min(n, m).into_iter().collect();
            assert_eq!(reps, mins);
            assert_eq!(BigInt::from(reps.len()), binomial(n + m, n));
        }
    }

    #[test]
    fn transports() {
        let (i, j) = (0, 1);
        let ij = Sequence::new(vec![i, j]);
        let ji = Sequence::new(vec![j, i]);
        assert_eq!(transport_set(&ij, &ji).unwrap(), vec![Permutation::simple(2, 0)]);
        assert_eq!(transport_set(&Sequence::repeat(i, 2), &Sequence::repeat(i, 2)).unwrap().len(), 2);
        let iij = Sequence::new(vec![i, i, j]);
        let iji = Sequence::new(vec![i, j, i]);
        let brute: Vec<_> = all_permutations(3).into_iter().filter(|w| w.act(&iij) == iji).collect();
        assert_eq!(transport_set(&iij, &iji).unwrap(), brute);
        assert_eq!(brute.len(), 2);
        assert!(transport_set(&ij, &Sequence::repeat(i, 2)).is_err());
        let nu = Weight::from_pairs([(0, 2), (1, 2)]);
        let total: usize = all_sequences(&nu).iter().map(|d| transport_set(&iij.concat(&Sequence::new(vec![j])), d).unwrap().len()).sum();
        assert_eq!(total, 24);
    }

    #[test]
    fn degrees() {
        let a2 = datum(vec![vec![2, -1], vec![-1, 2]]);
        let ii = Sequence::repeat(0, 2);
        assert_eq!(crossing_degree(&Permutation::identity(2), &ii, &a2), 0);
        assert_eq!(crossing_degree(&Permutation::simple(2, 0), &ii, &a2), -2);
        let iji = Sequence::new(vec![0, 1, 0]);
        assert_eq!(crossing_degree(&Permutation::longest(3), &iji, &a2), 0);
        let rank3 = datum(vec![vec![2, -1, 0], vec![-1, -2, -1], vec![0, -1, 2]]);
        for seq in all_sequences(&Weight::from_pairs([(0, 1), (1, 2), (2, 1)])) {
            for w in all_permutations(4) {
                let d = crossing_degree(&w, &seq, &rank3);
                for word in all_reduced_words(&w) {
                    assert_eq!(word_degree(&word, &seq, &rank3), d);
                }
            }
        }
    }

    #[test]
    fn shuffle_examples() {
        let a2 = datum(vec![vec![2, -1], vec![-1, 2]]);
        let (i, j) = (Sequence::new(vec![0]), Sequence::new(vec![1]));
        let r = shuffles(&i, &j, &Sequence::new(vec![0, 1]), &a2).unwrap();
        assert_eq!(r, vec![(Permutation::identity(2), 0)]);
        let r = shuffles(&i, &j, &Sequence::new(vec![1, 0]), &a2).unwrap();
        assert_eq!(r, vec![(Permutation::simple(2, 0), 1)]);
        let im = datum(vec![vec![-2]]);
        let x = Sequence::new(vec![0]);
        let mut degs: Vec<i64> = shuffles(&x, &x, &Sequence::repeat(0, 2), &im).unwrap().into_iter().map(|s| s.1).collect();
        degs.sort();
        assert_eq!(degs, vec![0, 2]);
        assert!(shuffles(&i, &j, &Sequence::repeat(0, 2), &a2).is_err());
    }

    #[test]
    fn divided_sequences() {
        let d = datum(vec![vec![2, -1], vec![-2, 2]]);
        let s = DividedSequence::parse("i0(2) i1 i0", &d).unwrap();
        assert_eq!(s.hat(), Sequence::new(vec![0, 0, 1, 0]));
        assert_eq!(s.render(&d), "i0(2) i1 i0");
        assert_eq!(s.angle(&d), d.r(0));
        assert_eq!(s.factorial(&d), quantum_factorial(2, d.r(0)).unwrap());
        let im = datum(vec![vec![0]]);
        assert!(matches!(
            DividedSequence::parse("i0(2)", &im),
            Err(WordError::ImaginaryDividedPower { .. })
        ));
    }

    #[test]
    fn parsing() {
        let d = datum(vec![vec![2, -1], vec![-1, 2]]);
        let w = Weight::parse("i0:2,i1:1", &d).unwrap();
        assert_eq!(w, Weight::from_pairs([(0, 2), (1, 1)]));
        assert_eq!(w.render(&d), "i0:2,i1:1");
        assert_eq!(Sequence::parse("i0 i1 i0", &d).unwrap().render(&d), "i0 i1 i0");
        assert!(Sequence::parse("i0 k", &d).is_err());
        assert!(Weight::parse("i0:x", &d).is_err());
    }

    proptest! {
        #[test]
        fn shuffle_counts(a in proptest::collection::vec(0usize..2, 0..4), b in proptest::collection::vec(0usize..2, 0..4)) {
            let d = datum(vec![vec![2, -1], vec![-1, -2]]);
            let (a, b) = (Sequence::new(a), Sequence::new(b));
            let nu = a.weight().add(&b.weight());
            let total: usize = all_sequences(&nu).iter().map(|t| shuffles(&a, &b, t, &d).unwrap().len()).sum();
            prop_assert_eq!(BigInt::from(total), binomial(a.len() + b.len(), a.len()));
        }

        #[test]
        fn transport_counts(v in proptest::collection::vec(0usize..3, 0..5)) {
            let src = Sequence::new(v);
            let total: usize = all_sequences(&src.weight()).iter().map(|t| transport_set(&src, t).unwrap().len()).sum();
            let fact: usize = (1..=src.len()).product();
            prop_assert_eq!(total, fact);
        }
    }
}
