//! Paths between reduced words of a permutation through commutation and
//! braid moves.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::wordcomb::{lexmin_reduced_word, Permutation};

/// A move on a word, at letter offset `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// `a b -> b a` with `|a − b| > 1`.
    Commute(usize),
    /// `a b a -> b a b` with `|a − b| = 1`.
    Braid(usize),
}

/// How a reduced word is brought to lex-min form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraidStrategy {
    /// Repeatedly pull the smallest left descent to the front.
    Constructive,
    /// Shortest path in the graph of reduced words, neighbours visited in a
    /// seeded random order.
    ShuffledBfs { seed: u64 },
}

pub fn apply_move(word: &mut [usize], mv: Move) {
    match mv {
        Move::Commute(t) => {
            debug_assert!(word[t].abs_diff(word[t + 1]) > 1);
            word.swap(t, t + 1);
        }
        Move::Braid(t) => {
            let (a, b) = (word[t], word[t + 1]);
            debug_assert!(a.abs_diff(b) == 1 && word[t + 2] == a);
            word[t] = b;
            word[t + 1] = a;
            word[t + 2] = b;
        }
    }
}

fn applicable_moves(word: &[usize]) -> Vec<Move> {
    let mut out = Vec::new();
    for t in 0..word.len().saturating_sub(1) {
        if word[t].abs_diff(word[t + 1]) > 1 {
            out.push(Move::Commute(t));
        }
        if t + 2 < word.len() && word[t].abs_diff(word[t + 1]) == 1 && word[t + 2] == word[t] {
            out.push(Move::Braid(t));
        }
    }
    out
}

/// Moves taking the reduced word `word` (in `S_n`) to the lex-min reduced
/// word of the same permutation.
pub fn plan_to_canonical(n: usize, word: &[usize], strategy: BraidStrategy) -> Vec<Move> {
    match strategy {
        BraidStrategy::Constructive => plan_constructive(n, word),
        BraidStrategy::ShuffledBfs { seed } => plan_bfs(n, word, seed),
    }
}

fn plan_constructive(n: usize, word: &[usize]) -> Vec<Move> {
    let mut w = word.to_vec();
    let mut moves = Vec::new();
    for pos in 0..w.len() {
        let perm = Permutation::from_word(n, &w[pos..]);
        let s = (0..n - 1).find(|&k| perm.is_left_descent(k)).expect("nonempty reduced word");
        bring_to_front(&mut w, pos, s, &mut moves);
    }
    moves
}

/// Rewrites `w[pos..]` so it starts with `s`, which must be a left descent
/// of the permutation it spells.
fn bring_to_front(w: &mut Vec<usize>, pos: usize, s: usize, moves: &mut Vec<Move>) {
    let t = w[pos];
    if t == s {
        return;
    }
    bring_to_front(w, pos + 1, s, moves);
    if t.abs_diff(s) > 1 {
        let mv = Move::Commute(pos);
        apply_move(w, mv);
        moves.push(mv);
    } else {
        bring_to_front(w, pos + 2, t, moves);
        let mv = Move::Braid(pos);
        apply_move(w, mv);
        moves.push(mv);
    }
}

fn plan_bfs(n: usize, word: &[usize], seed: u64) -> Vec<Move> {
    let target = lexmin_reduced_word(&Permutation::from_word(n, word));
    let start = word.to_vec();
    if start == target {
        return Vec::new();
    }
    let salt = word.iter().fold(seed, |h, &c| h.wrapping_mul(0x100000001b3).wrapping_add(c as u64 + 1));
    let mut rng = ChaCha8Rng::seed_from_u64(salt);
    let mut parent: HashMap<Vec<usize>, (Vec<usize>, Move)> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    let mut seen = std::collections::HashSet::from([start.clone()]);
    while let Some(cur) = queue.pop_front() {
        let mut moves = applicable_moves(&cur);
        moves.shuffle(&mut rng);
        for mv in moves {
            let mut next = cur.clone();
            apply_move(&mut next, mv);
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), (cur.clone(), mv));
                if next == target {
                    let mut path = Vec::new();
                    let mut at = next;
                    while at != start {
                        let (p, m) = parent[&at].clone();
                        path.push(m);
                        at = p;
                    }
                    path.reverse();
                    return path;
                }
                queue.push_back(next);
            }
        }
    }
    unreachable!("reduced words of one permutation are connected by braid moves")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordcomb::all_permutations;

    fn reduced_words(w: &Permutation) -> Vec<Vec<usize>> {
        if w.is_identity() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for k in 0..w.n() - 1 {
            if w.is_left_descent(k) {
                for mut rest in reduced_words(&w.left_mul_simple(k)) {
                    rest.insert(0, k);
                    out.push(rest);
                }
            }
        }
        out
    }

    #[test]
    fn every_plan_reaches_the_canonical_word() {
        for n in 1..=5 {
            for w in all_permutations(n) {
                let canon = lexmin_reduced_word(&w);
                for word in reduced_words(&w) {
                    let mut strategies = vec![BraidStrategy::Constructive];
                    if n <= 4 {
                        strategies.push(BraidStrategy::ShuffledBfs { seed: 3 });
                    }
                    for strategy in strategies {
                        let mut cur = word.clone();
                        for mv in plan_to_canonical(n, &word, strategy) {
                            apply_move(&mut cur, mv);
                            assert_eq!(Permutation::from_word(n, &cur), w);
                        }
                        assert_eq!(cur, canon);
                    }
                }
            }
        }
    }

    #[test]
    fn braid_move_shape() {
        let mut w = vec![0, 1, 0, 3];
        apply_move(&mut w, Move::Braid(0));
        assert_eq!(w, vec![1, 0, 1, 3]);
        apply_move(&mut w, Move::Commute(2));
        assert_eq!(w, vec![1, 0, 3, 1]);
    }
}
