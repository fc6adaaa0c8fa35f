use super::*;
use crate::qarith::geom_inverse;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn datum(m: Vec<Vec<i64>>) -> BorcherdsCartanDatum {
    BorcherdsCartanDatum::from_matrix(m).unwrap()
}

fn mixed() -> BorcherdsCartanDatum {
    datum(vec![vec![2, -1], vec![-1, -2]])
}

/// `ρ` of a word by multiplying `f_i ⊗ 1 + 1 ⊗ f_i` under the twisted
/// product, one letter at a time.
fn rho_by_products(w: &[Index], d: &BorcherdsCartanDatum) -> BTreeMap<(FreeQWord, FreeQWord), LaurentPoly> {
    let mut acc = BTreeMap::from([((vec![], vec![]), LaurentPoly::one())]);
    for &i in w {
        let mut next: BTreeMap<(FreeQWord, FreeQWord), LaurentPoly> = BTreeMap::new();
        for ((l, r), c) in &acc {
            // (l ⊗ r)(f_i ⊗ 1) = q^{-|r|·i} l f_i ⊗ r
            let twist: i64 = r.iter().map(|&x| -d.bilinear(x, i)).sum();
            let mut l2 = l.clone();
            l2.push(i);
            let e = next.entry((l2, r.clone())).or_default();
            *e = &*e + &c.shift(twist);
            let mut r2 = r.clone();
            r2.push(i);
            let e = next.entry((l.clone(), r2)).or_default();
            *e = &*e + c;
        }
        acc = next;
    }
    acc
}

#[test]
fn rho_matches_twisted_products() {
    let d = mixed();
    for w in [vec![0], vec![0, 1], vec![1, 0, 1], vec![0, 0, 1, 1]] {
        let mut direct = BTreeMap::new();
        for (l, r, c) in rho_expand(&w, &d) {
            let e: &mut LaurentPoly = direct.entry((l, r)).or_default();
            *e = &*e + &c;
        }
        assert_eq!(direct, rho_by_products(&w, &d));
    }
    let two = rho_expand(&[0, 1], &d);
    assert_eq!(two.len(), 4);
    assert!(two.contains(&(vec![1], vec![0], LaurentPoly::q_pow(1))));
}

#[test]
fn base_values() {
    let d = mixed();
    let p = Pairing::new(d.clone());
    let v = p.pair_words(&[0], &[0], 10).unwrap();
    assert_eq!(v.series, geom_inverse(2, 10).unwrap());
    assert!(p.pair_words(&[0], &[1], 10).unwrap().closed.is_zero());
    assert_eq!(p.pair_words(&[], &[], 4).unwrap().series, QSeries::from_poly(&LaurentPoly::one(), 4));
    // ρ cross term carries q^{-i·j}
    let v = p.pair_words(&[0, 1], &[1, 0], 10).unwrap();
    assert_eq!(v.closed.numerator, LaurentPoly::q_pow(1));
    let orth = datum(vec![vec![2, 0], vec![0, 2]]);
    let p = Pairing::new(orth);
    let v = p.pair_words(&[0, 1], &[0, 1], 10).unwrap();
    assert_eq!(v.closed.numerator, LaurentPoly::one());
}

#[test]
fn symmetry_and_strategy_independence() {
    let d = datum(vec![vec![2, -2], vec![-1, 0]]);
    let last = Pairing::new(d.clone());
    let first = Pairing::with_strategy(d, PeelStrategy::First);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut b = a.clone();
        for _ in 0..3 {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            b.swap(x, y);
        }
        let ab = last.word_numerator(&a, &b);
        assert_eq!(ab, last.word_numerator(&b, &a));
        assert_eq!(ab, first.word_numerator(&a, &b));
    }
}

#[test]
fn product_side_of_the_form() {
    // {xy, z} = {x ⊗ y, ρ(z)}
    let d = mixed();
    let p = Pairing::new(d.clone());
    for z in all_sequences(&Weight::from_pairs([(0, 2), (1, 1)])) {
        let (x, y) = (vec![0, 1], vec![0]);
        let mut xy = x.clone();
        xy.extend(&y);
        let lhs = p.pair_words(&xy, &z.0, 12).unwrap().series;
        let mut rhs = QSeries::zero(12);
        for (l, r, c) in rho_expand(&z.0, &d) {
            let a = p.pair_words(&x, &l, 14).unwrap().series;
            let b = p.pair_words(&y, &r, 14).unwrap().series;
            rhs = rhs.add(&a.mul(&b).mul_poly(&c).truncate(12));
        }
        assert_eq!(lhs.agrees_with(&rhs), Some(12));
    }
}

#[test]
fn serre_elements_lie_in_the_radical() {
    for m in [
        vec![vec![2, -1], vec![-1, 2]],
        vec![vec![2, -1], vec![-2, 2]],
        vec![vec![2, -2], vec![-1, 0]],
        vec![vec![2, -1], vec![-1, -2]],
    ] {
        let d = datum(m);
        let p = Pairing::new(d.clone());
        for (i, j) in [(0, 1), (1, 0)] {
            if !d.is_real(i) {
                assert!(p.serre_element(i, j).is_err());
                continue;
            }
            let r = p.serre_radical_check(i, j, 4).unwrap();
            assert!(r.holds(), "{:?}", r.failures);
            assert!(r.elements > 0);
        }
    }
}

#[test]
fn serre_with_the_bilinear_bound_fails_when_r_exceeds_one() {
    // B2 with r = (2, 1): 1 − i·j differs from 1 − a_ij for the long root
    let d = datum(vec![vec![2, -1], vec![-2, 2]]);
    let p = Pairing::new(d.clone());
    let (i, j) = (0, 1);
    let m = 1 - d.bilinear(i, j);
    assert_ne!(m, 1 - d.cartan(i, j));
    let mut x = FreeQElement::zero();
    for r in 0..=m {
        let mut w = vec![i; r as usize];
        w.push(j);
        w.extend(std::iter::repeat_n(i, (m - r) as usize));
        let c = quantum_binomial(m, r, d.r(i)).unwrap();
        x.add_term(w, &if r % 2 == 0 { c } else { -c });
    }
    assert!(!p.is_in_radical_against_words(&x));
}

#[test]
fn commutation_for_orthogonal_pairs() {
    let d = datum(vec![vec![2, 0, 0], vec![0, -2, 0], vec![0, 0, 2]]);
    let p = Pairing::new(d);
    assert!(p.commutation_check(0, 1).unwrap());
    assert!(p.commutation_check(0, 2).unwrap());
    assert!(matches!(p.commutation_check(1, 1), Err(QGroupError::BadPair(..))));
    let z = datum(vec![vec![0]]);
    assert!(Pairing::new(z).commutation_check(0, 0).unwrap());
}

#[test]
fn pairing_matches_graded_dimensions() {
    let d = datum(vec![vec![2, -1, 0], vec![-1, -2, -1], vec![0, -1, 2]]);
    let p = Pairing::new(d);
    for nu in [Weight::from_pairs([(0, 1), (1, 1)]), Weight::from_pairs([(0, 1), (1, 1), (2, 1)]), Weight::from_pairs([(1, 2), (0, 1)])] {
        for m in p.sweep(&nu, 12).unwrap() {
            assert!(m.holds(), "{:?}", m);
        }
    }
    let single = p.match_pairing_with_gdim(&Sequence::new(vec![0]), &Sequence::new(vec![0]), 20).unwrap();
    assert!(single.holds());
    assert_eq!(generator_norm(p.datum(), 0).expand(20).unwrap().to_string(), single.quantum_side);
}
