use super::*;
use crate::polyrep::MultiPoly;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn datum(m: Vec<Vec<i64>>) -> BorcherdsCartanDatum {
    BorcherdsCartanDatum::from_matrix(m).unwrap()
}

fn seq(v: &[usize]) -> Sequence {
    Sequence::new(v.to_vec())
}

fn mixed() -> BorcherdsCartanDatum {
    datum(vec![vec![2, -1], vec![-1, -2]])
}

fn generic_vector(src: &Sequence) -> PolyVector {
    let n = src.len();
    let mut f = MultiPoly::zero(n);
    for k in 0..n {
        let mut e = vec![0u16; 2 * n];
        e[k] = (k + 1) as u16;
        f.add_term(e, rat(k as i64 + 2));
        let mut e = vec![0u16; 2 * n];
        e[n + k] = 1;
        e[(k + 1) % n] += 1;
        f.add_term(e, rat(1 - k as i64));
    }
    f.add_term(vec![0; 2 * n], rat(5));
    PolyVector::single(src.clone(), f)
}

#[test]
fn nilhecke_relations() {
    let alg = KlrAlgebra::new(datum(vec![vec![2]]));
    let s = seq(&[0, 0]);
    let t = alg.crossing(0, &s).unwrap();
    assert!(alg.mul(&t, &t).is_zero());
    let lhs = alg
        .mul(&alg.dot(0, &s).unwrap(), &t)
        .sub(&alg.mul(&t, &alg.dot(1, &s).unwrap()));
    assert_eq!(lhs, alg.idempotent(&s));
    let lhs = alg
        .mul(&t, &alg.dot(0, &s).unwrap())
        .sub(&alg.mul(&alg.dot(1, &s).unwrap(), &t));
    assert_eq!(lhs, alg.idempotent(&s));
}

#[test]
fn quadratic_relation_for_distinct_labels() {
    let d = mixed();
    let alg = KlrAlgebra::new(d.clone());
    let s = seq(&[0, 1]);
    let t = alg.crossing(0, &s).unwrap();
    let back = alg.crossing(0, t.target()).unwrap();
    let sq = alg.mul(&back, &t);
    // x_1^{-a_01} + x_2^{-a_10} = x_1 + x_2
    let expected = alg.dot(0, &s).unwrap().add(&alg.dot(1, &s).unwrap());
    assert_eq!(sq, expected);
}

#[test]
fn imaginary_square_and_slides() {
    let alg = KlrAlgebra::new(datum(vec![vec![0]]));
    let s = seq(&[0, 0]);
    let t = alg.crossing(0, &s).unwrap();
    assert!(alg.mul(&t, &t).is_zero());
    let slide = alg
        .mul(&alg.dot(0, &s).unwrap(), &t)
        .sub(&alg.mul(&t, &alg.dot(1, &s).unwrap()));
    assert!(slide.is_zero());
}

#[test]
fn braid_correction_term() {
    let d = datum(vec![vec![2, -2], vec![-1, 0]]);
    let alg = KlrAlgebra::new(d.clone());
    let s = seq(&[0, 1, 0]);
    let a = alg.normalize_word(&s, &[0, 1, 0]);
    let b = alg.normalize_word(&s, &[1, 0, 1]);
    // x_1 + x_3 since -a_01 - 1 = 1
    let expected = alg.dot(0, &s).unwrap().add(&alg.dot(2, &s).unwrap());
    assert_eq!(a.sub(&b), expected);
}

#[test]
fn products_match_polynomial_action() {
    let alg = KlrAlgebra::new(mixed());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s0 = seq(&[0, 1, 0]);
    let seqs = all_sequences(&s0.weight());
    for _ in 0..12 {
        let a_src = &seqs[rng.gen_range(0..seqs.len())];
        let mid = &seqs[rng.gen_range(0..seqs.len())];
        let top = &seqs[rng.gen_range(0..seqs.len())];
        let b = alg.random_element(a_src, mid, &mut rng, 3, 1).unwrap();
        let a = alg.random_element(mid, top, &mut rng, 3, 1).unwrap();
        let v = generic_vector(a_src);
        let lhs = alg.act_on_polyrep(&alg.mul(&a, &b), &v).unwrap();
        let rhs = alg.act_on_polyrep(&a, &alg.act_on_polyrep(&b, &v).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn associativity_and_psi() {
    let d = datum(vec![vec![2, -2], vec![-1, 0]]);
    let alg = KlrAlgebra::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let seqs = all_sequences(&seq(&[0, 1, 0]).weight());
    for _ in 0..10 {
        let pick = |rng: &mut ChaCha8Rng| seqs[rng.gen_range(0..seqs.len())].clone();
        let (s0, s1, s2, s3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let c = alg.random_element(&s0, &s1, &mut rng, 2, 1).unwrap();
        let b = alg.random_element(&s1, &s2, &mut rng, 2, 1).unwrap();
        let a = alg.random_element(&s2, &s3, &mut rng, 2, 1).unwrap();
        assert_eq!(alg.mul(&alg.mul(&a, &b), &c), alg.mul(&a, &alg.mul(&b, &c)));
        assert_eq!(alg.psi(&alg.psi(&a)), a);
        assert_eq!(alg.psi(&alg.mul(&a, &b)), alg.mul(&alg.psi(&b), &alg.psi(&a)));
    }
}

#[test]
fn strategy_does_not_change_products() {
    let d = datum(vec![vec![2, -1, 0], vec![-1, -2, -1], vec![0, -1, 2]]);
    let a1 = KlrAlgebra::new(d.clone());
    let a2 = KlrAlgebra::with_strategy(d, BraidStrategy::ShuffledBfs { seed: 9 });
    let s = seq(&[0, 1, 0, 2]);
    let word = [2, 1, 0, 2, 1, 2, 0];
    assert_eq!(a1.normalize_word(&s, &word), a2.normalize_word(&s, &word));
    let word = [0, 1, 0, 1, 2];
    assert_eq!(a1.normalize_word(&s, &word), a2.normalize_word(&s, &word));
}

#[test]
fn basis_sizes_match_graded_dimension() {
    let alg = KlrAlgebra::new(mixed());
    let src = seq(&[0, 1, 0]);
    let tgt = seq(&[0, 0, 1]);
    let g = alg.gdim_corner(&src, &tgt, 8).unwrap();
    for d in -4..=8 {
        let b = alg.basis_of_degree(&src, &tgt, d).unwrap();
        assert_eq!(BigInt::from(b.len()), g.coeff(d), "degree {d}");
    }
}

#[test]
fn divided_idempotents_and_rank_oracle() {
    let d = mixed();
    let alg = KlrAlgebra::new(d.clone());
    for n in 2..=3 {
        let shape = DividedSequence::new(vec![(0, n)], &d).unwrap();
        let e = alg.divided_idempotent(&shape).unwrap();
        let j = Sequence::repeat(0, n);
        let cap = 6;
        let closed = alg.gdim_divided_corner(&shape, &j, cap).unwrap();
        let by_series = alg.gdim_divided_corner_by_series(&shape, &j, cap).unwrap();
        assert_eq!(closed.agrees_with(&by_series), Some(cap));
        let rank = alg.gdim_truncation_by_rank(&e.element, &j, Side::Left, cap).unwrap();
        assert_eq!(rank, closed.known_part());
        // right truncation sits 2⟨𝐢⟩ lower
        let right = alg.gdim_truncation_by_rank(&e.element, &j, Side::Right, cap).unwrap();
        let shift = 2 * shape.angle(&d);
        let expected = closed.mul_poly(&LaurentPoly::q_pow(-shift));
        let right = QSeries::from_poly(&right, expected.cap());
        assert_eq!(right.agrees_with(&expected), Some(cap - shift));
    }
    let shape = DividedSequence::new(vec![(0, 2), (1, 1)], &d).unwrap();
    let e = alg.divided_idempotent(&shape).unwrap();
    let j = seq(&[0, 1, 0]);
    let rank = alg.gdim_truncation_by_rank(&e.element, &j, Side::Left, 5).unwrap();
    assert_eq!(rank, alg.gdim_divided_corner(&shape, &j, 5).unwrap().known_part());
}

#[test]
fn symmetric_polynomials_are_central() {
    let alg = KlrAlgebra::new(mixed());
    let nu = Weight::from_pairs([(0, 2), (1, 1)]);
    let mut cand = CenterCandidate::new();
    cand.insert(0, elementary_symmetric(2, 1));
    assert!(alg.center_check(&cand, &nu).unwrap());
    cand.insert(1, elementary_symmetric(1, 1));
    assert!(alg.center_check(&cand, &nu).unwrap());
    let mut bad = CenterCandidate::new();
    bad.insert(0, BTreeMap::from([(vec![1, 0], rat(1))]));
    assert!(!alg.center_check(&bad, &nu).unwrap());
}

#[test]
fn centralizer_matches_symmetric_polynomials() {
    let alg = KlrAlgebra::new(datum(vec![vec![2]]));
    let nu = Weight::single(0, 2);
    let cap = 8;
    let solved = alg.centralizer_gdim(&nu, cap).unwrap();
    assert_eq!(solved, alg.gdim_center(&nu, cap).unwrap().known_part());
}

#[test]
fn render_shape() {
    let d = mixed();
    let alg = KlrAlgebra::new(d.clone());
    let t = alg.crossing(0, &seq(&[0, 1])).unwrap();
    let r = t.render(&d);
    assert!(r.contains("τ[w="));
    assert!(r.ends_with(": i0 i1 → i1 i0"));
}

#[test]
fn serre_sums_agree() {
    let cases = [
        (vec![vec![2, -1], vec![-1, 2]], 0, 1),
        (vec![vec![2, -1], vec![-2, 2]], 0, 1),
        (vec![vec![2, -1], vec![-2, 2]], 1, 0),
        (vec![vec![2, -2], vec![-1, 0]], 0, 1),
        (vec![vec![2, 0], vec![0, -2]], 0, 1),
        (vec![vec![2, -1], vec![-1, -2]], 0, 1),
    ];
    for (m, i, j) in cases {
        let alg = KlrAlgebra::new(datum(m.clone()));
        let report = alg.serre_character_check(i, j).unwrap();
        assert_eq!(report.m as i64, 1 - m[i][j]);
        assert!(report.holds(), "{m:?} {i} {j}");
    }
    let alg = KlrAlgebra::new(mixed());
    assert!(matches!(alg.serre_character_check(1, 0), Err(KlrError::RealIndexRequired(_))));
}

#[test]
fn serre_with_wrong_sign_fails() {
    // dropping the alternation must break the identity
    let d = datum(vec![vec![2, -1], vec![-1, 2]]);
    let alg = KlrAlgebra::new(d.clone());
    let k = seq(&[0, 1, 0]);
    let mid = alg
        .divided_projective_closed(&k, &DividedSequence::new(vec![(0, 1), (1, 1), (0, 1)], &d).unwrap())
        .unwrap();
    let left = alg
        .divided_projective_closed(&k, &DividedSequence::new(vec![(0, 2), (1, 1)], &d).unwrap())
        .unwrap();
    assert_ne!(mid.numerator, left.numerator);
}

#[test]
fn psi_on_generators() {
    let d = mixed();
    let alg = KlrAlgebra::new(d.clone());
    for s in all_sequences(&Weight::from_pairs([(0, 2), (1, 1)])) {
        assert_eq!(alg.psi(&alg.idempotent(&s)), alg.idempotent(&s));
        for k in 0..3 {
            let x = alg.dot(k, &s).unwrap();
            assert_eq!(alg.psi(&x), x);
        }
        for k in 0..2 {
            let t = alg.crossing(k, &s).unwrap();
            let flipped = alg.crossing(k, &s.swapped(k)).unwrap();
            assert_eq!(alg.psi(&t), flipped);
            assert_eq!(alg.psi(&t).degree(&d), t.degree(&d));
        }
    }
}
