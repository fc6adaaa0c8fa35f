//! The defining relations of `R(ν)` as operator identities, and a harness
//! that checks them against any concrete action of the generators.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::datum::BorcherdsCartanDatum;
use crate::polyrep::{crossing_on_poly, MultiPoly, PolyRepError, PolyVector};
use crate::wordcomb::{all_sequences, Sequence, Weight};

/// Largest height accepted by the exhaustive relation check.
pub const MAX_VERIFY_HT: usize = 6;

/// A generator acting on a single component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Dot(usize),
    Cross(usize),
}

impl Gen {
    /// Sequence at the top when the generator sits on `seq`.
    pub fn target(&self, seq: &Sequence) -> Sequence {
        match *self {
            Gen::Dot(_) => seq.clone(),
            Gen::Cross(k) => seq.swapped(k),
        }
    }
}

/// `coeff · g_1 g_2 ... g_l`, applied with `g_l` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTerm {
    pub coeff: i64,
    pub word: Vec<Gen>,
}

impl OpTerm {
    fn new(coeff: i64, word: Vec<Gen>) -> Self {
        Self { coeff, word }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationFamily {
    DotsCommute,
    DotFarFromCrossing,
    CrossingsFarCommute,
    DoubleCrossing,
    DotSlideReal,
    DotSlideImaginary,
    DotSlideDistinct,
    BraidCorrected,
    Braid,
}

impl RelationFamily {
    pub const ALL: [RelationFamily; 9] = [
        RelationFamily::DotsCommute,
        RelationFamily::DotFarFromCrossing,
        RelationFamily::CrossingsFarCommute,
        RelationFamily::DoubleCrossing,
        RelationFamily::DotSlideReal,
        RelationFamily::DotSlideImaginary,
        RelationFamily::DotSlideDistinct,
        RelationFamily::BraidCorrected,
        RelationFamily::Braid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelationFamily::DotsCommute => "dots-commute",
            RelationFamily::DotFarFromCrossing => "dot-far-from-crossing",
            RelationFamily::CrossingsFarCommute => "crossings-far-commute",
            RelationFamily::DoubleCrossing => "double-crossing",
            RelationFamily::DotSlideReal => "dot-slide-real",
            RelationFamily::DotSlideImaginary => "dot-slide-imaginary",
            RelationFamily::DotSlideDistinct => "dot-slide-distinct",
            RelationFamily::BraidCorrected => "braid-corrected",
            RelationFamily::Braid => "braid",
        }
    }
}

/// `lhs = rhs` on `1_seq`.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub family: RelationFamily,
    pub seq: Sequence,
    pub positions: Vec<usize>,
    pub lhs: Vec<OpTerm>,
    pub rhs: Vec<OpTerm>,
}

fn dots(k: usize, e: i64) -> Vec<Gen> {
    vec![Gen::Dot(k); e as usize]
}

/// Every relation instance with bottom sequence `seq`.
pub fn relation_instances(datum: &BorcherdsCartanDatum, seq: &Sequence) -> Vec<RelationInstance> {
    use Gen::{Cross, Dot};
    let n = seq.len();
    let s = &seq.0;
    let mut out = Vec::new();
    let mut push = |family, positions: Vec<usize>, lhs: Vec<OpTerm>, rhs: Vec<OpTerm>| {
        out.push(RelationInstance {
            family,
            seq: seq.clone(),
            positions,
            lhs,
            rhs,
        })
    };
    for k in 0..n {
        for t in k + 1..n {
            push(
                RelationFamily::DotsCommute,
                vec![k, t],
                vec![OpTerm::new(1, vec![Dot(k), Dot(t)])],
                vec![OpTerm::new(1, vec![Dot(t), Dot(k)])],
            );
        }
    }
    for k in 0..n.saturating_sub(1) {
        for t in (0..n).filter(|&t| t != k && t != k + 1) {
            push(
                RelationFamily::DotFarFromCrossing,
                vec![k, t],
                vec![OpTerm::new(1, vec![Cross(k), Dot(t)])],
                vec![OpTerm::new(1, vec![Dot(t), Cross(k)])],
            );
        }
        for t in k + 2..n.saturating_sub(1) {
            push(
                RelationFamily::CrossingsFarCommute,
                vec![k, t],
                vec![OpTerm::new(1, vec![Cross(k), Cross(t)])],
                vec![OpTerm::new(1, vec![Cross(t), Cross(k)])],
            );
        }
        let (i, j) = (s[k], s[k + 1]);
        let rhs = if i == j {
            vec![]
        } else if datum.bilinear(i, j) == 0 {
            vec![OpTerm::new(1, vec![])]
        } else {
            vec![
                OpTerm::new(1, dots(k, -datum.cartan(i, j))),
                OpTerm::new(1, dots(k + 1, -datum.cartan(j, i))),
            ]
        };
        push(
            RelationFamily::DoubleCrossing,
            vec![k],
            vec![OpTerm::new(1, vec![Cross(k), Cross(k)])],
            rhs,
        );
        let (family, correction) = if i == j && datum.is_real(i) {
            (RelationFamily::DotSlideReal, vec![OpTerm::new(1, vec![])])
        } else if i == j {
            (RelationFamily::DotSlideImaginary, vec![])
        } else {
            (RelationFamily::DotSlideDistinct, vec![])
        };
        // x_k τ_k − τ_k x_{k+1} and τ_k x_k − x_{k+1} τ_k
        push(
            family,
            vec![k],
            vec![
                OpTerm::new(1, vec![Dot(k), Cross(k)]),
                OpTerm::new(-1, vec![Cross(k), Dot(k + 1)]),
            ],
            correction.clone(),
        );
        push(
            family,
            vec![k],
            vec![
                OpTerm::new(1, vec![Cross(k), Dot(k)]),
                OpTerm::new(-1, vec![Dot(k + 1), Cross(k)]),
            ],
            correction,
        );
    }
    for k in 0..n.saturating_sub(2) {
        let (i, j, l) = (s[k], s[k + 1], s[k + 2]);
        let lhs = vec![
            OpTerm::new(1, vec![Cross(k), Cross(k + 1), Cross(k)]),
            OpTerm::new(-1, vec![Cross(k + 1), Cross(k), Cross(k + 1)]),
        ];
        if i == l && i != j && datum.is_real(i) && datum.bilinear(i, j) != 0 {
            let m = -datum.cartan(i, j) - 1;
            let rhs = (0..=m)
                .map(|a| {
                    let mut w = dots(k, a);
                    w.extend(dots(k + 2, m - a));
                    OpTerm::new(1, w)
                })
                .collect();
            push(RelationFamily::BraidCorrected, vec![k], lhs, rhs);
        } else {
            push(RelationFamily::Braid, vec![k], lhs, vec![]);
        }
    }
    out
}

/// A concrete action of the generators on some space of vectors.
pub trait GeneratorAction: Sync {
    type Vector: Clone + Send + Sync;
    type Error: std::fmt::Debug + Send;

    /// Applies `g` sitting on bottom sequence `seq` (projecting onto that
    /// component first).
    fn act(&self, g: Gen, seq: &Sequence, v: &Self::Vector) -> Result<Self::Vector, Self::Error>;
    fn combine(&self, terms: Vec<(BigRational, Self::Vector)>) -> Self::Vector;
    fn is_zero(&self, v: &Self::Vector) -> bool;
}

/// `Σ_lhs − Σ_rhs` applied to `v`.
pub fn residual<A: GeneratorAction>(
    action: &A,
    rel: &RelationInstance,
    v: &A::Vector,
) -> Result<A::Vector, A::Error> {
    let mut terms = Vec::new();
    for (sign, side) in [(1i64, &rel.lhs), (-1, &rel.rhs)] {
        for t in side {
            let mut cur = v.clone();
            let mut seq = rel.seq.clone();
            for g in t.word.iter().rev() {
                cur = action.act(*g, &seq, &cur)?;
                seq = g.target(&seq);
            }
            terms.push((BigRational::from_integer(BigInt::from(sign * t.coeff)), cur));
        }
    }
    Ok(action.combine(terms))
}

/// The polynomial representation as a [`GeneratorAction`].
pub struct PolyAction<'a> {
    pub datum: &'a BorcherdsCartanDatum,
}

impl GeneratorAction for PolyAction<'_> {
    type Vector = PolyVector;
    type Error = PolyRepError;

    fn act(&self, g: Gen, seq: &Sequence, v: &PolyVector) -> Result<PolyVector, PolyRepError> {
        let Some(f) = v.component(seq) else {
            return Ok(PolyVector::zero());
        };
        Ok(match g {
            Gen::Dot(k) => PolyVector::single(seq.clone(), f.mul_x_pow(k, 1)),
            Gen::Cross(k) => {
                let (t, h) = crossing_on_poly(k, seq, f, self.datum)?;
                PolyVector::single(t, h)
            }
        })
    }

    fn combine(&self, terms: Vec<(BigRational, PolyVector)>) -> PolyVector {
        terms
            .into_iter()
            .fold(PolyVector::zero(), |acc, (c, v)| acc.add(&v.scale(&c)))
    }

    fn is_zero(&self, v: &PolyVector) -> bool {
        v.is_zero()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub sequence: String,
    /// 1-based positions of the relation instance.
    pub positions: Vec<usize>,
    pub input: String,
    pub residual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub relation: &'static str,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub weight: String,
    pub test_degree: u16,
    pub passed: bool,
    pub relations: Vec<FamilyReport>,
}

/// Checks every relation instance of `R(ν)` on every monomial of total
/// degree `≤ test_degree` of the polynomial representation.
pub fn verify_relations(
    datum: &BorcherdsCartanDatum,
    nu: &Weight,
    test_degree: u16,
) -> Result<RelationReport, PolyRepError> {
    let n = nu.ht();
    if n > MAX_VERIFY_HT {
        return Err(PolyRepError::GuardExceeded { ht: n, guard: MAX_VERIFY_HT });
    }
    let action = PolyAction { datum };
    let monomials = MultiPoly::monomials_up_to(n, test_degree);
    let instances: Vec<RelationInstance> = all_sequences(nu)
        .iter()
        .flat_map(|s| relation_instances(datum, s))
        .collect();
    let results: Vec<(RelationFamily, usize, Option<Counterexample>, usize)> = instances
        .par_iter()
        .map(|rel| {
            let mut failures = 0;
            let mut first = None;
            for m in &monomials {
                let v = PolyVector::single(rel.seq.clone(), m.clone());
                let r = residual(&action, rel, &v)?;
                if !r.is_zero() {
                    failures += 1;
                    if first.is_none() {
                        first = Some(Counterexample {
                            sequence: rel.seq.render(datum),
                            positions: rel.positions.iter().map(|p| p + 1).collect(),
                            input: m.to_string(),
                            residual: format!("{r:?}"),
                        });
                    }
                }
            }
            Ok((rel.family, failures, first, monomials.len()))
        })
        .collect::<Result<_, PolyRepError>>()?;
    let mut relations = Vec::new();
    for fam in RelationFamily::ALL {
        let mine: Vec<_> = results.iter().filter(|r| r.0 == fam).collect();
        if mine.is_empty() {
            continue;
        }
        let failures: usize = mine.iter().map(|r| r.1).sum();
        relations.push(FamilyReport {
            relation: fam.name(),
            instances: mine.len(),
            checks: mine.iter().map(|r| r.3).sum(),
            failures,
            passed: failures == 0,
            counterexample: mine.iter().find_map(|r| r.2.clone()),
        });
    }
    Ok(RelationReport {
        weight: nu.render(datum),
        test_degree,
        passed: relations.iter().all(|r| r.passed),
        relations,
    })
}
