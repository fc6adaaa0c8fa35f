//! Verification suites over one datum. Each suite returns a list of named
//! pass/fail checks with JSON payloads describing counterexamples.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{elementary_symmetric, CenterCandidate, KlrAlgebra, Side};
use crate::braid::BraidStrategy;
use crate::datum::BorcherdsCartanDatum;
use crate::linalg::{rat, unit_vec, Subspace};
use crate::polyrep::{MultiPoly, PolyVector};
use crate::qarith::LaurentPoly;
use crate::qgroup::Pairing;
use crate::relations::{verify_relations, Gen};
use crate::reptheory::{
    char_v, char_v_real, character_of, delta_character, delta_of_induced_check, epsilon_i, head, induce_characters,
    induced_trivials, lbar, mackey_character_check, polynomial_induced, probe, trivial_v, Character,
};
use crate::wordcomb::{all_permutations, all_sequences, binomial, DividedSequence, Permutation, Sequence, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    Computation(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

fn comp<E: fmt::Display>(e: E) -> SuiteError {
    SuiteError::Computation(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Polyrep,
    BasisOracle,
    Serre,
    Pairing,
    Modules,
    Mackey,
    Center,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Polyrep,
        Suite::BasisOracle,
        Suite::Serre,
        Suite::Pairing,
        Suite::Modules,
        Suite::Mackey,
        Suite::Center,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Polyrep => "polyrep",
            Suite::BasisOracle => "basis-oracle",
            Suite::Serre => "serre",
            Suite::Pairing => "pairing",
            Suite::Modules => "modules",
            Suite::Mackey => "mackey",
            Suite::Center => "center",
        }
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, SuiteError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteConfig {
    pub max_ht: usize,
    pub test_degree: u16,
    pub cap: i64,
    pub seed: u64,
    pub samples: usize,
    pub module_guard: usize,
    pub lbar_max: usize,
    pub center_cap: i64,
    #[serde(skip)]
    pub checkpoint: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            max_ht: 4,
            test_degree: 4,
            cap: 20,
            seed: 7,
            samples: 50,
            module_guard: 5,
            lbar_max: 4,
            center_cap: 12,
            checkpoint: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of elementary comparisons behind the verdict.
    pub count: usize,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, count: usize, detail: Value) -> Self {
        Self {
            name: name.into(),
            passed,
            count,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub datum: Vec<Vec<i64>>,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks whose name starts with `prefix`.
    pub fn checks_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}

/// All weights with `1 ≤ ht ≤ max_ht` over `rank` indices.
pub fn weights_up_to(rank: usize, max_ht: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    fn rec(i: usize, rank: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Weight>) {
        if i == rank {
            let w = Weight::from_pairs(cur.iter().copied().enumerate());
            if !w.is_zero() {
                out.push(w);
            }
            return;
        }
        for n in 0..=left {
            cur.push(n);
            rec(i + 1, rank, left - n, cur, out);
            cur.pop();
        }
    }
    rec(0, rank, max_ht, &mut Vec::new(), &mut out);
    out.sort_by_key(|w| (w.ht(), w.clone()));
    out
}

pub fn run_suite(suite: Suite, datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let checks = match suite {
        Suite::Polyrep => polyrep_suite(datum, cfg)?,
        Suite::BasisOracle => basis_oracle_suite(datum, cfg)?,
        Suite::Serre => serre_suite(datum, cfg)?,
        Suite::Pairing => pairing_suite(datum, cfg)?,
        Suite::Modules => modules_suite(datum, cfg)?,
        Suite::Mackey => mackey_suite(datum, cfg)?,
        Suite::Center => center_suite(datum, cfg)?,
    };
    Ok(SuiteReport {
        suite: suite.name(),
        datum: datum.matrix().to_vec(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn polyrep_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for nu in weights_up_to(datum.rank(), cfg.max_ht) {
        let r = verify_relations(datum, &nu, cfg.test_degree).map_err(comp)?;
        let checks = r.relations.iter().map(|f| f.checks).sum();
        let detail = if r.passed {
            Value::Null
        } else {
            serde_json::to_value(&r).map_err(comp)?
        };
        out.push(Check::new(format!("relations {}", nu.render(datum)), r.passed, checks, detail));
    }
    Ok(out)
}

fn random_seq(rng: &mut ChaCha8Rng, seqs: &[Sequence]) -> Sequence {
    seqs[rng.gen_range(0..seqs.len())].clone()
}

fn random_vector(rng: &mut ChaCha8Rng, src: &Sequence) -> PolyVector {
    let n = src.len();
    let mut f = MultiPoly::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let exps: Vec<u16> = (0..2 * n).map(|_| rng.gen_range(0..=2)).collect();
        f.add_term(exps, rat(rng.gen_range(1..=5)));
    }
    PolyVector::single(src.clone(), f)
}

/// A random weight, half the time of the largest height.
fn random_weight(rng: &mut ChaCha8Rng, weights: &[Weight], max_ht: usize) -> Weight {
    let top: Vec<&Weight> = weights.iter().filter(|w| w.ht() == max_ht).collect();
    if !top.is_empty() && rng.gen_bool(0.5) {
        top[rng.gen_range(0..top.len())].clone()
    } else {
        weights[rng.gen_range(0..weights.len())].clone()
    }
}

fn basis_oracle_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let alg = KlrAlgebra::new(datum.clone());
    let shuffled = KlrAlgebra::with_strategy(datum.clone(), BraidStrategy::ShuffledBfs { seed: cfg.seed });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights = weights_up_to(datum.rank(), cfg.max_ht);
    let mut out = Vec::new();

    let mut failures = Vec::new();
    for _ in 0..cfg.samples {
        let nu = random_weight(&mut rng, &weights, cfg.max_ht);
        let seqs = all_sequences(&nu);
        let (s0, s1, s2) = (random_seq(&mut rng, &seqs), random_seq(&mut rng, &seqs), random_seq(&mut rng, &seqs));
        let b = alg.random_element(&s0, &s1, &mut rng, 3, 1).map_err(comp)?;
        let a = alg.random_element(&s1, &s2, &mut rng, 3, 1).map_err(comp)?;
        let v = random_vector(&mut rng, &s0);
        let lhs = alg.act_on_polyrep(&alg.mul(&a, &b), &v).map_err(comp)?;
        let rhs = alg.act_on_polyrep(&a, &alg.act_on_polyrep(&b, &v).map_err(comp)?).map_err(comp)?;
        if lhs != rhs && failures.len() < 3 {
            failures.push(json!({"a": a.render(datum), "b": b.render(datum)}));
        }
    }
    out.push(Check::new("faithful-action", failures.is_empty(), cfg.samples, json!(failures)));

    let triples = 2 * cfg.samples;
    let mut failures = Vec::new();
    let mut psi_failures = Vec::new();
    let mut strategy_failures = Vec::new();
    for _ in 0..triples {
        let nu = random_weight(&mut rng, &weights, cfg.max_ht);
        let seqs = all_sequences(&nu);
        let s: Vec<Sequence> = (0..4).map(|_| random_seq(&mut rng, &seqs)).collect();
        let c = alg.random_element(&s[0], &s[1], &mut rng, 2, 1).map_err(comp)?;
        let b = alg.random_element(&s[1], &s[2], &mut rng, 2, 1).map_err(comp)?;
        let a = alg.random_element(&s[2], &s[3], &mut rng, 2, 1).map_err(comp)?;
        let ab = alg.mul(&a, &b);
        if alg.mul(&ab, &c) != alg.mul(&a, &alg.mul(&b, &c)) && failures.len() < 3 {
            failures.push(json!({"a": a.render(datum), "b": b.render(datum), "c": c.render(datum)}));
        }
        if (alg.psi(&alg.psi(&a)) != a || alg.psi(&ab) != alg.mul(&alg.psi(&b), &alg.psi(&a))) && psi_failures.len() < 3 {
            psi_failures.push(json!({"a": a.render(datum), "b": b.render(datum)}));
        }
        if shuffled.mul(&a, &b) != ab && strategy_failures.len() < 3 {
            strategy_failures.push(json!({"a": a.render(datum), "b": b.render(datum)}));
        }
    }
    out.push(Check::new("associativity", failures.is_empty(), triples, json!(failures)));
    out.push(Check::new("psi-anti-involution", psi_failures.is_empty(), triples, json!(psi_failures)));
    out.push(Check::new("strategy-independence", strategy_failures.is_empty(), triples, json!(strategy_failures)));

    // single basis elements are homogeneous
    let mut bad = 0;
    for _ in 0..cfg.samples {
        let nu = random_weight(&mut rng, &weights, cfg.max_ht);
        let seqs = all_sequences(&nu);
        let (s0, s1, s2) = (random_seq(&mut rng, &seqs), random_seq(&mut rng, &seqs), random_seq(&mut rng, &seqs));
        let b = alg.random_element(&s0, &s1, &mut rng, 1, 2).map_err(comp)?;
        let a = alg.random_element(&s1, &s2, &mut rng, 1, 2).map_err(comp)?;
        let ab = alg.mul(&a, &b);
        let expected = a.degree(datum).zip(b.degree(datum)).map(|(x, y)| x + y);
        if !ab.is_zero() && ab.degree(datum) != expected {
            bad += 1;
        }
    }
    out.push(Check::new("graded-multiplication", bad == 0, cfg.samples, Value::Null));

    let mut mismatches = Vec::new();
    let mut count = 0;
    for nu in weights.iter().filter(|w| w.ht() <= 3) {
        let seqs = all_sequences(nu);
        for src in &seqs {
            for tgt in &seqs {
                let g = alg.gdim_corner(src, tgt, 8).map_err(comp)?;
                let lo = alg.min_degree(src, tgt).map_err(comp)?.unwrap_or(0);
                for d in lo..=8 {
                    count += 1;
                    let n = alg.basis_of_degree(src, tgt, d).map_err(comp)?.len();
                    if BigInt::from(n) != g.coeff(d) {
                        mismatches.push(json!([src.render(datum), tgt.render(datum), d]));
                    }
                }
            }
        }
    }
    out.push(Check::new("basis-count", mismatches.is_empty(), count, json!(mismatches)));

    out.extend(idempotent_checks(&alg, cfg)?);
    Ok(out)
}

fn idempotent_checks(alg: &KlrAlgebra, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let datum = alg.datum();
    let cap = cfg.center_cap;
    let mut out = Vec::new();
    let mut idem = Vec::new();
    let mut shapes = Vec::new();
    for i in (0..datum.rank()).filter(|&i| datum.is_real(i)) {
        for n in 2..=3 {
            let shape = DividedSequence::new(vec![(i, n)], datum).map_err(comp)?;
            let ok = alg.divided_idempotent(&shape).is_ok();
            idem.push(json!({"shape": shape.render(datum), "idempotent": ok}));
            shapes.push(shape);
        }
        for j in (0..datum.rank()).filter(|&j| j != i) {
            shapes.push(DividedSequence::new(vec![(i, 2), (j, 1)], datum).map_err(comp)?);
            shapes.push(DividedSequence::new(vec![(j, 1), (i, 2)], datum).map_err(comp)?);
        }
    }
    if idem.is_empty() {
        return Ok(out);
    }
    let all_ok = idem.iter().all(|v| v["idempotent"] == json!(true));
    out.push(Check::new("divided-idempotents", all_ok, idem.len(), json!(idem)));

    let mut failures = Vec::new();
    let mut count = 0;
    for shape in shapes.iter().filter(|s| s.hat().len() <= 3) {
        let e = alg.divided_idempotent(shape).map_err(comp)?;
        for j in all_sequences(&shape.weight()) {
            count += 1;
            let formula = alg.gdim_divided_corner(shape, &j, cap).map_err(comp)?.known_part();
            let rank = alg.gdim_truncation_by_rank(&e.element, &j, Side::Left, cap).map_err(comp)?;
            if formula != rank {
                failures.push(json!({
                    "shape": shape.render(datum),
                    "j": j.render(datum),
                    "formula": formula.to_string(),
                    "rank": rank.to_string(),
                }));
            }
        }
    }
    out.push(Check::new("divided-gdim-rank", failures.is_empty(), count, json!(failures)));
    Ok(out)
}

fn serre_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let alg = KlrAlgebra::new(datum.clone());
    let pairing = Pairing::new(datum.clone());
    let mut out = Vec::new();
    for i in (0..datum.rank()).filter(|&i| datum.is_real(i)) {
        for j in (0..datum.rank()).filter(|&j| j != i) {
            let tag = format!("{},{}", datum.label(i), datum.label(j));
            let rep = alg.serre_character_check(i, j).map_err(comp)?;
            let bad: Vec<Value> = rep
                .lines
                .iter()
                .filter(|l| !l.holds)
                .map(|l| json!({"k": l.sequence.render(datum), "even": l.even.to_string(), "odd": l.odd.to_string()}))
                .collect();
            out.push(Check::new(
                format!("serre-characters {tag} m={}", rep.m),
                rep.holds(),
                rep.lines.len(),
                json!(bad),
            ));
            let rad = pairing.serre_radical_check(i, j, cfg.max_ht).map_err(comp)?;
            out.push(Check::new(
                format!("serre-radical {tag}"),
                rad.holds(),
                rad.elements,
                json!(rad.failures),
            ));
        }
    }
    for i in 0..datum.rank() {
        for j in i + 1..datum.rank() {
            if datum.bilinear(i, j) == 0 {
                let ok = pairing.commutation_check(i, j).map_err(comp)?;
                out.push(Check::new(
                    format!("commutation {},{}", datum.label(i), datum.label(j)),
                    ok,
                    1,
                    Value::Null,
                ));
            }
        }
    }
    Ok(out)
}

fn load_checkpoint(path: &PathBuf) -> Result<BTreeMap<String, Check>, SuiteError> {
    let mut done = BTreeMap::new();
    let Ok(file) = std::fs::File::open(path) else {
        return Ok(done);
    };
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| SuiteError::Checkpoint(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Check = serde_json::from_str(&line).map_err(|e| SuiteError::Checkpoint(e.to_string()))?;
        done.insert(c.name.clone(), c);
    }
    Ok(done)
}

fn pairing_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let pairing = Pairing::new(datum.clone());
    let done = match &cfg.checkpoint {
        Some(p) => load_checkpoint(p)?,
        None => BTreeMap::new(),
    };
    let mut sink = match &cfg.checkpoint {
        Some(p) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| SuiteError::Checkpoint(e.to_string()))?,
        ),
        None => None,
    };
    let mut out = Vec::new();
    for nu in weights_up_to(datum.rank(), cfg.max_ht) {
        let name = format!("pairing {}", nu.render(datum));
        if let Some(c) = done.get(&name) {
            out.push(c.clone());
            continue;
        }
        let matches = pairing.sweep(&nu, cfg.cap).map_err(comp)?;
        let passed = matches.iter().all(|m| m.holds());
        let check = Check::new(name, passed, matches.len(), serde_json::to_value(&matches).map_err(comp)?);
        if let Some(f) = sink.as_mut() {
            let line = serde_json::to_string(&check).map_err(comp)?;
            writeln!(f, "{line}").map_err(|e| SuiteError::Checkpoint(e.to_string()))?;
        }
        out.push(check);
    }
    Ok(out)
}

fn span_of_units(dim: usize, idx: impl IntoIterator<Item = usize>) -> Subspace {
    let vs: Vec<Vec<_>> = idx.into_iter().map(|b| unit_vec(dim, b)).collect();
    Subspace::spanned_by(dim, &vs)
}

/// Characters of the fixture modules, used by the ε/Δ checks.
fn fixture_characters(alg: &KlrAlgebra, cfg: &SuiteConfig) -> Result<Vec<Character>, SuiteError> {
    let datum = alg.datum();
    let mut chars = Vec::new();
    for i in 0..datum.rank() {
        for n in 1..=2 {
            chars.push(char_v(datum, i, n).map_err(comp)?);
        }
        if datum.is_imaginary(i) {
            chars.push(character_of(&lbar(datum, i, 3, cfg.module_guard).map_err(comp)?));
            chars.push(character_of(&induced_trivials(alg, i, 2, 1, cfg.module_guard).map_err(comp)?));
        }
    }
    for i in 0..datum.rank() {
        for j in 0..datum.rank() {
            if i != j {
                let a = char_v(datum, i, 1).map_err(comp)?;
                let b = char_v(datum, j, if datum.is_real(j) { 2 } else { 1 }).map_err(comp)?;
                let ab = induce_characters(&a, &b, datum);
                chars.push(induce_characters(&ab, &a, datum));
                chars.push(ab);
            }
        }
    }
    Ok(chars)
}

fn modules_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let alg = KlrAlgebra::new(datum.clone());
    let mut out = Vec::new();
    for i in 0..datum.rank() {
        let label = datum.label(i);
        if datum.is_real(i) {
            for n in 1..=3.min(cfg.module_guard) {
                let m = polynomial_induced(&alg, i, n, cfg.module_guard).map_err(comp)?;
                let shift = datum.r(i) * (n * (n - 1) / 2) as i64;
                let ch = character_of(&m).mul_poly(&LaurentPoly::q_pow(shift));
                let ok = ch == char_v_real(datum, i, n).map_err(comp)?;
                out.push(Check::new(format!("real-irreducible {label}^{n}"), ok, 1, Value::Null));
            }
            continue;
        }
        for n in 1..=cfg.lbar_max.min(cfg.module_guard) {
            let m = lbar(datum, i, n, cfg.module_guard).map_err(comp)?;
            let perms = all_permutations(n);
            let dim = m.dim();
            let dim_ok = dim == perms.len();
            let dots_ok = (0..n).all(|k| m.generator_matrix(Gen::Dot(k)).is_zero());
            let p = probe(&m).map_err(comp)?;
            let id = perms.iter().position(Permutation::is_identity).expect("identity is a permutation");
            let top = perms
                .iter()
                .position(|w| *w == Permutation::longest(n))
                .expect("longest element is a permutation");
            let max_ok = p
                .unique_maximal()
                .is_some_and(|s| s.same_as(&span_of_units(dim, (0..dim).filter(|&b| b != id))));
            let min_ok = p.unique_minimal().is_some_and(|s| s.same_as(&span_of_units(dim, [top])));
            let head_ok = head(&m).map(|h| h.is_trivial_on(&Sequence::repeat(i, n))).unwrap_or(false);
            let ok = dim_ok && dots_ok && max_ok && min_ok && head_ok;
            let detail = json!({"dim": dim, "dotsVanish": dots_ok, "uniqueMaximal": max_ok, "uniqueMinimal": min_ok, "trivialHead": head_ok});
            out.push(Check::new(format!("lbar {label}^{n}"), ok, 1, detail));
            if n <= 3 {
                let b = polynomial_induced(&alg, i, n, cfg.module_guard).map_err(comp)?;
                let same = (0..n.saturating_sub(1))
                    .all(|k| m.generator_matrix(Gen::Cross(k)) == b.generator_matrix(Gen::Cross(k)))
                    && (0..n).all(|k| b.generator_matrix(Gen::Dot(k)).is_zero());
                out.push(Check::new(format!("lbar-straightening {label}^{n}"), same, 1, Value::Null));
            }
        }
        for total in 2..=cfg.module_guard {
            for n in 1..total {
                let m = total - n;
                let ind = induced_trivials(&alg, i, n, m, cfg.module_guard).map_err(comp)?;
                let dim_ok = BigInt::from(ind.dim()) == binomial(total, n);
                let p = probe(&ind).map_err(comp)?;
                let max_ok = p.unique_maximal().is_some_and(|s| s.dim() + 1 == ind.dim());
                let head_ok = head(&ind).map(|h| h.is_trivial_on(&Sequence::repeat(i, total))).unwrap_or(false);
                let va = character_of(&trivial_v(datum, i, n).map_err(comp)?);
                let vb = character_of(&trivial_v(datum, i, m).map_err(comp)?);
                let ch_ok = character_of(&ind) == induce_characters(&va, &vb, datum);
                let ok = dim_ok && max_ok && head_ok && ch_ok;
                let detail = json!({"dim": ind.dim(), "uniqueMaximalCodimOne": max_ok, "trivialHead": head_ok, "shuffleCharacter": ch_ok});
                out.push(Check::new(format!("induced {label}^{n}+{label}^{m}"), ok, 1, detail));
            }
        }
    }

    let chars = fixture_characters(&alg, cfg)?;
    let mut count = 0;
    let mut bad = Vec::new();
    for ch in &chars {
        for i in 0..datum.rank() {
            let e = epsilon_i(ch, i);
            for n in 0..=e {
                count += 1;
                let d = delta_character(ch, i, n);
                if d.is_zero() || epsilon_i(&d, i) != e - n {
                    bad.push(json!({"character": ch.render(datum), "i": datum.label(i), "n": n}));
                }
            }
            count += 1;
            if !delta_character(ch, i, e + 1).is_zero() {
                bad.push(json!({"character": ch.render(datum), "i": datum.label(i), "n": e + 1}));
            }
        }
    }
    out.push(Check::new("epsilon-delta", bad.is_empty(), count, json!(bad)));

    let mut instances = Vec::new();
    for ch in &chars {
        for i in 0..datum.rank() {
            if epsilon_i(ch, i) != 0 {
                continue;
            }
            for n in 1..=2 {
                let ok = delta_of_induced_check(ch, i, n, datum).map_err(comp)?;
                instances.push(json!({"n_character": ch.render(datum), "i": datum.label(i), "n": n, "holds": ok}));
            }
        }
    }
    let ok = instances.iter().all(|v| v["holds"] == json!(true));
    out.push(Check::new("delta-of-induced", ok, instances.len(), json!(instances)));
    Ok(out)
}

/// A seeded character supported on every sequence of `w` with small
/// Laurent coefficients.
fn random_character(rng: &mut ChaCha8Rng, w: &Weight) -> Character {
    let mut ch = Character::zero(w.clone());
    for s in all_sequences(w) {
        if rng.gen_bool(0.2) {
            continue;
        }
        let mut p = LaurentPoly::zero();
        for _ in 0..rng.gen_range(1..=2) {
            p.add_term(rng.gen_range(-2..=2), BigInt::from(rng.gen_range(1..=3)));
        }
        ch.add_entry(s, &p);
    }
    ch
}

fn mackey_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let mut chars: BTreeMap<Weight, Character> = BTreeMap::new();
    chars.insert(Weight::zero(), Character::unit());
    for w in weights_up_to(datum.rank(), cfg.max_ht) {
        let c = random_character(&mut rng, &w);
        chars.insert(w, c);
    }
    for total in weights_up_to(datum.rank(), cfg.max_ht) {
        let mut count = 0;
        let mut twisted = 0;
        let mut bad = Vec::new();
        for mu in total.sub_weights() {
            let mu2 = total.checked_sub(&mu).expect("sub-weight");
            for nu in total.sub_weights() {
                let nu2 = total.checked_sub(&nu).expect("sub-weight");
                let r = mackey_character_check(&chars[&mu], &chars[&mu2], &nu, &nu2, datum).map_err(comp)?;
                count += 1;
                if !r.twisted.is_empty() {
                    twisted += 1;
                }
                if !r.holds {
                    bad.push(json!({"mu": mu.render(datum), "nu": nu.render(datum)}));
                }
            }
        }
        out.push(Check::new(
            format!("mackey {}", total.render(datum)),
            bad.is_empty(),
            count,
            json!({"twistedInstances": twisted, "failures": bad}),
        ));
    }
    // V(i)V(i): the twist is a nontrivial power exactly when i·i ≠ 0
    for i in (0..datum.rank()).filter(|&i| datum.is_imaginary(i)) {
        let v = character_of(&trivial_v(datum, i, 1).map_err(comp)?);
        let w = Weight::single(i, 1);
        let r = mackey_character_check(&v, &v, &w, &w, datum).map_err(comp)?;
        let shifts: Vec<i64> = r.twisted.iter().map(|(_, s)| *s).collect();
        out.push(Check::new(
            format!("mackey-trivial {}", datum.label(i)),
            r.holds && (shifts.is_empty() == (datum.bilinear(i, i) == 0)),
            1,
            json!({"shifts": shifts}),
        ));
    }
    Ok(out)
}

fn center_suite(datum: &BorcherdsCartanDatum, cfg: &SuiteConfig) -> Result<Vec<Check>, SuiteError> {
    let alg = KlrAlgebra::new(datum.clone());
    let mut out = Vec::new();
    let mut witnesses = 0;
    for nu in weights_up_to(datum.rank(), cfg.max_ht.min(3)) {
        let mut candidates: Vec<(String, CenterCandidate)> = vec![("1".into(), CenterCandidate::new())];
        for (i, m) in nu.support() {
            for k in 1..=m {
                let mut c = CenterCandidate::new();
                c.insert(i, elementary_symmetric(m, k));
                candidates.push((format!("e{k}({})", datum.label(i)), c));
            }
        }
        let mut all_e1 = CenterCandidate::new();
        for (i, m) in nu.support() {
            all_e1.insert(i, elementary_symmetric(m, 1));
        }
        candidates.push(("product of e1".into(), all_e1));
        let mut bad = Vec::new();
        for (name, c) in &candidates {
            if !alg.center_check(c, &nu).map_err(comp)? {
                bad.push(name.clone());
            }
        }
        out.push(Check::new(
            format!("symmetric-central {}", nu.render(datum)),
            bad.is_empty(),
            candidates.len(),
            json!(bad),
        ));
        for (i, m) in nu.support().filter(|&(_, m)| m >= 2) {
            let mut mono = vec![0u16; m];
            mono[0] = 1;
            let c = CenterCandidate::from([(i, BTreeMap::from([(mono, rat(1))]))]);
            let fails = !alg.center_check(&c, &nu).map_err(comp)?;
            witnesses += usize::from(fails);
            out.push(Check::new(
                format!("non-symmetric-fails {} z1({})", nu.render(datum), datum.label(i)),
                fails,
                1,
                Value::Null,
            ));
        }
    }
    out.push(Check::new("non-symmetric-witness", witnesses > 0, witnesses, Value::Null));
    for i in 0..datum.rank() {
        for n in 1..=3 {
            let nu = Weight::single(i, n);
            let solved = alg.centralizer_gdim(&nu, cfg.center_cap).map_err(comp)?;
            let formula = alg.gdim_center(&nu, cfg.center_cap).map_err(comp)?.known_part();
            out.push(Check::new(
                format!("center-gdim {}", nu.render(datum)),
                solved == formula,
                1,
                json!({"solved": solved.to_string(), "formula": formula.to_string()}),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    fn small() -> SuiteConfig {
        SuiteConfig {
            max_ht: 3,
            test_degree: 2,
            cap: 8,
            samples: 6,
            module_guard: 4,
            lbar_max: 3,
            center_cap: 6,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn weights_enumeration() {
        let w = weights_up_to(2, 2);
        assert_eq!(w.len(), 5);
        assert!(w.iter().all(|x| (1..=2).contains(&x.ht())));
    }

    #[test]
    fn every_suite_passes_on_a_small_mixed_datum() {
        let d = fixture("mixed").unwrap().datum;
        for s in Suite::ALL {
            let r = run_suite(s, &d, &small()).unwrap();
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
            assert!(r.passed, "{}: {:?}", s.name(), failed);
        }
    }

    #[test]
    fn pairing_checkpoint_resumes() {
        let d = fixture("a2").unwrap().datum;
        let path = std::env::temp_dir().join(format!("klr-checkpoint-{}.jsonl", std::process::id()));
        let _ = std::fs::remove_file(&path);
        let cfg = SuiteConfig {
            checkpoint: Some(path.clone()),
            ..small()
        };
        let first = run_suite(Suite::Pairing, &d, &cfg).unwrap();
        let lines = std::fs::read_to_string(&path).unwrap().lines().count();
        assert_eq!(lines, first.checks.len());
        let second = run_suite(Suite::Pairing, &d, &cfg).unwrap();
        assert_eq!(first.checks, second.checks);
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), lines);
        let _ = std::fs::remove_file(&path);
    }
}
