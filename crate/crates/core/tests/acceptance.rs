//! Acceptance run: one PASS/FAIL line per criterion over the fixture datums.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use klr_core::algebra::KlrAlgebra;
use klr_core::datum::BorcherdsCartanDatum;
use klr_core::fixtures::{fixtures, Fixture};
use klr_core::qarith::geom_inverse;
use klr_core::qgroup::Pairing;
use klr_core::suites::{run_suite, Check, Suite, SuiteConfig, SuiteReport};
use klr_core::wordcomb::Sequence;

const MIN_FIXTURES: usize = 6;
const RELATION_HT: usize = 4;
const RELATION_DEGREE: u16 = 4;
const RELATION_BUDGET: Duration = Duration::from_secs(300);
const ORACLE_HT: usize = 4;
const MIN_PAIRS: usize = 50;
const MIN_TRIPLES: usize = 100;
const PAIRING_HT: usize = 4;
const PAIRING_CAP: i64 = 20;
const SERRE_HT: usize = 4;
const SERRE_MAX_M: i64 = 3;
const LBAR_MAX_N: usize = 4;
const INDUCED_MAX: usize = 5;
const CENTER_HT: usize = 3;
const CENTER_CAP: i64 = 12;
const MACKEY_HT: usize = 4;
const MIN_INDUCED_INSTANCES: usize = 3;
const SEED: u64 = 7;

struct Line {
    ok: bool,
    text: String,
}

fn config(max_ht: usize) -> SuiteConfig {
    SuiteConfig {
        max_ht,
        test_degree: RELATION_DEGREE,
        cap: PAIRING_CAP,
        seed: SEED,
        samples: MIN_PAIRS,
        module_guard: INDUCED_MAX,
        lbar_max: LBAR_MAX_N,
        center_cap: CENTER_CAP,
        checkpoint: None,
    }
}

fn run(f: &Fixture, suite: Suite, max_ht: usize) -> SuiteReport {
    run_suite(suite, &f.datum, &config(max_ht)).unwrap_or_else(|e| panic!("{} on {}: {e}", suite.name(), f.name))
}

fn failures<'a>(name: &str, checks: impl Iterator<Item = &'a Check>) -> Vec<String> {
    checks.filter(|c| !c.passed).map(|c| format!("{name}: {}", c.name)).collect()
}

fn verdict(n: usize, title: &str, bad: &[String], summary: String) -> Line {
    let ok = bad.is_empty();
    let mut text = format!("criterion {n:>2} {} {title}: {summary}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        let shown: Vec<&str> = bad.iter().take(5).map(String::as_str).collect();
        text.push_str(&format!(" [{}]", shown.join("; ")));
    }
    Line { ok, text }
}

fn c1(fx: &[Fixture]) -> Line {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut instances = 0;
    for f in fx {
        let r = run(f, Suite::Polyrep, RELATION_HT);
        instances += r.checks.iter().map(|c| c.count).sum::<usize>();
        bad.extend(failures(f.name, r.checks.iter()));
    }
    if fx.len() < MIN_FIXTURES {
        bad.push(format!("only {} fixtures", fx.len()));
    }
    let elapsed = start.elapsed();
    if elapsed > RELATION_BUDGET {
        bad.push(format!("took {:.1}s", elapsed.as_secs_f64()));
    }
    verdict(
        1,
        "polynomial representation relations",
        &bad,
        format!("{} datums, {instances} operator checks, {:.1}s", fx.len(), elapsed.as_secs_f64()),
    )
}

fn c2_and_8(fx: &[Fixture]) -> (Line, Line) {
    let mut bad2 = Vec::new();
    let mut bad8 = Vec::new();
    let (mut pairs, mut triples, mut idem, mut rank) = (0, 0, 0, 0);
    for f in fx {
        let r = run(f, Suite::BasisOracle, ORACLE_HT);
        let action = r.check("faithful-action").expect("faithful-action check");
        let assoc = r.check("associativity").expect("associativity check");
        if action.count < MIN_PAIRS || assoc.count < MIN_TRIPLES {
            bad2.push(format!("{}: too few samples", f.name));
        }
        pairs += action.count;
        triples += assoc.count;
        let oracle_checks = r
            .checks
            .iter()
            .filter(|c| !c.name.starts_with("divided-"));
        bad2.extend(failures(f.name, oracle_checks));
        let divided: Vec<&Check> = r.checks_with_prefix("divided-").collect();
        idem += r.check("divided-idempotents").map_or(0, |c| c.count);
        rank += r.check("divided-gdim-rank").map_or(0, |c| c.count);
        bad8.extend(failures(f.name, divided.into_iter()));
    }
    if idem == 0 || rank == 0 {
        bad8.push("no real index in the fixtures".into());
    }
    (
        verdict(
            2,
            "normal form against polynomial action",
            &bad2,
            format!("{pairs} action pairs, {triples} associativity triples"),
        ),
        verdict(
            8,
            "divided idempotents and rank oracle",
            &bad8,
            format!("{idem} idempotents, {rank} truncations to cap {CENTER_CAP}"),
        ),
    )
}

fn special_pairing(datum: &BorcherdsCartanDatum) -> Result<bool, String> {
    let alg = KlrAlgebra::new(datum.clone());
    let pairing = Pairing::new(datum.clone());
    for i in 0..datum.rank() {
        let s = Sequence::new(vec![i]);
        let expected = geom_inverse(2 * datum.r(i), PAIRING_CAP).map_err(|e| e.to_string())?;
        let algebra = alg.gdim_corner(&s, &s, PAIRING_CAP).map_err(|e| e.to_string())?;
        let quantum = pairing.pair_words(s.entries(), s.entries(), PAIRING_CAP).map_err(|e| e.to_string())?.series;
        if algebra.agrees_with(&expected) != Some(PAIRING_CAP) || quantum.agrees_with(&expected) != Some(PAIRING_CAP) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn c3(fx: &[Fixture]) -> Line {
    let mut bad = Vec::new();
    let mut pairs = 0;
    for f in fx {
        let r = run(f, Suite::Pairing, PAIRING_HT);
        pairs += r.checks.iter().map(|c| c.count).sum::<usize>();
        bad.extend(failures(f.name, r.checks.iter()));
        match special_pairing(&f.datum) {
            Ok(true) => {}
            Ok(false) => bad.push(format!("{}: single-letter special case", f.name)),
            Err(e) => bad.push(format!("{}: {e}", f.name)),
        }
    }
    verdict(
        3,
        "pairing equals graded dimension",
        &bad,
        format!("{pairs} sequence pairs to cap {PAIRING_CAP}"),
    )
}

fn serre_m(c: &Check) -> Option<i64> {
    c.name.rsplit_once("m=").and_then(|(_, m)| m.parse().ok())
}

fn c4(fx: &[Fixture]) -> Line {
    let mut bad = Vec::new();
    let (mut chars, mut radical, mut orthogonal) = (0, 0, 0);
    for f in fx {
        let r = run(f, Suite::Serre, SERRE_HT);
        let relevant = r.checks.iter().filter(|c| {
            !c.name.starts_with("serre-characters") || serre_m(c).is_some_and(|m| m <= SERRE_MAX_M)
        });
        bad.extend(failures(f.name, relevant));
        for c in &r.checks {
            if c.name.starts_with("serre-characters") && serre_m(c).is_some_and(|m| m <= SERRE_MAX_M) {
                chars += 1;
                orthogonal += usize::from(serre_m(c) == Some(1));
            }
            if c.name.starts_with("serre-radical") {
                radical += c.count;
            }
        }
    }
    if orthogonal == 0 {
        bad.push("no orthogonal pair covered".into());
    }
    verdict(
        4,
        "Serre character identity and radical",
        &bad,
        format!("{chars} index pairs ({orthogonal} orthogonal), {radical} radical elements"),
    )
}

fn modules(fx: &[Fixture]) -> Vec<(&'static str, SuiteReport)> {
    fx.iter().map(|f| (f.name, run(f, Suite::Modules, RELATION_HT))).collect()
}

fn c5(reports: &[(&str, SuiteReport)]) -> Line {
    let mut bad = Vec::new();
    let mut n = 0;
    for (name, r) in reports {
        let lb: Vec<&Check> = r.checks_with_prefix("lbar").collect();
        n += lb.len();
        bad.extend(failures(name, lb.into_iter()));
    }
    if n == 0 {
        bad.push("no imaginary index".into());
    }
    verdict(5, "imaginary rank-one module structure", &bad, format!("{n} modules up to n = {LBAR_MAX_N}"))
}

fn c6(reports: &[(&str, SuiteReport)]) -> Line {
    let mut bad = Vec::new();
    let mut n = 0;
    for (name, r) in reports {
        let ind: Vec<&Check> = r.checks_with_prefix("induced ").collect();
        n += ind.len();
        bad.extend(failures(name, ind.into_iter()));
    }
    if n == 0 {
        bad.push("no imaginary index".into());
    }
    verdict(6, "induced trivial modules", &bad, format!("{n} modules with n + m ≤ {INDUCED_MAX}"))
}

fn c7(fx: &[Fixture]) -> Line {
    let mut bad = Vec::new();
    let (mut central, mut solved) = (0, 0);
    for f in fx {
        let r = run(f, Suite::Center, CENTER_HT);
        central += r.checks_with_prefix("symmetric-central").map(|c| c.count).sum::<usize>();
        solved += r.checks_with_prefix("center-gdim").count();
        bad.extend(failures(f.name, r.checks.iter().filter(|c| !c.name.starts_with("non-symmetric-fails "))));
    }
    verdict(
        7,
        "center",
        &bad,
        format!("{central} symmetric candidates, {solved} centralizer dimensions to cap {CENTER_CAP}"),
    )
}

fn c9(fx: &[Fixture]) -> Line {
    let mut bad = Vec::new();
    let (mut splits, mut twisted) = (0, 0);
    for f in fx {
        let r = run(f, Suite::Mackey, MACKEY_HT);
        for c in &r.checks {
            splits += c.count;
            twisted += c.detail.get("twistedInstances").and_then(|v| v.as_u64()).unwrap_or(0) as usize;
            twisted += c.detail.get("shifts").and_then(|v| v.as_array()).map_or(0, Vec::len);
        }
        bad.extend(failures(f.name, r.checks.iter()));
    }
    if twisted == 0 {
        bad.push("no nontrivial twist".into());
    }
    verdict(9, "Mackey character identity", &bad, format!("{splits} splits, {twisted} with a nontrivial twist"))
}

fn c10(reports: &[(&str, SuiteReport)]) -> Line {
    let mut bad = Vec::new();
    let (mut eps, mut induced) = (0, 0);
    for (name, r) in reports {
        let ed = r.check("epsilon-delta").expect("epsilon-delta check");
        let di = r.check("delta-of-induced").expect("delta-of-induced check");
        eps += ed.count;
        induced += di.count;
        bad.extend(failures(name, [ed, di].into_iter()));
    }
    if induced < MIN_INDUCED_INSTANCES {
        bad.push(format!("only {induced} induced instances"));
    }
    verdict(10, "epsilon and Delta calculus", &bad, format!("{eps} strip checks, {induced} induced instances"))
}

fn main() -> ExitCode {
    let fx = fixtures();
    let mut lines = Vec::new();
    let mut emit = |l: Line| {
        println!("{}", l.text);
        lines.push(l.ok);
    };
    emit(c1(&fx));
    let (l2, l8) = c2_and_8(&fx);
    emit(l2);
    emit(c3(&fx));
    emit(c4(&fx));
    let mods = modules(&fx);
    emit(c5(&mods));
    emit(c6(&mods));
    emit(c7(&fx));
    emit(l8);
    emit(c9(&fx));
    emit(c10(&mods));
    let passed = lines.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", lines.len());
    if passed == lines.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
