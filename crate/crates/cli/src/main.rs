use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use klr_core::algebra::KlrAlgebra;
use klr_core::datum::{BorcherdsCartanDatum, DatumError, DatumFile};
use klr_core::qgroup::Pairing;
use klr_core::reptheory::{
    char_v, character_of, induced_trivials, lbar, polynomial_induced, probe, trivial_v, Character, RepError,
    MAX_MODULE_GUARD,
};
use klr_core::suites::{run_suite, Suite, SuiteConfig};
use klr_core::wordcomb::{DividedSequence, Sequence, Weight};

/// Version of the JSON report layout.
const SCHEMA: u32 = 1;
/// Largest height accepted by the sweeps.
const MAX_HT: usize = 6;

const EXIT_INVALID: u8 = 1;
const EXIT_ARGS: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "klr", version, about = "Quiver Hecke algebras of Borcherds-Cartan data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Datum file (JSON with `indices`, `A`, optional `D` and `orientation`).
    #[arg(long)]
    datum: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleKind {
    Trivial,
    Irreducible,
    Lbar,
    Induced,
    Polynomial,
}

#[derive(Subcommand)]
enum Command {
    /// Check a datum file and echo the normalized datum.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Graded dimension of an idempotent corner, a divided corner or the center.
    Gdim {
        #[command(flatten)]
        common: Common,
        /// Source sequence, e.g. "i j i".
        #[arg(long, conflicts_with_all = ["shape", "center"])]
        seq: Option<String>,
        /// Target sequence; defaults to the source.
        #[arg(long)]
        target: Option<String>,
        /// Divided source shape, e.g. "i(2) j".
        #[arg(long, conflicts_with = "center")]
        shape: Option<String>,
        /// Graded dimension of the center of R(nu).
        #[arg(long, requires = "nu")]
        center: bool,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 24)]
        cap: i64,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 4)]
        max_ht: usize,
        /// Monomial degree bound for the relation suite.
        #[arg(long, default_value_t = 4)]
        test_degree: u16,
        #[arg(long, default_value_t = 20)]
        cap: i64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        module_guard: usize,
        #[arg(long, default_value_t = 4)]
        lbar_max: usize,
        #[arg(long, default_value_t = 12)]
        center_cap: i64,
        /// JSON-lines file of finished pairing checks, appended as the sweep runs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Character of a finite-dimensional module.
    Character {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        module: ModuleKind,
        /// Label of the strands.
        #[arg(long)]
        index: String,
        #[arg(long)]
        n: usize,
        /// Second block size for `induced`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 5)]
        guard: usize,
    },
    /// Pairing of two words next to the graded dimension of the matching corner.
    Pair {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "nu")]
        seq: Option<String>,
        #[arg(long, requires = "seq")]
        with: Option<String>,
        /// Sweep every pair of sequences of this weight.
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 24)]
        cap: i64,
    },
}

/// A failure carrying the exit code and a JSON error payload.
struct Failure {
    code: u8,
    error: Value,
}

impl Failure {
    fn args(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_ARGS,
            error: json!({"kind": "Argument", "message": msg.to_string()}),
        }
    }
}

fn datum_error(e: &DatumError) -> Value {
    json!({"kind": e.kind(), "message": e.to_string()})
}

fn read_datum(path: &Path) -> Result<(DatumFile, BorcherdsCartanDatum), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::args(format!("{}: {e}", path.display())))?;
    let invalid = |e: DatumError| Failure {
        code: EXIT_INVALID,
        error: datum_error(&e),
    };
    let file: DatumFile = serde_json::from_str(&text).map_err(|e| invalid(DatumError::Parse(e.to_string())))?;
    let datum = BorcherdsCartanDatum::from_file(file.clone()).map_err(invalid)?;
    Ok((file, datum))
}

fn check_cap(cap: i64) -> Result<(), Failure> {
    if cap < 1 {
        return Err(Failure::args(format!("cap must be at least 1, got {cap}")));
    }
    Ok(())
}

fn check_guard(name: &str, value: usize, limit: usize) -> Result<(), Failure> {
    if value > limit {
        return Err(Failure::args(format!("{name} = {value} exceeds the hard limit {limit}")));
    }
    Ok(())
}

fn validate(common: &Common) -> Result<(Value, String, bool), Failure> {
    let text = std::fs::read_to_string(&common.datum)
        .map_err(|e| Failure::args(format!("{}: {e}", common.datum.display())))?;
    let parsed: Result<DatumFile, _> = serde_json::from_str(&text);
    let result = parsed
        .map_err(|e| DatumError::Parse(e.to_string()))
        .and_then(|f| BorcherdsCartanDatum::from_file(f.clone()).map(|d| (f, d)));
    match result {
        Ok((file, d)) => {
            let class = d.index_class();
            let labels = |v: &[usize]| v.iter().map(|&i| d.label(i).to_string()).collect::<Vec<_>>();
            let report = json!({
                "schema": SCHEMA,
                "valid": true,
                "datum": d.to_file(),
                "symmetrizerDerived": file.symmetrizer.is_none(),
                "real": labels(&class.real),
                "imaginary": labels(&class.imaginary),
            });
            let text = format!(
                "valid datum {}\nsymmetrizer {:?}{}",
                d,
                d.symmetrizer(),
                if file.symmetrizer.is_none() { " (derived)" } else { "" }
            );
            Ok((report, text, true))
        }
        Err(e) => {
            let report = json!({"schema": SCHEMA, "valid": false, "error": datum_error(&e)});
            Ok((report, format!("invalid datum: {} ({})", e, e.kind()), false))
        }
    }
}

fn arg<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(Failure::args)
}

fn gdim(
    datum: &BorcherdsCartanDatum,
    seq: Option<&str>,
    target: Option<&str>,
    shape: Option<&str>,
    center: bool,
    nu: Option<&str>,
    cap: i64,
) -> Result<(Value, String), Failure> {
    check_cap(cap)?;
    let alg = KlrAlgebra::new(datum.clone());
    if center {
        let nu = arg(Weight::parse(nu.unwrap_or_default(), datum))?;
        let series = arg(alg.gdim_center(&nu, cap))?;
        let report = json!({"schema": SCHEMA, "nu": nu.render(datum), "center": series.to_string(), "cap": cap});
        return Ok((report, format!("gdim Z(R({})) = {series}", nu.render(datum))));
    }
    if let Some(shape) = shape {
        let shape = arg(DividedSequence::parse(shape, datum))?;
        let tgt = match target {
            Some(t) => arg(Sequence::parse(t, datum))?,
            None => shape.hat(),
        };
        let closed = arg(alg.gdim_divided_corner_closed(&shape, &tgt))?;
        let series = arg(closed.expand(cap))?;
        let report = json!({
            "schema": SCHEMA,
            "shape": shape.render(datum),
            "target": tgt.render(datum),
            "series": series.to_string(),
            "closedForm": closed.to_string(),
            "cap": cap,
        });
        let text = format!("{} -> {}: {series}\nclosed form {closed}", shape.render(datum), tgt.render(datum));
        return Ok((report, text));
    }
    let Some(seq) = seq else {
        return Err(Failure::args("one of --seq, --shape or --center is required"));
    };
    let src = arg(Sequence::parse(seq, datum))?;
    let tgt = match target {
        Some(t) => arg(Sequence::parse(t, datum))?,
        None => src.clone(),
    };
    let closed = arg(alg.gdim_corner_closed(&src, &tgt))?;
    let series = arg(closed.expand(cap))?;
    let report = json!({
        "schema": SCHEMA,
        "source": src.render(datum),
        "target": tgt.render(datum),
        "series": series.to_string(),
        "closedForm": closed.to_string(),
        "cap": cap,
    });
    let text = format!("{} -> {}: {series}\nclosed form {closed}", src.render(datum), tgt.render(datum));
    Ok((report, text))
}

fn character_report(
    datum: &BorcherdsCartanDatum,
    kind: ModuleKind,
    index: &str,
    n: usize,
    m: Option<usize>,
    guard: usize,
) -> Result<(Value, String), Failure> {
    check_guard("guard", guard, MAX_MODULE_GUARD)?;
    let i = arg(datum.index_of(index))?;
    let alg = KlrAlgebra::new(datum.clone());
    let (name, module) = match kind {
        ModuleKind::Irreducible => {
            let ch = arg(char_v(datum, i, n))?;
            return Ok(character_only(datum, format!("irreducible {index}^{n}"), &ch));
        }
        ModuleKind::Trivial => (format!("trivial {index}^{n}"), arg(trivial_v(datum, i, n))?),
        ModuleKind::Lbar => (format!("lbar {index}^{n}"), arg(lbar(datum, i, n, guard))?),
        ModuleKind::Polynomial => (format!("polynomial {index}^{n}"), arg(polynomial_induced(&alg, i, n, guard))?),
        ModuleKind::Induced => {
            let m = m.ok_or_else(|| Failure::args("--m is required for induced modules"))?;
            (
                format!("induced {index}^{n} {index}^{m}"),
                arg(induced_trivials(&alg, i, n, m, guard))?,
            )
        }
    };
    let ch = character_of(&module);
    // the lattice probe needs a nilpotent action, which real strands lack
    let lattice = match probe(&module) {
        Ok(p) => Some((p.unique_maximal().is_some(), p.unique_minimal().is_some())),
        Err(RepError::NotNilpotent) => None,
        Err(e) => return Err(Failure::args(e)),
    };
    let report = json!({
        "schema": SCHEMA,
        "module": name,
        "dim": module.dim(),
        "character": ch.to_json(datum),
        "uniqueMaximal": lattice.map(|l| l.0),
        "uniqueMinimal": lattice.map(|l| l.1),
    });
    let mut text = format!("{name}: dim {}\nCh = {}", module.dim(), ch.render(datum));
    if let Some((max, min)) = lattice {
        text.push_str(&format!("\nunique maximal submodule: {max}\nunique minimal submodule: {min}"));
    }
    Ok((report, text))
}

fn character_only(datum: &BorcherdsCartanDatum, name: String, ch: &Character) -> (Value, String) {
    let report = json!({"schema": SCHEMA, "module": name, "character": ch.to_json(datum)});
    let text = format!("{name}\nCh = {}", ch.render(datum));
    (report, text)
}

fn pair(
    datum: &BorcherdsCartanDatum,
    seq: Option<&str>,
    with: Option<&str>,
    nu: Option<&str>,
    cap: i64,
) -> Result<(Value, String, bool), Failure> {
    check_cap(cap)?;
    let pairing = Pairing::new(datum.clone());
    let matches = if let Some(nu) = nu {
        arg(pairing.sweep(&arg(Weight::parse(nu, datum))?, cap))?
    } else {
        let Some(a) = seq else {
            return Err(Failure::args("either --seq or --nu is required"));
        };
        let a = arg(Sequence::parse(a, datum))?;
        let b = match with {
            Some(b) => arg(Sequence::parse(b, datum))?,
            None => a.clone(),
        };
        vec![arg(pairing.match_pairing_with_gdim(&a, &b, cap))?]
    };
    let ok = matches.iter().all(|m| m.holds());
    let text = matches
        .iter()
        .map(|m| {
            format!(
                "({}, {}): quantum {} | algebra {} | closed {} | {}",
                m.pair[0],
                m.pair[1],
                m.quantum_side,
                m.algebra_side,
                m.closed_form,
                if m.holds() { "equal" } else { "DIFFERENT" }
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let report = json!({"schema": SCHEMA, "cap": cap, "passed": ok, "pairs": matches});
    Ok((report, text, ok))
}

fn emit(format: Format, report: &Value, text: &str) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).expect("reports serialize")),
        Format::Text => println!("{text}"),
    }
}

fn run(cli: Cli) -> Result<u8, (Format, Failure)> {
    let format = match &cli.command {
        Command::Validate { common }
        | Command::Gdim { common, .. }
        | Command::Verify { common, .. }
        | Command::Character { common, .. }
        | Command::Pair { common, .. } => {
            if common.threads > 0 {
                // only fails if a pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(common.threads).build_global();
            }
            common.format
        }
    };
    let fail = |f: Failure| (format, f);
    match cli.command {
        Command::Validate { common } => {
            let (report, text, ok) = validate(&common).map_err(fail)?;
            emit(format, &report, &text);
            Ok(if ok { 0 } else { EXIT_INVALID })
        }
        Command::Gdim {
            common,
            seq,
            target,
            shape,
            center,
            nu,
            cap,
        } => {
            let (_, d) = read_datum(&common.datum).map_err(fail)?;
            let (report, text) = gdim(&d, seq.as_deref(), target.as_deref(), shape.as_deref(), center, nu.as_deref(), cap)
                .map_err(fail)?;
            emit(format, &report, &text);
            Ok(0)
        }
        Command::Verify {
            common,
            suite,
            max_ht,
            test_degree,
            cap,
            seed,
            samples,
            module_guard,
            lbar_max,
            center_cap,
            checkpoint,
        } => {
            let suite: Suite = suite.parse().map_err(|e| fail(Failure::args(e)))?;
            check_cap(cap).and(check_cap(center_cap)).map_err(fail)?;
            check_guard("max-ht", max_ht, MAX_HT).map_err(fail)?;
            check_guard("module-guard", module_guard, MAX_MODULE_GUARD).map_err(fail)?;
            check_guard("lbar-max", lbar_max, module_guard).map_err(fail)?;
            let (_, d) = read_datum(&common.datum).map_err(fail)?;
            let cfg = SuiteConfig {
                max_ht,
                test_degree,
                cap,
                seed,
                samples,
                module_guard,
                lbar_max,
                center_cap,
                checkpoint,
            };
            let report = run_suite(suite, &d, &cfg).map_err(|e| fail(Failure::args(e)))?;
            let mut value = serde_json::to_value(&report).expect("reports serialize");
            value["schema"] = json!(SCHEMA);
            value["config"] = serde_json::to_value(&cfg).expect("config serializes");
            let mut text: Vec<String> = report
                .checks
                .iter()
                .map(|c| format!("{} {} ({})", if c.passed { "pass" } else { "FAIL" }, c.name, c.count))
                .collect();
            text.push(format!("{}: {}", suite.name(), if report.passed { "passed" } else { "failed" }));
            emit(format, &value, &text.join("\n"));
            Ok(if report.passed { 0 } else { EXIT_VERIFY })
        }
        Command::Character {
            common,
            module,
            index,
            n,
            m,
            guard,
        } => {
            let (_, d) = read_datum(&common.datum).map_err(fail)?;
            let (report, text) = character_report(&d, module, &index, n, m, guard).map_err(fail)?;
            emit(format, &report, &text);
            Ok(0)
        }
        Command::Pair {
            common,
            seq,
            with,
            nu,
            cap,
        } => {
            let (_, d) = read_datum(&common.datum).map_err(fail)?;
            let (report, text, ok) = pair(&d, seq.as_deref(), with.as_deref(), nu.as_deref(), cap).map_err(fail)?;
            emit(format, &report, &text);
            Ok(if ok { 0 } else { EXIT_VERIFY })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((format, f)) => {
            let report = json!({"schema": SCHEMA, "error": f.error});
            let text = format!("error: {}", f.error["message"].as_str().unwrap_or_default());
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize")),
                Format::Text => eprintln!("{text}"),
            }
            ExitCode::from(f.code)
        }
    }
}
