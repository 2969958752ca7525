//! qbr: exact ring checks from the command line. Reads a ring spec
//! (JSON), runs the requested checks, writes a JSON report to stdout
//! (or --out) and a summary table to stderr.
//!
//! Exit codes: 0 every check passed; 1 at least one check failed;
//! 2 no failures but something was skipped (caps, missing identity);
//! 64 command line usage errors; 65 unreadable or malformed input
//! (spec files, rows, expressions) and construction caps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use qbr_core::closure::{in_cl_circ, is_b_ring, is_qb_nonunital, is_qb_ring};
use qbr_core::error::QbrError;
use qbr_core::exchange::{is_exchange, is_exchange_ring};
use qbr_core::ideals::{jacobson_radical, primeness};
use qbr_core::jacobson::{demo_claims, laurent_image, parse_jelement};
use qbr_core::matrix_qb::{reduce_row_m2, UnimodularRow};
use qbr_core::quasi::{quasi_adversible_set, quasi_invertible_set};
use qbr_core::regular::{idempotents, maximal_regular_elements, regular_elements};
use qbr_core::report::{Outcome, Report, ReportBuilder, Status};
use qbr_core::ring::{matrix_decode, matrix_encode, matrix_ring};
use qbr_core::suites::{parse_selection, run_suites_with_base, suite_catalog};
use qbr_core::{build_ring, Elem, FiniteRing, RingSpec};

const EXIT_FAIL: i32 = 1;
const EXIT_SKIPPED: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;

#[derive(Parser)]
#[command(
    name = "qbr",
    version,
    about = "Exact computations around quasi-invertibility in finite rings",
    disable_help_subcommand = true
)]
struct Cli {
    /// Print every verification suite with what it covers, then exit
    #[arg(long)]
    list_suites: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Io {
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps (default: all cores);
    /// affects timing only, never results
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one property of the ring in SPEC
    Check {
        /// Ring spec file (JSON with a "kind" discriminator)
        spec: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[command(flatten)]
        io: Io,
    },
    /// Emit a named element set of the ring in SPEC, as sorted indices
    Sets {
        spec: PathBuf,
        #[arg(long, value_enum)]
        set: SetName,
        #[command(flatten)]
        io: Io,
    },
    /// Run verification suites against the ring in SPEC
    Verify {
        spec: PathBuf,
        /// Suite name (see --list-suites) or "all"
        #[arg(long, default_value = "all")]
        suite: String,
        /// Seed for the randomized sweeps inside suites
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Reduce a unimodular row (a, b) over M2 of the base ring in SPEC
    ReduceRow {
        /// Spec of the BASE ring r; the row lives in M2(r)
        spec: PathBuf,
        /// Row as JSON: {"a": [[..]], "b": [[..]], "x": [[..]], "y": [[..]]},
        /// each a 2x2 matrix of base element indices with a*x + b*y = 1
        #[arg(long)]
        row: String,
        #[command(flatten)]
        io: Io,
    },
    /// Exact demonstrations in the infinite algebra
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The algebra F_p<x, y | xy = 1>: one-sided inverses, matrix units,
    /// the Laurent quotient
    Jacobson {
        /// Prime modulus of the coefficient field
        #[arg(long)]
        p: u32,
        /// Exponent bound for the matrix-unit sweep and bounded
        /// orthogonality certificates
        #[arg(long, default_value_t = 6)]
        bound: u32,
        /// Also normalize this expression, e.g. "y^2 x + 3 y x^0"
        #[arg(long)]
        eval: Option<String>,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Property {
    /// cl(R^-1) = R
    B,
    /// cl(R_q^-1) = R
    Qb,
    /// cl°(R_q°) = R, stated without an identity
    QbNonunital,
    /// every a has an idempotent p in aR with 1-p in (1-a)R
    Exchange,
    /// xRx = 0 only for x = 0
    Semiprime,
    /// xRy = 0 only for x = 0 or y = 0
    Prime,
}

impl Property {
    fn name(self) -> &'static str {
        match self {
            Property::B => "b",
            Property::Qb => "qb",
            Property::QbNonunital => "qb-nonunital",
            Property::Exchange => "exchange",
            Property::Semiprime => "semiprime",
            Property::Prime => "prime",
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum SetName {
    /// two-sided invertibles
    Units,
    /// quasi-invertibles R_q^-1
    Qinv,
    /// von Neumann regular elements
    Regular,
    /// idempotents
    Idempotents,
    /// the Jacobson radical
    Radical,
    /// maximal elements of the regular extension order
    Maxreg,
}

impl SetName {
    fn name(self) -> &'static str {
        match self {
            SetName::Units => "units",
            SetName::Qinv => "qinv",
            SetName::Regular => "regular",
            SetName::Idempotents => "idempotents",
            SetName::Radical => "radical",
            SetName::Maxreg => "maxreg",
        }
    }
}

fn die(code: i32, msg: String) -> ! {
    eprintln!("qbr: {msg}");
    exit(code);
}

fn load_spec(path: &Path) -> (RingSpec, Value, FiniteRing) {
    let text = fs::read_to_string(path)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot read {}: {e}", path.display())));
    let spec: RingSpec = serde_json::from_str(&text)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("malformed spec {}: {e}", path.display())));
    let echo = serde_json::to_value(&spec).expect("specs serialize");
    let ring = build_ring(&spec)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot construct the ring: {e}")));
    (spec, echo, ring)
}

fn configure_jobs(io: &Io) {
    if let Some(j) = io.jobs {
        if j == 0 {
            die(EXIT_USAGE, "--jobs must be at least 1".into());
        }
        // a failure here means a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
}

/// Emits the report (JSON to stdout or --out, table to stderr) and maps
/// its counts to the exit code.
fn emit(report: &Report, io: &Io) -> i32 {
    eprint!("{}", report.render_table());
    let body = report.to_json();
    match &io.out {
        Some(path) => fs::write(path, body + "\n")
            .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot write {}: {e}", path.display()))),
        None => println!("{body}"),
    }
    if report.failed > 0 {
        EXIT_FAIL
    } else if report.skipped > 0 {
        EXIT_SKIPPED
    } else {
        0
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            exit(code);
        }
    };
    if cli.list_suites {
        for (name, what) in suite_catalog() {
            println!("{name:<10} {what}");
        }
        exit(0);
    }
    let Some(command) = cli.command else {
        die(EXIT_USAGE, "no command given; see qbr --help".into());
    };
    let code = match command {
        Command::Check { spec, property, io } => cmd_check(&spec, property, &io),
        Command::Sets { spec, set, io } => cmd_sets(&spec, set, &io),
        Command::Verify { spec, suite, seed, io } => cmd_verify(&spec, &suite, seed, &io),
        Command::ReduceRow { spec, row, io } => cmd_reduce_row(&spec, &row, &io),
        Command::Demo { which } => match which {
            Demo::Jacobson { p, bound, eval, io } => cmd_demo_jacobson(p, bound, eval, &io),
        },
    };
    exit(code);
}

fn cmd_check(spec_path: &Path, property: Property, io: &Io) -> i32 {
    configure_jobs(io);
    let (_, echo, r) = load_spec(spec_path);
    let mut b = ReportBuilder::new(r.label()).spec_echo(echo);
    b.run(format!("property/{}", property.name()), || match property {
        Property::B => {
            let v = is_b_ring(&r)?;
            Ok(Outcome::require(v.holds, || counterexample_json(v.counterexample)))
        }
        Property::Qb => {
            let v = is_qb_ring(&r)?;
            Ok(Outcome::require(v.holds, || counterexample_json(v.counterexample)))
        }
        Property::QbNonunital => {
            if is_qb_nonunital(&r) {
                return Ok(Outcome::Pass);
            }
            let qa = quasi_adversible_set(&r);
            let stuck = r.elements().find(|&a| !in_cl_circ(&r, &qa, a));
            Ok(Outcome::Fail(json!({ "a": stuck })))
        }
        Property::Exchange => {
            r.one().ok_or(QbrError::NonUnitalRing)?;
            if is_exchange_ring(&r) {
                return Ok(Outcome::Pass);
            }
            let stuck = r.elements().find(|&a| matches!(is_exchange(&r, a), Ok(None)));
            Ok(Outcome::Fail(json!({ "a": stuck })))
        }
        Property::Semiprime => {
            if primeness(&r).semiprime {
                return Ok(Outcome::Pass);
            }
            let zero = r.zero();
            let x = r
                .elements()
                .skip(1)
                .find(|&x| r.elements().all(|s| r.mul3(x, s, x) == zero));
            Ok(Outcome::Fail(json!({ "x": x })))
        }
        Property::Prime => {
            if primeness(&r).prime {
                return Ok(Outcome::Pass);
            }
            let zero = r.zero();
            let pair = r.elements().skip(1).find_map(|x| {
                r.elements()
                    .skip(1)
                    .find(|&y| r.elements().all(|s| r.mul3(x, s, y) == zero))
                    .map(|y| (x, y))
            });
            Ok(Outcome::Fail(json!({ "x": pair.map(|p| p.0), "y": pair.map(|p| p.1) })))
        }
    });
    emit(&b.finish(), io)
}

fn counterexample_json(c: Option<(Elem, Elem, Elem)>) -> Value {
    // the stuck closure instance: b = 1 - xa, no y brings a + yb in
    match c {
        Some((a, x, b)) => json!({ "a": a, "x": x, "b": b }),
        None => Value::Null,
    }
}

fn cmd_sets(spec_path: &Path, set: SetName, io: &Io) -> i32 {
    configure_jobs(io);
    let (_, echo, r) = load_spec(spec_path);
    let mut b = ReportBuilder::new(r.label()).spec_echo(echo);
    b.run(format!("sets/{}", set.name()), || {
        let members: Vec<u32> = match set {
            SetName::Units => {
                r.one().ok_or(QbrError::NonUnitalRing)?;
                r.units().iter().map(|e| e.0).collect()
            }
            SetName::Qinv => quasi_invertible_set(&r)?.iter().map(|e| e.0).collect(),
            SetName::Regular => regular_elements(&r).iter().map(|e| e.0).collect(),
            SetName::Idempotents => idempotents(&r).iter().map(|e| e.0).collect(),
            SetName::Radical => jacobson_radical(&r)?.iter().map(|e| e.0).collect(),
            SetName::Maxreg => maximal_regular_elements(&r)?.iter().map(|e| e.0).collect(),
        };
        Ok(Outcome::PassWith(json!(members)))
    });
    emit(&b.finish(), io)
}

fn cmd_verify(spec_path: &Path, suite: &str, seed: u64, io: &Io) -> i32 {
    configure_jobs(io);
    let (spec, echo, r) = load_spec(spec_path);
    let Some(suites) = parse_selection(suite) else {
        die(EXIT_USAGE, format!("unknown suite {suite:?}; see qbr --list-suites"));
    };
    // a declared 2x2 matrix construction hands the row suite its base
    let m2_base = match &spec {
        RingSpec::Matrix { size: 2, base } => Some(
            build_ring(base)
                .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot construct the base ring: {e}"))),
        ),
        _ => None,
    };
    // suites run in parallel; reassembly keeps the declared order, so
    // the report is byte-identical to a sequential run (modulo timing)
    let parts: Vec<Report> = suites
        .par_iter()
        .map(|s| run_suites_with_base(&r, m2_base.as_ref(), &[*s], seed))
        .collect();
    let mut report = Report {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        subject: r.label().to_string(),
        spec: Some(echo),
        seed: Some(seed),
        checks: Vec::new(),
        passed: 0,
        failed: 0,
        skipped: 0,
        inconclusive: 0,
        all_ok: true,
    };
    for part in parts {
        report.checks.extend(part.checks);
    }
    for c in &report.checks {
        match c.status {
            Status::Pass => report.passed += 1,
            Status::Fail => report.failed += 1,
            Status::Skipped => report.skipped += 1,
            Status::Inconclusive => report.inconclusive += 1,
        }
    }
    report.all_ok = report.failed == 0;
    emit(&report, io)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RowInput {
    a: [[u32; 2]; 2],
    b: [[u32; 2]; 2],
    x: [[u32; 2]; 2],
    y: [[u32; 2]; 2],
}

fn cmd_reduce_row(spec_path: &Path, row_text: &str, io: &Io) -> i32 {
    configure_jobs(io);
    let (_, echo, r) = load_spec(spec_path);
    let input: RowInput = serde_json::from_str(row_text)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("malformed row: {e}")));
    let s = matrix_ring(&r, 2)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot construct M2 of the base: {e}")));
    let encode = |m: [[u32; 2]; 2]| -> Elem {
        let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
        for e in entries {
            if e as usize >= r.order() {
                die(
                    EXIT_DATA,
                    format!("entry {e} out of range for a base ring of order {}", r.order()),
                );
            }
        }
        Elem(matrix_encode(r.order(), &entries))
    };
    let (a, bb, x, y) = (encode(input.a), encode(input.b), encode(input.x), encode(input.y));
    let row = UnimodularRow::new(&s, a, bb, x, y)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("not a certified unimodular row: {e}")));
    let mat = |e: Elem| -> Value {
        let v = matrix_decode(r.order(), 2, e.0);
        json!({ "index": e.0, "matrix": [[v[0], v[1]], [v[2], v[3]]] })
    };
    let mut b = ReportBuilder::new(format!("M2({})", r.label())).spec_echo(echo);
    b.run("reduce-row/staged", || {
        let red = reduce_row_m2(&r, &s, &row)?;
        Ok(Outcome::PassWith(json!({
            "row": { "a": mat(row.a()), "b": mat(row.b()) },
            "certificate": { "x": mat(row.x()), "y": mat(row.y()) },
            "reducer": mat(red.reducer),
            "result": mat(red.result),
            "witness": { "u": mat(red.witness.u), "v": mat(red.witness.v) },
            "reduced_matrix": mat(red.reduced_matrix),
            "reduced_quasi_inverse": mat(red.reduced_quasi_inverse),
            "trace": red.trace,
        })))
    });
    emit(&b.finish(), io)
}

fn cmd_demo_jacobson(p: u32, bound: u32, eval: Option<String>, io: &Io) -> i32 {
    configure_jobs(io);
    let report = demo_claims(p, bound)
        .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot run the demo: {e}")));
    let mut b = ReportBuilder::new(format!("F{p}<x,y|xy=1>"))
        .spec_echo(json!({ "demo": "jacobson", "p": p, "bound": bound }));
    for claim in &report.claims {
        let holds = claim.holds;
        let payload = json!({ "certificate": claim.certificate });
        b.run(claim.name.clone(), move || {
            if holds {
                Ok(Outcome::PassWith(payload))
            } else {
                Ok(Outcome::Fail(payload))
            }
        });
    }
    if let Some(expr) = eval {
        let elem = parse_jelement(p, &expr)
            .unwrap_or_else(|e| die(EXIT_DATA, format!("cannot parse {expr:?}: {e}")));
        let image = laurent_image(&elem);
        b.run("eval", move || {
            Ok(Outcome::PassWith(json!({
                "input": expr,
                "normal_form": elem.to_string(),
                "laurent_image": image.to_string(),
            })))
        });
    }
    emit(&b.finish(), io)
}
