use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use khr_core::graded_poly::grammar::parse_family;
use khr_core::homology_db::{cone_total_reduce_knot, Database, RecordValue};
use khr_core::les::{check_exact, psi_closure, solve_corner, solve_corner_family, FamilyCornerSolution, LesSpec};
use khr_core::pipeline::{self, ConstraintSet, Knot, Status};
use khr_core::ss::{collapse_feasible, differential_vanishes, DifferentialFamily};
use khr_core::{FamilyPoincare, Poincare};

const EXIT_MISMATCH: u8 = 1;
const EXIT_AMBIGUOUS: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "khr", version, about = "Poincare polynomial calculator and HOMFLY-PT homology verifier")]
struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Extra record file loaded on top of the embedded database.
    #[arg(long, global = true, value_name = "FILE")]
    db: Option<PathBuf>,
    /// Let records in --db replace embedded ones.
    #[arg(long, global = true)]
    allow_override: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Input {
    /// Inline polynomial.
    poly: Option<String>,
    /// Read the polynomial from a file.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Take the polynomial from a database record.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate and transform a polynomial.
    Calc {
        #[command(flatten)]
        input: Input,
        /// Apply the mirror duality.
        #[arg(long)]
        psi: bool,
        /// Euler characteristic (t = -1).
        #[arg(long)]
        euler: bool,
        /// Specialize to the sl(N) grading.
        #[arg(long, value_name = "N")]
        sl: Option<i64>,
        /// Evaluate bracket strings at N.
        #[arg(long, value_name = "N")]
        at: Option<i64>,
        /// Add another polynomial.
        #[arg(long, value_name = "POLY")]
        add: Option<String>,
        /// Multiply by another polynomial.
        #[arg(long, value_name = "POLY")]
        mul: Option<String>,
        /// Totally reduced homology of a knot.
        #[arg(long)]
        cone: bool,
    },
    /// Euler characteristic of a polynomial or record.
    Euler {
        #[command(flatten)]
        input: Input,
    },
    /// sl(N) specialization.
    Sl {
        #[command(flatten)]
        input: Input,
        #[arg(long = "n", short = 'n', value_name = "N")]
        n: i64,
    },
    /// Inspect the homology database.
    Db {
        /// Record to show; all names are listed when omitted.
        name: Option<String>,
    },
    /// Solve a long exact sequence corner: A from B and C.
    LesSolve {
        /// TOTRED, LES or KTOTRED.
        spec: String,
        #[arg(long, value_name = "POLY", allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, value_name = "POLY", allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long, value_name = "FILE")]
        b_file: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        c_file: Option<PathBuf>,
        /// Work in the sl(N) grading.
        #[arg(long, value_name = "N")]
        sl: Option<i64>,
        /// Keep only psi-symmetric candidates.
        #[arg(long)]
        psi: bool,
        /// Instead of solving, check exactness with this A.
        #[arg(long, value_name = "POLY")]
        exact: Option<String>,
    },
    /// Spectral sequence collapse check.
    SsCheck {
        /// d(N), d(2), d(-1), ...
        #[arg(long, default_value = "d(N)")]
        family: String,
        #[arg(long = "N", value_name = "N")]
        n: Option<i64>,
        #[arg(long)]
        max_pages: Option<i64>,
        /// Read both polynomials in the sl(N) grading.
        #[arg(long, value_name = "N")]
        sl: Option<i64>,
        #[arg(long, value_name = "POLY", allow_hyphen_values = true)]
        input: Option<String>,
        #[arg(long, value_name = "POLY", allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, value_name = "FILE")]
        input_file: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        target_file: Option<PathBuf>,
    },
    /// Replay the Kinoshita-Terasaka and Conway computations.
    VerifyPaper {
        #[arg(long, value_enum, default_value = "both")]
        knot: KnotArg,
        /// Write the report here as well.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Treat ambiguity as a mismatch and print the first failing stage.
        #[arg(long)]
        strict: bool,
        /// Turn off a constraint: psi, e1, e2, euler.
        #[arg(long, value_name = "NAME")]
        disable: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KnotArg {
    Kt,
    Conway,
    Both,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<khr_core::Error> for Failure {
    fn from(e: khr_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Out = Result<(String, Value, u8), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, value, code)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
    }
}

fn database(cli: &Cli) -> Result<Database, Failure> {
    Ok(match &cli.db {
        Some(p) => Database::load(p, cli.allow_override)?,
        None => Database::embedded(),
    })
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

/// Exactly one of inline text, file or record name.
fn family_input(cli: &Cli, input: &Input) -> Result<FamilyPoincare, Failure> {
    match (&input.poly, &input.file, &input.name) {
        (Some(p), None, None) => Ok(parse_family(p)?),
        (None, Some(f), None) => Ok(parse_family(read(f)?.trim())?),
        (None, None, Some(n)) => match &database(cli)?.get(n)?.value {
            RecordValue::Family(f) => Ok(f.clone()),
            RecordValue::Signed(_) => Err(Failure::Data(format!("record '{n}' is a signed polynomial"))),
        },
        (None, None, None) => Err(Failure::Usage("no polynomial given".into())),
        _ => Err(Failure::Usage("give only one of an inline polynomial, --file or --name".into())),
    }
}

fn either(inline: &Option<String>, file: &Option<PathBuf>, what: &str) -> Result<FamilyPoincare, Failure> {
    match (inline, file) {
        (Some(p), None) => Ok(parse_family(p)?),
        (None, Some(f)) => Ok(parse_family(read(f)?.trim())?),
        (None, None) => Err(Failure::Usage(format!("missing {what}"))),
        (Some(_), Some(_)) => Err(Failure::Usage(format!("{what} given both inline and as a file"))),
    }
}

fn plain(f: FamilyPoincare) -> Result<Poincare, Failure> {
    Ok(f.to_poincare()?)
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Calc { input, psi, euler, sl, at, add, mul, cone } => {
            let mut f = family_input(cli, input)?;
            if let Some(o) = add {
                f = f.add(&parse_family(o)?);
            }
            if let Some(o) = mul {
                f = f.mul(&parse_family(o)?)?;
            }
            if *psi {
                f = f.psi_dual();
            }
            if let Some(n) = at {
                f = f.evaluate(*n)?.into();
            }
            if *cone {
                f = cone_total_reduce_knot(&plain(f)?)?.into();
            }
            if let Some(n) = sl {
                f = f.sl_specialize(*n)?.into();
            }
            if *euler {
                let e = plain(f)?.euler_specialize()?;
                return Ok((format!("{e}\n"), json!({ "euler": e.to_string() }), 0));
            }
            let dim = f.to_poincare().ok().map(|p| p.dim());
            Ok((format!("{f}\n"), json!({ "value": f.to_string(), "dim": dim }), 0))
        }
        Cmd::Euler { input } => {
            let e = plain(family_input(cli, input)?)?.euler_specialize()?;
            Ok((format!("{e}\n"), json!({ "euler": e.to_string() }), 0))
        }
        Cmd::Sl { input, n } => {
            if *n < 1 {
                return Err(Failure::Usage("N must be positive".into()));
            }
            let p = family_input(cli, input)?.sl_specialize(*n)?;
            Ok((format!("{p}\n"), json!({ "n": n, "value": p.to_string(), "dim": p.dim() }), 0))
        }
        Cmd::Db { name } => {
            let db = database(cli)?;
            match name {
                Some(n) => {
                    let r = db.get(n)?;
                    let v = json!({
                        "name": r.name,
                        "kind": r.kind.word(),
                        "provenance": r.provenance,
                        "value": match &r.value {
                            RecordValue::Family(f) => f.to_string(),
                            RecordValue::Signed(s) => s.to_string(),
                        },
                        "orbits": r.orbits.as_ref().map(|o| o.to_string()),
                    });
                    Ok((r.to_text(), v, 0))
                }
                None => {
                    let mut text = String::new();
                    let mut list = Vec::new();
                    for r in db.records() {
                        text.push_str(&format!("{}\t{}\n", r.name, r.kind.word()));
                        list.push(json!({ "name": r.name, "kind": r.kind.word() }));
                    }
                    Ok((text, Value::Array(list), 0))
                }
            }
        }
        Cmd::LesSolve { spec, b, c, b_file, c_file, sl, psi, exact } => {
            let mut spec =
                LesSpec::builtin(spec).ok_or_else(|| Failure::Usage(format!("unknown sequence '{spec}'")))?;
            let mut pb = either(b, b_file, "B")?;
            let mut pc = either(c, c_file, "C")?;
            if let Some(n) = sl {
                spec = spec.sl_specialize(*n);
                pb = pb.sl_specialize(*n)?.into();
                pc = pc.sl_specialize(*n)?.into();
            }
            if let Some(a) = exact {
                let pa = plain(parse_family(a)?)?;
                let (pb, pc) = (plain(pb)?, plain(pc)?);
                return Ok(match check_exact(&spec, &pa, &pb, &pc) {
                    Some(w) => (
                        format!("exact\nK_A: {}\nK_B: {}\nK_C: {}\n", w.k_a, w.k_b, w.k_c),
                        json!({ "exact": true, "k_a": w.k_a.to_string(), "k_b": w.k_b.to_string(), "k_c": w.k_c.to_string() }),
                        0,
                    ),
                    None => ("not exact\n".into(), json!({ "exact": false }), EXIT_MISMATCH),
                });
            }
            let sol: FamilyCornerSolution = if pc.is_atom_free() {
                solve_corner(&spec, &plain(pb)?, &plain(pc)?).into()
            } else {
                solve_corner_family(&spec, &plain(pb)?, &pc)
            };
            let mut text = format!(
                "guaranteed: {}\nforced kernel: {}\nforced cokernel: {}\n",
                sol.guaranteed, sol.forced_kernel, sol.forced_cokernel
            );
            let pairs: Vec<Value> = sol
                .ambiguous_pairs
                .iter()
                .map(|p| {
                    text.push_str(&format!("ambiguous: {} -> {} (capacity {})\n", p.source, p.target, p.capacity));
                    json!({
                        "source": p.source.to_string(),
                        "target": p.target.to_string(),
                        "capacity": p.capacity.to_string(),
                    })
                })
                .collect();
            let mut v = json!({
                "guaranteed": sol.guaranteed.to_string(),
                "forced_kernel": sol.forced_kernel.to_string(),
                "forced_cokernel": sol.forced_cokernel.to_string(),
                "ambiguous": pairs,
            });
            if *psi {
                let cl = psi_closure(&sol)?;
                let (k, c) = cl.possible_columns();
                text.push_str(&format!(
                    "symmetric candidates: {}\npsi guaranteed: {}\npossible kernel side: {k}\npossible cokernel side: {c}\n",
                    cl.symmetric_candidates, cl.guaranteed
                ));
                v["psi"] = json!({
                    "candidates": cl.symmetric_candidates,
                    "guaranteed": cl.guaranteed.to_string(),
                    "possible_kernel": k.to_string(),
                    "possible_cokernel": c.to_string(),
                });
            }
            Ok((text, v, 0))
        }
        Cmd::SsCheck { family, n, max_pages, sl, input, target, input_file, target_file } => {
            let mut fam = parse_family_name(family, *n)?;
            let mut e1 = plain(either(input, input_file, "input")?)?;
            let mut tgt = plain(either(target, target_file, "target")?)?;
            if let Some(g) = sl {
                fam = fam.in_sl(*g);
                e1 = e1.sl_specialize(*g);
                tgt = tgt.sl_specialize(*g);
            }
            let pages = max_pages.unwrap_or_else(|| fam.default_max_pages(&e1));
            match collapse_feasible(&e1, &tgt, &fam, Some(pages))? {
                Some(w) => {
                    let states = w.replay(&e1, &fam).unwrap_or_default();
                    let mut text = format!("feasible with {fam}, {} pairs\n", w.total_pairs());
                    let mut list = Vec::new();
                    for ((k, c), after) in w.pages.iter().zip(states.iter().skip(1)) {
                        text.push_str(&format!(
                            "page {k}: cancel {c} against degree {}\n  E{}: {after}\n",
                            fam.degree(*k),
                            k + 1
                        ));
                        list.push(
                            json!({ "page": k, "cancel": c.to_string(), "pairs": c.dim(), "after": after.to_string() }),
                        );
                    }
                    let vanish: Vec<i64> = (1..=pages).filter(|k| differential_vanishes(&e1, &fam, *k)).collect();
                    let v = json!({ "feasible": true, "family": fam.to_string(), "pages": list, "vanishing_pages": vanish });
                    Ok((text, v, 0))
                }
                None => Ok((
                    format!("infeasible with {fam}\n"),
                    json!({ "feasible": false, "family": fam.to_string() }),
                    EXIT_MISMATCH,
                )),
            }
        }
        Cmd::VerifyPaper { knot, report, strict, disable } => {
            let db = database(cli)?;
            let mut cs = ConstraintSet::default();
            for d in disable {
                cs.disable(d).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let knot = match knot {
                KnotArg::Kt => Knot::Kt,
                KnotArg::Conway => Knot::Conway,
                KnotArg::Both => Knot::Both,
            };
            let r = pipeline::verify(&db, &cs, knot)?;
            let text = r.to_text();
            let v = r.to_json();
            if let Some(path) = report {
                let body = if cli.json { serde_json::to_string_pretty(&v).expect("json") + "\n" } else { text.clone() };
                fs::write(path, body).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            }
            let code = match r.status() {
                Status::Pass => 0,
                Status::Fail => EXIT_MISMATCH,
                Status::Ambiguous if *strict => EXIT_MISMATCH,
                Status::Ambiguous => EXIT_AMBIGUOUS,
            };
            if *strict {
                if let Some(e) = r.first_mismatch() {
                    eprintln!("{e}");
                }
            }
            Ok((text, v, code))
        }
    }
}

/// `d(N)` (needs `--N`), `d(3)`, `d(-1)`.
fn parse_family_name(s: &str, n: Option<i64>) -> Result<DifferentialFamily, Failure> {
    let inner = s
        .trim()
        .strip_prefix("d(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Failure::Usage(format!("bad differential family '{s}'")))?;
    match inner {
        "-1" => Ok(DifferentialFamily::d_minus1()),
        "N" => n.map(DifferentialFamily::d).ok_or_else(|| Failure::Usage("d(N) needs --N".into())),
        k => k.parse().map(DifferentialFamily::d).map_err(|_| Failure::Usage(format!("bad differential family '{s}'"))),
    }
}
