use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mlde_lab::classify::c16::{
    c16_candidate_records, c16_closure_filter, c16_diophantine, c16_final_filter, c16_h_candidates,
    c16_integrality_filter, c16_logarithmic_fixtures,
};
use mlde_lab::classify::c4::{c4_m1_candidates, c4_m2_candidates, c4_search};
use mlde_lab::classify::c8::{c8_cascade, c8_exceptional_scan, c8_generic_pipeline, survivors};
use mlde_lab::classify::CandidateRecord;
use mlde_lab::exactq::{
    aux_series, eisenstein, eta_power, jacobi_theta, parse_rational, Aux, Exp, QSeries, Rational,
    Theta,
};
use mlde_lab::export::{self, document, pipeline_document, rational, rationals};
use mlde_lab::hyper::{hyper_solution, j_function, kappa};
use mlde_lab::lattice::{
    bw_characters, dn_characters, orbifold_characters, sqrt2e8_characters, Orbifold,
};
use mlde_lab::mlde::{exponent, frobenius_solve, indicial, solve_all, Mlde3};
use mlde_lab::modforms::xy_generators;
use mlde_lab::verify::{fixture_suite, identity_suite, Check};

#[derive(Parser, Debug)]
#[command(
    name = "mlde-lab",
    version,
    about = "Exact q-series and third-order MLDE classification searches"
)]
struct Cli {
    /// Write the document to FILE (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a named q-series.
    Expand {
        /// E2, E4, E6, eta, eta^N, theta2, theta3, theta0, x, y, j, K, or an
        /// auxiliary form (I3, Delta3, Delta2, Delta2A, Delta3A, H2, psi1, psi2).
        #[arg(long)]
        series: String,
        /// Number of q-coefficients counted from the leading exponent.
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Build and solve equations.
    Mlde {
        #[command(subcommand)]
        action: MldeAction,
    },
    /// Run a classification pipeline.
    Search(SearchArgs),
    /// Check identities and printed fixtures.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Truncation for the identity suite.
        #[arg(long, default_value_t = 50)]
        terms: usize,
    },
    /// Character triples of lattice theories.
    Lattice(LatticeArgs),
    /// ₃F₂ solutions, divided by 1728^rᵢ.
    Hyper {
        /// Indices r1,r2,r3 (summing to 1/2).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        r: Vec<String>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        i: u8,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
}

#[derive(Subcommand, Debug)]
enum MldeAction {
    /// Frobenius solutions of the (c, h) equation.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value_t = 5)]
        terms: usize,
        /// Solve at every indicial root, not just the vacuum −c/24.
        #[arg(long)]
        all_roots: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Fixtures,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PipelineName {
    C8,
    C8x,
    C16,
    C4,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_enum)]
    pipeline: PipelineName,
    /// Leading-coefficient bound for c16.
    #[arg(long, default_value_t = 16)]
    y: i64,
    /// Largest n in the c8x family.
    #[arg(long, default_value_t = 50)]
    nmax: i64,
    /// Coefficients kept per solution.
    #[arg(long, default_value_t = 6)]
    terms: usize,
    /// c16: candidates | integrality | closure | final | logarithmic;
    /// c4: m2 | m1 | all | final. Defaults to the full record set.
    #[arg(long)]
    stage: Option<String>,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[command(flatten)]
    which: LatticeWhich,
    #[arg(long, default_value_t = 6)]
    terms: usize,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct LatticeWhich {
    #[arg(long)]
    dn: Option<u32>,
    #[arg(long)]
    barnes_wall: bool,
    #[arg(long)]
    sqrt2e8: bool,
    /// sqrt2e8_plus | bw_plus
    #[arg(long)]
    orbifold: Option<String>,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<mlde_lab::Error> for Failure {
    fn from(e: mlde_lab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, (Failure, Option<String>)>;

fn q(flag: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn prec(terms: usize) -> Exp {
    Exp::from_integer(terms as i64)
}

/// Series addressed by name, exact below `p`.
fn named_series(name: &str, p: Exp) -> Result<QSeries, Failure> {
    Ok(match name {
        "E2" => eisenstein(2, p)?,
        "E4" => eisenstein(4, p)?,
        "E6" => eisenstein(6, p)?,
        "eta" => eta_power(1, p),
        "theta2" => jacobi_theta(Theta::Two, 1, p),
        "theta3" => jacobi_theta(Theta::Three, 1, p),
        "theta0" | "theta4" => jacobi_theta(Theta::Zero, 1, p),
        "x" => xy_generators(p).0,
        "y" => xy_generators(p).1,
        "j" => j_function(p),
        "K" => kappa(p),
        _ => {
            if let Some(n) = name.strip_prefix("eta^") {
                let n: i64 = n
                    .parse()
                    .map_err(|_| Failure::Usage(format!("--series: bad power in `{name}`")))?;
                eta_power(n, p)
            } else {
                aux_series(
                    Aux::parse(name).map_err(|e| Failure::Usage(format!("--series: {e}")))?,
                    p,
                )
            }
        }
    })
}

fn expand(name: &str, terms: usize) -> Result<Value, Failure> {
    // Locate the leading exponent first, then expand `terms` steps past it.
    let probe = named_series(name, Exp::from_integer(2))?;
    let lead = probe.lead_exp().unwrap_or_else(|| Exp::from_integer(0));
    let f = named_series(name, lead + prec(terms))?;
    let lead_r = Rational::new((*lead.numer()).into(), (*lead.denom()).into());
    let coeffs: Vec<Rational> = (0..terms)
        .map(|n| f.coeff(exponent(&lead_r, n as i64)).unwrap_or_default())
        .collect();
    Ok(document(
        "expand",
        json!({
            "series": name,
            "lead": export::exponent(lead),
            "coefficients": rationals(&coeffs),
            "expansion": export::series(&f),
        }),
    ))
}

fn mlde_solve(c: &str, h: &str, terms: usize, all: bool) -> Result<Value, Failure> {
    let (c, h) = (q("c", c)?, q("h", h)?);
    let m = Mlde3::from_ch(&c, &h);
    let ind = indicial(&m)?;
    let sols = if all {
        solve_all(&m, terms)?
    } else {
        let vacuum = -&c / Rational::from_integer(24.into());
        vec![frobenius_solve(&m, &vacuum, terms)?]
    };
    Ok(document(
        "mlde_solve",
        json!({
            "c": rational(&c),
            "h": rational(&h),
            "equation": m.to_string(),
            "P": rational(&m.p),
            "Q": rational(&m.q),
            "indicial": export::indicial(&ind),
            "solutions": sols.iter().map(|s| export::solution(s, terms)).collect::<Vec<_>>(),
        }),
    ))
}

enum SearchOut {
    Records(Value, Vec<CandidateRecord>),
    List(Value, Vec<Rational>),
}

fn search(a: &SearchArgs) -> Result<(String, SearchOut), Failure> {
    let stage = a.stage.as_deref();
    let bad_stage =
        |s: &str| Failure::Usage(format!("--stage: `{s}` is not a stage of this pipeline"));
    let ri = |v: Vec<i128>| {
        v.into_iter()
            .map(|n| Rational::from_integer(n.into()))
            .collect::<Vec<_>>()
    };
    Ok(match a.pipeline {
        PipelineName::C8 => {
            if let Some(s) = stage {
                return Err(bad_stage(s));
            }
            let recs = c8_generic_pipeline(a.terms)?;
            let cascade: Vec<Value> = c8_cascade(3)?
                .iter()
                .map(|s| {
                    json!({
                        "step": s.step,
                        "coefficient": rational(&s.coefficient),
                        "factor": rationals(s.factor.coeffs()),
                        "root": rational(&s.root),
                        "holds": s.holds,
                    })
                })
                .collect();
            (
                "c8".into(),
                SearchOut::Records(json!({ "terms": a.terms, "cascade": cascade }), recs),
            )
        }
        PipelineName::C8x => {
            if let Some(s) = stage {
                return Err(bad_stage(s));
            }
            let recs = c8_exceptional_scan(a.nmax, a.terms)?;
            let surv = survivors(&recs);
            (
                "c8x".into(),
                SearchOut::Records(
                    json!({ "nmax": a.nmax, "terms": a.terms, "survivors": rationals(&surv) }),
                    recs,
                ),
            )
        }
        PipelineName::C16 => {
            let params = |extra: Value| {
                let mut p = json!({ "y": a.y.to_string(), "terms": a.terms });
                if let (Value::Object(m), Value::Object(e)) = (&mut p, extra) {
                    m.extend(e);
                }
                p
            };
            let out = match stage.unwrap_or("final") {
                "candidates" => {
                    let ns: Vec<Rational> = c16_diophantine(a.y)?
                        .iter()
                        .map(|s| Rational::from_integer(s.n.into()))
                        .collect();
                    SearchOut::Records(
                        params(json!({ "n_values": rationals(&ns) })),
                        c16_candidate_records(a.y)?,
                    )
                }
                "integrality" => SearchOut::List(
                    params(json!({})),
                    c16_integrality_filter(a.y, &c16_h_candidates(a.y)?),
                ),
                "closure" => SearchOut::List(
                    params(json!({})),
                    c16_closure_filter(&c16_integrality_filter(a.y, &c16_h_candidates(a.y)?)),
                ),
                "final" => {
                    let f = c16_final_filter(a.y, a.terms)?;
                    SearchOut::Records(
                        params(json!({ "survivors": rationals(&f.survivors) })),
                        f.records,
                    )
                }
                "logarithmic" => {
                    SearchOut::Records(params(json!({})), c16_logarithmic_fixtures(a.terms)?)
                }
                s => return Err(bad_stage(s)),
            };
            ("c16".into(), out)
        }
        PipelineName::C4 => {
            let p = json!({ "terms": a.terms });
            let out = match stage.unwrap_or("all") {
                "m2" => SearchOut::List(p, ri(c4_m2_candidates())),
                "m1" => SearchOut::List(p, ri(c4_m1_candidates())),
                "all" => SearchOut::Records(p, c4_search(a.terms)?),
                "final" => {
                    let recs = c4_search(a.terms)?
                        .into_iter()
                        .filter(|r| r.indicial.is_some())
                        .collect();
                    SearchOut::Records(p, recs)
                }
                s => return Err(bad_stage(s)),
            };
            ("c4".into(), out)
        }
    })
}

fn render_search(a: &SearchArgs, format: Format) -> Result<String, Failure> {
    let (name, out) = search(a)?;
    Ok(match (out, format) {
        (SearchOut::Records(p, recs), Format::Json) => {
            export::to_string(&pipeline_document(&name, p, &recs))
        }
        (SearchOut::Records(_, recs), Format::Csv) => export::records_csv(&recs),
        (SearchOut::List(p, v), Format::Json) => export::to_string(&document(
            "search",
            json!({ "pipeline": name, "stage": a.stage, "parameters": p, "values": rationals(&v) }),
        )),
        (SearchOut::List(_, v), Format::Csv) => {
            let mut s = String::from("value\n");
            for x in v {
                s.push_str(&x.to_string());
                s.push('\n');
            }
            s
        }
    })
}

fn lattice(a: &LatticeArgs) -> Result<Value, Failure> {
    let p = prec(a.terms + 2);
    let w = &a.which;
    let t = if let Some(n) = w.dn {
        dn_characters(n, p)?
    } else if w.barnes_wall {
        bw_characters(p)
    } else if w.sqrt2e8 {
        sqrt2e8_characters(p)
    } else if let Some(name) = &w.orbifold {
        orbifold_characters(
            Orbifold::parse(name).map_err(|e| Failure::Usage(format!("--orbifold: {e}")))?,
            p,
        )
    } else {
        unreachable!("clap requires one lattice option")
    };
    Ok(document("lattice", export::triple(&t, a.terms)))
}

fn hyper(r: &[String], i: u8, terms: usize) -> Result<Value, Failure> {
    let r: Vec<Rational> = r.iter().map(|s| q("r", s)).collect::<Result<_, _>>()?;
    let r: [Rational; 3] = r
        .try_into()
        .map_err(|_| Failure::Usage("--r needs three values".into()))?;
    let ri = &r[i as usize - 1];
    let bound = exponent(ri, terms as i64);
    let f = hyper_solution(&r, i as usize, bound)?;
    let coeffs: Vec<Rational> = (0..terms)
        .map(|n| f.coeff(exponent(ri, n as i64)).unwrap_or_default())
        .collect();
    let indices: Vec<Value> = r.iter().map(rational).collect();
    Ok(document(
        "hyper",
        json!({ "r": indices, "i": i, "root": rational(ri), "coefficients": rationals(&coeffs) }),
    ))
}

fn verify(suite: Suite, terms: usize) -> Result<(Value, Vec<Check>), Failure> {
    let mut checks = Vec::new();
    if suite != Suite::Fixtures {
        checks.extend(identity_suite(prec(terms)));
    }
    if suite != Suite::Identities {
        checks.extend(fixture_suite()?);
    }
    let passed = checks.iter().all(|c| c.passed);
    let doc = document(
        "verify",
        json!({
            "suite": format!("{suite:?}").to_lowercase(),
            "passed": passed,
            "checks": checks.iter().map(export::check).collect::<Vec<_>>(),
        }),
    );
    Ok((doc, checks))
}

fn run(cli: &Cli) -> Outcome {
    let wrap = |r: Result<Value, Failure>| r.map(|v| export::to_string(&v)).map_err(|e| (e, None));
    let json_only = |what: &str| -> Result<(), (Failure, Option<String>)> {
        if cli.format == Format::Csv {
            Err((
                Failure::Usage(format!(
                    "--format csv is only available for search, not {what}"
                )),
                None,
            ))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::Expand { series, terms } => {
            json_only("expand")?;
            wrap(expand(series, *terms))
        }
        Command::Mlde {
            action:
                MldeAction::Solve {
                    c,
                    h,
                    terms,
                    all_roots,
                },
        } => {
            json_only("mlde")?;
            wrap(mlde_solve(c, h, *terms, *all_roots))
        }
        Command::Search(a) => render_search(a, cli.format).map_err(|e| (e, None)),
        Command::Verify { suite, terms } => {
            json_only("verify")?;
            let (doc, checks) = verify(*suite, *terms).map_err(|e| (e, None))?;
            let text = export::to_string(&doc);
            let failed: Vec<String> = checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.to_string())
                .collect();
            if failed.is_empty() {
                Ok(text)
            } else {
                Err((Failure::Verification(failed.join("\n")), Some(text)))
            }
        }
        Command::Lattice(a) => {
            json_only("lattice")?;
            wrap(lattice(a))
        }
        Command::Hyper { r, i, terms } => {
            json_only("hyper")?;
            wrap(hyper(r, *i, *terms))
        }
    }
}

/// Write to a temporary file in the target directory, then rename.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(p) => write_atomic(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("stdout: {e}"))
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("MLDE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("MLDE_LAB_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err((Failure::Usage(msg), _)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err((Failure::Verification(msg), doc)) => {
            if let Some(doc) = doc {
                if let Err(e) = emit(&cli, &doc) {
                    eprintln!("error: {e}");
                }
            }
            eprintln!("verification failed:\n{msg}");
            ExitCode::from(2)
        }
    }
}
