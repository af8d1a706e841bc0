use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use tate_periods::abeloid::{
    hom_algebraic, hom_tate, is_isogenous, l_invariant, log_matrix, ord_matrix, HomMode, PeriodMatrix,
};
use tate_periods::phin::{dst_of_abeloid, is_ordinary_weight2, load_module, newton_hodge, raskind_check, ModuleSpec};
use tate_periods::scenarios::{self, ScenarioReport};
use tate_periods::surface::{build_h2, example_non_admissible, ordinary_filtration_from_vector, picard_rank, vector_from_filtration};
use tate_periods::sym::parse_expr;
use tate_periods::{parse_entry, Error, QpContext, Result, Units};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "tate-periods", version, about = "p-adic periods of abeloid varieties and Tate curves")]
struct Cli {
    #[arg(long, global = true, default_value_t = 7)]
    prime: u64,
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Height bound for rational reconstruction
    #[arg(long, global = true)]
    height_bound: Option<BigInt>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Period-matrix or module JSON file (repeatable)
    #[arg(long, global = true)]
    input: Vec<PathBuf>,
    /// Compare output against golden files in this directory
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    /// Overwrite golden files instead of comparing
    #[arg(long, global = true, requires = "golden")]
    bless: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// ord, log and L-invariant of a period matrix
    Linv,
    /// Hom(A, B) (x) Q, or over Z with --integral
    Hom {
        #[arg(long)]
        integral: bool,
    },
    /// Galois-equivariant Homs of l-adic Tate modules
    TateHom {
        #[arg(long)]
        ell: u64,
    },
    Isogeny,
    /// Filtered (phi, N)-module of an abeloid
    Dst,
    /// Raskind check of a module JSON
    Raskind,
    /// H^2 of E(q1) x E(q2), or the non-admissible family with --gamma
    Surface {
        #[arg(long)]
        q1: Option<String>,
        #[arg(long)]
        q2: Option<String>,
        #[arg(long, conflicts_with_all = ["q1", "q2"])]
        gamma: Option<String>,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Filtration from a normalized isotropic vector (six comma-separated values)
    Ordinary {
        #[arg(long)]
        vector: String,
    },
    Counterexample {
        #[arg(long, default_value = scenarios::DEFAULT_EPSILON)]
        epsilon: String,
    },
    AppendixA3 {
        #[arg(long)]
        ell: u64,
    },
    LIndependence {
        #[arg(long)]
        ell: u64,
        #[arg(long, requires = "q2")]
        q1: Option<String>,
        #[arg(long, requires = "q1")]
        q2: Option<String>,
    },
    ProductPositive {
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
    },
}

enum Output {
    Plain(Value),
    Scenario(Box<ScenarioReport>),
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable output")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn matrices(cli: &Cli, count: usize) -> Result<Vec<PeriodMatrix>> {
    if cli.input.len() != count {
        return Err(Error::InvalidInput(format!("expected {count} --input file(s), got {}", cli.input.len())));
    }
    cli.input.iter().map(|f| PeriodMatrix::from_json(&read(f)?, cli.precision)).collect()
}

fn eval_number(text: &str, ctx: &QpContext) -> Result<tate_periods::PadicNumber> {
    parse_expr(text)?.eval(ctx, &BTreeMap::new(), &Units::new())
}

fn run(cli: &Cli) -> Result<Output> {
    let (p, n) = (cli.prime, cli.precision);
    let h = cli.height_bound.as_ref();
    let plain = |v: Value| Ok(Output::Plain(v));
    match &cli.cmd {
        Cmd::Linv => {
            let q = &matrices(cli, 1)?[0];
            plain(json!({
                "ord": ord_matrix(q)?,
                "log": log_matrix(q),
                "L": l_invariant(q)?,
                "warnings": q.warnings(),
            }))
        }
        Cmd::Hom { integral } => {
            let qs = matrices(cli, 2)?;
            let mode = if *integral { HomMode::Integral } else { HomMode::Rational };
            plain(to_value(&hom_algebraic(&qs[0], &qs[1], mode, h)?))
        }
        Cmd::TateHom { ell } => {
            let qs = matrices(cli, 2)?;
            plain(to_value(&hom_tate(*ell, &qs[0], &qs[1])?))
        }
        Cmd::Isogeny => {
            let qs = matrices(cli, 2)?;
            plain(to_value(&is_isogenous(&qs[0], &qs[1])?))
        }
        Cmd::Dst => {
            let q = &matrices(cli, 1)?[0];
            let d = dst_of_abeloid(q)?;
            plain(json!({ "module": d, "newton_hodge": newton_hodge(&d)? }))
        }
        Cmd::Raskind => {
            let [f] = cli.input.as_slice() else {
                return Err(Error::InvalidInput("raskind needs exactly one --input module file".into()));
            };
            let spec: ModuleSpec = serde_json::from_str(&read(f)?).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let m = load_module(&spec, n)?;
            let r = m.structure.as_ref().ok_or_else(|| Error::InvalidInput("module has no rational structure".into()))?;
            let ordinary = is_ordinary_weight2(&m.module, r).ok();
            plain(json!({ "verdict": raskind_check(&m.module, r, &m.facts)?, "ordinary": ordinary }))
        }
        Cmd::Surface { q1, q2, gamma, lambda } => {
            let ctx = QpContext::new(p, n)?;
            if let Some(g) = gamma {
                let m = example_non_admissible(&eval_number(g, &ctx)?, &eval_number(lambda, &ctx)?, h)?;
                let v = raskind_check(&m.module, &m.structure, &m.facts)?;
                return plain(json!({
                    "module": m.summary(),
                    "filtration": m.module.filtration(),
                    "raskind": v,
                    "spec": m.to_spec(),
                }));
            }
            let (Some(s1), Some(s2)) = (q1, q2) else {
                return Err(Error::InvalidInput("surface needs --q1 and --q2, or --gamma".into()));
            };
            let a = parse_entry(s1, &ctx, &Units::new())?;
            let b = parse_entry(s2, &ctx, &Units::new())?;
            let m = build_h2(&a, &b)?;
            let rank = match picard_rank(&a, &b, &[]) {
                Ok(r) => json!(r),
                Err(Error::Undecided) => json!("UNDECIDED"),
                Err(e) => return Err(e),
            };
            let v = raskind_check(&m.module, &m.structure, &m.facts);
            let verdict = match v {
                Ok(v) => to_value(&v),
                Err(e @ Error::InsufficientFacts(_)) => json!({ "error": e.code(), "message": e.to_string() }),
                Err(e) => return Err(e),
            };
            plain(json!({
                "module": m.summary(),
                "filtration": m.module.filtration(),
                "picard_rank": rank,
                "raskind": verdict,
            }))
        }
        Cmd::Ordinary { vector } => {
            let ctx = QpContext::new(p, n)?;
            let v = vector.split(',').map(|s| eval_number(s.trim(), &ctx)).collect::<Result<Vec<_>>>()?;
            let f = ordinary_filtration_from_vector(&v)?;
            plain(json!({ "filtration": f, "vector": vector_from_filtration(&f)? }))
        }
        Cmd::Counterexample { epsilon } => Ok(Output::Scenario(Box::new(scenarios::counterexample(p, n, epsilon, h)?))),
        Cmd::AppendixA3 { ell } => Ok(Output::Scenario(Box::new(scenarios::appendix_tate_pair(p, *ell, n)?))),
        Cmd::LIndependence { ell, q1, q2 } => {
            let pair = q1.as_deref().zip(q2.as_deref());
            Ok(Output::Scenario(Box::new(scenarios::l_independence(p, *ell, n, pair)?)))
        }
        Cmd::ProductPositive { q1, q2 } => Ok(Output::Scenario(Box::new(scenarios::product_positive(p, n, q1, q2)?))),
    }
}

/// File stem identifying a run: subcommand plus its arguments.
fn golden_key(cli: &Cli) -> String {
    let raw = format!("{:?}", cli.cmd);
    let mut key: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c.to_ascii_lowercase() } else { '_' })
        .collect();
    while key.contains("__") {
        key = key.replace("__", "_");
    }
    // drop "some" wrappers and unset options
    let mut parts: Vec<&str> = Vec::new();
    for t in key.split('_').filter(|t| !t.is_empty() && *t != "some") {
        if t == "none" {
            parts.pop();
        } else {
            parts.push(t);
        }
    }
    key = parts.join("_");
    let inputs: Vec<String> =
        cli.input.iter().filter_map(|f| f.file_stem().map(|s| s.to_string_lossy().into_owned())).collect();
    let mut out = format!("{}_p{}_n{}", key.trim_matches('_'), cli.prime, cli.precision);
    for i in inputs {
        out += "_";
        out += &i;
    }
    out
}

fn text_of(v: &Value) -> String {
    match v {
        Value::Object(m) => m.iter().map(|(k, x)| format!("{k}: {x}\n")).collect(),
        other => format!("{other}\n"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            return ExitCode::from(1);
        }
    };
    let (value, text, pass) = match &out {
        Output::Plain(v) => (v.clone(), text_of(v), true),
        Output::Scenario(r) => (to_value(r), r.to_text(), r.pass),
    };
    let shown = match cli.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("json") + "\n",
        Format::Text => text,
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(shown.as_bytes());
    let mut ok = pass;
    if let Some(dir) = &cli.golden {
        let stable = match &out {
            Output::Plain(v) => v.clone(),
            Output::Scenario(r) => to_value(&r.without_timing()),
        };
        let body = serde_json::to_string_pretty(&stable).expect("json") + "\n";
        let path = dir.join(format!("{}.json", golden_key(&cli)));
        if cli.bless {
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &body)) {
                eprintln!("error[IO]: {}: {e}", path.display());
                return ExitCode::from(1);
            }
            eprintln!("blessed {}", path.display());
        } else {
            match std::fs::read_to_string(&path) {
                Ok(g) if g == body => {}
                Ok(_) => {
                    eprintln!("golden mismatch: {}", path.display());
                    ok = false;
                }
                Err(e) => {
                    eprintln!("error[IO]: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
