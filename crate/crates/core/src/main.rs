use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cfcalc::cfcat::{tensor_set_inclusion, tensor_with_set, CfObject, Context};
use cfcalc::crosseff::{cross_effect, perp};
use cfcalc::functor::FunctorSpec;
use cfcalc::json::{context_from_json, object_from_json};
use cfcalc::random::Gen;
use cfcalc::session::{NodeId, Session};
use cfcalc::suites::{self, FieldChoice, Params, Scenario, DEFAULT_CAP};
use cfcalc::tower::{gamma_tower, pn_stage, skeleton_realization, WINDOW};
use cfcalc::{ChainComplex, Error, Field, Graded, Matrix, PrimeField, Rationals, Result};

#[derive(Parser)]
#[command(name = "cfcalc", version, about = "Exact chain-level checks for functor calculus over factorization categories")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run built-in suites or a scenario file and write a report.
    Run(RunArgs),
    /// Print homology tables for a single construction.
    Demo {
        #[command(subcommand)]
        what: Demo,
    },
    /// List suites and catalog functors.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Suite name or `all`; may be repeated or comma separated.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long)]
    scenario: Option<std::path::PathBuf>,
    /// `p` (32003), `rational`, or a prime.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Largest total dimension of a single construction.
    #[arg(long)]
    cap: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Count resource-cap skips as failures.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "tensor2")]
    functor: String,
    /// `A`, `B`, `unit` (k in degree 0) or `random`.
    #[arg(long, default_value = "unit")]
    at: String,
    /// Use the context with A = B = 0 instead of 0 → k.
    #[arg(long)]
    pointed: bool,
    /// Context JSON file, overriding `--pointed`.
    #[arg(long)]
    context: Option<std::path::PathBuf>,
    /// Object JSON file, overriding `--at`.
    #[arg(long)]
    object: Option<std::path::PathBuf>,
    #[arg(long, default_value = "p")]
    field: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Clone)]
enum Demo {
    /// cr_n F(X, …, X).
    Crosseff {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// B ⊗_X U for a set U of size u, compared with X and B.
    Tensorset {
        #[arg(long, default_value_t = 0)]
        u: usize,
        #[command(flatten)]
        common: Common,
    },
    /// |sk_k ⊥_{n+1}^{*+1} F|(X).
    Skeleton {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// ⊥_n^k F(X).
    Perp {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// T_n^j F(X) and the cotriple stages for j, k up to `--k`.
    Tower {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Demo {
    fn common(&self) -> &Common {
        match self {
            Demo::Crosseff { common, .. }
            | Demo::Tensorset { common, .. }
            | Demo::Skeleton { common, .. }
            | Demo::Perp { common, .. }
            | Demo::Tower { common, .. } => common,
        }
    }
}

fn read(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let scenario = match &args.scenario {
        Some(path) => Some(Scenario::parse(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?),
        None => None,
    };
    let field = match (&args.field, scenario.as_ref().and_then(|s| s.field)) {
        (Some(f), _) => FieldChoice::parse(f)?,
        (None, Some(f)) => f,
        (None, None) => FieldChoice::parse("p")?,
    };
    let base = Params {
        seed: args.seed.or(scenario.as_ref().and_then(|s| s.seed)).unwrap_or(1),
        max_n: args.max_n,
        max_k: args.max_k,
        samples: args.samples,
        cap: args.cap.or(scenario.as_ref().and_then(|s| s.cap)).unwrap_or(DEFAULT_CAP),
        functors: None,
        context: None,
    };
    let mut plan = Vec::new();
    for name in &args.suite {
        if name == "all" {
            plan.extend((0..suites::SUITES.len()).map(|i| (i, base.clone())));
        } else {
            plan.push((suites::suite_index(name)?, base.clone()));
        }
    }
    if let Some(s) = &scenario {
        plan.extend(s.plan(&base));
    }
    if args.suite.is_empty() && scenario.is_none() {
        return Err(Error::Invalid("nothing to run: pass --suite <name|all> or --scenario <file>".into()));
    }
    let jobs = args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = suites::run_plan(field, &plan, &base, args.strict, jobs);
    if let Some(out) = &args.out {
        std::fs::write(out, report.to_json() + "\n").map_err(|e| Error::Invalid(format!("{}: {e}", out.display())))?;
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(if report.failures() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn unit_object<F: Field>(ctx: &Arc<Context<F>>) -> Result<Arc<CfObject<F>>> {
    let f = ctx.field();
    let k0 = Arc::new(ChainComplex::concentrated(f, 0, 1));
    let (a, b) = (ctx.a().clone(), ctx.b().clone());
    CfObject::new(ctx, k0, move |n| Matrix::zeros(f, usize::from(n == 0), a.dim(n)), move |n| {
        Matrix::zeros(f, b.dim(n), usize::from(n == 0))
    })
}

struct Setup<F: Field> {
    ctx: Arc<Context<F>>,
    object: Arc<CfObject<F>>,
    spec: FunctorSpec,
}

fn setup<F: Field>(field: F, c: &Common) -> Result<Setup<F>> {
    let spec = FunctorSpec::parse(&c.functor)?;
    spec.validate(field)?;
    let ctx = match &c.context {
        Some(path) => context_from_json(field, &serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?)?,
        None if c.pointed => Context::pointed(field),
        None => Context::unit_target(field),
    };
    let object = match (&c.object, c.at.as_str()) {
        (Some(path), _) => object_from_json(&ctx, &serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?)?,
        (None, "A") => ctx.initial(),
        (None, "B") => ctx.terminal(),
        (None, "unit") => unit_object(&ctx)?,
        (None, "random") => {
            let mut g = Gen::new(field, c.seed);
            g.max_dim = 1;
            g.object(&ctx)
        }
        (None, other) => return Err(Error::Invalid(format!("unknown object {other:?}; valid: A, B, unit, random"))),
    };
    Ok(Setup { ctx, object, spec })
}

fn rows_text(title: &str, rows: &[(String, Graded)]) -> String {
    let mut out = format!("{title}\n");
    let w = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    for (label, g) in rows {
        out.push_str(&format!("  {label:<w$}  {g}\n"));
    }
    out
}

fn demo<F: Field>(field: F, d: &Demo) -> Result<(String, Value)> {
    let c = d.common();
    let su = setup(field, c)?;
    let s = Session::new(&su.ctx).with_cap(c.cap);
    let x: NodeId = s.leaf(&su.object);
    let name = if c.functor.trim_start().starts_with('{') { su.spec.repr() } else { c.functor.trim().to_string() };
    let mut rows: Vec<(String, Graded)> = vec![("X".into(), su.object.x().homology())];
    let mut extra = json!({});
    let title = match d {
        Demo::Crosseff { n, .. } => {
            let t = cross_effect(&s, &su.spec, &vec![x; *n])?;
            rows.push((format!("cr_{n} {name}(X, …, X)"), t.complex.homology()));
            format!("cross effect, n = {n}")
        }
        Demo::Tensorset { u, .. } => {
            let mask = (1usize << u) - 1;
            let t = tensor_with_set(&su.object, mask);
            let incl = tensor_set_inclusion(&su.object, &su.object, &t, 0, mask);
            rows.push((format!("B ⊗_X U, #U = {u}"), t.x().homology()));
            rows.push(("B".into(), su.ctx.b().homology()));
            let (to_x, to_b) = (incl.is_quasi_iso(), t.proj().is_quasi_iso());
            extra = json!({"quasi_iso_to_X": to_x, "quasi_iso_to_B": to_b});
            format!("tensor with a set of size {u}\nquasi-isomorphic to X: {to_x}\nquasi-isomorphic to B: {to_b}")
        }
        Demo::Skeleton { n, k, .. } => {
            let r = skeleton_realization(&s, &su.spec, *n, x, *k)?;
            rows.push((format!("|sk_{k} ⊥_{}^(*+1) {name}|", n + 1), r.value.homology()));
            rows.push((format!("{name}(X)"), r.augmentation.target().homology()));
            format!("skeleton, n = {n}, k = {k}")
        }
        Demo::Perp { n, k, .. } => {
            let p = perp(&s, &su.spec, *n, x, *k)?;
            rows.push((format!("⊥_{n}^{k} {name}"), p.complex().homology()));
            format!("cotriple power, n = {n}, k = {k}")
        }
        Demo::Tower { n, k, .. } => {
            let p = pn_stage(&s, &su.spec, *n, x, *k, WINDOW)?;
            let g = gamma_tower(&s, &su.spec, *n, x, (*k).saturating_sub(1), WINDOW)?;
            for st in &p.stages {
                rows.push((format!("T_{n}^{} {name}", st.k), st.homology()));
            }
            for st in &g.stages {
                rows.push((format!("Gamma_{n} stage {}", st.k), st.homology()));
            }
            extra = json!({"p_stable_at": p.stable_at, "gamma_stable_at": g.stable_at, "window": WINDOW});
            format!(
                "towers, n = {n}; P stable at {:?}, Gamma stable at {:?} (window {:?})",
                p.stable_at, g.stable_at, WINDOW
            )
        }
    };
    let table: serde_json::Map<String, Value> =
        rows.iter().map(|(l, g)| (l.clone(), serde_json::to_value(g).expect("graded serializes"))).collect();
    let v = json!({"schema": suites::SCHEMA, "functor": name, "title": title, "homology": table, "info": extra});
    Ok((rows_text(&title, &rows), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => run(args),
        Cmd::List => {
            println!("suites:");
            for (n, d) in suites::SUITES {
                println!("  {n:<20} {d}");
            }
            println!("functors:");
            for (n, s) in FunctorSpec::catalog() {
                println!("  {n:<20} {}", s.repr());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { what } => {
            let c = what.common().clone();
            let out = FieldChoice::parse(&c.field).and_then(|f| match f {
                FieldChoice::Prime(p) => demo(PrimeField::new(p)?, &what),
                FieldChoice::Rational => demo(Rationals, &what),
            });
            out.map(|(text, v)| {
                if c.json {
                    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                } else {
                    print!("{text}");
                }
                ExitCode::SUCCESS
            })
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
