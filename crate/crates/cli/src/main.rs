use clap::{Args, Parser, Subcommand, ValueEnum};
use hfsum_core::demos::{demo_en, demo_xn, DemoReport};
use hfsum_core::fibersum::{chern_display, fibersum};
use hfsum_core::pairing::DualBasis;
use hfsum_core::plane::{xgd_rank, PlaneElem};
use hfsum_core::selftest::{run_selftest, DEFAULT_SEED};
use hfsum_core::surgery::{Kernel, GENUS_CAP};
use hfsum_core::{parse_invariant, print_invariant, Error, DEFAULT_TRUNC};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hfsum", version, about = "Twisted Floer homology of Σ×S¹ and fiber-sum invariants")]
struct Cli {
    /// Emit a structured JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel basis and corrected H₁-action for one spin^c structure.
    Hf(HfArgs),
    /// Fiber sum of two invariant files.
    Fibersum(FibersumArgs),
    /// Elliptic-surface demos with closed-form checks.
    Demo(DemoArgs),
    /// Seeded randomized property suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct HfArgs {
    #[arg(long)]
    genus: usize,
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    trunc: usize,
    /// Print the plane embedding of every basis element.
    #[arg(long)]
    dump: bool,
    /// Print the Kronecker and Poincaré dual bases with their units.
    #[arg(long)]
    dual: bool,
}

#[derive(Args, Debug)]
struct FibersumArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Gluing matrix, rows separated by `;` and entries by `,` (default: identity).
    #[arg(long)]
    map: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    trunc: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    En,
    Xn,
}

#[derive(Args, Debug)]
struct DemoArgs {
    family: Family,
    n: usize,
    #[arg(long, default_value_t = DEFAULT_TRUNC)]
    trunc: usize,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, hide = true)]
    force_failure: bool,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

fn check_genus(g: usize) -> Result<(), Failure> {
    if g == 0 || g > GENUS_CAP {
        return Err(Error::GenusOutOfRange(g, GENUS_CAP).into());
    }
    Ok(())
}

fn check_trunc(n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Input("--trunc must be positive".into()));
    }
    Ok(())
}

fn plane_text(x: &PlaneElem<BigInt>) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms().map(|(s, c)| format!("({c})·{s}")).collect::<Vec<_>>().join(" + ")
}

fn cmd_hf(a: &HfArgs) -> Result<Output, Failure> {
    check_genus(a.genus)?;
    check_trunc(a.trunc)?;
    let ker = Kernel::new(a.genus, a.k, a.trunc)?;
    let (g, d) = (ker.genus(), ker.d());
    let mut text = String::new();
    writeln!(text, "X(g={g}, d={d}) for k={}, truncation {}", a.k, a.trunc).unwrap();
    writeln!(text, "rank {} (formula {})", ker.rank(), xgd_rank(g, d)).unwrap();
    writeln!(text, "basis:").unwrap();
    for (i, s) in ker.basis().iter().enumerate() {
        writeln!(text, "  [{i}] {s}").unwrap();
    }
    let mut actions = Vec::new();
    for gen in 1..=2 * g {
        writeln!(text, "action of e{gen}:").unwrap();
        let mut images = Vec::new();
        for (i, x) in ker.elements().iter().enumerate() {
            let y = ker.corrected_action_basis(gen, x)?;
            if !y.is_zero() {
                writeln!(text, "  e{gen} . {} = {y}", ker.basis()[i]).unwrap();
            }
            images.push(json!({"basis": ker.basis()[i].to_string(), "image": y.to_string()}));
        }
        actions.push(json!({"generator": format!("e{gen}"), "images": images}));
    }
    let mut u_images = Vec::new();
    writeln!(text, "action of U:").unwrap();
    for (i, x) in ker.elements().iter().enumerate() {
        let y = ker.u_action(x, 1)?;
        if !y.is_zero() {
            writeln!(text, "  U . {} = {y}", ker.basis()[i]).unwrap();
        }
        u_images.push(json!({"basis": ker.basis()[i].to_string(), "image": y.to_string()}));
    }
    actions.push(json!({"generator": "U", "images": u_images}));
    let mut doc = json!({
        "command": "hf",
        "genus": g,
        "k": a.k,
        "d": d,
        "trunc": a.trunc,
        "rank": ker.rank(),
        "basis": ker.basis().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "actions": actions,
    });
    if a.dump {
        writeln!(text, "embeddings:").unwrap();
        let mut emb = Vec::new();
        for (i, s) in ker.basis().iter().enumerate() {
            let dump = ker.embedding(i).dump();
            writeln!(text, "  {s}:").unwrap();
            for line in dump.lines() {
                writeln!(text, "    {line}").unwrap();
            }
            emb.push(json!({"basis": s.to_string(), "terms": dump.lines().collect::<Vec<_>>()}));
        }
        doc["embeddings"] = Value::Array(emb);
    }
    if a.dual {
        let db = DualBasis::new(g, a.k)?;
        writeln!(text, "dual bases:").unwrap();
        writeln!(text, "  basis | kronecker dual | poincare dual | dual of poincare | unit").unwrap();
        let mut rows = Vec::new();
        for i in 0..db.len() {
            let kron = db.kron(i)?.to_string();
            let poin = plane_text(db.poin(i)?);
            let kp = db.kron_poin(i)?.to_string();
            let u = db.unit(i, &ker)?;
            writeln!(text, "  {} | {kron} | {poin} | {kp} | {}", db.basis()[i], u.pretty("t")).unwrap();
            rows.push(json!({
                "basis": db.basis()[i].to_string(),
                "kron": kron,
                "poin": poin,
                "kron_poin": kp,
                "unit": u.pretty("t"),
            }));
        }
        doc["dual"] = Value::Array(rows);
    }
    Ok(Output { text, json: doc, ok: true })
}

fn parse_map(s: &str) -> Result<Vec<Vec<i64>>, Failure> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Failure::Input(format!("bad matrix entry `{x}`"))))
                .collect()
        })
        .collect()
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_fibersum(a: &FibersumArgs) -> Result<Output, Failure> {
    check_trunc(a.trunc)?;
    let parse = |p: &PathBuf| -> Result<_, Failure> {
        parse_invariant(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
    };
    let (x, y) = (parse(&a.a)?, parse(&a.b)?);
    if x.genus > 1 {
        check_genus(x.genus)?;
    }
    let map = a.map.as_deref().map(parse_map).transpose()?;
    let out = fibersum(&x, &y, map.as_deref(), a.trunc)?;
    let body = print_invariant(&out);
    std::fs::write(&a.out, &body).map_err(|e| Failure::Input(format!("{}: {e}", a.out.display())))?;
    let display = chern_display(&out).unwrap_or_else(|_| "(no symmetric representative within the window)".into());
    let text = format!("wrote {} ({} entries)\n{body}T-form:\n{display}\n", a.out.display(), out.entries().len());
    let doc = json!({
        "command": "fibersum",
        "genus": out.genus,
        "euler": out.euler,
        "sigma": out.signature,
        "entries": out.entries().len(),
        "out": a.out.display().to_string(),
        "file": body,
        "display": display,
    });
    Ok(Output { text, json: doc, ok: true })
}

fn demo_output(r: &DemoReport) -> Output {
    let mut text = String::new();
    writeln!(text, "{} {}:", r.name, r.n).unwrap();
    for line in r.rendered.lines() {
        writeln!(text, "  {line}").unwrap();
    }
    for (name, ok) in &r.checks {
        writeln!(text, "  {} {name}", if *ok { "PASS" } else { "FAIL" }).unwrap();
    }
    writeln!(text, "{}", if r.pass() { "PASS" } else { "FAIL" }).unwrap();
    let doc = json!({
        "command": "demo",
        "family": r.name,
        "n": r.n,
        "rendered": r.rendered,
        "checks": r.checks.iter().map(|(n, ok)| json!({"name": n, "pass": ok})).collect::<Vec<_>>(),
        "pass": r.pass(),
    });
    Output { text, json: doc, ok: r.pass() }
}

fn cmd_demo(a: &DemoArgs) -> Result<Output, Failure> {
    check_trunc(a.trunc)?;
    let r = match a.family {
        Family::En => demo_en(a.n, a.trunc)?,
        Family::Xn => demo_xn(a.n, a.trunc)?,
    };
    Ok(demo_output(&r))
}

fn cmd_selftest(a: &SelftestArgs) -> Result<Output, Failure> {
    let r = run_selftest(a.seed, a.force_failure)?;
    let mut text = format!("seed {}\n", r.seed);
    for s in &r.suites {
        let verdict = if s.passed() { "PASS" } else { "FAIL" };
        writeln!(text, "{verdict} {} ({} cases, {} failures)", s.name, s.cases, s.failures).unwrap();
        if let Some(f) = &s.first_failure {
            writeln!(text, "  {f}").unwrap();
        }
    }
    writeln!(text, "{}", if r.passed() { "all suites passed" } else { "FAILURES" }).unwrap();
    let doc = json!({
        "command": "selftest",
        "seed": r.seed,
        "suites": r.suites.iter().map(|s| json!({
            "name": s.name,
            "cases": s.cases,
            "failures": s.failures,
            "first_failure": s.first_failure,
        })).collect::<Vec<_>>(),
        "pass": r.passed(),
    });
    Ok(Output { text, json: doc, ok: r.passed() })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Hf(a) => cmd_hf(a),
        Command::Fibersum(a) => cmd_fibersum(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}
