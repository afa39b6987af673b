//! The `pklab` command line: load a description, run one check or the claim
//! suite, and report as text or JSON.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! parse and load errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, run_claims, ManifoldSpec};
use crate::deform::semi_kahler_first_order_check;
use crate::dsl::{self, parse_expr, Diagnostic, Subst};
use crate::exterior::Form;
use crate::obstruct::{invariant_taming_solver, mt_obstruction, nop_test, NopCertificate, Ordering6, TamingVerdict};
use crate::pkahler::{is_transverse, seed_from_env, TransverseOptions, DEFAULT_SAMPLES};
use crate::symexpr::{NoFunctions, Var};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "pklab", version, about = "Exterior calculus checks for almost complex manifolds")]
pub struct Cli {
    #[command(flatten)]
    pub source: Source,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Substitute parameters or functions, e.g. `--at t=1/2` or `--at u=x2,v=y2`.
    #[arg(long = "at", value_name = "VAR=VALUE", global = true)]
    pub at: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Source {
    /// A `.pk` description.
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "builtin")]
    pub spec: Option<PathBuf>,
    /// A shipped description: torus6, sl2c, iwasawa, heisenbergN, c4_family.
    #[arg(long, global = true, value_name = "NAME")]
    pub builtin: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one check.
    #[command(subcommand)]
    Check(Check),
    /// Run a solver.
    #[command(subcommand)]
    Solve(Solve),
    /// Run the claims attached to a description.
    #[command(subcommand)]
    Claims(Claims),
    /// Print the canonical text of a description.
    Print,
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// `d∘d = 0` on every covector of every frame in the description.
    D2,
    /// `J² = -id` and the type of the coframes and named forms.
    Type,
    /// `dF = 0` for a form expression.
    Closed { form: String },
    /// Transversality of a real `(p,p)`-form with respect to the working structure.
    Positive {
        form: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Sampling seed; `PKLAB_SEED` if unset.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Vanishing of the `(0,2)` parts of `dφ^j` for the working coframe.
    Integrable,
    /// The two local compatibility equations on ℝ⁶ at the origin.
    Mt,
    /// The non-existence test for a certificate `β`.
    Nop { beta: String },
    /// `∂η + ∂̄λ = 0` for every deformation parameter.
    SemiKahlerFirstOrder,
}

#[derive(Subcommand, Debug)]
pub enum Solve {
    /// Closed invariant 2-forms taming the working structure.
    Taming,
}

#[derive(Subcommand, Debug)]
pub enum Claims {
    Run {
        /// A `.pk` file; same as `--spec`.
        file: Option<PathBuf>,
    },
}

/// What a command prints and how it exits.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Split `a=1,b=f(x, y)` at top-level commas.
fn split_at_arg(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_at(args: &[String]) -> Result<Subst, String> {
    let mut subs = Vec::new();
    for a in args {
        for piece in split_at_arg(a) {
            let (name, value) = piece.split_once('=').ok_or_else(|| format!("`--at {piece}`: expected VAR=VALUE"))?;
            let e = parse_expr(value).map_err(|d| format!("`--at {piece}`: {}", render(&d)))?;
            subs.push((name.trim().to_string(), e));
        }
    }
    Ok(subs)
}

fn render(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn load(cli: &Cli) -> Result<ManifoldSpec, String> {
    let file = match &cli.command {
        Command::Claims(Claims::Run { file: Some(f) }) => Some(f.clone()),
        _ => cli.source.spec.clone(),
    };
    let text = match (&file, &cli.source.builtin) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(name)) => catalog::builtin_source(name).map_err(|e| e.to_string())?,
        (None, None) => return Err("give a description with --spec FILE or --builtin NAME".into()),
    };
    let label = file.as_ref().map_or_else(|| cli.source.builtin.clone().unwrap_or_default(), |p| p.display().to_string());
    let doc = dsl::parse(&text).map_err(|d| format!("{label}:\n{}", render(&d)))?;
    let subs = parse_at(&cli.at)?;
    dsl::load_with(&doc, &subs).map_err(|d| format!("{label}:\n{}", render(&d)))
}

/// The result of one check before formatting.
struct Report {
    passed: bool,
    lines: Vec<String>,
    data: Value,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn form_arg(spec: &ManifoldSpec, text: &str) -> Result<Form, String> {
    spec.eval_text(text).map_err(|d| render(&d))
}

fn params(spec: &ManifoldSpec) -> Vec<Var> {
    // one entry per parameter, skipping conjugates of complex ones
    let mut out: Vec<Var> = Vec::new();
    if let Some(fam) = &spec.family {
        for t in fam.params() {
            if !out.iter().any(|s| s.conj() == *t) {
                out.push(t.clone());
            }
        }
    }
    out
}

fn check_d2(spec: &ManifoldSpec) -> Result<Report, String> {
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let mut frames = vec![("frame".to_string(), spec.frame.clone())];
    frames.push(("base coframe".into(), spec.frame_on(&spec.base).map_err(|e| e.to_string())?));
    if spec.family.is_some() || spec.member.is_some() {
        let cf = spec.working_coframe().map_err(|e| e.to_string())?;
        frames.push(("deformed coframe".into(), spec.frame_on(&cf).map_err(|e| e.to_string())?));
    }
    let mut passed = true;
    for (what, fr) in frames {
        let r = fr.check_d2();
        passed &= r.is_ok();
        let msg = r.as_ref().err().map(ToString::to_string);
        lines.push(format!("{what}: {}", msg.clone().unwrap_or_else(|| "d∘d = 0".into())));
        rows.push(json!({ "frame": what, "passed": msg.is_none(), "error": msg }));
    }
    Ok(Report { passed, lines, data: json!({ "frames": rows }) })
}

fn check_type(spec: &ManifoldSpec) -> Result<Report, String> {
    let j = spec.structure().map_err(|e| e.to_string())?;
    let square = j.check();
    let mut lines = vec![format!("J^2 = -id: {}", square.is_ok())];
    let mut passed = square.is_ok();
    // with a family, the acs block describes a member rather than the base
    let base_ok = if spec.acs.is_some() && spec.family.is_none() && spec.member.is_none() {
        let ok = j.is_type_10(&spec.base.holomorphic()).map_err(|e| e.to_string())?;
        lines.push(format!("base coframe of type (1,0): {ok}"));
        passed &= ok;
        Some(ok)
    } else {
        None
    };
    let cf = spec.working_coframe().map_err(|e| e.to_string())?;
    let mut forms = Vec::new();
    for (name, f) in &spec.forms {
        let types = cf.to_coframe(f).and_then(|g| g.bidegrees()).map_err(|e| e.to_string())?;
        lines.push(format!("{name}: {types:?}"));
        forms.push(json!({ "form": name, "bidegrees": types }));
    }
    Ok(Report {
        passed,
        lines,
        data: json!({
            "j_squared_minus_id": square.is_ok(),
            "error": square.err().map(|e| e.to_string()),
            "base_type_10": base_ok,
            "forms": forms,
        }),
    })
}

fn check_closed(spec: &ManifoldSpec, text: &str) -> Result<Report, String> {
    let f = form_arg(spec, text)?;
    let d = spec.frame.d(&f).map_err(|e| e.to_string())?;
    Ok(Report {
        passed: d.is_zero(),
        lines: vec![format!("d({text}) = {}", d.to_text())],
        data: json!({ "form": text, "closed": d.is_zero(), "d": d.to_text() }),
    })
}

fn check_positive(spec: &ManifoldSpec, text: &str, samples: usize, seed: Option<u64>) -> Result<Report, String> {
    let f = form_arg(spec, text)?;
    let cf = spec.working_coframe().map_err(|e| e.to_string())?;
    let in_cf = cf.to_coframe(&f).map_err(|e| e.to_string())?;
    let deg = f.degree().map_err(|e| e.to_string())?;
    let pure = deg % 2 == 0 && in_cf.is_pure(deg / 2, deg / 2).map_err(|e| e.to_string())?;
    if !f.is_real() || !pure {
        return Ok(Report {
            passed: false,
            lines: vec![format!("{text} is not a real (p,p)-form: types {:?}", in_cf.bidegrees().unwrap_or_default())],
            data: json!({ "form": text, "real": f.is_real(), "pure": pure, "transverse": null }),
        });
    }
    let opts = TransverseOptions { samples, seed: seed.unwrap_or_else(seed_from_env), ..Default::default() };
    let r = is_transverse(&in_cf, &opts, &NoFunctions).map_err(|e| e.to_string())?;
    let mut lines = vec![format!("{:?} via {}", r.verdict, r.method)];
    if let Some(range) = &r.certified_range {
        lines.push(format!("certified for {range}"));
    }
    if let Some(w) = &r.witness {
        lines.push(format!("witness {} with pairing {}", w.form, w.pairing));
    }
    Ok(Report { passed: r.is_transverse(), lines, data: json!({ "form": text, "real": true, "pure": true, "transverse": to_value(&r) }) })
}

fn check_integrable(spec: &ManifoldSpec) -> Result<Report, String> {
    let cf = spec.working_coframe().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (k, phi) in cf.holomorphic().iter().enumerate() {
        let d = spec.frame.d(phi).and_then(|d| cf.to_coframe(&d)).and_then(|d| d.bidegree_part(0, 2)).map_err(|e| e.to_string())?;
        parts.push((cf.basis().name(k).to_string(), d.to_text(), d.is_zero()));
    }
    let passed = parts.iter().all(|p| p.2);
    let lines = parts.iter().map(|(n, d, _)| format!("(d{n})^(0,2) = {d}")).collect();
    let rows: Vec<Value> = parts.iter().map(|(n, d, z)| json!({ "covector": n, "part_02": d, "zero": z })).collect();
    Ok(Report { passed, lines, data: json!({ "integrable": passed, "parts": rows }) })
}

fn check_mt(spec: &ManifoldSpec) -> Result<Report, String> {
    let mut j = spec.structure().map_err(|e| e.to_string())?;
    let dim = spec.frame.basis().dim();
    let mut restricted = None;
    if dim == 8 {
        let keep = ["dx1", "dx2", "dx3", "dy1", "dy2", "dy3"];
        j = j.restrict(&keep).map_err(|e| e.to_string())?;
        restricted = Some(keep.join(", "));
    }
    let coords: Vec<Var> = spec.frame.coords().cloned().collect();
    if coords.is_empty() {
        return Err("`check mt` needs a coordinate description".into());
    }
    let r = mt_obstruction(&j, &coords, Ordering6::Block).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    if let Some(k) = &restricted {
        lines.push(format!("restricted to {k}"));
    }
    lines.push(format!("eq1 = {}", r.eq1));
    lines.push(format!("eq2 = {}", r.eq2));
    lines.push(if r.obstructed { "obstructed".into() } else { "no obstruction".into() });
    let mut data = to_value(&r);
    data["restricted_to"] = json!(restricted);
    Ok(Report { passed: !r.obstructed, lines, data })
}

fn check_nop(spec: &ManifoldSpec, text: &str) -> Result<Report, String> {
    let cf = spec.working_coframe().map_err(|e| e.to_string())?;
    let frame = spec.frame_on(&cf).map_err(|e| e.to_string())?;
    let beta = cf.to_coframe(&form_arg(spec, text)?).map_err(|e| e.to_string())?;
    let deg = beta.degree().map_err(|e| e.to_string())?;
    let n = cf.n();
    if deg % 2 == 0 || deg + 1 > 2 * n {
        return Err(format!("β has degree {deg}; a certificate has degree 2n-2p-1 for some 1 ≤ p < {n}"));
    }
    let p = n - (deg + 1) / 2;
    let r = NopCertificate::diagonal(beta, p, &frame).and_then(|c| nop_test(&c, &frame, spec.compact));
    Ok(match r {
        Ok(r) => Report {
            passed: true,
            lines: vec![
                format!("d(beta) = {}", r.d_beta),
                format!("coefficients [{}], sign {}, when {}", r.coefficients.join(", "), r.sign, r.nonvanishing),
                r.verdict.clone(),
            ],
            data: to_value(&r),
        },
        Err(e) => Report { passed: false, lines: vec![format!("certificate rejected: {e}")], data: json!({ "p": p, "error": e.to_string() }) },
    })
}

fn check_first_order(spec: &ManifoldSpec) -> Result<Report, String> {
    let m = spec.metric.as_ref().ok_or("`check semi-kahler-first-order` needs a deform block")?;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for t in params(spec) {
        let r = semi_kahler_first_order_check(m, &spec.frame, &t).map_err(|e| e.to_string())?;
        passed &= r.passes;
        lines.push(format!("{}: residual {}", r.param, r.residual));
        if let Some(c) = &r.corollary {
            lines.push(format!("{}: corollary form {c}", r.param));
        }
        if let Some(p) = &r.pdes {
            lines.push(format!("{}: pdes [{}]", r.param, p.join(", ")));
        }
        reports.push(to_value(&r));
    }
    Ok(Report { passed, lines, data: json!({ "params": reports }) })
}

fn solve_taming(spec: &ManifoldSpec) -> Result<Report, String> {
    let cf = spec.working_coframe().map_err(|e| e.to_string())?;
    let frame = spec.frame_on(&cf).map_err(|e| e.to_string())?;
    let r = invariant_taming_solver(&frame, seed_from_env()).map_err(|e| e.to_string())?;
    let t = &r.taming;
    let lines = vec![
        format!("taming: {:?}; closed invariant 2-forms {}; forced to zero [{}]", t.verdict, t.closed_dimension, t.forced_zero.join(", ")),
        format!("compatible: {:?}", r.compatible.verdict),
        r.note.to_string(),
    ];
    Ok(Report { passed: t.verdict == TamingVerdict::Found, lines, data: to_value(&r) })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check(Check::D2) => "check d2",
        Command::Check(Check::Type) => "check type",
        Command::Check(Check::Closed { .. }) => "check closed",
        Command::Check(Check::Positive { .. }) => "check positive",
        Command::Check(Check::Integrable) => "check integrable",
        Command::Check(Check::Mt) => "check mt",
        Command::Check(Check::Nop { .. }) => "check nop",
        Command::Check(Check::SemiKahlerFirstOrder) => "check semi-kahler-first-order",
        Command::Solve(Solve::Taming) => "solve taming",
        Command::Claims(Claims::Run { .. }) => "claims run",
        Command::Print => "print",
    }
}

fn failure(json_out: bool, command: &str, msg: String) -> Outcome {
    if json_out {
        let v = json!({ "schema": SCHEMA, "command": command, "error": msg });
        Outcome { code: 2, stdout: format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), stderr: String::new() }
    } else {
        Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let spec = match load(cli) {
        Ok(s) => s,
        Err(msg) => return failure(cli.json, name, msg),
    };
    if let Command::Print = cli.command {
        return Outcome { code: 0, stdout: spec.to_text(), stderr: String::new() };
    }
    if let Command::Claims(_) = cli.command {
        let r = run_claims(&spec);
        let stdout = if cli.json {
            format!("{}\n", serde_json::to_string_pretty(&r).unwrap())
        } else {
            let mut s = String::new();
            for c in &r.claims {
                s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.id, c.detail));
                if let Some(res) = &c.residual {
                    s.push_str(&format!("  residual: {res}\n"));
                }
            }
            s.push_str(&format!("{}: {} passed, {} failed\n", r.spec, r.passed, r.failed));
            s
        };
        return Outcome { code: if r.all_passed() { 0 } else { 1 }, stdout, stderr: String::new() };
    }
    let report = match &cli.command {
        Command::Check(Check::D2) => check_d2(&spec),
        Command::Check(Check::Type) => check_type(&spec),
        Command::Check(Check::Closed { form }) => check_closed(&spec, form),
        Command::Check(Check::Positive { form, samples, seed }) => check_positive(&spec, form, *samples, *seed),
        Command::Check(Check::Integrable) => check_integrable(&spec),
        Command::Check(Check::Mt) => check_mt(&spec),
        Command::Check(Check::Nop { beta }) => check_nop(&spec, beta),
        Command::Check(Check::SemiKahlerFirstOrder) => check_first_order(&spec),
        Command::Solve(Solve::Taming) => solve_taming(&spec),
        Command::Claims(_) | Command::Print => unreachable!(),
    };
    let report = match report {
        Ok(r) => r,
        Err(msg) => return failure(cli.json, name, msg),
    };
    let code = if report.passed { 0 } else { 1 };
    let stdout = if cli.json {
        let v = json!({ "schema": SCHEMA, "command": name, "spec": spec.name, "passed": report.passed, "report": report.data });
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else {
        let mut s = format!("{name} on {}\n", spec.name);
        for l in &report.lines {
            s.push_str(&format!("  {l}\n"));
        }
        s.push_str(if report.passed { "PASS\n" } else { "FAIL\n" });
        s
    };
    Outcome { code, stdout, stderr: String::new() }
}

/// Parse arguments (including the program name) and run.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
