//! Command-line front end shared by the `kovacic` and `bianchi` binaries.
//!
//! Exit codes: 0 success, 1 domain error (inadmissible parameters, failed or
//! inconclusive verification, I/O), 2 usage error (unknown subcommand,
//! missing or malformed argument).

pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use bianchi_core::algebra::{parse_expression, render_rational, rat_to_f64};
use bianchi_core::dynamics::emit::{svg_scatter, write_csv, write_fates_csv};
use bianchi_core::dynamics::{section_batch, Axis, FateKind, GridSpec, IntegratorConfig};
use bianchi_core::evidence::{
    default_loops, default_path, galois_identities, monodromy_increments, resolve_constants, second_ve_equivalence,
    EvidenceConfig, MonodromyReport, MuResolution, ResidualReport, SecondVeReport,
};
use bianchi_core::kovacic::{self, CaseOrder, Outcome};
use bianchi_core::model::second_ve::printed_coefficients;
use bianchi_core::model::{build_ve_suite, ModelParams, VeSuite};
use config::Resolver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) | CliError::Io(_) => EXIT_DOMAIN,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Io(e) => write!(f, "error: {e:#}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// JSON file with default values for any flag (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reserved; every sampling is a deterministic grid.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

// ---------------------------------------------------------------- kovacic

#[derive(Parser, Debug)]
#[command(name = "kovacic", about = "Kovacic's algorithm for y'' = r y over Q(i)(x)")]
struct KovacicCli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: KovacicCommand,
}

#[derive(Subcommand, Debug)]
enum KovacicCommand {
    /// Decide Liouvillian solutions of y'' = r y.
    Solve {
        /// Rational function r(x), e.g. "3/(4*x^2)".
        #[arg(long)]
        r: Option<String>,
        /// Case order: canonical 1, 2, 3 or primitive-first 1, 3, 2.
        #[arg(long, value_enum)]
        order: Option<OrderArg>,
        /// Print the full JSON report instead of a summary.
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrderArg {
    Canonical,
    #[value(alias = "paper")]
    PrimitiveFirst,
}

pub fn kovacic_main<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let cli = match KovacicCli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return clap_exit(e),
    };
    finish(run_kovacic(cli))
}

fn run_kovacic(cli: KovacicCli) -> CliResult<()> {
    let mut res = Resolver::load(cli.global.config.as_deref(), "kovacic solve")?;
    let KovacicCommand::Solve { r, order, json } = cli.command;
    let r_text = res.require("r", r)?;
    let order = match res.pick("order", order.map(|o| o.to_possible_value().unwrap().get_name().to_string()))?.as_deref() {
        None | Some("canonical") => CaseOrder::Canonical,
        Some("primitive-first" | "paper") => CaseOrder::PrimitiveFirst,
        Some(other) => return Err(CliError::Usage(format!("--order must be canonical or primitive-first, got {other}"))),
    };
    let json = res.flag("json", json)?;
    res.globals(&cli.global);
    let r = parse_expression(&r_text).map_err(|e| CliError::Usage(format!("cannot parse --r {r_text:?}: {e}")))?;
    let report = kovacic::run(&r, order);
    let mut out = std::io::stdout().lock();
    if json {
        let mut v = serde_json::to_value(&report).context("serializing report")?;
        v["config"] = res.metadata();
        writeln!(out, "{}", serde_json::to_string_pretty(&v).context("serializing report")?).context("stdout")?;
        return Ok(());
    }
    writeln!(out, "r = {}", report.input.render()).context("stdout")?;
    for a in &report.attempts {
        let status = if a.succeeded { "succeeded" } else { "failed" };
        let n = if a.case_id == 3 { format!(" (n = {})", a.n) } else { String::new() };
        writeln!(out, "case {}{n}: {status}; degree candidates {:?}", a.case_id, a.degree_candidates).context("stdout")?;
    }
    let outcome = match &report.outcome {
        Outcome::Succeeded(c) => format!("case {c}"),
        Outcome::AllFailed => "all cases failed".to_string(),
        Outcome::Unsupported(why) => format!("unsupported: {why}"),
    };
    writeln!(out, "outcome: {outcome}").context("stdout")?;
    if let Some(d) = report.degree {
        writeln!(out, "degree: {d}").context("stdout")?;
    }
    if let Some(l) = report.galois_label {
        writeln!(out, "galois group: {}", l.as_str()).context("stdout")?;
    }
    if let Some(s) = &report.solution {
        writeln!(out, "solution: {}", serde_json::to_value(s).ok().and_then(|v| v["text"].as_str().map(String::from)).unwrap_or_default())
            .context("stdout")?;
    }
    Ok(())
}

// ---------------------------------------------------------------- bianchi

#[derive(Parser, Debug)]
#[command(name = "bianchi", about = "Axisymmetric Bianchi IX with cosmological constant")]
struct BianchiCli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: BianchiCommand,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Cosmological constant as p/q or a finite decimal.
    #[arg(long)]
    lambda: Option<String>,
    /// Energy level as p/q or a finite decimal.
    #[arg(long)]
    energy: Option<String>,
}

#[derive(Subcommand, Debug)]
enum BianchiCommand {
    /// Emit the normal variational equation data.
    Ve {
        #[command(flatten)]
        params: ParamArgs,
        /// Items to print (comma separated); all when omitted.
        #[arg(long, value_enum, value_delimiter = ',')]
        emit: Vec<EmitItem>,
        /// Print one JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Poincaré sections P_B = 0, dP_B/dt > 0 over an (A, P_A) grid.
    Sections {
        #[command(flatten)]
        params: ParamArgs,
        /// lo:hi:n, both ends included.
        #[arg(long)]
        a_range: Option<String>,
        /// lo:hi:n for P_A.
        #[arg(long, allow_hyphen_values = true)]
        pa_range: Option<String>,
        /// Final time (default 1000).
        #[arg(long)]
        tmax: Option<f64>,
        /// Max-norm bound that counts as escape (default 20).
        #[arg(long)]
        escape_radius: Option<f64>,
        /// Relative tolerance (default 1e-10).
        #[arg(long)]
        rtol: Option<f64>,
        /// Absolute tolerance (default 1e-12).
        #[arg(long)]
        atol: Option<f64>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scatter plot of the crossings colored by fate.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Per-orbit fates as CSV.
        #[arg(long)]
        fates: Option<PathBuf>,
    },
    /// Numerical evidence for the closed-form solutions.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum EmitItem {
    C1,
    C2,
    P,
    Q,
    G,
    Delta,
    Rho,
    Pcoeffs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    ClosedForm,
    Identities,
    SecondVe,
    Monodromy,
    All,
}

pub fn bianchi_main<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let cli = match BianchiCli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return clap_exit(e),
    };
    let threads = cli.global.threads;
    let run = move || match cli.command {
        BianchiCommand::Ve { params, emit, json } => run_ve(&cli.global, params, emit, json),
        BianchiCommand::Sections { params, a_range, pa_range, tmax, escape_radius, rtol, atol, out, svg, fates } => {
            run_sections(&cli.global, params, SectionArgs { a_range, pa_range, tmax, escape_radius, rtol, atol, out, svg, fates })
        }
        BianchiCommand::Verify { params, suite, json } => run_verify(&cli.global, params, suite, json),
    };
    match threads {
        Some(0) => finish(Err(CliError::Usage("--threads must be positive".into()))),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => finish(pool.install(run)),
            Err(e) => finish(Err(CliError::Io(e.into()))),
        },
        None => finish(run()),
    }
}

fn params_from(res: &mut Resolver, p: ParamArgs) -> CliResult<ModelParams> {
    let l = res.require_rational("lambda", p.lambda)?;
    let e = res.require_rational("energy", p.energy)?;
    Ok(ModelParams::new(l, e))
}

fn suite_from(params: &ModelParams) -> CliResult<VeSuite> {
    build_ve_suite(params).map_err(|e| CliError::Domain(e.to_string()))
}

fn run_ve(global: &GlobalOpts, p: ParamArgs, emit: Vec<EmitItem>, json: bool) -> CliResult<()> {
    let mut res = Resolver::load(global.config.as_deref(), "bianchi ve")?;
    let params = params_from(&mut res, p)?;
    let json = res.flag("json", json)?;
    let items = if emit.is_empty() {
        match res.pick("emit", None)? {
            Some(list) => list
                .split(',')
                .map(|s| EmitItem::from_str(s.trim(), true).map_err(|e| CliError::Usage(format!("--emit: {e}"))))
                .collect::<CliResult<Vec<_>>>()?,
            None => vec![
                EmitItem::C1,
                EmitItem::C2,
                EmitItem::P,
                EmitItem::Q,
                EmitItem::G,
                EmitItem::Delta,
                EmitItem::Rho,
                EmitItem::Pcoeffs,
            ],
        }
    } else {
        emit
    };
    res.record("emit", json!(items));
    res.globals(global);
    let suite = suite_from(&params)?;
    let mut data = serde_json::Map::new();
    for item in &items {
        let v = match item {
            EmitItem::C1 => json!(suite.c1.render()),
            EmitItem::C2 => json!(suite.c2.render()),
            EmitItem::P => json!(suite.p.render()),
            EmitItem::Q => json!(suite.q.render()),
            EmitItem::G => json!(suite.g.render()),
            EmitItem::Delta => json!(render_rational(&suite.discriminant)),
            EmitItem::Rho => json!(suite.describe_rho()),
            EmitItem::Pcoeffs => json!(printed_coefficients(&params.lambda, &params.energy)
                .iter()
                .map(|a| a.render())
                .collect::<Vec<_>>()),
        };
        data.insert(serde_json::to_value(item).unwrap().as_str().unwrap().to_string(), v);
    }
    let mut out = std::io::stdout().lock();
    if json {
        data.insert("config".into(), res.metadata());
        writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(data)).context("serializing")?).context("stdout")?;
        return Ok(());
    }
    for (k, v) in data {
        match v {
            Value::Array(items) => {
                for (i, it) in items.iter().enumerate() {
                    writeln!(out, "{k}[{i}]: {}", it.as_str().unwrap_or_default()).context("stdout")?;
                }
            }
            Value::String(s) => writeln!(out, "{k}: {s}").context("stdout")?,
            other => writeln!(out, "{k}: {other}").context("stdout")?,
        }
    }
    Ok(())
}

struct SectionArgs {
    a_range: Option<String>,
    pa_range: Option<String>,
    tmax: Option<f64>,
    escape_radius: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    fates: Option<PathBuf>,
}

fn run_sections(global: &GlobalOpts, p: ParamArgs, a: SectionArgs) -> CliResult<()> {
    let mut res = Resolver::load(global.config.as_deref(), "bianchi sections")?;
    let params = params_from(&mut res, p)?;
    let axis = |res: &mut Resolver, key: &str, v: Option<String>| -> CliResult<Axis> {
        let text = res.require(key, v)?;
        Axis::parse(&text).map_err(|e| CliError::Usage(format!("--{}: {e}", key.replace('_', "-"))))
    };
    let grid = GridSpec { a: axis(&mut res, "a_range", a.a_range)?, pa: axis(&mut res, "pa_range", a.pa_range)? };
    let d = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        tmax: res.number("tmax", a.tmax)?.unwrap_or(d.tmax),
        escape_radius: res.number("escape_radius", a.escape_radius)?.unwrap_or(d.escape_radius),
        rtol: res.number("rtol", a.rtol)?.unwrap_or(d.rtol),
        atol: res.number("atol", a.atol)?.unwrap_or(d.atol),
        ..d
    };
    let out = res.path("out", a.out)?;
    let svg = res.path("svg", a.svg)?;
    let fates = res.path("fates", a.fates)?;
    res.globals(global);
    if !(cfg.rtol > 0.0 && cfg.atol > 0.0 && cfg.tmax >= 0.0 && cfg.escape_radius > 0.0) {
        return Err(CliError::Usage("tolerances, tmax and escape radius must be positive".into()));
    }
    let (lf, ef) = (rat_to_f64(&params.lambda), rat_to_f64(&params.energy));
    let batch = section_batch(lf, ef, &grid, &cfg);

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for o in &batch.outcomes {
        let k = match &o.fate {
            Some(f) => f.kind.label(),
            None => "infeasible",
        };
        *counts.entry(k).or_default() += 1;
    }
    let bounded_max = batch
        .outcomes
        .iter()
        .filter(|o| o.fate.as_ref().is_some_and(|f| f.kind == FateKind::RanToTmax))
        .map(|o| o.crossings)
        .max()
        .unwrap_or(0);
    let meta = json!({
        "config": res.metadata(),
        "integrator": cfg,
        "grid": grid,
        "records": batch.records.len(),
        "fates": counts,
        "max_crossings_bounded": bounded_max,
    });

    match &out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(std::io::BufWriter::new(f), lf, ef, &batch.records, &batch.outcomes)
                .map_err(|e| CliError::Io(anyhow::anyhow!("{e}")))?;
            let meta_path = sidecar(path);
            fs::write(&meta_path, serde_json::to_string_pretty(&meta).context("metadata")?)
                .with_context(|| format!("writing {}", meta_path.display()))?;
            println!("{}", path.display());
            println!("{}", meta_path.display());
        }
        None => {
            write_csv(std::io::stdout().lock(), lf, ef, &batch.records, &batch.outcomes)
                .map_err(|e| CliError::Io(anyhow::anyhow!("{e}")))?;
            eprintln!("{}", serde_json::to_string(&meta).context("metadata")?);
        }
    }
    if let Some(path) = &svg {
        fs::write(path, svg_scatter(&batch.records, &batch.outcomes)).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    if let Some(path) = &fates {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_fates_csv(std::io::BufWriter::new(f), &batch.outcomes).map_err(|e| CliError::Io(anyhow::anyhow!("{e}")))?;
        println!("{}", path.display());
    }
    eprintln!(
        "{} orbits, {} crossings; {}",
        batch.outcomes.len(),
        batch.records.len(),
        counts.iter().map(|(k, v)| format!("{k} {v}")).collect::<Vec<_>>().join(", ")
    );
    Ok(())
}

fn sidecar(path: &std::path::Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[derive(Serialize, Default)]
struct VerifyReport {
    config: Value,
    lambda: String,
    energy: String,
    evidence: Option<EvidenceConfig>,
    path: Option<bianchi_core::numeric::Polyline>,
    resolution: Option<MuResolution>,
    identities: Option<Vec<ResidualReport>>,
    second_ve: Option<SecondVeReport>,
    monodromy: Option<Vec<MonodromyReport>>,
    verdicts: BTreeMap<String, String>,
}

fn run_verify(global: &GlobalOpts, p: ParamArgs, suite: Option<Suite>, json_path: Option<PathBuf>) -> CliResult<()> {
    let mut res = Resolver::load(global.config.as_deref(), "bianchi verify")?;
    let params = params_from(&mut res, p)?;
    let suite_arg = match res.pick("suite", suite.map(|s| serde_json::to_value(s).unwrap().as_str().unwrap().to_string()))? {
        None => Suite::All,
        Some(s) => Suite::from_str(&s, true).map_err(|e| CliError::Usage(format!("--suite: {e}")))?,
    };
    let json_path = res.path("json", json_path)?;
    res.globals(global);
    let vs = suite_from(&params)?;
    let cfg = EvidenceConfig::default();
    let path = default_path(&vs, &cfg).map_err(|e| CliError::Domain(e.to_string()))?;
    let dom = |e: bianchi_core::evidence::EvidenceError| CliError::Domain(e.to_string());

    let mut rep = VerifyReport {
        config: res.metadata(),
        lambda: render_rational(&params.lambda),
        energy: render_rational(&params.energy),
        evidence: Some(cfg),
        path: Some(path.clone()),
        ..Default::default()
    };
    let resolution = resolve_constants(&vs, &path, &cfg).map_err(dom)?;
    let cand = resolution.resolved_candidate(&vs).cloned();
    let want = |s: Suite| suite_arg == Suite::All || suite_arg == s;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    if want(Suite::ClosedForm) {
        let ok = cand.is_some() && resolution.wronskian.as_ref().is_some_and(|w| w.constant && w.matches_quoted);
        rep.verdicts.insert("closed-form".into(), if cand.is_none() { "inconclusive".into() } else { verdict(ok) });
    }
    match &cand {
        None => {
            for s in [Suite::Identities, Suite::SecondVe, Suite::Monodromy] {
                if want(s) {
                    rep.verdicts.insert(suite_name(s), "inconclusive".into());
                }
            }
        }
        Some(c) => {
            let ((ids, sve), mono) = rayon::join(
                || {
                    rayon::join(
                        || want(Suite::Identities).then(|| galois_identities(&vs, c, &path, &cfg)).transpose(),
                        || want(Suite::SecondVe).then(|| second_ve_equivalence(&vs, c, &path, &cfg)).transpose(),
                    )
                },
                || {
                    want(Suite::Monodromy)
                        .then(|| {
                            use rayon::prelude::*;
                            default_loops(&vs, &cfg)
                                .par_iter()
                                .map(|(label, lp)| monodromy_increments(&vs, c, label, lp, &cfg))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .transpose()
                },
            );
            if let Some(ids) = ids.map_err(dom)? {
                rep.verdicts.insert("identities".into(), verdict(ids.iter().all(|r| r.passed)));
                rep.identities = Some(ids);
            }
            if let Some(s) = sve.map_err(dom)? {
                rep.verdicts.insert("second-ve".into(), verdict(s.corrected.passed && s.sensitivity.passed && s.omega_p.passed));
                rep.second_ve = Some(s);
            }
            if let Some(m) = mono.map_err(dom)? {
                let trivial_ok = m.iter().filter(|r| r.enclosed.is_empty()).all(|r| (0..2).all(|k| r.gamma[k].norm() <= r.error[k]));
                let some_nonzero = m.iter().any(|r| !r.enclosed.is_empty() && r.nonzero.iter().any(|&b| b));
                rep.verdicts.insert("monodromy".into(), verdict(trivial_ok && some_nonzero));
                rep.monodromy = Some(m);
            }
        }
    }
    rep.resolution = Some(resolution);
    let text = serde_json::to_string_pretty(&rep).context("serializing report")?;
    match &json_path {
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            println!("{}", p.display());
        }
        None => println!("{text}"),
    }
    for (k, v) in &rep.verdicts {
        eprintln!("{k}: {v}");
    }
    if rep.verdicts.values().all(|v| v == "pass") {
        Ok(())
    } else {
        Err(CliError::Domain("verification did not pass for every requested suite".into()))
    }
}

fn suite_name(s: Suite) -> String {
    serde_json::to_value(s).unwrap().as_str().unwrap().to_string()
}

fn clap_exit(e: clap::Error) -> i32 {
    use clap::error::ErrorKind;
    let _ = e.print();
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            if e.exit_code() == 0 =>
        {
            EXIT_OK
        }
        _ => EXIT_USAGE,
    }
}

fn finish(r: CliResult<()>) -> i32 {
    match r {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            if let CliError::Usage(_) = e {
                eprintln!("run with --help for usage");
            }
            e.exit_code()
        }
    }
}
