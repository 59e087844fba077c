//! The `verlinde` command line: `ver`, `crosscheck` and `bases`.

pub mod config;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagonal_bases::{hamiltonian_basis, is_diagonal, nbc_basis, DiagonalBasisSet, RootOrdering};
use crate::exact_series::Rational;
use crate::residue_engine::{p_c_trunc, set_sign_flip, ChamberSpec, VerlindeInput, DEFAULT_TRUNC};
use crate::verlinde_sum::ver_sum;
use crate::weight_space::{
    admissible_weights, in_closed_simplex, lam_over_k, resolve_chamber, resolve_chamber_sides, ChamberTarget,
    IntegralWeight, OrderedBasis, Root,
};

use config::{parse_routes, parse_weight, BasisChoice, Format, RangeSpec, Route, RunConfig};
use suites::{Suite, SuiteParams, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// `"p/q"`, also for integers.
pub fn rat_str(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Parser)]
#[command(name = "verlinde", version, about = "Exact parabolic SU(r) Verlinde numbers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute Verlinde numbers by the sum and residue routes.
    Ver(VerArgs),
    /// Run the invariant suites.
    Crosscheck(CrossArgs),
    /// Print a diagonal basis set as JSON.
    Bases(BasesArgs),
}

#[derive(Debug, Args)]
pub struct VerArgs {
    /// TOML or JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<u64>>,
    /// Genus, e.g. `2`, `1..3` or `1,3`.
    #[arg(long)]
    pub g: Option<RangeSpec>,
    /// Level, same syntax as `--g`.
    #[arg(long)]
    pub k: Option<RangeSpec>,
    /// Explicit weight `a,b,...`; repeatable.
    #[arg(long = "lambda", allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// All weights with `λ/k` in the closed simplex.
    #[arg(long)]
    pub grid: bool,
    /// `sum`, `residue` or `sum,residue`.
    #[arg(long)]
    pub routes: Option<String>,
    #[arg(long)]
    pub precision: Option<usize>,
    /// Series truncation slack.
    #[arg(long)]
    pub trunc: Option<u32>,
    /// `hamiltonian:M`, `nbc:lex`, `nbc:revlex`, `nbc:seed:N`, `nbc:<order>` or `all`.
    #[arg(long)]
    pub basis: Option<BasisChoice>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Evaluate every chamber around `λ̂/k̂` and `λ/k`.
    #[arg(long)]
    pub both_sides: bool,
    /// Leave out the timing field.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    /// Suites to run; all when absent.
    #[arg(long = "suite", value_enum)]
    pub suites: Vec<Suite>,
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<u64>>,
    #[arg(long)]
    pub g: Option<RangeSpec>,
    #[arg(long)]
    pub k: Option<RangeSpec>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Negate the residue prefactor, to see the suites fail.
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    Hamiltonian,
    Nbc,
    /// A hand-supplied set read from `--input`.
    File,
}

#[derive(Debug, Args)]
pub struct BasesArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long, value_enum)]
    pub kind: BasisKind,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Root order such as `13,14,23,24,12,34`; lexicographic when absent.
    #[arg(long)]
    pub order: Option<String>,
    /// JSON list of bases, each a list of `[i, j]` pairs.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumValue {
    pub nearest_int: String,
    pub err_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub r: usize,
    pub g: u32,
    pub k: u64,
    pub lambda: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub per_basis: Vec<NamedValue>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sides: Vec<NamedValue>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl ResultRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

fn merge_ver(args: &VerArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(r) = &args.r {
        cfg.r = r.clone();
    }
    if let Some(g) = &args.g {
        cfg.g = g.clone();
    }
    if let Some(k) = &args.k {
        cfg.k = k.clone();
    }
    if !args.lambda.is_empty() {
        cfg.lambda = args.lambda.iter().map(|s| parse_weight(s)).collect::<anyhow::Result<_>>()?;
    }
    cfg.grid |= args.grid;
    if let Some(s) = &args.routes {
        cfg.routes = parse_routes(s)?;
    }
    if let Some(p) = args.precision {
        cfg.precision = p;
    }
    if args.trunc.is_some() {
        cfg.trunc = args.trunc;
    }
    if let Some(b) = &args.basis {
        cfg.basis = b.clone();
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    cfg.both_sides |= args.both_sides;
    cfg.timing &= !args.no_timing;
    if let Some(r) = cfg.lambda.first().map(|l| l.len() as u64) {
        if args.r.is_none() && args.config.is_none() {
            cfg.r = vec![r];
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The `(r, g, k, λ)` tasks of a run, in output order.
pub fn ver_tasks(cfg: &RunConfig) -> anyhow::Result<Vec<(usize, u32, u64, IntegralWeight)>> {
    let mut tasks = Vec::new();
    for &r in &cfg.r {
        let r = r as usize;
        for g in cfg.g.values()? {
            for k in cfg.k.values()? {
                let lams: Vec<IntegralWeight> = if cfg.grid || cfg.lambda.is_empty() {
                    admissible_weights(r, k)
                } else {
                    let mut v = Vec::new();
                    for l in cfg.lambda.iter().filter(|l| l.len() == r) {
                        let lam = IntegralWeight::new(l.clone())?;
                        if !in_closed_simplex(&lam_over_k(k, &lam)) {
                            bail!("λ/k = {} is outside the closed simplex", lam_over_k(k, &lam));
                        }
                        v.push(lam);
                    }
                    v
                };
                for lam in lams {
                    tasks.push((r, g as u32, k, lam));
                }
            }
        }
    }
    Ok(tasks)
}

fn check(name: &str, passed: bool) -> Check {
    Check { name: name.into(), passed }
}

fn ver_record(
    cfg: &RunConfig,
    sets: &[(String, DiagonalBasisSet)],
    r: usize,
    g: u32,
    k: u64,
    lam: &IntegralWeight,
) -> ResultRecord {
    let start = Instant::now();
    let mut rec = ResultRecord {
        r,
        g,
        k,
        lambda: lam.entries().to_vec(),
        sum: None,
        residue: None,
        per_basis: Vec::new(),
        sides: Vec::new(),
        checks: Vec::new(),
        error: None,
        elapsed_ms: None,
    };
    if let Err(e) = fill_record(cfg, sets, &mut rec, lam) {
        rec.error = Some(format!("{e:#}"));
    }
    if cfg.timing {
        rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    rec
}

fn fill_record(
    cfg: &RunConfig,
    sets: &[(String, DiagonalBasisSet)],
    rec: &mut ResultRecord,
    lam: &IntegralWeight,
) -> anyhow::Result<()> {
    let inp = VerlindeInput::new(rec.g, rec.k, lam.clone())?;
    let trunc = cfg.trunc.unwrap_or(DEFAULT_TRUNC);
    let mut sum_int = None;
    if cfg.routes.contains(&Route::Sum) {
        let s = ver_sum(&inp, cfg.precision)?;
        rec.sum = Some(SumValue { nearest_int: s.nearest_int.to_string(), err_bound: s.err_bound });
        sum_int = Some(s.nearest_int);
    }
    if cfg.routes.contains(&Route::Residue) {
        let c = ChamberSpec::new(resolve_chamber(inp.k, lam, ChamberTarget::Hat)?)?;
        let mut values = Vec::new();
        for (name, d) in sets {
            let v = p_c_trunc(&inp, &c, d, trunc)?;
            if sets.len() > 1 {
                rec.per_basis.push(NamedValue { name: name.clone(), value: rat_str(&v) });
            }
            values.push(v);
        }
        let v = values[0].clone();
        rec.checks.push(check("residue_integral", v.is_integer()));
        if values.len() > 1 {
            rec.checks.push(check("bases_agree", values.iter().all(|x| x == &v)));
        }
        if let Some(s) = &sum_int {
            rec.checks.push(check("routes_agree", v.is_integer() && &v.to_integer() == s));
        }
        if cfg.both_sides {
            let mut all_equal = true;
            for (label, target) in [("hat", ChamberTarget::Hat), ("lam_over_k", ChamberTarget::LamOverK)] {
                for c in resolve_chamber_sides(inp.k, lam, target)? {
                    let x = p_c_trunc(&inp, &ChamberSpec::new(c.clone())?, &sets[0].1, trunc)?;
                    all_equal &= x == v;
                    rec.sides.push(NamedValue { name: format!("{label} {c}"), value: rat_str(&x) });
                }
            }
            rec.checks.push(check("sides_agree", all_equal));
        }
        rec.residue = Some(rat_str(&v));
    }
    Ok(())
}

fn thread_pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build().context("building the thread pool")
}

/// One record per `(r, g, k, λ)`, in task order regardless of scheduling.
pub fn cmd_ver(cfg: &RunConfig) -> anyhow::Result<Vec<ResultRecord>> {
    let tasks = ver_tasks(cfg)?;
    let mut sets = std::collections::BTreeMap::new();
    for &r in &cfg.r {
        sets.insert(r as usize, cfg.basis.build(r as usize)?);
    }
    let pool = thread_pool(cfg.threads)?;
    Ok(pool.install(|| tasks.par_iter().map(|(r, g, k, lam)| ver_record(cfg, &sets[r], *r, *g, *k, lam)).collect()))
}

pub fn write_records(out: &mut dyn Write, records: &[ResultRecord], format: Format) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            for rec in records {
                writeln!(out, "{}", serde_json::to_string(rec)?)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["r", "g", "k", "lambda", "sum", "residue", "residue_int", "agree", "error", "elapsed_ms"])?;
            for rec in records {
                let residue_int = rec
                    .residue
                    .as_ref()
                    .and_then(|s| s.strip_suffix("/1"))
                    .map(str::to_string)
                    .unwrap_or_default();
                let lam = rec.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                w.write_record([
                    rec.r.to_string(),
                    rec.g.to_string(),
                    rec.k.to_string(),
                    lam,
                    rec.sum.as_ref().map(|s| s.nearest_int.clone()).unwrap_or_default(),
                    rec.residue.clone().unwrap_or_default(),
                    residue_int,
                    rec.ok().to_string(),
                    rec.error.clone().unwrap_or_default(),
                    rec.elapsed_ms.map(|t| t.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckSummary {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn cmd_crosscheck(suites: &[Suite], params: &SuiteParams, threads: Option<usize>) -> anyhow::Result<CrosscheckSummary> {
    let pool = thread_pool(threads)?;
    let list: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let reports: Vec<SuiteReport> = pool.install(|| list.iter().map(|s| suites::run(*s, params)).collect());
    Ok(CrosscheckSummary { passed: reports.iter().all(|r| r.passed), suites: reports })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasesOutput {
    pub r: usize,
    pub kind: String,
    pub bases: Vec<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<bool>,
}

fn basis_pairs(b: &OrderedBasis) -> Vec<[usize; 2]> {
    b.roots().iter().map(|x| [x.i, x.j]).collect()
}

pub fn cmd_bases(args: &BasesArgs) -> anyhow::Result<BasesOutput> {
    let r = args.r;
    if !(2..=6).contains(&r) {
        bail!("rank must be between 2 and 6");
    }
    let (kind, bases): (String, Vec<OrderedBasis>) = match args.kind {
        BasisKind::Hamiltonian => (format!("hamiltonian:{}", args.m), hamiltonian_basis(args.m, r)?.bases().to_vec()),
        BasisKind::Nbc => {
            let ord = match &args.order {
                Some(o) => RootOrdering::parse(r, o)?,
                None => RootOrdering::lexicographic(r),
            };
            let label = ord.edges().iter().map(|(i, j)| format!("{i}{j}")).collect::<Vec<_>>().join(",");
            (format!("nbc:{label}"), nbc_basis(&ord, r)?.bases().to_vec())
        }
        BasisKind::File => {
            let path = args.input.as_ref().context("--kind file needs --input")?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let raw: Vec<Vec<[usize; 2]>> = serde_json::from_str(&text).context("expected a list of lists of [i, j]")?;
            let bases = raw
                .into_iter()
                .map(|b| OrderedBasis::new(r, b.into_iter().map(|[i, j]| Root::new(i, j)).collect()))
                .collect::<Result<Vec<_>, _>>()?;
            ("file".into(), bases)
        }
    };
    let diagonal = args.verify.then(|| is_diagonal(&bases));
    Ok(BasesOutput { r, kind, bases: bases.iter().map(basis_pairs).collect(), diagonal })
}

fn usage(e: anyhow::Error) -> i32 {
    eprintln!("error: {e:#}");
    EXIT_USAGE
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ver(args) => {
            let cfg = match merge_ver(&args).and_then(|c| ver_tasks(&c).map(|_| c)) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let records = match cmd_ver(&cfg) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            if let Err(e) = write_records(&mut out, &records, cfg.format) {
                eprintln!("error: {e:#}");
                return EXIT_CHECK_FAILED;
            }
            if records.iter().all(ResultRecord::ok) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Command::Crosscheck(args) => {
            let params = match cross_params(&args) {
                Ok(p) => p,
                Err(e) => return usage(e),
            };
            if args.inject_sign_flip {
                set_sign_flip(true);
            }
            let threads = args.threads.or_else(|| args.config.as_ref().and_then(|p| RunConfig::from_file(p).ok()?.threads));
            let summary = match cmd_crosscheck(&args.suites, &params, threads) {
                Ok(s) => s,
                Err(e) => return usage(e),
            };
            set_sign_flip(false);
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            for s in summary.suites.iter().filter(|s| !s.passed) {
                eprintln!("suite {:?} failed: {}", s.suite, s.counterexample.clone().unwrap_or_default());
            }
            if summary.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Command::Bases(args) => match cmd_bases(&args) {
            Ok(b) => {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&b).unwrap_or_default());
                if b.diagonal == Some(false) {
                    eprintln!("not a diagonal basis");
                    EXIT_CHECK_FAILED
                } else {
                    EXIT_OK
                }
            }
            Err(e) => usage(e),
        },
    }
}

fn cross_params(args: &CrossArgs) -> anyhow::Result<SuiteParams> {
    let base = match &args.config {
        Some(p) => Some(RunConfig::from_file(p)?),
        None => None,
    };
    let ranks = args.r.clone().or_else(|| base.as_ref().map(|c| c.r.clone())).unwrap_or_else(|| vec![2, 3]);
    let g = args.g.clone().or_else(|| base.as_ref().map(|c| c.g.clone())).unwrap_or(RangeSpec::Text("1..2".into()));
    let k = args.k.clone().or_else(|| base.as_ref().map(|c| c.k.clone())).unwrap_or(RangeSpec::Text("1..3".into()));
    let params = SuiteParams {
        ranks: ranks.iter().map(|&r| r as usize).collect(),
        genera: g.values()?.into_iter().map(|x| x as u32).collect(),
        levels: k.values()?,
    };
    if params.ranks.iter().any(|&r| !(2..=6).contains(&r)) {
        bail!("rank must be between 2 and 6");
    }
    if params.genera.contains(&0) || params.levels.contains(&0) {
        bail!("genus and level must be at least 1");
    }
    Ok(params)
}
