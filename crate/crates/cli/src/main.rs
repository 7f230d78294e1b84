//! `ctcong`: verify, prove, and audit binomial-sum congruences modulo primes.
//!
//! Exit status: 0 on success, 1 on argument errors, 2 when the engine and the
//! oracle disagree, a discovered table is inconsistent, or a conjecture has a
//! counterexample.

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ctcong::classify::{
    audit, conjecture_check, default_amax, discover, CaseTable, ClassifyError, ConjectureId, DiscrepancyReport,
    PrintedTable, Sweep, TableId,
};
use ctcong::ctengine::{diagonal_residue, extract, EngineError};
use ctcong::families::{oracle_sum, FamilyError, FamilyId, FamilySpec};
use ctcong::modarith::Prime;

#[derive(Parser, Debug)]
#[command(name = "ctcong", version, about = "Constant-term congruences for binomial sums modulo primes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Brute-force sum at one point.
    Verify(PointArgs),
    /// Constant-term evaluation at one point, checked against the oracle.
    Prove(PointArgs),
    /// Discover the case table of a family over a sweep.
    Discover(DiscoverArgs),
    /// Audit a printed table against discovery.
    Table(TableArgs),
    /// Check a conjecture prime by prime.
    Conjecture(ConjectureArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    a: u32,
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    d: i64,
    /// Number of indices for `multinomial`.
    #[arg(long, default_value_t = 4)]
    nvars: usize,
}

#[derive(Args, Debug)]
struct DiscoverArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 50)]
    pmax: u64,
    /// Largest exponent a (default depends on the family).
    #[arg(long)]
    amax: Option<u32>,
    #[arg(long, default_value_t = 5)]
    dmax: i64,
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, default_value_t = 3)]
    modulus: u64,
    /// Do not split cells on the parity of a.
    #[arg(long)]
    no_parity: bool,
    #[arg(long, default_value_t = 4)]
    nvars: usize,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// prop1, prop1p, prop2, prop2p, prop3, prop4, prop5, prop7, ps0, conj1, conj2a, conj2b
    table: String,
    #[arg(long, default_value_t = 50)]
    pmax: u64,
    #[arg(long)]
    amax: Option<u32>,
    #[arg(long, default_value_t = 5)]
    dmax: i64,
    #[arg(long, default_value_t = 4)]
    nvars: usize,
}

#[derive(Args, Debug)]
struct ConjectureArgs {
    /// 1, 2a, 2b or ps0
    id: String,
    #[arg(long, default_value_t = 50)]
    pmax: u64,
}

/// Failure that maps to exit status 2 rather than 1.
#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut out = String::new();
    let result = with_pool(cli.jobs, || run(&cli, &mut out));
    print!("{out}");
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Mismatch>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => bail!("--jobs must be positive"),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building worker pool")?
            .install(f),
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<ExitCode> {
    match &cli.command {
        Command::Verify(args) => verify(args, cli.json, out),
        Command::Prove(args) => prove(args, cli.json, out),
        Command::Discover(args) => run_discover(args, cli.json, out),
        Command::Table(args) => run_table(args, cli.json, out),
        Command::Conjecture(args) => run_conjecture(args, cli.json, out),
    }
}

fn parse_prime(p: u64) -> Result<Prime> {
    Prime::new(p).map_err(|e| anyhow!(e))
}

fn lift_classify(e: ClassifyError) -> anyhow::Error {
    match e {
        ClassifyError::EngineMismatch { .. } => Mismatch(e.to_string()).into(),
        other => anyhow!(other),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    family: &'a str,
    p: u64,
    a: u32,
    r: u64,
    d: i64,
    residue: i64,
    terms: u64,
    provenance: &'a str,
}

fn verify(args: &PointArgs, json: bool, out: &mut String) -> Result<ExitCode> {
    let family = FamilySpec::by_name(&args.family, args.nvars)?;
    let p = parse_prime(args.p)?;
    family.check_point(p, args.a, args.r, args.d)?;
    let sum = oracle_sum(&family, p, args.a, args.r, args.d)?;
    if json {
        out.push_str(&to_json(&VerifyOutput {
            family: family.name(),
            p: p.get(),
            a: args.a,
            r: args.r,
            d: args.d,
            residue: sum.residue.value(),
            terms: sum.terms,
            provenance: "oracle",
        }));
    } else {
        out.push_str(&format!("{}\n", sum.residue));
        out.push_str(&format!("terms: {}\nprovenance: oracle\n", sum.terms));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ProveOutput<'a> {
    family: &'a str,
    p: u64,
    a: u32,
    r: u64,
    d: i64,
    method: &'a str,
    engine: Option<i64>,
    oracle: Option<i64>,
    status: &'a str,
}

fn prove(args: &PointArgs, json: bool, out: &mut String) -> Result<ExitCode> {
    let family = FamilySpec::by_name(&args.family, args.nvars)?;
    let p = parse_prime(args.p)?;
    let (method, engine) = if family.id() == FamilyId::BinomialSquare {
        if args.r != 1 || args.d != 0 {
            bail!("binomial_square is proved only for r = 1, d = 0");
        }
        ("diagonal", Some(diagonal_residue(p, args.a).value()))
    } else {
        let kernel = family
            .kernel_with(args.r, args.d)
            .ok_or_else(|| anyhow!("{} has no constant-term kernel; use verify", family.name()))??;
        if args.d != 0 && !family.supports_shift() {
            bail!("{}: d = {} unsupported", family.name(), args.d);
        }
        match extract(&kernel, p, args.a) {
            Ok(res) => ("constant-term", Some(res.value())),
            Err(EngineError::GuardViolation { .. }) => ("constant-term", None),
            Err(e) => return Err(e.into()),
        }
    };
    let oracle = match family.check_point(p, args.a, args.r, args.d) {
        Ok(_) => Some(oracle_sum(&family, p, args.a, args.r, args.d)?.residue.value()),
        Err(FamilyError::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let status = match (engine, oracle) {
        (None, _) => "fallback: oracle only",
        (Some(_), None) => "oracle skipped: beyond caps",
        (Some(e), Some(o)) if e == o => "MATCH",
        (Some(_), Some(_)) => "MISMATCH",
    };
    if engine.is_none() && oracle.is_none() {
        bail!("guard violated and the oracle is beyond caps; nothing to report");
    }
    if json {
        out.push_str(&to_json(&ProveOutput {
            family: family.name(),
            p: p.get(),
            a: args.a,
            r: args.r,
            d: args.d,
            method,
            engine,
            oracle,
            status,
        }));
    } else {
        let show = |v: Option<i64>| v.map_or("-".to_string(), |v| v.to_string());
        out.push_str(&format!("engine: {} ({method})\n", show(engine)));
        out.push_str(&format!("oracle: {}\n", show(oracle)));
        out.push_str(status);
        out.push('\n');
    }
    if status == "MISMATCH" {
        return Err(Mismatch(format!("engine {} vs oracle {}", show_opt(engine), show_opt(oracle))).into());
    }
    Ok(ExitCode::SUCCESS)
}

fn show_opt(v: Option<i64>) -> String {
    v.map_or("-".to_string(), |v| v.to_string())
}

fn validate_pmax(pmax: u64) -> Result<()> {
    if pmax < 3 {
        bail!("--pmax must be at least 3");
    }
    Ok(())
}

fn run_discover(args: &DiscoverArgs, json: bool, out: &mut String) -> Result<ExitCode> {
    let family = FamilySpec::by_name(&args.family, args.nvars)?;
    validate_pmax(args.pmax)?;
    if args.modulus == 0 {
        bail!("--modulus must be positive");
    }
    if args.dmax < 0 {
        bail!("--dmax must be nonnegative");
    }
    let amax = args.amax.unwrap_or_else(|| default_amax(&family));
    let sweep = Sweep {
        primes: Sweep::primes_coprime(3, args.pmax, args.modulus),
        a_values: (1..=amax).collect(),
        d_values: if family.supports_shift() { (0..=args.dmax).collect() } else { vec![0] },
        r: args.r,
        modulus: args.modulus,
        use_parity: !args.no_parity,
        clip_to_caps: true,
    };
    let table = discover(&family, &sweep).map_err(lift_classify)?;
    out.push_str(&if json { table.to_json() + "\n" } else { table.render_text() });
    if !table.consistent {
        return Err(Mismatch("discovered table is inconsistent".into()).into());
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TableOutput<'a> {
    discovered: &'a CaseTable,
    report: &'a DiscrepancyReport,
}

fn run_table(args: &TableArgs, json: bool, out: &mut String) -> Result<ExitCode> {
    let id: TableId = args.table.parse()?;
    validate_pmax(args.pmax)?;
    let printed = PrintedTable::get(id);
    let family = match printed.family {
        FamilyId::Multinomial => FamilySpec::multinomial(args.nvars)?,
        other => FamilySpec::get(other),
    };
    let amax = args.amax.unwrap_or(match id {
        TableId::Ps0 | TableId::Conj1 | TableId::Conj2a | TableId::Conj2b => 1,
        _ => default_amax(&family),
    });
    let sweep = printed.default_sweep(args.pmax, amax, args.dmax);
    let table = discover(&family, &sweep).map_err(lift_classify)?;
    let report = audit(&table, &printed)?;
    if json {
        out.push_str(&to_json(&TableOutput { discovered: &table, report: &report }));
    } else {
        out.push_str(&table.render_text());
        out.push('\n');
        out.push_str(&report.render_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_conjecture(args: &ConjectureArgs, json: bool, out: &mut String) -> Result<ExitCode> {
    let id: ConjectureId = args.id.parse()?;
    validate_pmax(args.pmax)?;
    let primes: Vec<Prime> = ctcong::modarith::primes_between(5, args.pmax).collect();
    if primes.is_empty() {
        bail!("no primes in 5..={}", args.pmax);
    }
    let report = conjecture_check(id, &primes)?;
    out.push_str(&if json { report.to_json() + "\n" } else { report.render_text() });
    if !report.all_hold() {
        return Err(Mismatch(report.summary()).into());
    }
    Ok(ExitCode::SUCCESS)
}
