use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use cottonlab::charges::{self, BoundarySpace};
use cottonlab::conformal3d as c3;
use cottonlab::io;
use cottonlab::verify::{self, SuiteConfig};
use cottonlab::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cottonlab", version, about = "Exact verification of free higher-spin field identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite
    Verify(VerifyArgs),
    /// Solve for a Killing basis, a current basis, a preimage or a gauge decomposition
    Solve(SolveArgs),
    /// List suite identifiers
    Suites,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    spin: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    bdim: Option<usize>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances for seeded suites
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report elapsed times as zero, so reports depend only on the configuration
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveKind {
    Killing,
    Current,
    CottonPreimage,
    EinsteinPreimage,
    Decompose,
}

#[derive(clap::Args)]
struct SolveArgs {
    kind: SolveKind,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    bdim: Option<usize>,
    #[arg(long)]
    degree: Option<u32>,
}

/// Errors that mean the request itself was bad, as opposed to a failed check.
fn is_usage(e: &anyhow::Error) -> bool {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Schema { .. } | Error::NonCanonicalKey(_) | Error::Unsupported(_)) => true,
        Some(Error::UnknownCoordinate(_) | Error::Shape(_) | Error::Dimension(_)) => true,
        Some(_) => false,
        None => e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<UsageError>().is_some(),
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify_cmd(a: VerifyArgs) -> anyhow::Result<bool> {
    let cfg = SuiteConfig {
        suite: a.suite,
        spin: a.spin,
        rank: a.rank,
        bdim: a.bdim,
        degree: a.degree,
        seed: a.seed,
        instances: a.instances,
    };
    let mut report = verify::run_suite(&cfg)?;
    if a.no_timing {
        report = report.without_timing();
    }
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json())?;
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
    };
    emit(&a.out, &text)?;
    Ok(report.all_pass())
}

fn read_field(p: &Option<PathBuf>) -> anyhow::Result<cottonlab::tensor::TensorField> {
    let p = p.as_ref().ok_or_else(|| usage("this solver needs --in FILE"))?;
    let src = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    Ok(io::parse_field(&src)?)
}

fn spin_of(f: &cottonlab::tensor::TensorField) -> anyhow::Result<usize> {
    if f.shape().dim() != 3 || !f.shape().is_symmetric() {
        bail!(usage("expected a symmetric field in three dimensions"));
    }
    Ok(f.shape().rank())
}

fn solve_cmd(a: SolveArgs) -> anyhow::Result<bool> {
    let text = match a.kind {
        SolveKind::Killing | SolveKind::Current => {
            let rank = a.rank.ok_or_else(|| usage("--rank is required"))?;
            let n = a.bdim.ok_or_else(|| usage("--bdim is required"))?;
            let deg = a.degree.ok_or_else(|| usage("--degree is required"))?;
            let ceiling = verify::max_degree()?;
            if deg > ceiling {
                bail!(usage(format!("degree {deg} exceeds the ceiling {ceiling}")));
            }
            if rank > verify::MAX_SPIN {
                bail!(usage(format!("rank {rank} exceeds {}", verify::MAX_SPIN)));
            }
            let sp = BoundarySpace::new(n)?;
            let sol = match a.kind {
                SolveKind::Killing => charges::conformal_killing_solve(rank, &sp, deg)?,
                _ => charges::current_solve(rank, &sp, deg)?,
            };
            io::basis_to_string(&sp.sym(rank), sp.coords(), &sol.basis)
        }
        SolveKind::CottonPreimage => {
            let b = read_field(&a.input)?;
            let s = spin_of(&b)?;
            io::field_to_string(&c3::cotton_preimage(&b, s)?)
        }
        SolveKind::EinsteinPreimage => {
            let pi = read_field(&a.input)?;
            let s = spin_of(&pi)?;
            io::field_to_string(&c3::einstein_preimage(&pi, s)?)
        }
        SolveKind::Decompose => {
            let h = read_field(&a.input)?;
            let s = spin_of(&h)?;
            let (xi, lam) = c3::pure_gauge_decompose(&h, s)?;
            let mut t = serde_json::to_string_pretty(&json!({
                "xi": io::field_to_json(&xi),
                "lambda": io::field_to_json(&lam),
            }))?;
            t.push('\n');
            t
        }
    };
    emit(&a.out, &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Suites => {
            for s in verify::SUITES {
                println!("{s}");
            }
            for (a, ids) in verify::ALIASES {
                println!("{a} -> {}", ids.join(", "));
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
