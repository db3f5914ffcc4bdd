//! `fairdiv`: solve, verify, and benchmark connected fair-division
//! instances from the command line.
//!
//! Exit codes: 0 success (or verification passed), 1 malformed input,
//! 2 verification failed, 3 size guard refused an exhaustive step,
//! 4 algorithm precondition not met.

mod bench;
mod gen;
mod io;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairdiv::fixtures::get_fixture;
use fairdiv::oracle::{check_fairness, mu_k, FairnessCheck, FairnessCriterion, OracleError};
use serde::Serialize;

use crate::io::{
    allocation_to_file, instance_to_file, parse_allocation, parse_instance, parse_ratio, read_json,
    write_json, AllocationFile, CliError, InstanceFile,
};

#[derive(Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Connected fair division of indivisible items on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an allocation and write it as JSON.
    Solve(SolveArgs),
    /// Check an allocation against a fairness criterion.
    Verify(VerifyArgs),
    /// Query exact share values.
    Oracle(OracleArgs),
    /// Generate a random instance file.
    Gen(GenArgs),
    /// Solve a directory of instances and report realized share ratios.
    Bench(BenchArgs),
    /// Export a named fixture instance.
    Fixture(FixtureArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "auto")]
    algo: solve::AlgoChoice,
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Allocation file to write; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Whitespace-free output for bit-exact comparison.
    #[arg(long)]
    canonical: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    criterion: CriterionChoice,
    /// Fraction P/Q; defaults to 1. Not accepted with efx.
    #[arg(long)]
    alpha: Option<String>,
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Allocation file.
    #[arg(long)]
    alloc: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionChoice {
    Pmms,
    Mms,
    Ef1,
    Efx,
}

#[derive(clap::Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    value: ShareChoice,
    #[arg(long)]
    agent: usize,
    /// Comma-separated vertex list; required for pmms and mu.
    #[arg(long)]
    bundle: Option<String>,
    /// Part count; required for mu, fixed at 2 for pmms, derived from the
    /// agent count for mms.
    #[arg(long)]
    k: Option<usize>,
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShareChoice {
    /// Two-part share of the given bundle.
    Pmms,
    /// Whole-graph share over all agents' parts.
    Mms,
    /// k-part share of the given bundle.
    Mu,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    shape: gen::Shape,
    #[arg(long)]
    vertices: usize,
    #[arg(long)]
    agents: usize,
    /// Values are drawn uniformly from 0..=umax.
    #[arg(long, default_value_t = 10)]
    umax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance file to write; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Whitespace-free output for bit-exact comparison.
    #[arg(long)]
    canonical: bool,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Directory of instance files (*.json).
    #[arg(long)]
    dir: PathBuf,
    /// Report file to write; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Whitespace-free output for bit-exact comparison.
    #[arg(long)]
    canonical: bool,
}

#[derive(clap::Args)]
struct FixtureArgs {
    /// Registry key of the fixture.
    #[arg(long)]
    name: String,
    /// Instance file to write; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Whitespace-free output for bit-exact comparison.
    #[arg(long)]
    canonical: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let benign = matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return ExitCode::from(u8::from(!benign));
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Fixture(args) => cmd_fixture(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, CliError> {
    let file: InstanceFile = read_json(&args.input)?;
    let instance = parse_instance(&file)?;
    let (_, alloc) = solve::solve(&instance, args.algo)?;
    write_json(
        args.out.as_deref(),
        &allocation_to_file(&alloc),
        args.canonical,
    )?;
    Ok(ExitCode::SUCCESS)
}

/// Witness printed by `verify`. The scaled sides are exact integers
/// (attained value times Q against required share times P), serialized as
/// strings so arbitrarily large products survive JSON.
#[derive(Serialize)]
struct Witness {
    passes: bool,
    violations: Vec<WitnessViolation>,
}

#[derive(Serialize)]
struct WitnessViolation {
    agent: usize,
    other: Option<usize>,
    attained_scaled: String,
    required_scaled: String,
}

fn witness(check: &FairnessCheck) -> Witness {
    Witness {
        passes: check.passes(),
        violations: check
            .violations
            .iter()
            .map(|v| WitnessViolation {
                agent: v.agent,
                other: v.other,
                attained_scaled: v.attained_scaled.to_string(),
                required_scaled: v.required_scaled.to_string(),
            })
            .collect(),
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let file: InstanceFile = read_json(&args.input)?;
    let instance = parse_instance(&file)?;
    let alloc_file: AllocationFile = read_json(&args.alloc)?;
    let alloc = parse_allocation(&alloc_file, &instance)?;

    let criterion = match args.criterion {
        CriterionChoice::Efx => {
            if args.alpha.is_some() {
                return Err(CliError::Malformed("efx does not take --alpha".into()));
            }
            FairnessCriterion::Efx
        }
        scaled => {
            let ratio = match &args.alpha {
                Some(text) => parse_ratio(text)?,
                None => fairdiv::utility::FairnessRatio::ONE,
            };
            match scaled {
                CriterionChoice::Pmms => FairnessCriterion::Pmms(ratio),
                CriterionChoice::Mms => FairnessCriterion::Mms(ratio),
                CriterionChoice::Ef1 => FairnessCriterion::Ef1(ratio),
                CriterionChoice::Efx => unreachable!("handled above"),
            }
        }
    };

    let check = check_fairness(&instance, &alloc, criterion).map_err(oracle_to_cli)?;
    write_json(None, &witness(&check), false)?;
    Ok(if check.passes() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, CliError> {
    let file: InstanceFile = read_json(&args.input)?;
    let instance = parse_instance(&file)?;
    if args.agent >= instance.n_agents() {
        return Err(CliError::Malformed(format!(
            "agent {} out of range for {} agents",
            args.agent,
            instance.n_agents()
        )));
    }
    let u = &instance.agents()[args.agent];
    let (bundle, k) = match args.value {
        ShareChoice::Mu => {
            let bundle = require_bundle(&args, "mu")?;
            let k = args
                .k
                .ok_or_else(|| CliError::Malformed("mu needs --k".into()))?;
            (bundle, k)
        }
        ShareChoice::Pmms => {
            if args.k.is_some_and(|k| k != 2) {
                return Err(CliError::Malformed("pmms is a two-part share".into()));
            }
            (require_bundle(&args, "pmms")?, 2)
        }
        ShareChoice::Mms => {
            if args.bundle.is_some() || args.k.is_some() {
                return Err(CliError::Malformed(
                    "mms covers the whole graph over all agents; drop --bundle and --k".into(),
                ));
            }
            let all: Vec<usize> = (0..instance.graph().n_vertices()).collect();
            (all, instance.n_agents())
        }
    };
    if k == 0 {
        return Err(CliError::Malformed("--k must be at least 1".into()));
    }
    let value = mu_k(u, instance.graph(), &bundle, k).map_err(oracle_to_cli)?;
    println!("{value}");
    Ok(ExitCode::SUCCESS)
}

fn require_bundle(args: &OracleArgs, what: &str) -> Result<Vec<usize>, CliError> {
    let text = args
        .bundle
        .as_deref()
        .ok_or_else(|| CliError::Malformed(format!("{what} needs --bundle")))?;
    parse_bundle(text)
}

fn parse_bundle(text: &str) -> Result<Vec<usize>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(vec![]);
    }
    let mut bundle = Vec::new();
    for part in text.split(',') {
        bundle.push(part.trim().parse().map_err(|_| {
            CliError::Malformed(format!("bundle entry {part:?} is not a vertex index"))
        })?);
    }
    bundle.sort_unstable();
    if bundle.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Malformed("bundle lists a vertex twice".into()));
    }
    Ok(bundle)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, CliError> {
    let file = gen::generate(args.shape, args.vertices, args.agents, args.umax, args.seed)?;
    write_json(args.out.as_deref(), &file, args.canonical)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, CliError> {
    let report = bench::run_bench(&args.dir)?;
    write_json(args.out.as_deref(), &report, args.canonical)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_fixture(args: FixtureArgs) -> Result<ExitCode, CliError> {
    let fixture = get_fixture(&args.name).map_err(|e| CliError::Malformed(e.to_string()))?;
    write_json(
        args.out.as_deref(),
        &instance_to_file(&fixture.instance),
        args.canonical,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn oracle_to_cli(e: OracleError) -> CliError {
    match e {
        OracleError::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}
