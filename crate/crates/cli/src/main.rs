//! `qmfmc`: quantum min-cut, multiplicative flows, teleportation protocols
//! and tensor-rank checks from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a verification failed.

mod commands;
mod input;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qmfmc", version, about = "Multiplicative max-flow / min-cut toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for brute-force searches and tensor trials.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Bound on brute-force search-space size (default: $QMFMC_ORACLE_CAP or 20000000).
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum min-cut with a witness cut.
    Qmc(NetArgs),
    /// Construct and verify a maximum flow.
    Flow(FlowArgs),
    /// Teleportation protocol from the integer-flow pipeline.
    Protocol(ProtocolArgs),
    /// QMF_s(nN) / QMC(nN) for n = 1..=N.
    Scan(ScanArgs),
    /// Run every consistency check on one network.
    Verify(VerifyArgs),
    /// Random tensor assignments over a prime field.
    Tensor(TensorArgs),
}

#[derive(Args, Debug)]
pub struct NetArgs {
    /// Network JSON file, or `-` for stdin.
    pub path: String,
}

#[derive(Args, Debug)]
#[group(id = "mode", required = true, multiple = false, args = ["field", "integer", "strict"])]
pub struct FlowArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Single-direction flow over a field.
    #[arg(long, value_enum)]
    pub field: Option<Field>,
    /// Integer flow on the scaled network `k·n0·m0·N`.
    #[arg(long)]
    pub integer: bool,
    /// Strict integer flow: smallest `n ≤ --max-n` found by search, or the
    /// pipeline when `--k` is given (or the search comes up empty).
    #[arg(long)]
    pub strict: bool,
    /// Scaling multiplier (default: k_min).
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub max_n: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Rational,
}

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Scaling multiplier (default: k_min).
    #[arg(long)]
    pub k: Option<String>,
    /// Include the simulation report.
    #[arg(long)]
    pub simulate: bool,
    /// Simulate this protocol file instead of extracting one.
    #[arg(long, value_name = "FILE")]
    pub check: Option<String>,
    /// Scale for `--check`.
    #[arg(long, default_value = "1", requires = "check")]
    pub n: String,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Also verify this flow file.
    #[arg(long, value_name = "FILE")]
    pub flow: Option<String>,
    #[command(flatten)]
    pub tensor: TensorOpts,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Scale the network by `n` first.
    #[arg(long, conflicts_with = "pipeline")]
    pub n: Option<String>,
    /// Scale by the pipeline's `n = k_min·n0·m0`.
    #[arg(long)]
    pub pipeline: bool,
    #[command(flatten)]
    pub tensor: TensorOpts,
}

#[derive(Args, Debug, Clone)]
pub struct TensorOpts {
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = qmfmc::tensor::DEFAULT_FIELD_PRIME)]
    pub field_prime: u64,
    /// Largest intermediate tensor, in entries.
    #[arg(long, default_value_t = qmfmc::tensor::DEFAULT_BUDGET)]
    pub budget: usize,
}

/// How a command finished when it did not error out.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

pub struct Ctx {
    pub format: Format,
    pub cap: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let ctx = Ctx { format: cli.format, cap: cli.cap.unwrap_or_else(qmfmc::flow::oracle::oracle_cap_from_env) };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(usize::from(cli.jobs)).build().expect("thread pool");

    // commands render into a buffer; it is flushed even when a check failed
    let mut out: Vec<u8> = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Qmc(a) => commands::qmc::run(&ctx, a, &mut out),
        Command::Flow(a) => commands::flow::run(&ctx, a, &mut out),
        Command::Protocol(a) => commands::protocol::run(&ctx, a, &mut out),
        Command::Scan(a) => commands::scan::run(&ctx, a, &mut out),
        Command::Verify(a) => commands::verify::run(&ctx, a, &mut out),
        Command::Tensor(a) => commands::tensor::run(&ctx, a, &mut out),
    });
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(&out).and_then(|()| stdout.flush());
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
