use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use polypart::solver::ObjectiveKind;
use polypart_cli::commands::{self, report_checks, PartitionArgs};
use polypart_cli::instance::Instance;
use polypart_cli::report::{recount, ReportFile};
use polypart_cli::suites::{self, Check};

#[derive(Parser)]
#[command(name = "polypart", version, about = "Polynomial partitioning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Discrete,
    Smooth,
}

#[derive(Subcommand)]
enum Command {
    /// Balance the varieties of an instance across sign cells.
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        objective: Option<Objective>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition the points of an instance by iterated bisection.
    PartitionPoints {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recount cells from a report's coefficients and compare.
    VerifyReport {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Model-map zeros, Jacobians, equivariance and continuation.
    VerifyBorsuk {
        #[arg(long)]
        s: usize,
    },
    /// Walsh–Hadamard identities on random count tables.
    VerifySpectrum {
        #[arg(long)]
        s: usize,
    },
    /// Cells entered by random lines against the degree bound.
    BenchLineCells {
        #[arg(long = "D")]
        degree: usize,
        #[arg(long)]
        trials: usize,
    },
    /// Mollified-indicator properties down to tube radius 2^-G.
    VerifyMollifier {
        #[arg(long)]
        delta_grid: u32,
        #[arg(long, default_value_t = 50)]
        configs: usize,
    },
}

fn partition_args(
    input: PathBuf,
    s: usize,
    seed: u64,
    objective: Option<Objective>,
    restarts: Option<usize>,
    out: PathBuf,
) -> PartitionArgs {
    let objective = objective.map(|o| match o {
        Objective::Discrete => ObjectiveKind::Discrete,
        Objective::Smooth => ObjectiveKind::Smooth,
    });
    PartitionArgs { input, s, seed, objective, restarts, out }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Partition { input, s, seed, objective, restarts, out } => {
            let f = commands::partition(&partition_args(input, s, seed, objective, restarts, out))?;
            println!("max_count={} bound_ratio={} objective={}", f.max_count, f.bound_ratio, f.objective);
            Ok(true)
        }
        Command::PartitionPoints { input, s, seed, restarts, out } => {
            let f = commands::partition_point_set(&partition_args(input, s, seed, None, restarts, out))?;
            println!("max_count={} bound_ratio={}", f.max_count, f.bound_ratio);
            Ok(true)
        }
        Command::VerifyReport { input, report } => {
            let inst = Instance::load(&input)?;
            let file = ReportFile::load(&report)?;
            let counts = recount(&inst, &file)?;
            let same = counts.as_slice() == file.counts.as_slice();
            Ok(report_checks(&[Check::new("report.recount", same, format!("cells={}", file.counts.len()))]))
        }
        Command::VerifyBorsuk { s } => Ok(report_checks(&suites::borsuk(s)?)),
        Command::VerifySpectrum { s } => Ok(report_checks(&suites::spectrum(s)?)),
        Command::BenchLineCells { degree, trials } => {
            let start = Instant::now();
            let (checks, _) = suites::line_cells(degree, trials)?;
            eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
            Ok(report_checks(&checks))
        }
        Command::VerifyMollifier { delta_grid, configs } => Ok(report_checks(&suites::mollifier(delta_grid, configs)?)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
