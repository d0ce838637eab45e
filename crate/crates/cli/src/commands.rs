//! Command implementations shared by the binary and the tests.

use std::path::PathBuf;

use anyhow::{ensure, Result};

use polypart::solver::{partition_points, partition_varieties, ObjectiveKind, SolveConfig};

use crate::instance::Instance;
use crate::report::{write_all, ReportFile};
use crate::suites::Check;

#[derive(Debug, Clone)]
pub struct PartitionArgs {
    pub input: PathBuf,
    pub s: usize,
    pub seed: u64,
    pub objective: Option<ObjectiveKind>,
    pub restarts: Option<usize>,
    pub out: PathBuf,
}

impl PartitionArgs {
    fn config(&self, n: usize) -> Result<SolveConfig> {
        ensure!((1..=20).contains(&self.s), "--s must lie in 1..=20, got {}", self.s);
        let mut cfg = SolveConfig::new(n, self.s, self.seed);
        cfg.objective = self.objective;
        if let Some(r) = self.restarts {
            ensure!(r >= 1, "--restarts must be at least 1");
            cfg.restarts = r;
        }
        Ok(cfg)
    }
}

/// Partitions the varieties of an instance and writes the report files.
pub fn partition(args: &PartitionArgs) -> Result<ReportFile> {
    let inst = Instance::load(&args.input)?;
    let gammas = inst.build_varieties()?;
    let cfg = args.config(inst.n)?;
    let report = partition_varieties(&gammas, &cfg)?;
    let file = ReportFile::new("partition", args.seed, cfg.restarts, &report);
    write_all(&args.out, &file, &report)?;
    Ok(file)
}

/// Partitions the points of an instance by iterated bisection.
pub fn partition_point_set(args: &PartitionArgs) -> Result<ReportFile> {
    let inst = Instance::load(&args.input)?;
    ensure!(!inst.points.is_empty(), "field `points`: the instance has no points");
    let cfg = args.config(inst.n)?;
    let report = partition_points(&inst.points, &cfg)?;
    let file = ReportFile::new("partition-points", args.seed, cfg.restarts, &report);
    write_all(&args.out, &file, &report)?;
    Ok(file)
}

/// Prints one line per check; true when all pass.
pub fn report_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("SUMMARY checks={} failed={failed}", checks.len());
    failed == 0
}
