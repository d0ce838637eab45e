//! Report files written by the partition commands: `report.json`,
//! `counts.csv` and `trace.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use polypart::cells::{counts, CellCounts, LineMode, SamplingConfig, SignVector};
use polypart::solver::{point_counts, PartitionReport};
use polypart::{MonomialBasis, Polynomial};

use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingFile {
    pub radius: f64,
    pub count: usize,
    pub tau: f64,
    pub seed: u64,
    pub line_mode: String,
}

impl From<&SamplingConfig> for SamplingFile {
    fn from(c: &SamplingConfig) -> Self {
        Self {
            radius: c.radius,
            count: c.count,
            tau: c.tau,
            seed: c.seed,
            line_mode: match c.line_mode {
                LineMode::Exact => "exact",
                LineMode::Sampled => "sampled",
            }
            .to_string(),
        }
    }
}

impl SamplingFile {
    pub fn config(&self) -> Result<SamplingConfig> {
        let line_mode = match self.line_mode.as_str() {
            "exact" => LineMode::Exact,
            "sampled" => LineMode::Sampled,
            other => bail!("field `sampling.line_mode`: unknown mode `{other}`"),
        };
        Ok(SamplingConfig { radius: self.radius, count: self.count, tau: self.tau, seed: self.seed, line_mode })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionFile {
    pub step: usize,
    pub max_imbalance: u64,
    pub largest_part: u64,
    pub on_zero: u64,
    pub slack: u64,
    pub within_slack: bool,
    pub smoothed_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub seed: u64,
    pub restarts: usize,
    pub objective_kind: String,
    pub n: usize,
    pub s: usize,
    pub k: usize,
    pub items: usize,
    pub schedule: Vec<usize>,
    #[serde(rename = "D")]
    pub total_degree: usize,
    pub sampling: SamplingFile,
    /// Monomial subspace of each factor, as indices into its graded-lex basis.
    pub indices: Vec<Vec<usize>>,
    /// Full graded-lex coefficient vector of each factor.
    pub coeffs: Vec<Vec<f64>>,
    /// Cell counts indexed by sign vector (bit `j-1` is `w_j`).
    pub counts: Vec<u64>,
    pub spectrum: Vec<i64>,
    pub objective: f64,
    pub max_count: u64,
    pub bound_ratio: f64,
    pub best_restart: usize,
    pub bisection: Vec<BisectionFile>,
}

impl ReportFile {
    pub fn new(command: &str, seed: u64, restarts: usize, r: &PartitionReport) -> Self {
        Self {
            command: command.to_string(),
            seed,
            restarts,
            objective_kind: r.objective_kind.name().to_string(),
            n: r.n,
            s: r.s,
            k: r.k,
            items: r.items,
            schedule: r.schedule.clone(),
            total_degree: r.total_degree,
            sampling: (&r.sampling).into(),
            indices: r.indices.clone(),
            coeffs: r.coeffs.clone(),
            counts: r.counts.as_slice().to_vec(),
            spectrum: r.spectrum.values().to_vec(),
            objective: r.objective,
            max_count: r.max_count,
            bound_ratio: r.bound_ratio,
            best_restart: r.best_restart,
            bisection: r
                .bisection
                .iter()
                .map(|b| BisectionFile {
                    step: b.step,
                    max_imbalance: b.max_imbalance,
                    largest_part: b.largest_part,
                    on_zero: b.on_zero,
                    slack: b.slack,
                    within_slack: b.within_slack(),
                    smoothed_objective: b.smoothed_objective,
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("field `{path}`: {}", e.into_inner())
        })
    }

    /// Rebuilds the polynomial tuple from the serialized coefficients.
    pub fn polys(&self) -> Result<Vec<Polynomial>> {
        ensure!(self.schedule.len() == self.s, "schedule length differs from s");
        ensure!(self.coeffs.len() == self.s, "coefficient tuple length differs from s");
        self.schedule
            .iter()
            .zip(&self.coeffs)
            .map(|(&d, c)| Ok(Polynomial::new(Arc::new(MonomialBasis::new(self.n, d)?), c.clone())?))
            .collect()
    }
}

/// Recomputes the cell counts of `instance` from the report's coefficients.
pub fn recount(instance: &Instance, report: &ReportFile) -> Result<CellCounts> {
    ensure!(instance.n == report.n, "instance n = {} but report n = {}", instance.n, report.n);
    let polys = report.polys()?;
    if report.command == "partition-points" {
        return Ok(point_counts(&instance.points, &polys)?);
    }
    let gammas = instance.build_varieties()?;
    Ok(counts(&gammas, &polys, &report.sampling.config()?)?)
}

pub fn counts_csv(counts: &CellCounts) -> Result<String> {
    let mut out = String::from("w,count\n");
    for (i, c) in counts.as_slice().iter().enumerate() {
        let w = SignVector::new(i as u32, counts.s())?;
        writeln!(out, "{w},{c}")?;
    }
    Ok(out)
}

pub fn trace_csv(r: &PartitionReport) -> String {
    let mut out = String::from("restart,stage,iteration,step,delta,accepted,current,best\n");
    for t in &r.trace {
        let delta = t.delta.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t.restart, t.stage, t.iteration, t.step, delta, t.accepted as u8, t.current, t.best
        );
    }
    out
}

/// Writes the three report files into `dir`, creating it if needed.
pub fn write_all(dir: &Path, file: &ReportFile, report: &PartitionReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut json = serde_json::to_string_pretty(file)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    fs::write(dir.join("counts.csv"), counts_csv(&report.counts)?)?;
    fs::write(dir.join("trace.csv"), trace_csv(report))?;
    Ok(())
}
