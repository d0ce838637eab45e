//! Heuristic search over `X_s` for tuples whose cell counts are balanced, and
//! iterated bisection of finite point sets.
//!
//! Varieties are balanced by multi-start local search on the product of
//! spheres: random tangent proposals with a shrinking step, accepted when the
//! objective does not increase. The objective is either the exact spectral
//! energy `Σ_{v≠0} G_v²` of the cell counts or its mollified counterpart over
//! a decreasing sequence of tube radii. Reports are always computed from the
//! discrete counts.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cells::{counts, CellCounter, CellCounts, LineMode, SamplingConfig, MAX_FACTORS};
use crate::error::{Error, Result};
use crate::mollifier::{delta_grid, radius_for, schedule, PreparedTubes, TubeFamily};
use crate::polyalg::MonomialBasis;
use crate::rng::{label, substream, StreamRng};
use crate::spectrum::{wht, Spectrum};
use crate::sphereprod::{Embedding, XsPoint};
use crate::varieties::{VarietyKind, VarietySpec};

/// Finest tube radius of the default grid is `2^-DEFAULT_FINEST_EXP`.
pub const DEFAULT_FINEST_EXP: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// Exact spectral energy of the cell counts.
    Discrete,
    /// Mollified spectral energy over the tube-radius grid.
    Smooth,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Discrete => "discrete",
            ObjectiveKind::Smooth => "smooth",
        }
    }
}

/// Geometric step sizes `initial * factor^level` for `levels` levels of
/// `iters` proposals each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub initial: f64,
    pub factor: f64,
    pub levels: usize,
    pub iters: usize,
}

impl StepSchedule {
    pub fn step(&self, level: usize) -> f64 {
        self.initial * self.factor.powi(level as i32)
    }
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self { initial: 1.0, factor: 0.5, levels: 7, iters: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub n: usize,
    pub s: usize,
    pub restarts: usize,
    /// Tube radii for the smooth objective, strictly decreasing in `(0, 1)`.
    /// Radii the schedule cannot certify are skipped.
    pub deltas: Vec<f64>,
    pub steps: StepSchedule,
    /// Tube samples per variety for the smooth objective.
    pub mc_count: usize,
    pub seed: u64,
    /// `None` picks discrete when every variety is a line, smooth otherwise.
    pub objective: Option<ObjectiveKind>,
    /// Metropolis temperature relative to the current objective; 0 accepts
    /// only non-increasing moves.
    pub temperature: f64,
    /// Cell detection for discrete counts; `None` derives it from the degree.
    pub sampling: Option<SamplingConfig>,
    /// Monomial subspace per factor; `None` is the graded-lex prefix.
    pub indices: Option<Vec<Vec<usize>>>,
}

impl SolveConfig {
    pub fn new(n: usize, s: usize, seed: u64) -> Self {
        Self {
            n,
            s,
            restarts: 8,
            deltas: delta_grid(DEFAULT_FINEST_EXP),
            steps: StepSchedule::default(),
            mc_count: 256,
            seed,
            objective: None,
            temperature: 0.0,
            sampling: None,
            indices: None,
        }
    }

    pub fn embedding(&self) -> Result<Embedding> {
        match &self.indices {
            Some(idx) => Embedding::with_indices(self.n, self.s, idx.clone()),
            None => Embedding::new(self.n, self.s),
        }
    }

    /// The sampling configuration used for discrete counts.
    pub fn resolved_sampling(&self, emb: &Embedding) -> SamplingConfig {
        self.sampling.unwrap_or_else(|| {
            let radius = radius_for(self.deltas.last().copied().unwrap_or(0.5));
            SamplingConfig::default_for(radius, emb.total_degree(), self.seed).with_line_mode(LineMode::Exact)
        })
    }

    fn validate(&self) -> Result<()> {
        if self.s == 0 || self.s > MAX_FACTORS {
            return Err(Error::TooManyFactors(self.s));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1"));
        }
        if self.steps.levels == 0 || !(self.steps.initial > 0.0) || !(self.steps.factor > 0.0) {
            return Err(Error::InvalidArgument("step schedule must be positive"));
        }
        if self.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || self.deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("tube radii must decrease inside (0, 1)"));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::InvalidArgument("temperature must be non-negative"));
        }
        Ok(())
    }
}

/// One proposal of the local search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub restart: usize,
    pub stage: usize,
    pub iteration: usize,
    pub step: f64,
    /// Tube radius of the stage; `None` for the discrete objective.
    pub delta: Option<f64>,
    pub accepted: bool,
    /// Objective at the current point after the decision.
    pub current: f64,
    /// Best objective seen in this stage.
    pub best: f64,
}

/// Outcome of one bisection step for point sets.
#[derive(Debug, Clone, PartialEq)]
pub struct StepImbalance {
    pub step: usize,
    /// `max_parts |#{P_j > 0} - #{P_j < 0}|`.
    pub max_imbalance: u64,
    /// Size of the largest part before the step.
    pub largest_part: u64,
    /// Points landing on `Z(P_j)` in this step.
    pub on_zero: u64,
    /// Tolerated imbalance `ceil(sqrt(q))` for the largest part `q`.
    pub slack: u64,
    pub smoothed_objective: f64,
}

impl StepImbalance {
    pub fn within_slack(&self) -> bool {
        self.max_imbalance <= self.slack.max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub n: usize,
    pub s: usize,
    /// Largest dimension among the varieties (0 for points).
    pub k: usize,
    pub items: usize,
    pub schedule: Vec<usize>,
    pub total_degree: usize,
    pub indices: Vec<Vec<usize>>,
    pub point: XsPoint,
    /// Full-basis coefficients of `P_1, ..., P_s`.
    pub coeffs: Vec<Vec<f64>>,
    pub sampling: SamplingConfig,
    pub objective_kind: ObjectiveKind,
    pub counts: CellCounts,
    pub spectrum: Spectrum<i64>,
    /// `Σ_{v≠0} G_v²` of `counts`.
    pub objective: f64,
    pub max_count: u64,
    /// `max_count · D^{n-k} / |Γ|`, or 0 for an empty family.
    pub bound_ratio: f64,
    pub best_restart: usize,
    pub trace: Vec<TraceEntry>,
    pub bisection: Vec<StepImbalance>,
}

fn finish_report(
    emb: &Embedding,
    k: usize,
    items: usize,
    point: XsPoint,
    counts: CellCounts,
    sampling: SamplingConfig,
    objective_kind: ObjectiveKind,
) -> Result<PartitionReport> {
    let spectrum = wht(&counts);
    let max_count = counts.max();
    let total_degree = emb.total_degree();
    let bound_ratio = if items == 0 {
        0.0
    } else {
        max_count as f64 * (total_degree as f64).powi((emb.n() - k) as i32) / items as f64
    };
    Ok(PartitionReport {
        n: emb.n(),
        s: emb.s(),
        k,
        items,
        schedule: emb.schedule().to_vec(),
        total_degree,
        indices: emb.indices().to_vec(),
        coeffs: emb.coeffs(&point)?,
        point,
        sampling,
        objective_kind,
        objective: spectrum.nonzero_energy(),
        spectrum,
        max_count,
        bound_ratio,
        counts,
        best_restart: 0,
        trace: Vec::new(),
        bisection: Vec::new(),
    })
}

fn energy(counts: &CellCounts) -> f64 {
    wht(counts).nonzero_energy()
}

/// `Σ_{v≠0} G_v²` for the cell counts of `Γ` at `x`.
pub fn objective_discrete(
    gammas: &[VarietySpec],
    x: &XsPoint,
    emb: &Embedding,
    sampling: &SamplingConfig,
) -> Result<f64> {
    let counter = CellCounter::new(gammas, emb.bases(), sampling)?;
    let coeffs = emb.coeffs(x)?;
    Ok(energy(&counter.counts(&as_refs(&coeffs))?))
}

/// `Σ_{v≠0} f_{δ,v}²` at `x`, with tube samples fixed by `cfg`.
pub fn objective_smooth(
    gammas: &[VarietySpec],
    x: &XsPoint,
    emb: &Embedding,
    cfg: &crate::mollifier::MollConfig,
) -> Result<f64> {
    if gammas.is_empty() {
        return Ok(0.0);
    }
    let tubes = TubeFamily::new(gammas, cfg)?.prepare(emb.bases())?;
    let coeffs = emb.coeffs(x)?;
    Ok(tubes.spectrum(&as_refs(&coeffs))?.nonzero_energy())
}

fn as_refs(coeffs: &[Vec<f64>]) -> Vec<&[f64]> {
    coeffs.iter().map(|c| c.as_slice()).collect()
}

enum StageObjective<'a> {
    Discrete(&'a CellCounter),
    Smooth(PreparedTubes),
}

impl StageObjective<'_> {
    fn eval(&self, emb: &Embedding, x: &XsPoint) -> Result<f64> {
        let coeffs = emb.coeffs(x)?;
        let refs = as_refs(&coeffs);
        match self {
            StageObjective::Discrete(c) => Ok(energy(&c.counts(&refs)?)),
            StageObjective::Smooth(t) => Ok(t.spectrum(&refs)?.nonzero_energy()),
        }
    }

    fn delta(&self) -> Option<f64> {
        match self {
            StageObjective::Discrete(_) => None,
            StageObjective::Smooth(t) => Some(t.config().delta),
        }
    }
}

/// Per-block unit Gaussian direction.
fn random_direction(x: &XsPoint, rng: &mut StreamRng) -> Vec<Vec<f64>> {
    x.blocks()
        .iter()
        .map(|b| loop {
            let d: Vec<f64> = b.iter().map(|_| StandardNormal.sample(rng)).collect();
            let len = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len > 0.0 {
                break d.into_iter().map(|v| v / len).collect();
            }
        })
        .collect()
}

/// Partitions a family of varieties: returns the best tuple found over all
/// restarts, judged by the discrete objective with ties going to the lower
/// restart index.
pub fn partition_varieties(gammas: &[VarietySpec], cfg: &SolveConfig) -> Result<PartitionReport> {
    cfg.validate()?;
    if let Some(g) = gammas.iter().find(|g| g.n() != cfg.n) {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: g.n() });
    }
    let emb = cfg.embedding()?;
    let sampling = cfg.resolved_sampling(&emb);
    let kind = cfg.objective.unwrap_or(if gammas.iter().all(|g| g.as_line().is_some()) {
        ObjectiveKind::Discrete
    } else {
        ObjectiveKind::Smooth
    });
    let k = gammas.iter().map(|g| g.k()).max().unwrap_or(0);
    let counter = CellCounter::new(gammas, emb.bases(), &sampling)?;

    if gammas.is_empty() {
        let point = XsPoint::random_point(cfg.s, cfg.seed)?;
        return finish_report(&emb, k, 0, point, CellCounts::zeros(cfg.s)?, sampling, kind);
    }

    let stages: Vec<(f64, StageObjective)> = match kind {
        ObjectiveKind::Discrete => {
            (0..cfg.steps.levels).map(|l| (cfg.steps.step(l), StageObjective::Discrete(&counter))).collect()
        }
        ObjectiveKind::Smooth => smooth_stages(gammas, emb.bases(), cfg)?,
    };

    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, XsPoint, CellCounts)> = None;
    for r in 0..cfg.restarts {
        let x = search(&emb, &stages, cfg, r, &mut trace)?;
        let c = counter.counts(&as_refs(&emb.coeffs(&x)?))?;
        let e = energy(&c);
        if best.as_ref().is_none_or(|(be, _, _, _)| e < *be) {
            best = Some((e, r, x, c));
        }
    }
    let (_, restart, point, c) = best.expect("at least one restart");
    let mut report = finish_report(&emb, k, gammas.len(), point, c, sampling, kind)?;
    report.best_restart = restart;
    report.trace = trace;
    Ok(report)
}

fn smooth_stages<'a>(
    gammas: &[VarietySpec],
    bases: &[Arc<MonomialBasis>],
    cfg: &SolveConfig,
) -> Result<Vec<(f64, StageObjective<'a>)>> {
    let mut out = Vec::new();
    for &delta in &cfg.deltas {
        let Ok(m) = schedule(delta, bases) else { continue };
        let m = m.with_mc(cfg.mc_count, cfg.seed);
        let level = out.len().min(cfg.steps.levels - 1);
        let tubes = TubeFamily::new(gammas, &m)?.prepare(bases)?;
        out.push((cfg.steps.step(level), StageObjective::Smooth(tubes)));
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no tube radius in the grid is certified"));
    }
    Ok(out)
}

fn search(
    emb: &Embedding,
    stages: &[(f64, StageObjective)],
    cfg: &SolveConfig,
    restart: usize,
    trace: &mut Vec<TraceEntry>,
) -> Result<XsPoint> {
    let mut x = XsPoint::random(cfg.s, &mut substream(cfg.seed, label::RESTART, restart as u64))?;
    let mut rng = substream(cfg.seed, label::PROPOSAL, restart as u64);
    for (stage, (step, obj)) in stages.iter().enumerate() {
        let mut cur = obj.eval(emb, &x)?;
        let mut best = (cur, x.clone());
        for iteration in 0..cfg.steps.iters {
            let y = x.tangent_step(&random_direction(&x, &mut rng), *step)?;
            let val = obj.eval(emb, &y)?;
            let accepted = val <= cur
                || (cfg.temperature > 0.0
                    && rng.random::<f64>() < libm::exp(-(val - cur) / (cfg.temperature * cur.max(1.0))));
            if accepted {
                x = y;
                cur = val;
                if cur < best.0 {
                    best = (cur, x.clone());
                }
            }
            trace.push(TraceEntry {
                restart,
                stage,
                iteration,
                step: *step,
                delta: obj.delta(),
                accepted,
                current: cur,
                best: best.0,
            });
        }
        x = best.1;
    }
    Ok(x)
}

/// Cell counts of a point set: each point is a 0-dimensional variety.
pub fn point_counts(points: &[Vec<f64>], polys: &[crate::polyalg::Polynomial]) -> Result<CellCounts> {
    let (gammas, sampling) = point_family(points)?;
    counts(&gammas, polys, &sampling)
}

fn point_family(points: &[Vec<f64>]) -> Result<(Vec<VarietySpec>, SamplingConfig)> {
    let n = points.first().map_or(0, |p| p.len());
    let gammas = points
        .iter()
        .map(|p| VarietySpec::build(n, VarietyKind::KPlane { point: p.clone(), frame: Vec::new() }))
        .collect::<Result<Vec<_>>>()?;
    let radius = points.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max) + 1.0;
    let sampling =
        SamplingConfig { radius, count: 1, tau: crate::cells::DEFAULT_TAU, seed: 0, line_mode: LineMode::Sampled };
    Ok((gammas, sampling))
}

/// Partitions a point set by sequential bisection: `P_j` is chosen to split
/// every part cut out by `P_1, ..., P_{j-1}` as evenly as it can.
///
/// Each step minimizes `Σ_parts (Σ_x tanh(P_j(x)/σ))²` over the unit sphere
/// of the factor's coefficient space with annealed `σ`, from several random
/// starts, then polishes the best start against the exact imbalance.
pub fn partition_points(points: &[Vec<f64>], cfg: &SolveConfig) -> Result<PartitionReport> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(Error::InvalidArgument("point set must be non-empty"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != cfg.n) {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: p.len() });
    }
    let emb = cfg.embedding()?;
    let tau = crate::cells::DEFAULT_TAU;
    // part[i]: sign bits so far, or None once the point fell on a zero set
    let mut part: Vec<Option<u32>> = vec![Some(0); points.len()];
    let mut blocks = Vec::with_capacity(cfg.s);
    let mut steps = Vec::with_capacity(cfg.s);
    let mut trace = Vec::new();
    for j in 0..cfg.s {
        let basis = &emb.bases()[j];
        let idx = &emb.indices()[j];
        let features: Vec<Vec<f64>> = points
            .iter()
            .map(|x| basis.monomials_at(x).map(|m| idx.iter().map(|&i| m[i]).collect()))
            .collect::<Result<_>>()?;
        let mut rng = substream(cfg.seed, label::BISECTION, j as u64);
        let whitener = Whitener::new(&features)?;
        let white: Vec<Vec<f64>> = features.iter().map(|f| whitener.apply(f)).collect();
        let (z, smoothed) = bisect_step(&white, &part, j, cfg, &mut rng, &mut trace)?;
        let c = whitener.coefficients(&z)?;

        let mut pos = vec![0i64; 1 << j];
        let mut sizes = vec![0u64; 1 << j];
        let mut on_zero = 0;
        for (f, slot) in features.iter().zip(part.iter_mut()) {
            let Some(bits) = *slot else { continue };
            sizes[bits as usize] += 1;
            let v = dot(&c, f);
            if v.abs() <= tau {
                on_zero += 1;
                *slot = None;
            } else if v < 0.0 {
                pos[bits as usize] -= 1;
                *slot = Some(bits | 1 << j);
            } else {
                pos[bits as usize] += 1;
            }
        }
        let largest = sizes.iter().copied().max().unwrap_or(0);
        steps.push(StepImbalance {
            step: j + 1,
            max_imbalance: pos.iter().map(|p| p.unsigned_abs()).max().unwrap_or(0),
            largest_part: largest,
            on_zero,
            slack: libm::ceil(libm::sqrt(largest as f64)) as u64,
            smoothed_objective: smoothed,
        });
        blocks.push(c);
    }
    let point = XsPoint::new(blocks)?;
    let polys = emb.to_polys(&point)?;
    let (gammas, sampling) = point_family(points)?;
    let c = counts(&gammas, &polys, &sampling)?;
    let mut report = finish_report(&emb, 0, points.len(), point, c, sampling, ObjectiveKind::Discrete)?;
    report.bisection = steps;
    report.trace = trace;
    Ok(report)
}

/// Change of coordinates making the features orthonormal over the point
/// set, which conditions the bisection search. With `G = L Lᵀ` the Gram
/// matrix, `z · L⁻¹φ = (L⁻ᵀ z) · φ`.
struct Whitener {
    chol: DMatrix<f64>,
}

impl Whitener {
    fn new(features: &[Vec<f64>]) -> Result<Self> {
        let dim = features.first().map_or(0, |f| f.len());
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        for f in features {
            let v = DVector::from_column_slice(f);
            gram += &v * v.transpose();
        }
        gram /= features.len() as f64;
        let ridge = 1e-12 * gram.trace().max(1e-300) / dim as f64;
        for i in 0..dim {
            gram[(i, i)] += ridge;
        }
        let chol = gram.cholesky().ok_or(Error::InvalidArgument("singular feature Gram matrix"))?;
        Ok(Self { chol: chol.l() })
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(f);
        let w = self.chol.solve_lower_triangular(&v).expect("positive diagonal");
        w.iter().copied().collect()
    }

    fn coefficients(&self, z: &[f64]) -> Result<Vec<f64>> {
        let v = DVector::from_column_slice(z);
        let c = self.chol.transpose().solve_upper_triangular(&v).expect("positive diagonal");
        let mut c: Vec<f64> = c.iter().copied().collect();
        if !normalize(&mut c) {
            return Err(Error::InvalidArgument("degenerate bisecting polynomial"));
        }
        Ok(c)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> bool {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= len);
    true
}

/// Exact score of a cut: `(max |imbalance|, Σ imbalance²)` over parts.
fn cut_score(c: &[f64], features: &[Vec<f64>], part: &[Option<u32>], nparts: usize) -> (u64, u64) {
    let mut imb = vec![0i64; nparts];
    for (f, p) in features.iter().zip(part) {
        let Some(bits) = *p else { continue };
        let v = dot(c, f);
        if v > crate::cells::DEFAULT_TAU {
            imb[bits as usize] += 1;
        } else if v < -crate::cells::DEFAULT_TAU {
            imb[bits as usize] -= 1;
        }
    }
    let max = imb.iter().map(|i| i.unsigned_abs()).max().unwrap_or(0);
    (max, imb.iter().map(|i| (i * i) as u64).sum())
}

fn smoothed_cut(c: &[f64], features: &[Vec<f64>], part: &[Option<u32>], nparts: usize, sigma: f64) -> (f64, Vec<f64>) {
    let mut sums = vec![0.0; nparts];
    let mut vals = Vec::with_capacity(features.len());
    for (f, p) in features.iter().zip(part) {
        let th = libm::tanh(dot(c, f) / sigma);
        vals.push(th);
        if let Some(bits) = *p {
            sums[bits as usize] += th;
        }
    }
    let value = sums.iter().map(|s| s * s).sum();
    let mut grad = vec![0.0; c.len()];
    for ((f, p), th) in features.iter().zip(part).zip(vals) {
        let Some(bits) = *p else { continue };
        let w = 2.0 * sums[bits as usize] * (1.0 - th * th) / sigma;
        for (g, fi) in grad.iter_mut().zip(f) {
            *g += w * fi;
        }
    }
    (value, grad)
}

fn bisect_step(
    features: &[Vec<f64>],
    part: &[Option<u32>],
    j: usize,
    cfg: &SolveConfig,
    rng: &mut StreamRng,
    trace: &mut Vec<TraceEntry>,
) -> Result<(Vec<f64>, f64)> {
    let dim = features.first().map_or(0, |f| f.len());
    let nparts = 1usize << j;
    let iters = cfg.steps.iters.max(1) * cfg.steps.levels;
    let mut best: Option<((u64, u64), Vec<f64>, f64)> = None;
    for _ in 0..cfg.restarts {
        let mut c: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if !normalize(&mut c) {
            continue;
        }
        let mut vals: Vec<f64> = features.iter().map(|f| dot(&c, f).abs()).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
        let sigma0 = vals[vals.len() / 2].max(1e-6);
        let mut smoothed = 0.0;
        for it in 0..iters {
            let frac = it as f64 / iters as f64;
            let sigma = sigma0 * libm::pow(1e-3, frac);
            let (value, mut g) = smoothed_cut(&c, features, part, nparts, sigma);
            smoothed = value;
            let radial = dot(&g, &c);
            g.iter_mut().zip(&c).for_each(|(gi, ci)| *gi -= radial * ci);
            if !normalize(&mut g) {
                break;
            }
            let eta = 0.3 * libm::pow(1e-2, frac);
            let mut next: Vec<f64> = c.iter().zip(&g).map(|(ci, gi)| ci - eta * gi).collect();
            if normalize(&mut next) {
                c = next;
            }
        }
        let score = cut_score(&c, features, part, nparts);
        if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
            best = Some((score, c, smoothed));
        }
    }
    let (mut score, mut c, smoothed) = best.ok_or(Error::InvalidArgument("degenerate bisection start"))?;

    // polish against the exact imbalance
    let polish = cfg.steps.iters * cfg.steps.levels;
    for it in 0..polish {
        if score.0 == 0 {
            break;
        }
        let step = 0.05 * libm::pow(1e-3, it as f64 / polish as f64);
        let mut y: Vec<f64> = c
            .iter()
            .map(|ci| {
                let z: f64 = StandardNormal.sample(rng);
                ci + step * z
            })
            .collect();
        if !normalize(&mut y) {
            continue;
        }
        let sc = cut_score(&y, features, part, nparts);
        let accepted = sc <= score;
        if accepted {
            score = sc;
            c = y;
        }
        trace.push(TraceEntry {
            restart: 0,
            stage: j,
            iteration: it,
            step,
            delta: None,
            accepted,
            current: score.0 as f64,
            best: score.0 as f64,
        });
    }
    Ok((c, smoothed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::is_equidistributed;

    fn line(p: [f64; 2], d: [f64; 2]) -> VarietySpec {
        VarietySpec::build(2, VarietyKind::Line { point: p.to_vec(), dir: d.to_vec() }).unwrap()
    }

    fn exact(n: usize, s: usize, seed: u64) -> (Embedding, SamplingConfig) {
        let emb = Embedding::new(n, s).unwrap();
        let cfg = SolveConfig::new(n, s, seed);
        let sampling = cfg.resolved_sampling(&emb);
        (emb, sampling)
    }

    #[test]
    fn energy_of_small_table() {
        assert_eq!(energy(&CellCounts::from_vec(2, vec![2, 1, 1, 0]).unwrap()), 8.0);
        assert_eq!(energy(&CellCounts::from_vec(2, vec![3; 4]).unwrap()), 0.0);
    }

    #[test]
    fn discrete_objective_is_flip_invariant() {
        let gammas: Vec<_> = (0..12)
            .map(|i| {
                let t = i as f64 * 0.5;
                line([0.1 * i as f64 - 0.5, 0.2], [libm::cos(t), libm::sin(t)])
            })
            .collect();
        let (emb, sampling) = exact(2, 3, 1);
        for seed in 0..5 {
            let x = XsPoint::random_point(3, seed).unwrap();
            let base = objective_discrete(&gammas, &x, &emb, &sampling).unwrap();
            for mask in 1..8 {
                let y = x.flip_mask(mask);
                assert_eq!(objective_discrete(&gammas, &y, &emb, &sampling).unwrap(), base);
            }
        }
    }

    #[test]
    fn smooth_objective_of_empty_family_vanishes() {
        let emb = Embedding::new(2, 2).unwrap();
        let m = schedule(0.125, emb.bases()).unwrap();
        let x = XsPoint::random_point(2, 0).unwrap();
        assert_eq!(objective_smooth(&[], &x, &emb, &m).unwrap(), 0.0);
    }

    #[test]
    fn smooth_and_discrete_agree_when_circles_sit_deep_in_cells() {
        // P_1 = x, P_2 = y; small circles well inside the quadrants.
        let emb = Embedding::new(2, 2).unwrap();
        let x = XsPoint::new(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let centers = [[0.6, 0.5], [-0.5, 0.7], [0.5, -0.6], [0.5, 0.6]];
        let gammas: Vec<_> = centers
            .iter()
            .map(|c| {
                VarietySpec::build(2, VarietyKind::Circle { center: c.to_vec(), radius: 0.1, frame: None }).unwrap()
            })
            .collect();
        let sampling = SamplingConfig::default_for(3.0, 2, 0);
        let discrete = objective_discrete(&gammas, &x, &emb, &sampling).unwrap();
        let m = schedule(1.0 / 64.0, emb.bases()).unwrap().with_mc(512, 3);
        let smooth = objective_smooth(&gammas, &x, &emb, &m).unwrap();
        // counts (2, 1, 1, 0) in some order of cells
        assert_eq!(discrete, 8.0);
        assert!((smooth - discrete).abs() < 1e-9, "{smooth}");
    }

    fn fast(n: usize, s: usize, seed: u64) -> SolveConfig {
        let mut cfg = SolveConfig::new(n, s, seed);
        cfg.restarts = 3;
        cfg.steps = StepSchedule { initial: 1.0, factor: 0.5, levels: 4, iters: 25 };
        cfg
    }

    #[test]
    fn single_line_meets_at_most_degree_plus_one_cells() {
        let g = [line([0.2, -0.1], [0.3, 1.0])];
        let r = partition_varieties(&g, &fast(2, 3, 4)).unwrap();
        assert!(r.counts.total() as usize <= r.total_degree + 1);
        assert!(r.max_count <= 1);
    }

    #[test]
    fn two_crossing_lines_beat_a_coarse_grid() {
        let g = [line([0.0, 0.0], [1.0, 0.0]), line([0.0, 0.0], [0.0, 1.0])];
        let r = partition_varieties(&g, &fast(2, 2, 7)).unwrap();
        assert!(r.max_count <= 2);

        // exhaustive oracle over a coarse grid of S^1 × S^2
        let (emb, sampling) = exact(2, 2, 7);
        let counter = CellCounter::new(&g, emb.bases(), &sampling).unwrap();
        let mut grid_min = f64::INFINITY;
        let m = 12;
        for a in 0..m {
            let t = core::f64::consts::TAU * (a as f64 + 0.31) / m as f64;
            for b in 0..m {
                let th = core::f64::consts::PI * (b as f64 + 0.47) / m as f64;
                for c in 0..m {
                    let ph = core::f64::consts::TAU * (c as f64 + 0.13) / m as f64;
                    let x = XsPoint::new(vec![
                        vec![libm::cos(t), libm::sin(t)],
                        vec![libm::cos(th), libm::sin(th) * libm::cos(ph), libm::sin(th) * libm::sin(ph)],
                    ])
                    .unwrap();
                    let e = energy(&counter.counts(&as_refs(&emb.coeffs(&x).unwrap())).unwrap());
                    grid_min = grid_min.min(e);
                }
            }
        }
        assert!(r.objective <= grid_min, "{} > {grid_min}", r.objective);
    }

    #[test]
    fn report_is_consistent_and_deterministic() {
        let gammas: Vec<_> = (0..15)
            .map(|i| {
                let t = 0.4 * i as f64;
                line([libm::cos(2.0 * t) * 0.5, libm::sin(3.0 * t) * 0.5], [libm::cos(t), libm::sin(t)])
            })
            .collect();
        let cfg = fast(2, 3, 11);
        let a = partition_varieties(&gammas, &cfg).unwrap();
        let b = partition_varieties(&gammas, &cfg).unwrap();
        assert_eq!(a, b);
        let polys = cfg.embedding().unwrap().to_polys(&a.point).unwrap();
        assert_eq!(counts(&gammas, &polys, &a.sampling).unwrap(), a.counts);
        assert_eq!(a.max_count, *a.counts.as_slice().iter().max().unwrap());
        assert!(a.counts.total() as usize <= gammas.len() * (a.total_degree + 1));
        for w in a.trace.windows(2) {
            if w[0].restart == w[1].restart && w[0].stage == w[1].stage {
                assert!(w[1].current <= w[0].current);
            }
        }
        let expected = a.max_count as f64 * a.total_degree as f64 / gammas.len() as f64;
        assert!((a.bound_ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_family_reports_zero() {
        let r = partition_varieties(&[], &fast(2, 2, 0)).unwrap();
        assert_eq!(r.counts.total(), 0);
        assert_eq!(r.bound_ratio, 0.0);
    }

    #[test]
    fn smooth_search_runs_on_circles() {
        let gammas: Vec<_> = (0..6)
            .map(|i| {
                let c = [0.3 * libm::cos(i as f64), 0.3 * libm::sin(i as f64)];
                VarietySpec::build(2, VarietyKind::Circle { center: c.to_vec(), radius: 0.4, frame: None }).unwrap()
            })
            .collect();
        let mut cfg = fast(2, 2, 5);
        cfg.restarts = 1;
        cfg.steps.iters = 3;
        cfg.mc_count = 64;
        let r = partition_varieties(&gammas, &cfg).unwrap();
        assert_eq!(r.objective_kind, ObjectiveKind::Smooth);
        assert!(r.trace.iter().all(|t| t.delta.is_some()));
        let polys = cfg.embedding().unwrap().to_polys(&r.point).unwrap();
        assert_eq!(counts(&gammas, &polys, &r.sampling).unwrap(), r.counts);
    }

    #[test]
    fn single_point_lands_in_one_cell() {
        let r = partition_points(&[vec![0.3, 0.4]], &fast(2, 3, 1)).unwrap();
        assert_eq!(r.counts.total(), 1);
        assert_eq!(r.max_count, 1);
    }

    #[test]
    fn symmetric_points_split_exactly_by_odd_polynomials() {
        let mut rng = substream(3, 0, 0);
        let mut pts = Vec::new();
        for _ in 0..20 {
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            pts.push(p.iter().map(|v| -v).collect());
            pts.push(p);
        }
        let mut cfg = fast(3, 2, 9);
        // x, y, z only: every factor is odd
        cfg.indices = Some(vec![vec![1, 2], vec![1, 2, 3]]);
        let r = partition_points(&pts, &cfg).unwrap();
        for st in &r.bisection {
            assert_eq!(st.on_zero, 0);
            assert_eq!(st.max_imbalance, 0, "{st:?}");
        }
        assert!(is_equidistributed(&r.counts));
    }

    #[test]
    fn points_in_square_are_spread() {
        let mut rng = substream(17, 0, 0);
        let pts: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random(), rng.random()]).collect();
        let r = partition_points(&pts, &fast(2, 3, 2)).unwrap();
        assert_eq!(r.bisection.len(), 3);
        assert!(r.bisection.iter().all(|s| s.within_slack()), "{:?}", r.bisection);
        assert!(r.max_count <= 2 * 200 / 8);
        let polys = fast(2, 3, 2).embedding().unwrap().to_polys(&r.point).unwrap();
        assert_eq!(point_counts(&pts, &polys).unwrap(), r.counts);
    }
}
