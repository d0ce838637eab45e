//! Fixed-seed property suites behind the `verify-*` and `bench-*` commands.
//! Each suite returns one [`Check`] per property.

use std::fmt;
use std::sync::Arc;

use anyhow::Result;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use polypart::cells::{cells_entered_line, CellCounts, SignVector};
use polypart::equivariant::{
    check_equivariance, continuation_zero, g_zeros, jacobian_g, model_g, random_equivariant, ContinuationConfig,
    EquivariantMap, ModelMap,
};
use polypart::mollifier::{delta_grid, eta, i_delta, radius_for, schedule};
use polypart::rng::{substream, StreamRng};
use polypart::spectrum::{is_equidistributed, lemma_identity_check, wht, Spectrum};
use polypart::{MonomialBasis, Polynomial, VarietyKind, VarietySpec};

/// Suites draw from this seed so reruns are identical.
pub const SUITE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} {}", self.name, self.detail)
    }
}

fn gaussian(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

fn random_vec(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / len).collect()
}

/// Model-map facts for every `s' <= s`, plus continuation toward perturbed
/// maps for `s' <= 4`.
pub fn borsuk(s: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in 1..=s {
        let zeros = g_zeros(s)?;
        out.push(Check::new(
            format!("borsuk.s{s}.zero_count"),
            zeros.len() == 1 << s,
            format!("zeros={} expected={}", zeros.len(), 1u64 << s),
        ));
        let worst = zeros.iter().flat_map(model_g).fold(0.0f64, |m, v| m.max(v.abs()));
        out.push(Check::new(format!("borsuk.s{s}.zero_residual"), worst == 0.0, format!("max_residual={worst:e}")));

        let model = ModelMap::new(s)?;
        let mut diag_ok = true;
        let mut fd_err = 0.0f64;
        // the finite-difference check is quadratic in 2^s; sample a few zeros
        for z in zeros.iter().take(if s <= 4 { usize::MAX } else { 2 }) {
            let jac = jacobian_g(z)?;
            let dim = jac.nrows();
            for r in 0..dim {
                for c in 0..dim {
                    let v = jac[(r, c)];
                    diag_ok &= if r == c { v == 1.0 || v == -1.0 } else { v == 0.0 };
                }
            }
            let h = 1e-6;
            for v in 1..(1u32 << s) {
                let j = (u32::BITS - v.leading_zeros()) as usize;
                let idx = 1 + (v - (1 << (j - 1))) as usize;
                let mut plus = z.blocks().to_vec();
                let mut minus = z.blocks().to_vec();
                plus[j - 1][idx] += h;
                minus[j - 1][idx] -= h;
                let fp = model.eval_blocks(&plus);
                let fm = model.eval_blocks(&minus);
                for r in 0..dim {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    fd_err = fd_err.max((fd - jac[(r, v as usize - 1)]).abs());
                }
            }
        }
        out.push(Check::new(format!("borsuk.s{s}.jacobian_diagonal_pm1"), diag_ok, ""));
        out.push(Check::new(format!("borsuk.s{s}.jacobian_fd"), fd_err <= 1e-6, format!("max_err={fd_err:e}")));

        let trials = if s <= 6 { 20 } else { 2 };
        let eq = check_equivariance(&model, trials, SUITE_SEED)?;
        out.push(Check::new(format!("borsuk.s{s}.model_equivariance"), eq <= 1e-14, format!("max_violation={eq:e}")));

        if s <= 4 {
            let seeds = 20;
            let mut eq_worst = 0.0f64;
            let mut successes = 0;
            let mut orbit_ok = true;
            for seed in 0..seeds {
                let f = random_equivariant(s, 0.3, SUITE_SEED + seed)?;
                eq_worst = eq_worst.max(check_equivariance(&f, 5, seed)?);
                if let Ok(r) = continuation_zero(&f, &ContinuationConfig::default()) {
                    successes += 1;
                    orbit_ok &= r.orbit_residuals.iter().all(|&v| v < 1e-8);
                }
            }
            out.push(Check::new(
                format!("borsuk.s{s}.perturbed_equivariance"),
                eq_worst < 1e-10,
                format!("max_violation={eq_worst:e}"),
            ));
            out.push(Check::new(
                format!("borsuk.s{s}.continuation"),
                successes * 10 >= seeds * 9,
                format!("successes={successes}/{seeds} lambda=0.3"),
            ));
            out.push(Check::new(format!("borsuk.s{s}.orbit_closure"), orbit_ok, ""));
        }
    }
    Ok(out)
}

fn random_table(rng: &mut StreamRng, s: usize) -> Vec<i64> {
    (0..1usize << s).map(|_| rng.random_range(0..50)).collect()
}

/// Transform identities for every `s' <= s`.
pub fn spectrum(s: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = substream(SUITE_SEED, 0, 0);
    for s in 1..=s {
        let tables = if s <= 10 { 100 } else { 5 };
        let mut involution = true;
        let mut identity = true;
        let mut equi = true;
        for _ in 0..tables {
            let table = random_table(&mut rng, s);
            let sp = Spectrum::of_table(s, table.clone())?;
            let back: Vec<i64> = sp.inverse_scaled().iter().map(|v| v >> s).collect();
            involution &= back == table && sp.inverse_scaled().iter().all(|v| v % (1 << s) == 0);

            let counts = CellCounts::from_vec(s, table.iter().map(|&v| v as u64).collect())?;
            let u = rng.random_range(1..1u32 << s);
            let (lhs, rhs) = lemma_identity_check(&counts, u)?;
            identity &= lhs == rhs;

            let constant = table.iter().all(|&v| v == table[0]);
            equi &= is_equidistributed(&counts) == constant;
            let flat = CellCounts::from_vec(s, vec![table[0] as u64; 1 << s])?;
            equi &= is_equidistributed(&flat) && wht(&flat).values()[1..].iter().all(|&g| g == 0);
        }
        out.push(Check::new(format!("spectrum.s{s}.involution"), involution, format!("tables={tables}")));
        out.push(Check::new(format!("spectrum.s{s}.lemma_identity"), identity, format!("tables={tables}")));
        out.push(Check::new(format!("spectrum.s{s}.equidistribution"), equi, format!("tables={tables}")));
    }
    Ok(out)
}

/// Splits `total` into `parts` positive summands at random.
fn composition(rng: &mut StreamRng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![1; parts];
    for _ in parts..total {
        out[rng.random_range(0..parts)] += 1;
    }
    out
}

/// Largest cell count of random lines against random tuples of product
/// degree `degree`, in `R^2` and `R^3`.
pub fn line_cells(degree: usize, trials: usize) -> Result<(Vec<Check>, usize)> {
    let mut rng = substream(SUITE_SEED, 1, degree as u64);
    let mut violations = 0;
    let mut largest = 0;
    for trial in 0..trials {
        let n = 2 + trial % 2;
        let s = rng.random_range(1..=degree.clamp(1, 4));
        let polys = composition(&mut rng, degree, s)
            .into_iter()
            .map(|d| {
                let b = Arc::new(MonomialBasis::new(n, d)?);
                let c = random_vec(&mut rng, b.len());
                Ok(Polynomial::new(b, c)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let point: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let line = VarietySpec::build(n, VarietyKind::Line { point, dir: unit(random_vec(&mut rng, n)) })?;
        let cells = cells_entered_line(&line, &polys)?.cells.len();
        largest = largest.max(cells);
        violations += (cells > degree + 1) as usize;
    }
    let check = Check::new(
        format!("line_cells.D{degree}.bound"),
        violations == 0,
        format!("trials={trials} violations={violations} max_cells={largest} bound={}", degree + 1),
    );
    Ok((vec![check], largest))
}

fn unit_linear(rng: &mut StreamRng, basis: &Arc<MonomialBasis>) -> Result<Polynomial> {
    Ok(Polynomial::new(basis.clone(), unit(random_vec(rng, basis.len())))?)
}

/// Mollified-indicator properties over the grid `2^-1, ..., 2^-finest`.
pub fn mollifier(finest: u32, configs: usize) -> Result<Vec<Check>> {
    let grid = delta_grid(finest);
    let basis = Arc::new(MonomialBasis::new(2, 1)?);
    let bases = vec![basis.clone(), basis.clone()];
    let mut rng = substream(SUITE_SEED, 2, 0);
    let mut out = Vec::new();

    let certified: Vec<bool> = grid.iter().map(|&d| schedule(d, &bases).is_ok_and(|c| c.certified())).collect();
    out.push(Check::new(
        "mollifier.certificate",
        certified.iter().all(|&c| c),
        format!("certified={}/{} finest=2^-{finest}", certified.iter().filter(|&&c| c).count(), grid.len()),
    ));

    let eta_ok = (0..1000).all(|i| {
        let e = 0.01 + i as f64 * 1e-3;
        let t = rng.random_range(-1.0..3.0);
        let v = eta(e, t);
        (0.0..=1.0).contains(&v) && (t > e || v == 0.0) && (t < 2.0 * e || v == 1.0)
    });
    out.push(Check::new("mollifier.eta_shape", eta_ok, ""));

    let mut range_ok = true;
    for _ in 0..configs {
        let delta = grid[rng.random_range(0..grid.len())];
        let cfg = schedule(delta, &bases)?.with_mc(256, rng.random());
        let polys = vec![unit_linear(&mut rng, &basis)?, unit_linear(&mut rng, &basis)?];
        let center = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let gamma =
            VarietySpec::build(2, VarietyKind::Circle { center, radius: rng.random_range(0.1..1.0), frame: None })?;
        for w in 0..4 {
            let v = i_delta(&gamma, &polys, SignVector::new(w, 2)?, &cfg)?;
            range_ok &= (0.0..=1.0).contains(&v);
        }
    }
    out.push(Check::new("mollifier.range", range_ok, format!("configs={configs}")));

    let mut sep_ok = 0;
    for _ in 0..configs {
        let (gamma, p, delta) = separated_config(&mut rng, &basis, &grid)?;
        let cfg = schedule(delta, &bases[..1])?.with_mc(512, rng.random());
        // γ's tube lies in {P > 0}; the cell {P < 0} is missed
        sep_ok += (i_delta(&gamma, &[p], SignVector::new(1, 1)?, &cfg)? == 0.0) as usize;
    }
    out.push(Check::new("mollifier.separated_zero", sep_ok == configs, format!("exact_zero={sep_ok}/{configs}")));

    let mut witness_ok = 0;
    let mut tested = 0;
    for _ in 0..configs {
        let (gamma, p, c, q_norm) = witness_config(&mut rng, &basis)?;
        let mut all = true;
        let mut any = false;
        for &delta in &grid {
            let cfg = schedule(delta, &bases[..1])?;
            if !witness_threshold(delta, cfg.grad_bound, c, q_norm) {
                continue;
            }
            any = true;
            tested += 1;
            let cfg = cfg.with_mc(1024, rng.random());
            all &= i_delta(&gamma, std::slice::from_ref(&p), SignVector::new(0, 1)?, &cfg)? == 1.0;
        }
        witness_ok += (all && any) as usize;
    }
    out.push(Check::new(
        "mollifier.witness_one",
        witness_ok == configs,
        format!("configs_ok={witness_ok}/{configs} deltas_tested={tested}"),
    ));
    Ok(out)
}

/// A circle whose `2δ`-neighbourhood stays in `{P > 0}`.
pub fn separated_config(
    rng: &mut StreamRng,
    basis: &Arc<MonomialBasis>,
    grid: &[f64],
) -> Result<(VarietySpec, Polynomial, f64)> {
    let delta = grid[rng.random_range(0..grid.len())];
    let p = unit_linear(rng, basis)?;
    let c = p.coeffs();
    let gnorm = (c[1] * c[1] + c[2] * c[2]).sqrt();
    let normal = [c[1] / gnorm, c[2] / gnorm];
    let radius = rng.random_range(0.05..0.5);
    let mut q = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let dist = p.eval(&q)? / gnorm;
    let want = radius + 2.0 * delta + rng.random_range(0.0..0.5);
    q[0] += (want - dist) * normal[0];
    q[1] += (want - dist) * normal[1];
    let gamma = VarietySpec::build(2, VarietyKind::Circle { center: q.to_vec(), radius, frame: None })?;
    Ok((gamma, p, delta))
}

/// A line through a point `q` with `P(q) = c`.
pub fn witness_config(rng: &mut StreamRng, basis: &Arc<MonomialBasis>) -> Result<(VarietySpec, Polynomial, f64, f64)> {
    let p = unit_linear(rng, basis)?;
    let co = p.coeffs();
    let g2 = co[1] * co[1] + co[2] * co[2];
    let target = rng.random_range(0.3..0.6);
    let mut q = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let shift = (target - p.eval(&q)?) / g2;
    q[0] += shift * co[1];
    q[1] += shift * co[2];
    let dir = unit(random_vec(rng, 2));
    let gamma = VarietySpec::build(2, VarietyKind::Line { point: q.to_vec(), dir })?;
    let q_norm = (q[0] * q[0] + q[1] * q[1]).sqrt();
    Ok((gamma, p, target, q_norm))
}

/// Radii covered by the witness property: `δ < c / (2B)` with
/// `B_δ(q) ⊆ B_R`.
pub fn witness_threshold(delta: f64, bound: f64, c: f64, q_norm: f64) -> bool {
    delta < c / (2.0 * bound) && q_norm + delta <= radius_for(delta)
}
