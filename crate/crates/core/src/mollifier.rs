//! Continuous surrogates for the cell indicators.
//!
//! For a tube radius `δ` the mollified indicator is
//!
//! ```text
//! I_δ^γ(P, w) = η_ε( δ^{-n} ∫_{N_δγ ∩ O(P,w) ∩ B_R} η_ε(min_i |P_i|) )
//! ```
//!
//! with the integral estimated by Monte Carlo over a tube sample of `γ`. The
//! schedule picks `R(δ) = 1 + log2(1/δ)` and `ε(δ) = sqrt(δ B)`, where `B`
//! bounds `|∇Q|` on `B_{R+1}` for every unit-norm `Q`; the certificate
//! `B δ < ε` is what makes the indicator vanish on cells the variety misses.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::cells::{parity, SignVector, MAX_FACTORS};
use crate::error::{Error, Result};
use crate::polyalg::{grad_bound, MonomialBasis, Polynomial};
use crate::spectrum::Spectrum;
use crate::varieties::{VarietySpec, WeightedCloud};

/// Default Monte Carlo budget per variety.
pub const DEFAULT_MC_COUNT: usize = 4096;

/// Piecewise-linear ramp: 0 for `t <= eps`, 1 for `t >= 2 eps`.
pub fn eta(eps: f64, t: f64) -> f64 {
    ((t - eps) / eps).clamp(0.0, 1.0)
}

/// `R(δ) = 1 + log2(1/δ)`.
pub fn radius_for(delta: f64) -> f64 {
    1.0 + libm::log2(1.0 / delta)
}

/// Geometric tube-radius grid `0.5, 0.25, ..., 2^{-finest_exp}`.
pub fn delta_grid(finest_exp: u32) -> Vec<f64> {
    (1..=finest_exp).map(|k| libm::ldexp(1.0, -(k as i32))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollConfig {
    pub delta: f64,
    pub epsilon: f64,
    pub radius: f64,
    /// Gradient bound `B` over `B_{R+1}` used by the certificate.
    pub grad_bound: f64,
    pub mc_count: usize,
    pub seed: u64,
}

impl MollConfig {
    pub fn with_mc(mut self, mc_count: usize, seed: u64) -> Self {
        self.mc_count = mc_count;
        self.seed = seed;
        self
    }

    /// `B δ < ε`.
    pub fn certified(&self) -> bool {
        self.grad_bound * self.delta < self.epsilon
    }
}

/// Certified `(ε, R)` for tube radius `delta` and the given factor bases.
pub fn schedule(delta: f64, bases: &[Arc<MonomialBasis>]) -> Result<MollConfig> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument("tube radius must lie in (0, 1)"));
    }
    let radius = radius_for(delta);
    let bound = bases.iter().map(|b| grad_bound(b, radius + 1.0)).fold(0.0, f64::max);
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument("bases must contain a nonconstant monomial"));
    }
    let epsilon = (delta * bound).sqrt();
    let cfg = MollConfig { delta, epsilon, radius, grad_bound: bound, mc_count: DEFAULT_MC_COUNT, seed: 0 };
    if !cfg.certified() {
        return Err(Error::ScheduleInfeasible { delta, bound, epsilon });
    }
    Ok(cfg)
}

fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Tube samples for a family at one configuration, reused across many
/// polynomial tuples (common random numbers).
#[derive(Debug, Clone)]
pub struct TubeFamily {
    cfg: MollConfig,
    n: usize,
    clouds: Vec<WeightedCloud>,
}

impl TubeFamily {
    /// Variety `i` is sampled with a seed derived from `(cfg.seed, i)`.
    pub fn new(gammas: &[VarietySpec], cfg: &MollConfig) -> Result<Self> {
        let clouds = gammas
            .iter()
            .enumerate()
            .map(|(i, g)| g.tube_sample(cfg.delta, cfg.radius, cfg.mc_count, mix(cfg.seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let n = gammas.first().map_or(0, |g| g.n());
        Ok(Self { cfg: *cfg, n, clouds })
    }

    fn single(gamma: &VarietySpec, cfg: &MollConfig) -> Result<Self> {
        let cloud = gamma.tube_sample(cfg.delta, cfg.radius, cfg.mc_count, cfg.seed)?;
        Ok(Self { cfg: *cfg, n: gamma.n(), clouds: vec![cloud] })
    }

    pub fn config(&self) -> &MollConfig {
        &self.cfg
    }

    /// `I_δ^γ(P, w)` for every `w`, for variety `i`.
    pub fn indicator_table(&self, i: usize, polys: &[Polynomial]) -> Result<Vec<f64>> {
        let s = polys.len();
        if s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        let cloud = &self.clouds[i];
        let mut inner = vec![0.0; 1 << s];
        for x in &cloud.points {
            let values = polys.iter().map(|p| p.eval(x)).collect::<Result<Vec<_>>>()?;
            accumulate(&mut inner, cloud.weight, self.cfg.epsilon, &values);
        }
        Ok(finish(inner, &self.cfg, self.n))
    }

    /// Caches monomial values at every tube point for repeated evaluation of
    /// tuples on fixed bases.
    pub fn prepare(&self, bases: &[Arc<MonomialBasis>]) -> Result<PreparedTubes> {
        if bases.len() > MAX_FACTORS {
            return Err(Error::TooManyFactors(bases.len()));
        }
        let features = self
            .clouds
            .iter()
            .map(|c| {
                bases
                    .iter()
                    .map(|b| c.points.iter().map(|x| b.monomials_at(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedTubes {
            cfg: self.cfg,
            n: self.n,
            lens: bases.iter().map(|b| b.len()).collect(),
            weights: self.clouds.iter().map(|c| c.weight).collect(),
            features,
        })
    }

    /// `Σ_γ I_δ^γ(P, w)` for every `w`.
    pub fn table(&self, polys: &[Polynomial]) -> Result<Vec<f64>> {
        let mut total = vec![0.0; 1 << polys.len()];
        for i in 0..self.clouds.len() {
            for (t, v) in total.iter_mut().zip(self.indicator_table(i, polys)?) {
                *t += v;
            }
        }
        Ok(total)
    }

    /// All `f_{δ,v}(P)` at once.
    pub fn spectrum(&self, polys: &[Polynomial]) -> Result<Spectrum<f64>> {
        Spectrum::of_table(polys.len(), self.table(polys)?)
    }
}

/// Tube samples of a family with monomial values precomputed per factor.
#[derive(Debug, Clone)]
pub struct PreparedTubes {
    cfg: MollConfig,
    n: usize,
    lens: Vec<usize>,
    weights: Vec<f64>,
    /// Per variety, per factor, per tube point: monomial values.
    features: Vec<Vec<Vec<Vec<f64>>>>,
}

impl PreparedTubes {
    pub fn config(&self) -> &MollConfig {
        &self.cfg
    }

    /// `Σ_γ I_δ^γ(P, w)` for full-basis coefficient vectors.
    pub fn table(&self, coeffs: &[&[f64]]) -> Result<Vec<f64>> {
        if coeffs.len() != self.lens.len() {
            return Err(Error::DimensionMismatch { expected: self.lens.len(), got: coeffs.len() });
        }
        for (c, &len) in coeffs.iter().zip(&self.lens) {
            if c.len() != len {
                return Err(Error::DimensionMismatch { expected: len, got: c.len() });
            }
        }
        let s = coeffs.len();
        let mut total = vec![0.0; 1 << s];
        let mut inner = vec![0.0; 1 << s];
        let mut values = vec![0.0; s];
        for (per_factor, &weight) in self.features.iter().zip(&self.weights) {
            inner.iter_mut().for_each(|v| *v = 0.0);
            let npts = per_factor.first().map_or(0, |f| f.len());
            for p in 0..npts {
                for ((v, f), c) in values.iter_mut().zip(per_factor).zip(coeffs) {
                    *v = f[p].iter().zip(c.iter()).map(|(m, ci)| m * ci).sum();
                }
                accumulate(&mut inner, weight, self.cfg.epsilon, &values);
            }
            for (t, v) in total.iter_mut().zip(finish(inner.clone(), &self.cfg, self.n)) {
                *t += v;
            }
        }
        Ok(total)
    }

    pub fn spectrum(&self, coeffs: &[&[f64]]) -> Result<Spectrum<f64>> {
        Spectrum::of_table(coeffs.len(), self.table(coeffs)?)
    }
}

/// Adds one tube point with factor values `values` to the inner integrals.
fn accumulate(inner: &mut [f64], weight: f64, eps: f64, values: &[f64]) {
    let mut bits = 0usize;
    let mut min_abs = f64::INFINITY;
    for (j, &v) in values.iter().enumerate() {
        if v == 0.0 {
            return;
        }
        if v < 0.0 {
            bits |= 1 << j;
        }
        min_abs = min_abs.min(v.abs());
    }
    inner[bits] += weight * eta(eps, min_abs);
}

fn finish(inner: Vec<f64>, cfg: &MollConfig, n: usize) -> Vec<f64> {
    let scale = cfg.delta.powi(-(n as i32));
    inner.into_iter().map(|v| eta(cfg.epsilon, v * scale)).collect()
}

/// Mollified indicator `I_δ^γ(P, w)`.
pub fn i_delta(gamma: &VarietySpec, polys: &[Polynomial], w: SignVector, cfg: &MollConfig) -> Result<f64> {
    if w.len() != polys.len() {
        return Err(Error::DimensionMismatch { expected: polys.len(), got: w.len() });
    }
    Ok(TubeFamily::single(gamma, cfg)?.indicator_table(0, polys)?[w.index()])
}

/// `f_{δ,v}(P) = Σ_w (-1)^{v·w} Σ_γ I_δ^γ(P, w)` for nonzero `v`.
pub fn f_delta_v(gammas: &[VarietySpec], polys: &[Polynomial], v: u32, cfg: &MollConfig) -> Result<f64> {
    if v == 0 {
        return Err(Error::ZeroFrequency);
    }
    if (v as usize) >= 1 << polys.len() {
        return Err(Error::InvalidArgument("frequency outside Z_2^s"));
    }
    if gammas.is_empty() {
        return Ok(0.0);
    }
    let table = TubeFamily::new(gammas, cfg)?.table(polys)?;
    Ok(table.iter().enumerate().map(|(w, &t)| if parity(v, w as u32) == 0 { t } else { -t }).sum())
}
