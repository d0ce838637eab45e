//! Equivariant maps `X_s -> R^{2^s - 1}` and numerical tracking of their zeros.
//!
//! Outputs are indexed by nonzero `v ∈ Z_2^s` (position `v - 1`). A map is
//! equivariant when `f_v(Fl_j x) = (-1)^{v_j} f_v(x)` for every block flip.
//!
//! Block `j` of a point is read in the coordinate frame
//! `(t_j, x_v : j(v) = j)` where `j(v)` is the highest set bit of `v`; the
//! model map is `g_v = x_v Π_{j: v_j = 1, j < j(v)} t_j`. Its zeros are the
//! `2^s` points with every `t_j = ±1`, and continuation carries them to zeros
//! of `(1 - t) g + t f` for any equivariant `f`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{label, substream};
use crate::sphereprod::{block_len, XsPoint};

/// Largest `s` for which zero sets are enumerated.
pub const MAX_ZERO_FACTORS: usize = 10;

const ZERO_TOL: f64 = 1e-12;

/// `j(v)`: 1-based position of the highest set bit.
pub fn j_of(v: u32) -> usize {
    (u32::BITS - v.leading_zeros()) as usize
}

/// A named coordinate of the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    T(usize),
    X(u32),
}

/// Naming of the ambient coordinates of `X_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordFrame {
    s: usize,
}

impl CoordFrame {
    pub fn new(s: usize) -> Result<Self> {
        if s == 0 || s > crate::cells::MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// The `v` whose `x_v` live in block `j`.
    pub fn block_frequencies(&self, j: usize) -> Range<u32> {
        (1 << (j - 1))..(1 << j)
    }

    /// `(block, index)` of `t_j`, both 0-based.
    pub fn t_position(&self, j: usize) -> (usize, usize) {
        (j - 1, 0)
    }

    /// `(block, index)` of `x_v`, both 0-based.
    pub fn x_position(&self, v: u32) -> (usize, usize) {
        let j = j_of(v);
        (j - 1, 1 + (v - (1 << (j - 1))) as usize)
    }

    /// Name of the coordinate at `(block, index)`.
    pub fn coord(&self, block: usize, index: usize) -> Coord {
        if index == 0 {
            Coord::T(block + 1)
        } else {
            Coord::X((1 << block) + index as u32 - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Model,
    Perturbed { lambda: f64 },
    Other,
}

/// A map `X_s -> R^{2^s - 1}`, evaluated on raw blocks (unit norm is not
/// required, so finite differences may leave the sphere).
pub trait EquivariantMap {
    fn s(&self) -> usize;

    fn eval_blocks(&self, blocks: &[Vec<f64>]) -> Vec<f64>;

    fn eval(&self, x: &XsPoint) -> Vec<f64> {
        self.eval_blocks(x.blocks())
    }

    fn kind(&self) -> MapKind {
        MapKind::Other
    }
}

fn t(blocks: &[Vec<f64>], j: usize) -> f64 {
    blocks[j - 1][0]
}

fn x(blocks: &[Vec<f64>], v: u32) -> f64 {
    let j = j_of(v);
    blocks[j - 1][1 + (v - (1 << (j - 1))) as usize]
}

fn model_blocks(blocks: &[Vec<f64>]) -> Vec<f64> {
    let s = blocks.len();
    (1..1u32 << s)
        .map(|v| {
            let jv = j_of(v);
            (1..jv).filter(|&j| v >> (j - 1) & 1 == 1).fold(x(blocks, v), |acc, j| acc * t(blocks, j))
        })
        .collect()
}

/// The model map `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelMap {
    s: usize,
}

impl ModelMap {
    pub fn new(s: usize) -> Result<Self> {
        CoordFrame::new(s)?;
        Ok(Self { s })
    }
}

impl EquivariantMap for ModelMap {
    fn s(&self) -> usize {
        self.s
    }

    fn eval_blocks(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
        model_blocks(blocks)
    }

    fn kind(&self) -> MapKind {
        MapKind::Model
    }
}

/// `g_v(x)` for every nonzero `v`.
pub fn model_g(x: &XsPoint) -> Vec<f64> {
    model_blocks(x.blocks())
}

/// The `2^s` zeros of `g`: `x_v = 0` and `t_j = -1` exactly for the set
/// bits `j - 1` of the enumeration index.
pub fn g_zeros(s: usize) -> Result<Vec<XsPoint>> {
    if s == 0 || s > MAX_ZERO_FACTORS {
        return Err(Error::TooManyFactors(s));
    }
    (0..1u32 << s)
        .map(|mask| {
            XsPoint::new(
                (1..=s)
                    .map(|j| {
                        let mut b = vec![0.0; block_len(j)];
                        b[0] = if mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
                        b
                    })
                    .collect(),
            )
        })
        .collect()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `max_v |f_v(x)|`.
pub fn residual(f: &dyn EquivariantMap, x: &XsPoint) -> f64 {
    max_abs(&f.eval(x))
}

/// Jacobian of `g` at one of its zeros with respect to the `x_v`
/// coordinates (rows and columns ordered by `v`). It is diagonal with
/// entries `Π_{j: v_j = 1, j < j(v)} t_j = ±1`.
pub fn jacobian_g(x: &XsPoint) -> Result<DMatrix<f64>> {
    let s = x.s();
    let off_t = x.blocks().iter().flat_map(|b| b[1..].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    if off_t > ZERO_TOL {
        return Err(Error::NotAZero(max_abs(&model_g(x)).max(off_t)));
    }
    let dim = (1usize << s) - 1;
    let mut jac = DMatrix::zeros(dim, dim);
    for v in 1..1u32 << s {
        let jv = j_of(v);
        jac[(v as usize - 1, v as usize - 1)] =
            (1..jv).filter(|&j| v >> (j - 1) & 1 == 1).map(|j| x.block(j)[0]).product();
    }
    Ok(jac)
}

/// Largest `|f_v(Fl_j x) - (-1)^{v_j} f_v(x)|` over random points, all `j`
/// and all `v`.
pub fn check_equivariance(f: &dyn EquivariantMap, trials: usize, seed: u64) -> Result<f64> {
    let s = f.s();
    let mut rng = substream(seed, label::TRIALS, 0);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = XsPoint::random(s, &mut rng)?;
        let fx = f.eval(&x);
        for j in 1..=s {
            let fy = f.eval(&x.flip(j)?);
            for v in 1..1u32 << s {
                let sign = if v >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
                worst = worst.max((fy[v as usize - 1] - sign * fx[v as usize - 1]).abs());
            }
        }
    }
    Ok(worst)
}

/// One product term of a perturbation component: `coef Π_j (ℓ_j · block_j)`
/// over the set bits of `v`, times `Π_i (1 + b_i t_i²)`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coef: f64,
    functionals: Vec<(usize, Vec<f64>)>,
    even: Vec<f64>,
}

impl Term {
    fn eval(&self, blocks: &[Vec<f64>]) -> f64 {
        let odd: f64 =
            self.functionals.iter().map(|(j, l)| l.iter().zip(&blocks[*j]).map(|(a, b)| a * b).sum::<f64>()).product();
        let even: f64 = self.even.iter().zip(blocks).map(|(b, blk)| 1.0 + b * blk[0] * blk[0]).product();
        self.coef * odd * even
    }
}

/// `f = g + λ h` with each `h_v` a sum of products of odd linear functionals
/// of the blocks flagged by `v` and even factors of the `t` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedMap {
    s: usize,
    lambda: f64,
    terms: Vec<Vec<Term>>,
}

/// Product terms per output component.
pub const TERMS_PER_COMPONENT: usize = 2;

/// A random equivariant perturbation of the model map with amplitude `lambda`.
pub fn random_equivariant(s: usize, lambda: f64, seed: u64) -> Result<PerturbedMap> {
    CoordFrame::new(s)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument("amplitude must be finite"));
    }
    let mut rng = substream(seed, label::EQUIVARIANT, 0);
    let gauss = |r: &mut crate::rng::StreamRng| -> f64 { StandardNormal.sample(r) };
    let terms = (1..1u32 << s)
        .map(|v| {
            (0..TERMS_PER_COMPONENT)
                .map(|_| {
                    let coef = gauss(&mut rng) / libm::sqrt(TERMS_PER_COMPONENT as f64);
                    let functionals = (0..s)
                        .filter(|&j| v >> j & 1 == 1)
                        .map(|j| {
                            let len = block_len(j + 1);
                            let scale = 1.0 / libm::sqrt(len as f64);
                            (j, (0..len).map(|_| gauss(&mut rng) * scale).collect())
                        })
                        .collect();
                    let even = (0..s).map(|_| rng.random_range(0.0..1.0)).collect();
                    Term { coef, functionals, even }
                })
                .collect()
        })
        .collect();
    Ok(PerturbedMap { s, lambda, terms })
}

impl PerturbedMap {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl EquivariantMap for PerturbedMap {
    fn s(&self) -> usize {
        self.s
    }

    fn eval_blocks(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
        let mut out = model_blocks(blocks);
        if self.lambda != 0.0 {
            for (o, terms) in out.iter_mut().zip(&self.terms) {
                *o += self.lambda * terms.iter().map(|t| t.eval(blocks)).sum::<f64>();
            }
        }
        out
    }

    fn kind(&self) -> MapKind {
        MapKind::Perturbed { lambda: self.lambda }
    }
}

/// Representative of the flip orbit of `x` with every `t_j > 0`.
pub fn hemisphere_fold(x: &XsPoint) -> Result<XsPoint> {
    let mut mask = 0u32;
    for j in 1..=x.s() {
        let tj = x.block(j)[0];
        if tj.abs() < ZERO_TOL {
            return Err(Error::HemisphereBoundary(j));
        }
        if tj < 0.0 {
            mask |= 1 << (j - 1);
        }
    }
    Ok(x.flip_mask(mask))
}

/// Local chart of `X_s`: each block drops its largest-magnitude coordinate,
/// which is recovered from the unit-norm constraint with its sign.
#[derive(Debug, Clone)]
struct Chart {
    dropped: Vec<(usize, f64)>,
    lens: Vec<usize>,
}

impl Chart {
    fn at(x: &XsPoint) -> Self {
        let dropped = x
            .blocks()
            .iter()
            .map(|b| {
                let (i, v) = b
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(bi, bv), (i, &v)| if v.abs() > bv.abs() { (i, v) } else { (bi, bv) });
                (i, if v < 0.0 { -1.0 } else { 1.0 })
            })
            .collect();
        Self { dropped, lens: x.blocks().iter().map(|b| b.len()).collect() }
    }

    fn coords(&self, x: &XsPoint) -> Vec<f64> {
        x.blocks()
            .iter()
            .zip(&self.dropped)
            .flat_map(|(b, &(d, _))| b.iter().enumerate().filter(move |(i, _)| *i != d).map(|(_, &v)| v))
            .collect()
    }

    fn blocks(&self, y: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.lens.len());
        let mut pos = 0;
        for (&len, &(d, sign)) in self.lens.iter().zip(&self.dropped) {
            let free = &y[pos..pos + len - 1];
            pos += len - 1;
            let sq: f64 = free.iter().map(|v| v * v).sum();
            if !(sq < 1.0) {
                return None;
            }
            let mut b = Vec::with_capacity(len);
            b.extend_from_slice(&free[..d]);
            b.push(sign * libm::sqrt(1.0 - sq));
            b.extend_from_slice(&free[d..]);
            out.push(b);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Corrector stopping residual.
    pub newton_tol: f64,
    pub newton_iters: usize,
    /// Largest corrector displacement (max norm) accepted per step.
    pub max_correction: f64,
    /// Required residual at `t = 1`.
    pub final_tol: f64,
    pub fd_step: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-5,
            max_step: 0.25,
            newton_tol: 1e-11,
            newton_iters: 8,
            max_correction: 0.25,
            final_tol: 1e-8,
            fd_step: 1e-7,
        }
    }
}

/// `(1 - t) g + t f`.
struct Homotopy<'a> {
    f: &'a dyn EquivariantMap,
}

impl Homotopy<'_> {
    fn eval(&self, blocks: &[Vec<f64>], t: f64) -> Vec<f64> {
        let g = model_blocks(blocks);
        if t == 0.0 {
            return g;
        }
        let f = self.f.eval_blocks(blocks);
        g.iter().zip(&f).map(|(a, b)| (1.0 - t) * a + t * b).collect()
    }

    fn in_chart(&self, chart: &Chart, y: &[f64], t: f64) -> Option<Vec<f64>> {
        chart.blocks(y).map(|b| self.eval(&b, t))
    }

    /// Central-difference Jacobian in chart coordinates.
    fn jacobian(&self, chart: &Chart, y: &[f64], t: f64, h: f64) -> Option<DMatrix<f64>> {
        let dim = y.len();
        let mut jac = DMatrix::zeros(dim, dim);
        let mut yp = y.to_vec();
        for c in 0..dim {
            yp[c] = y[c] + h;
            let fp = self.in_chart(chart, &yp, t)?;
            yp[c] = y[c] - h;
            let fm = self.in_chart(chart, &yp, t)?;
            yp[c] = y[c];
            for r in 0..dim {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Some(jac)
    }

    fn newton(&self, chart: &Chart, mut y: Vec<f64>, t: f64, cfg: &ContinuationConfig) -> Option<(Vec<f64>, f64)> {
        let mut res = max_abs(&self.in_chart(chart, &y, t)?);
        for _ in 0..cfg.newton_iters {
            if res <= cfg.newton_tol {
                break;
            }
            let fy = DVector::from_vec(self.in_chart(chart, &y, t)?);
            let step = self.jacobian(chart, &y, t, cfg.fd_step)?.lu().solve(&fy)?;
            let next: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a - d).collect();
            let next_res = max_abs(&self.in_chart(chart, &next, t)?);
            if !(next_res < res) {
                break;
            }
            y = next;
            res = next_res;
        }
        Some((y, res))
    }
}

/// One tracked path.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    /// Index into [`g_zeros`] of the start point.
    pub start: usize,
    pub reached_t: f64,
    pub residual: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationReport {
    pub zero: XsPoint,
    pub residual: f64,
    pub attempts: Vec<Attempt>,
    /// `max_v |f_v|` at each of the `2^s` flip images, by flip mask.
    pub orbit_residuals: Vec<f64>,
    /// Orbit representative with all `t_j > 0`, when no `t_j` vanishes.
    pub representative: Option<XsPoint>,
}

fn track(f: &dyn EquivariantMap, start: &XsPoint, index: usize, cfg: &ContinuationConfig) -> (Attempt, XsPoint) {
    let hom = Homotopy { f };
    let mut x = start.clone();
    let mut t = 0.0;
    let mut dt = cfg.initial_step;
    let mut steps = 0;
    let mut res = residual(&ModelMap { s: f.s() }, start);
    while t < 1.0 {
        if dt < cfg.min_step {
            return (Attempt { start: index, reached_t: t, residual: res, steps }, x);
        }
        let t_new = (t + dt).min(1.0);
        let chart = Chart::at(&x);
        let y = chart.coords(&x);
        let predicted = hom.jacobian(&chart, &y, t, cfg.fd_step).and_then(|jac| {
            let g = model_blocks(x.blocks());
            let fx = f.eval(&x);
            let dh_dt = DVector::from_iterator(g.len(), fx.iter().zip(&g).map(|(a, b)| a - b));
            let dy = jac.lu().solve(&dh_dt)?;
            Some(y.iter().zip(dy.iter()).map(|(a, d)| a - (t_new - t) * d).collect::<Vec<f64>>())
        });
        let corrected = predicted.and_then(|yp| {
            let (yc, r) = hom.newton(&chart, yp.clone(), t_new, cfg)?;
            let moved = yc.iter().zip(&yp).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            (r <= cfg.newton_tol.max(cfg.final_tol * 1e-2) && moved <= cfg.max_correction).then_some((yc, r))
        });
        match corrected.and_then(|(yc, r)| Some((XsPoint::retract(chart.blocks(&yc)?).ok()?, r))) {
            Some((next, r)) => {
                x = next;
                t = t_new;
                res = r;
                steps += 1;
                dt = (dt * 1.5).min(cfg.max_step);
            }
            None => dt *= 0.5,
        }
    }
    let chart = Chart::at(&x);
    if let Some((y, _)) = hom.newton(&chart, chart.coords(&x), 1.0, cfg) {
        if let Some(b) = chart.blocks(&y).and_then(|b| XsPoint::retract(b).ok()) {
            x = b;
        }
    }
    res = residual(f, &x);
    (Attempt { start: index, reached_t: 1.0, residual: res, steps }, x)
}

fn orbit_residuals(f: &dyn EquivariantMap, x: &XsPoint) -> Vec<f64> {
    (0..1u32 << x.s()).map(|mask| residual(f, &x.flip_mask(mask))).collect()
}

/// Tracks a zero of `f` from the zeros of `g`, trying each start in turn
/// with a halved initial step until one reaches `t = 1` with residual below
/// `cfg.final_tol`.
pub fn continuation_zero(f: &dyn EquivariantMap, cfg: &ContinuationConfig) -> Result<ContinuationReport> {
    let starts = g_zeros(f.s())?;
    let mut attempts = Vec::new();
    for (i, start) in starts.iter().enumerate() {
        let mut c = *cfg;
        c.initial_step = cfg.initial_step * libm::ldexp(1.0, -(i.min(30) as i32));
        let (attempt, x) = track(f, start, i, &c);
        let ok = attempt.reached_t >= 1.0 && attempt.residual < cfg.final_tol;
        let res = attempt.residual;
        attempts.push(attempt);
        if ok {
            return Ok(ContinuationReport {
                orbit_residuals: orbit_residuals(f, &x),
                representative: hemisphere_fold(&x).ok(),
                residual: res,
                zero: x,
                attempts,
            });
        }
    }
    Err(Error::ContinuationFailed(attempts.iter().map(|a| a.residual).collect()))
}

/// Distinct zero orbits reached by tracking from every zero of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitCensus {
    pub representatives: Vec<XsPoint>,
    pub attempts: Vec<Attempt>,
}

impl OrbitCensus {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_odd(&self) -> bool {
        self.count() % 2 == 1
    }
}

/// Tracks from all `2^s` zeros of `g` and groups the successes by flip
/// orbit (representatives within `1e-6` are identified). Completeness of the
/// zero set is not claimed.
pub fn orbit_census(f: &dyn EquivariantMap, cfg: &ContinuationConfig) -> Result<OrbitCensus> {
    let mut representatives: Vec<XsPoint> = Vec::new();
    let mut attempts = Vec::new();
    for (i, start) in g_zeros(f.s())?.iter().enumerate() {
        let (attempt, x) = track(f, start, i, cfg);
        if attempt.reached_t >= 1.0 && attempt.residual < cfg.final_tol {
            if let Ok(rep) = hemisphere_fold(&x) {
                if representatives.iter().all(|r| r.distance(&rep) > 1e-6) {
                    representatives.push(rep);
                }
            }
        }
        attempts.push(attempt);
    }
    Ok(OrbitCensus { representatives, attempts })
}

/// Newton's method for `f` in local charts from `x0`.
pub fn newton_zero(f: &dyn EquivariantMap, x0: &XsPoint, cfg: &ContinuationConfig) -> Result<(XsPoint, f64)> {
    let hom = Homotopy { f };
    let mut x = x0.clone();
    for _ in 0..cfg.newton_iters {
        let chart = Chart::at(&x);
        let Some((y, _)) = hom.newton(&chart, chart.coords(&x), 1.0, cfg) else { break };
        let Some(next) = chart.blocks(&y).and_then(|b| XsPoint::retract(b).ok()) else { break };
        let done = next.distance(&x) < 1e-15;
        x = next;
        if done {
            break;
        }
    }
    let res = residual(f, &x);
    if res < cfg.final_tol {
        Ok((x, res))
    } else {
        Err(Error::NotAZero(res))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_positions() {
        let f = CoordFrame::new(3).unwrap();
        assert_eq!(f.x_position(1), (0, 1));
        assert_eq!(f.x_position(2), (1, 1));
        assert_eq!(f.x_position(3), (1, 2));
        assert_eq!(f.x_position(7), (2, 4));
        assert_eq!(f.t_position(2), (1, 0));
        for j in 1..=3 {
            assert_eq!(f.block_frequencies(j).len() + 1, block_len(j));
            for v in f.block_frequencies(j) {
                let (b, i) = f.x_position(v);
                assert_eq!(f.coord(b, i), Coord::X(v));
            }
            assert_eq!(f.coord(j - 1, 0), Coord::T(j));
        }
    }

    #[test]
    fn model_values() {
        let x = XsPoint::new(vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(model_g(&x), vec![1.0]);
        let h = libm::sqrt(0.75);
        let x = XsPoint::new(vec![vec![1.0, 0.0], vec![h, 0.0, 0.5]]).unwrap();
        // order v = 1, 2, 3; g_3 = x_3 t_1
        assert_eq!(model_g(&x), vec![0.0, 0.0, 0.5]);
        let x = XsPoint::new(vec![vec![-1.0, 0.0], vec![h, 0.5, 0.0]]).unwrap();
        assert_eq!(model_g(&x), vec![0.0, 0.5, 0.0]);
    }

    #[test]
    fn zeros_and_jacobians() {
        assert_eq!(g_zeros(1).unwrap().len(), 2);
        assert_eq!(g_zeros(3).unwrap().len(), 8);
        for z in g_zeros(2).unwrap() {
            assert!(model_g(&z).iter().all(|&v| v == 0.0));
        }
        let z = &g_zeros(1).unwrap()[0];
        assert_eq!(jacobian_g(z).unwrap(), DMatrix::from_element(1, 1, 1.0));
        let z = XsPoint::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(jacobian_g(&z).unwrap(), DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0])));
        let off = XsPoint::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(matches!(jacobian_g(&off), Err(Error::NotAZero(_))));
        assert!(g_zeros(11).is_err());
    }

    #[test]
    fn model_is_equivariant() {
        for s in 1..=4 {
            assert!(check_equivariance(&ModelMap::new(s).unwrap(), 20, s as u64).unwrap() <= 1e-14);
        }
    }

    struct Broken;

    impl EquivariantMap for Broken {
        fn s(&self) -> usize {
            2
        }

        fn eval_blocks(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
            let mut g = model_blocks(blocks);
            g[0] = 1.0;
            g
        }
    }

    #[test]
    fn constant_component_breaks_equivariance() {
        assert!((check_equivariance(&Broken, 3, 0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn perturbations_stay_equivariant() {
        for seed in 0..20 {
            let f = random_equivariant(3, 0.5, seed).unwrap();
            assert!(check_equivariance(&f, 5, seed).unwrap() < 1e-10);
        }
        let f = random_equivariant(2, 0.0, 4).unwrap();
        let x = XsPoint::random_point(2, 8).unwrap();
        assert_eq!(f.eval(&x), model_g(&x));
        assert_eq!(f.kind(), MapKind::Perturbed { lambda: 0.0 });
    }

    #[test]
    fn folding() {
        let x = XsPoint::random_point(3, 2).unwrap();
        let rep = hemisphere_fold(&x).unwrap();
        assert!((1..=3).all(|j| rep.block(j)[0] > 0.0));
        for mask in 0..8 {
            assert_eq!(hemisphere_fold(&x.flip_mask(mask)).unwrap(), rep);
        }
        assert_eq!(hemisphere_fold(&rep).unwrap(), rep);
        let b = XsPoint::new(vec![vec![0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(hemisphere_fold(&b), Err(Error::HemisphereBoundary(1)));
    }

    #[test]
    fn chart_round_trip() {
        let x = XsPoint::random_point(3, 5).unwrap();
        let c = Chart::at(&x);
        let y = c.coords(&x);
        assert_eq!(y.len(), 7);
        let back = XsPoint::new(c.blocks(&y).unwrap()).unwrap();
        assert!(back.distance(&x) < 1e-14);
    }

    #[test]
    fn zero_perturbation_returns_a_model_zero() {
        let f = random_equivariant(2, 0.0, 1).unwrap();
        let r = continuation_zero(&f, &ContinuationConfig::default()).unwrap();
        assert_eq!(r.zero, g_zeros(2).unwrap()[0]);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn continuation_reaches_perturbed_zero() {
        let f = random_equivariant(2, 0.2, 3).unwrap();
        let r = continuation_zero(&f, &ContinuationConfig::default()).unwrap();
        assert!(r.residual < 1e-8);
        assert_eq!(r.orbit_residuals.len(), 4);
        assert!(r.orbit_residuals.iter().all(|&v| v < 1e-8));
    }

    #[test]
    fn newton_on_model_finds_a_model_zero() {
        let g = ModelMap::new(3).unwrap();
        let mut rng = substream(6, 0, 0);
        for _ in 0..10 {
            let mut blocks: Vec<Vec<f64>> = g_zeros(3).unwrap()[rng.random_range(0..8)].clone().into_blocks();
            for b in &mut blocks {
                for v in b.iter_mut() {
                    *v += rng.random_range(-0.05..0.05);
                }
            }
            let x0 = XsPoint::retract(blocks).unwrap();
            let (z, _) = newton_zero(&g, &x0, &ContinuationConfig::default()).unwrap();
            for j in 1..=3 {
                assert!(z.block(j)[1..].iter().all(|v| v.abs() < 1e-10));
                assert!(z.block(j)[0].abs() > 0.9);
            }
        }
    }
}
