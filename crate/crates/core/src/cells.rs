//! Sign-condition cells `O(P, w)` and per-cell variety counts.
//!
//! A point belongs to cell `w` when `sign P_j(x) = (-1)^{w_j}` for every `j`;
//! points with some `|P_j(x)| <= tau` lie on the zero set and in no cell.
//! Whether a variety meets a cell is decided from samples of the variety (a
//! one-sided test that can miss tiny intersections) or, for lines, exactly by
//! isolating the roots of each restriction `t -> P_j(a + t u)`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::polyalg::{combine_rows, MonomialBasis, Polynomial};
use crate::roots::{horner, isolate_real_roots};
use crate::varieties::VarietySpec;

/// Largest supported number of factors.
pub const MAX_FACTORS: usize = 20;

/// Default zero-set tolerance for unit-norm polynomials.
pub const DEFAULT_TAU: f64 = 1e-9;

const DEGENERATE_RESTRICTION: f64 = 1e-12;

/// An element `w` of `Z_2^s`; bit `j-1` holds `w_j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector {
    bits: u32,
    len: u8,
}

impl SignVector {
    pub fn new(bits: u32, len: usize) -> Result<Self> {
        if len > MAX_FACTORS {
            return Err(Error::TooManyFactors(len));
        }
        if len < 32 && bits >> len != 0 {
            return Err(Error::InvalidArgument("sign vector has bits beyond its length"));
        }
        Ok(Self { bits, len: len as u8 })
    }

    /// From `w_1, ..., w_s` given as 0/1 entries.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut acc = 0u32;
        for (j, &b) in bits.iter().enumerate().take(MAX_FACTORS) {
            if b > 1 {
                return Err(Error::InvalidArgument("sign bits must be 0 or 1"));
            }
            acc |= (b as u32) << j;
        }
        Self::new(acc, bits.len())
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// `w_j` for `1 <= j <= s`.
    pub fn get(self, j: usize) -> u8 {
        ((self.bits >> (j - 1)) & 1) as u8
    }

    /// `w + e_j`.
    pub fn flipped(self, j: usize) -> Self {
        Self { bits: self.bits ^ (1 << (j - 1)), len: self.len }
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector(")?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

/// `w_1 w_2 ... w_s` as a string of 0/1.
impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.len() {
            write!(f, "{}", self.get(j))?;
        }
        Ok(())
    }
}

/// `v · w` in `Z_2`.
pub fn parity(v: u32, w: u32) -> u32 {
    (v & w).count_ones() & 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSign {
    Cell(SignVector),
    Boundary,
}

/// Sign vector of `x`, or `Boundary` when some `|P_j(x)| <= tau`.
pub fn sign_vector(polys: &[Polynomial], x: &[f64], tau: f64) -> Result<CellSign> {
    if polys.len() > MAX_FACTORS {
        return Err(Error::TooManyFactors(polys.len()));
    }
    let mut bits = 0u32;
    for (j, p) in polys.iter().enumerate() {
        let v = p.eval(x)?;
        if v.abs() <= tau {
            return Ok(CellSign::Boundary);
        }
        if v < 0.0 {
            bits |= 1 << j;
        }
    }
    Ok(CellSign::Cell(SignVector::new(bits, polys.len())?))
}

fn sign_of_values(values: impl Iterator<Item = f64>, len: usize, tau: f64) -> Option<SignVector> {
    let mut bits = 0u32;
    for (j, v) in values.enumerate() {
        if !(v.abs() > tau) {
            return None;
        }
        if v < 0.0 {
            bits |= 1 << j;
        }
    }
    Some(SignVector { bits, len: len as u8 })
}

/// How a variety's entered cells are detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineMode {
    /// Sample every variety inside `B_radius`.
    Sampled,
    /// Lines use exact root isolation along the whole line; other varieties
    /// are sampled.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub radius: f64,
    pub count: usize,
    pub tau: f64,
    pub seed: u64,
    pub line_mode: LineMode,
}

impl SamplingConfig {
    /// `64 (R D + 1)` samples per unit of variety dimension.
    pub fn default_for(radius: f64, degree: usize, seed: u64) -> Self {
        let count = 64 * (radius * degree as f64 + 1.0).ceil() as usize;
        Self { radius, count, tau: DEFAULT_TAU, seed, line_mode: LineMode::Sampled }
    }

    pub fn with_line_mode(mut self, mode: LineMode) -> Self {
        self.line_mode = mode;
        self
    }
}

/// Result of exact cell enumeration along a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCells {
    /// Sorted, distinct cells met by the line.
    pub cells: Vec<SignVector>,
    /// The line lies inside some `Z(P_j)`; it then meets no cell.
    pub degenerate: bool,
}

/// Exact set of cells entered by a line, from the real roots of each
/// restriction `t -> P_j(a + t u)`.
pub fn cells_entered_line(line: &VarietySpec, polys: &[Polynomial]) -> Result<LineCells> {
    let (a, u) = line.as_line().ok_or(Error::UnsupportedVariety("non-line"))?;
    if polys.len() > MAX_FACTORS {
        return Err(Error::TooManyFactors(polys.len()));
    }
    let mut restrictions = Vec::with_capacity(polys.len());
    let mut scales = Vec::with_capacity(polys.len());
    for p in polys {
        restrictions.push(p.restrict_to_line(a, u)?);
        scales.push(p.coeff_norm());
    }
    cells_from_restrictions(&restrictions, &scales, DEFAULT_TAU)
}

fn cells_from_restrictions(restrictions: &[Vec<f64>], scales: &[f64], tau: f64) -> Result<LineCells> {
    let s = restrictions.len();
    let mut roots = Vec::new();
    for (q, &scale) in restrictions.iter().zip(scales) {
        let max = q.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max < DEGENERATE_RESTRICTION * scale.max(1.0) {
            return Ok(LineCells { cells: Vec::new(), degenerate: true });
        }
        roots.extend(isolate_real_roots(q)?);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).expect("finite roots"));
    roots.dedup();
    let mut probes = Vec::with_capacity(roots.len() + 1);
    match (roots.first(), roots.last()) {
        (Some(&lo), Some(&hi)) => {
            probes.push(lo - 1.0);
            probes.extend(roots.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            probes.push(hi + 1.0);
        }
        _ => probes.push(0.0),
    }
    let mut cells: Vec<SignVector> =
        probes.into_iter().filter_map(|t| sign_of_values(restrictions.iter().map(|q| horner(q, t)), s, tau)).collect();
    cells.sort();
    cells.dedup();
    Ok(LineCells { cells, degenerate: false })
}

/// Cells met by `γ` under the sampling configuration.
pub fn entered_cells(gamma: &VarietySpec, polys: &[Polynomial], cfg: &SamplingConfig) -> Result<Vec<SignVector>> {
    if cfg.line_mode == LineMode::Exact && gamma.as_line().is_some() {
        return Ok(cells_entered_line(gamma, polys)?.cells);
    }
    if polys.len() > MAX_FACTORS {
        return Err(Error::TooManyFactors(polys.len()));
    }
    let mut cells = Vec::new();
    for x in gamma.sample_in_ball(cfg.radius, cfg.count, cfg.seed)? {
        if let CellSign::Cell(w) = sign_vector(polys, &x, cfg.tau)? {
            cells.push(w);
        }
    }
    cells.sort();
    cells.dedup();
    Ok(cells)
}

/// `I^γ(P, w)`: 1 when `γ` is seen to meet cell `w`.
pub fn indicator(gamma: &VarietySpec, polys: &[Polynomial], w: SignVector, cfg: &SamplingConfig) -> Result<u8> {
    Ok(entered_cells(gamma, polys, cfg)?.binary_search(&w).is_ok() as u8)
}

/// Number of varieties meeting each of the `2^s` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCounts {
    s: usize,
    counts: Vec<u64>,
}

impl CellCounts {
    pub fn zeros(s: usize) -> Result<Self> {
        if s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        Ok(Self { s, counts: vec![0; 1 << s] })
    }

    pub fn from_vec(s: usize, counts: Vec<u64>) -> Result<Self> {
        if s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        if counts.len() != 1 << s {
            return Err(Error::DimensionMismatch { expected: 1 << s, got: counts.len() });
        }
        Ok(Self { s, counts })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, w: SignVector) -> u64 {
        self.counts[w.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn add_cells(&mut self, cells: &[SignVector]) {
        for w in cells {
            self.counts[w.index()] += 1;
        }
    }

    /// Table after relabeling every cell `w` as `w + e_j`.
    pub fn flipped(&self, j: usize) -> Self {
        let mut out = vec![0; self.counts.len()];
        for (w, &c) in self.counts.iter().enumerate() {
            out[w ^ (1 << (j - 1))] = c;
        }
        Self { s: self.s, counts: out }
    }
}

/// `Σ_γ I^γ(P, w)` for every `w`.
pub fn counts(gammas: &[VarietySpec], polys: &[Polynomial], cfg: &SamplingConfig) -> Result<CellCounts> {
    let mut out = CellCounts::zeros(polys.len())?;
    for g in gammas {
        out.add_cells(&entered_cells(g, polys, cfg)?);
    }
    Ok(out)
}

/// Cell counter specialised to a fixed family and fixed polynomial bases.
///
/// Line restrictions of every basis monomial and monomial values at every
/// sample are computed once, so counting for a new coefficient tuple is a
/// sequence of dot products.
#[derive(Debug, Clone)]
pub struct CellCounter {
    bases: Vec<Arc<MonomialBasis>>,
    tau: f64,
    items: Vec<Prepared>,
}

#[derive(Debug, Clone)]
enum Prepared {
    /// Per factor, the restriction row of each monomial.
    Line(Vec<Vec<Vec<f64>>>),
    /// Per factor, per sample, the monomial values.
    Samples(Vec<Vec<Vec<f64>>>),
}

impl CellCounter {
    pub fn new(gammas: &[VarietySpec], bases: &[Arc<MonomialBasis>], cfg: &SamplingConfig) -> Result<Self> {
        if bases.len() > MAX_FACTORS {
            return Err(Error::TooManyFactors(bases.len()));
        }
        let mut items = Vec::with_capacity(gammas.len());
        for g in gammas {
            let item = match g.as_line() {
                Some((a, u)) if cfg.line_mode == LineMode::Exact => {
                    Prepared::Line(bases.iter().map(|b| b.line_restrictions(a, u)).collect::<Result<_>>()?)
                }
                _ => {
                    let pts = g.sample_in_ball(cfg.radius, cfg.count, cfg.seed)?;
                    Prepared::Samples(
                        bases
                            .iter()
                            .map(|b| pts.iter().map(|x| b.monomials_at(x)).collect::<Result<Vec<_>>>())
                            .collect::<Result<_>>()?,
                    )
                }
            };
            items.push(item);
        }
        Ok(Self { bases: bases.to_vec(), tau: cfg.tau, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn check(&self, coeffs: &[&[f64]]) -> Result<()> {
        if coeffs.len() != self.bases.len() {
            return Err(Error::DimensionMismatch { expected: self.bases.len(), got: coeffs.len() });
        }
        for (c, b) in coeffs.iter().zip(&self.bases) {
            if c.len() != b.len() {
                return Err(Error::DimensionMismatch { expected: b.len(), got: c.len() });
            }
        }
        Ok(())
    }

    /// Cells entered by item `i` for the given per-factor coefficients.
    pub fn entered(&self, i: usize, coeffs: &[&[f64]]) -> Result<Vec<SignVector>> {
        self.check(coeffs)?;
        let s = coeffs.len();
        match &self.items[i] {
            Prepared::Line(rows) => {
                let restrictions: Vec<Vec<f64>> = rows
                    .iter()
                    .zip(coeffs)
                    .zip(&self.bases)
                    .map(|((r, c), b)| combine_rows(r, c, b.degree() + 1))
                    .collect();
                let scales: Vec<f64> = coeffs.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
                Ok(cells_from_restrictions(&restrictions, &scales, self.tau)?.cells)
            }
            Prepared::Samples(features) => {
                let npts = features.first().map_or(0, |f| f.len());
                let mut cells: Vec<SignVector> = (0..npts)
                    .filter_map(|p| {
                        sign_of_values(
                            features
                                .iter()
                                .zip(coeffs)
                                .map(|(f, c)| f[p].iter().zip(c.iter()).map(|(m, ci)| m * ci).sum::<f64>()),
                            s,
                            self.tau,
                        )
                    })
                    .collect();
                cells.sort();
                cells.dedup();
                Ok(cells)
            }
        }
    }

    pub fn counts(&self, coeffs: &[&[f64]]) -> Result<CellCounts> {
        let mut out = CellCounts::zeros(coeffs.len())?;
        for i in 0..self.items.len() {
            out.add_cells(&self.entered(i, coeffs)?);
        }
        Ok(out)
    }

    pub fn counts_for(&self, polys: &[Polynomial]) -> Result<CellCounts> {
        let coeffs: Vec<&[f64]> = polys.iter().map(|p| p.coeffs()).collect();
        self.counts(&coeffs)
    }
}
