//! The configuration space `X_s = S^1 × S^2 × S^4 × ... × S^{2^{s-1}}` and its
//! embedding into tuples of polynomials.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cells::MAX_FACTORS;
use crate::error::{Error, Result};
use crate::polyalg::{degree_schedule, MonomialBasis, Polynomial};
use crate::rng::{label, substream};

const UNIT_TOL: f64 = 1e-12;

/// Ambient length of block `j` (1-based): `2^{j-1} + 1`.
pub fn block_len(j: usize) -> usize {
    (1 << (j - 1)) + 1
}

/// A point of `X_s`: `s` unit vectors, block `j` in `R^{2^{j-1}+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct XsPoint {
    blocks: Vec<Vec<f64>>,
}

impl XsPoint {
    pub fn new(blocks: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&blocks)?;
        if blocks.iter().any(|b| (norm(b) - 1.0).abs() > UNIT_TOL) {
            return Err(Error::InvalidArgument("every block must have unit norm"));
        }
        Ok(Self { blocks })
    }

    /// Normalizes every block.
    pub fn retract(mut blocks: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&blocks)?;
        for (j, b) in blocks.iter_mut().enumerate() {
            let len = norm(b);
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::ZeroBlock(j + 1));
            }
            b.iter_mut().for_each(|x| *x /= len);
        }
        Ok(Self { blocks })
    }

    /// Uniform on each sphere factor (normalized Gaussian blocks).
    pub fn random<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Result<Self> {
        if s == 0 || s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        loop {
            let blocks: Vec<Vec<f64>> =
                (1..=s).map(|j| (0..block_len(j)).map(|_| StandardNormal.sample(rng)).collect()).collect();
            if let Ok(x) = Self::retract(blocks) {
                return Ok(x);
            }
        }
    }

    pub fn random_point(s: usize, seed: u64) -> Result<Self> {
        Self::random(s, &mut substream(seed, label::RESTART, 0))
    }

    pub fn s(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<f64>> {
        self.blocks
    }

    /// Block `j`, 1-based.
    pub fn block(&self, j: usize) -> &[f64] {
        &self.blocks[j - 1]
    }

    /// Sum of sphere dimensions, `2^s - 1`.
    pub fn intrinsic_dim(&self) -> usize {
        (1 << self.s()) - 1
    }

    /// `Fl_j`: negates block `j`.
    pub fn flip(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.s() {
            return Err(Error::IndexOutOfRange { index: j, len: self.s() });
        }
        let mut out = self.clone();
        out.blocks[j - 1].iter_mut().for_each(|x| *x = -*x);
        Ok(out)
    }

    /// Applies `Fl_j` for every set bit `j-1` of `mask`.
    pub fn flip_mask(&self, mask: u32) -> Self {
        let mut out = self.clone();
        for (j, b) in out.blocks.iter_mut().enumerate() {
            if mask >> j & 1 == 1 {
                b.iter_mut().for_each(|x| *x = -*x);
            }
        }
        out
    }

    /// Moves along the tangent projection of `direction`, then retracts.
    pub fn tangent_step(&self, direction: &[Vec<f64>], h: f64) -> Result<Self> {
        if direction.len() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), got: direction.len() });
        }
        let mut raw = Vec::with_capacity(self.s());
        for (x, d) in self.blocks.iter().zip(direction) {
            if d.len() != x.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), got: d.len() });
            }
            let radial: f64 = x.iter().zip(d).map(|(a, b)| a * b).sum();
            raw.push(x.iter().zip(d).map(|(xi, di)| xi + h * (di - radial * xi)).collect());
        }
        Self::retract(raw)
    }

    /// Euclidean distance in the ambient product.
    pub fn distance(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)))
            .sum::<f64>()
            .sqrt()
    }
}

fn check_shape(blocks: &[Vec<f64>]) -> Result<()> {
    if blocks.is_empty() || blocks.len() > MAX_FACTORS {
        return Err(Error::TooManyFactors(blocks.len()));
    }
    for (j, b) in blocks.iter().enumerate() {
        if b.len() != block_len(j + 1) {
            return Err(Error::DimensionMismatch { expected: block_len(j + 1), got: b.len() });
        }
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Identification of sphere factor `j` with the unit sphere of a
/// `(2^{j-1}+1)`-dimensional coordinate subspace of `Poly_{D_j}(R^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    schedule: Vec<usize>,
    bases: Vec<Arc<MonomialBasis>>,
    indices: Vec<Vec<usize>>,
}

impl Embedding {
    /// Block `j` spans the first `2^{j-1}+1` graded-lex monomials of
    /// `Poly_{D_j}`.
    pub fn new(n: usize, s: usize) -> Result<Self> {
        let indices = (1..=s).map(|j| (0..block_len(j)).collect()).collect();
        Self::with_indices(n, s, indices)
    }

    /// Block `j` spans the listed monomials of `Poly_{D_j}` (distinct,
    /// `2^{j-1}+1` of them).
    pub fn with_indices(n: usize, s: usize, indices: Vec<Vec<usize>>) -> Result<Self> {
        if s == 0 || s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        let schedule = degree_schedule(n, s)?;
        if indices.len() != s {
            return Err(Error::DimensionMismatch { expected: s, got: indices.len() });
        }
        let mut bases = Vec::with_capacity(s);
        for (j, (&d, idx)) in schedule.iter().zip(&indices).enumerate() {
            let basis = Arc::new(MonomialBasis::new(n, d)?);
            if idx.len() != block_len(j + 1) {
                return Err(Error::DimensionMismatch { expected: block_len(j + 1), got: idx.len() });
            }
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != idx.len() || sorted.last().is_some_and(|&m| m >= basis.len()) {
                return Err(Error::InvalidArgument("subspace monomials must be distinct basis indices"));
            }
            bases.push(basis);
        }
        Ok(Self { n, schedule, bases, indices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.schedule.len()
    }

    /// `D_1, ..., D_s`.
    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    /// `D = Σ D_j`, the degree bound of the product polynomial.
    pub fn total_degree(&self) -> usize {
        self.schedule.iter().sum()
    }

    pub fn bases(&self) -> &[Arc<MonomialBasis>] {
        &self.bases
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// Full-basis coefficient vectors of `P_1, ..., P_s`.
    pub fn coeffs(&self, x: &XsPoint) -> Result<Vec<Vec<f64>>> {
        if x.s() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), got: x.s() });
        }
        Ok(x.blocks()
            .iter()
            .zip(&self.indices)
            .zip(&self.bases)
            .map(|((b, idx), basis)| {
                let mut c = vec![0.0; basis.len()];
                for (&i, &v) in idx.iter().zip(b) {
                    c[i] = v;
                }
                c
            })
            .collect())
    }

    pub fn to_polys(&self, x: &XsPoint) -> Result<Vec<Polynomial>> {
        self.coeffs(x)?.into_iter().zip(&self.bases).map(|(c, b)| Polynomial::new(b.clone(), c)).collect()
    }
}

/// Polynomial tuple of `x` under the default embedding into `R^n`.
pub fn to_polys(x: &XsPoint, n: usize) -> Result<Vec<Polynomial>> {
    Embedding::new(n, x.s())?.to_polys(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(s: usize, seed: u64) -> XsPoint {
        XsPoint::random_point(s, seed).unwrap()
    }

    #[test]
    fn flips_are_commuting_involutions() {
        let x = sample(3, 1);
        assert_eq!(x.flip(2).unwrap().flip(2).unwrap(), x);
        assert_eq!(x.flip(1).unwrap().flip(2).unwrap(), x.flip(2).unwrap().flip(1).unwrap());
        for b in x.flip(3).unwrap().blocks() {
            assert!((norm(b) - 1.0).abs() < 1e-12);
        }
        assert_eq!(x.flip(4), Err(Error::IndexOutOfRange { index: 4, len: 3 }));
        assert_eq!(x.flip_mask(0b101), x.flip(1).unwrap().flip(3).unwrap());
    }

    #[test]
    fn random_points_are_unit() {
        for seed in 0..20 {
            let x = sample(5, seed);
            assert_eq!(x.intrinsic_dim(), 31);
            for (j, b) in x.blocks().iter().enumerate() {
                assert_eq!(b.len(), block_len(j + 1));
                assert!((norm(b) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn retract_and_zero_step_are_identity() {
        let x = sample(4, 2);
        let y = XsPoint::retract(x.blocks().to_vec()).unwrap();
        assert!(x.distance(&y) < 1e-15);
        let dir: Vec<Vec<f64>> = x.blocks().iter().map(|b| b.iter().map(|v| v + 0.3).collect()).collect();
        assert_eq!(x.tangent_step(&dir, 0.0).unwrap(), y);
        assert_eq!(XsPoint::retract(vec![vec![0.0, 0.0]]), Err(Error::ZeroBlock(1)));
    }

    #[test]
    fn tangent_step_moves_and_stays_unit() {
        let x = sample(3, 3);
        let dir: Vec<Vec<f64>> = x.blocks().iter().map(|b| b.iter().rev().copied().collect()).collect();
        let y = x.tangent_step(&dir, 0.1).unwrap();
        assert!(x.distance(&y) > 0.0);
        XsPoint::new(y.into_blocks()).unwrap();
    }

    #[test]
    fn single_block_in_plane_is_affine_in_x() {
        let x = XsPoint::new(vec![vec![0.6, 0.8]]).unwrap();
        let p = to_polys(&x, 2).unwrap();
        assert_eq!(p.len(), 1);
        let want = Polynomial::from_terms(2, &[(0.6, &[0, 0]), (0.8, &[1, 0])]).unwrap();
        assert_eq!(p[0].coeffs(), want.coeffs());
    }

    #[test]
    fn embedding_preserves_norms_and_degrees() {
        for seed in 0..10 {
            let x = sample(4, seed);
            let emb = Embedding::new(2, 4).unwrap();
            let polys = emb.to_polys(&x).unwrap();
            let mut prod = polys[0].clone();
            for (j, p) in polys.iter().enumerate() {
                assert!((p.coeff_norm() - 1.0).abs() < 1e-12);
                assert!(p.degree().unwrap() <= emb.schedule()[j]);
                if j > 0 {
                    prod = prod.mul(p).unwrap();
                }
            }
            assert!(prod.degree().unwrap() <= emb.total_degree());
            assert_eq!(emb.total_degree(), 7);
        }
    }

    #[test]
    fn flip_negates_one_polynomial() {
        let x = sample(3, 9);
        let emb = Embedding::new(3, 3).unwrap();
        let p = emb.to_polys(&x).unwrap();
        let q = emb.to_polys(&x.flip(2).unwrap()).unwrap();
        assert_eq!(q[0], p[0]);
        assert_eq!(q[1], p[1].neg());
        assert_eq!(q[2], p[2]);
    }

    #[test]
    fn custom_subspace() {
        let emb = Embedding::with_indices(2, 1, vec![vec![0, 2]]).unwrap();
        let x = XsPoint::new(vec![vec![0.0, 1.0]]).unwrap();
        let y = Polynomial::from_terms(2, &[(1.0, &[0, 1])]).unwrap();
        assert_eq!(emb.to_polys(&x).unwrap()[0].coeffs(), y.coeffs());
        assert!(Embedding::with_indices(2, 1, vec![vec![1, 1]]).is_err());
    }
}
