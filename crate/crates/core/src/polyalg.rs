//! Dense multivariate polynomials over a graded-lexicographic monomial basis.
//!
//! A [`MonomialBasis`] enumerates every exponent tuple of total degree at most
//! `D` in `n` variables, constant first, then degree by degree with the
//! exponent of `x_1` decreasing inside each degree (`1, x, y, x², xy, y², ...`).
//! A [`Polynomial`] is a coefficient vector aligned to such a basis.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

// Needed without std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dimension of the space of polynomials of degree at most `degree` in `n`
/// variables, `C(n + degree, n)`.
pub fn basis_dim(n: usize, degree: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc.checked_mul(degree as u128 + i).ok_or(Error::Overflow("basis dimension"))? / i;
    }
    usize::try_from(acc).map_err(|_| Error::Overflow("basis dimension"))
}

/// Degrees `D_1..D_s`, where `D_j` is the least `D >= 1` whose polynomial
/// space in `n` variables has dimension exceeding `2^(j-1)`.
pub fn degree_schedule(n: usize, s: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::InvalidArgument("ambient dimension must be at least 1"));
    }
    if s == 0 || s > 63 {
        return Err(Error::InvalidArgument("number of factors must be in 1..=63"));
    }
    let mut out = Vec::with_capacity(s);
    let mut degree = 1usize;
    for j in 1..=s {
        let target = 1u128 << (j - 1);
        while (basis_dim(n, degree)? as u128) <= target {
            degree += 1;
        }
        out.push(degree);
    }
    Ok(out)
}

/// Ordered exponent tuples of all monomials of degree at most `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    degree: usize,
    exps: Vec<u32>,
}

impl MonomialBasis {
    pub fn new(n: usize, degree: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be at least 1"));
        }
        let len = basis_dim(n, degree)?;
        let mut exps = Vec::with_capacity(len * n);
        let mut cur = vec![0u32; n];
        for d in 0..=degree {
            push_degree(&mut exps, &mut cur, 0, d as u32);
        }
        debug_assert_eq!(exps.len(), len * n);
        Ok(Self { n, degree, exps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, index: usize) -> &[u32] {
        &self.exps[index * self.n..(index + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.exps.chunks_exact(self.n)
    }

    /// Position of an exponent tuple, if it belongs to this basis.
    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        if exps.len() != self.n {
            return None;
        }
        let total: u32 = exps.iter().sum();
        if total as usize > self.degree {
            return None;
        }
        let mut lo = 0;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match graded_lex_cmp(self.exponents(mid), exps) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Values of every monomial at `x`.
    pub fn monomials_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pows = self.power_table(x)?;
        Ok(self.iter().map(|e| self.monomial_from_table(&pows, e)).collect())
    }

    fn power_table(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let stride = self.degree + 1;
        let mut pows = vec![1.0; self.n * stride];
        for (i, &xi) in x.iter().enumerate() {
            for k in 1..stride {
                pows[i * stride + k] = pows[i * stride + k - 1] * xi;
            }
        }
        Ok(pows)
    }

    fn monomial_from_table(&self, pows: &[f64], e: &[u32]) -> f64 {
        let stride = self.degree + 1;
        e.iter().enumerate().map(|(i, &ei)| pows[i * stride + ei as usize]).product()
    }

    /// Univariate restriction of every monomial to the line `a + t u`, as
    /// ascending coefficient vectors in `t` of length `degree + 1`.
    pub fn line_restrictions(&self, a: &[f64], u: &[f64]) -> Result<Vec<Vec<f64>>> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: a.len() });
        }
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: u.len() });
        }
        let stride = self.degree + 1;
        // powers[i][k] = (a_i + t u_i)^k
        let mut powers: Vec<Vec<Vec<f64>>> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(stride);
            row.push(vec![1.0]);
            for k in 1..stride {
                let prev: &Vec<f64> = &row[k - 1];
                let mut next = vec![0.0; prev.len() + 1];
                for (d, &c) in prev.iter().enumerate() {
                    next[d] += c * a[i];
                    next[d + 1] += c * u[i];
                }
                row.push(next);
            }
            powers.push(row);
        }
        Ok(self
            .iter()
            .map(|e| {
                let mut acc = vec![0.0; stride];
                acc[0] = 1.0;
                let mut deg = 0usize;
                for (i, &ei) in e.iter().enumerate() {
                    if ei == 0 {
                        continue;
                    }
                    let f = &powers[i][ei as usize];
                    let mut prod = vec![0.0; stride];
                    for (p, &x) in acc.iter().enumerate().take(deg + 1) {
                        for (q, &y) in f.iter().enumerate() {
                            prod[p + q] += x * y;
                        }
                    }
                    deg += ei as usize;
                    acc = prod;
                }
                acc
            })
            .collect())
    }
}

fn push_degree(out: &mut Vec<u32>, cur: &mut [u32], pos: usize, remaining: u32) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.extend_from_slice(cur);
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        push_degree(out, cur, pos + 1, remaining - e);
    }
    cur[pos] = 0;
}

/// Graded-lexicographic comparison: lower total degree first, then larger
/// leading exponents first.
pub fn graded_lex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

/// Upper bound on `|∇Q(x)|` over `|x| <= radius` for every polynomial `Q`
/// on `basis` with unit Euclidean coefficient norm.
///
/// Cauchy–Schwarz over the coefficients gives
/// `|∇Q|² <= Σ_m Σ_i (∂_i m)²`, and `|∂_i m(x)| <= e_i max(1,|x|)^(|e|-1)`.
pub fn grad_bound(basis: &MonomialBasis, radius: f64) -> f64 {
    let rho = radius.max(1.0);
    let mut acc = 0.0;
    for e in basis.iter() {
        let total: u32 = e.iter().sum();
        if total == 0 {
            continue;
        }
        let scale = rho.powi(2 * (total as i32 - 1));
        for &ei in e {
            acc += (ei * ei) as f64 * scale;
        }
    }
    acc.sqrt()
}

/// A real polynomial stored densely against a shared [`MonomialBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(basis: Arc<MonomialBasis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: Arc<MonomialBasis>) -> Self {
        let coeffs = vec![0.0; basis.len()];
        Self { basis, coeffs }
    }

    /// Builds a polynomial from `(coefficient, exponents)` terms; repeated
    /// exponents accumulate.
    pub fn from_terms(n: usize, terms: &[(f64, &[u32])]) -> Result<Self> {
        let degree = terms.iter().map(|(_, e)| e.iter().sum::<u32>() as usize).max().unwrap_or(0);
        let basis = Arc::new(MonomialBasis::new(n, degree)?);
        let mut p = Self::zero(basis);
        for &(c, e) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: e.len() });
            }
            let idx = p.basis.index_of(e).expect("degree covers every term");
            p.coeffs[idx] += c;
        }
        Ok(p)
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Highest total degree carrying a nonzero coefficient; `None` for the
    /// zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, _)| self.basis.exponents(i).iter().sum::<u32>() as usize)
            .max()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let pows = self.basis.power_table(x)?;
        Ok(self.basis.iter().zip(&self.coeffs).map(|(e, c)| c * self.basis.monomial_from_table(&pows, e)).sum())
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let pows = self.basis.power_table(x)?;
        let stride = self.basis.degree + 1;
        let n = self.basis.n;
        let mut g = vec![0.0; n];
        for (e, &c) in self.basis.iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            for (i, gi) in g.iter_mut().enumerate() {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for (k, &ek) in e.iter().enumerate() {
                    let p = if k == i { ek - 1 } else { ek };
                    term *= pows[k * stride + p as usize];
                }
                *gi += term;
            }
        }
        Ok(g)
    }

    /// Coefficients (ascending in `t`) of `t -> p(a + t u)`.
    pub fn restrict_to_line(&self, a: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let rows = self.basis.line_restrictions(a, u)?;
        Ok(combine_rows(&rows, &self.coeffs, self.basis.degree + 1))
    }

    pub fn neg(&self) -> Self {
        Self { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        let basis = Arc::new(MonomialBasis::new(self.n(), self.basis.degree + other.basis.degree)?);
        let mut out = Polynomial::zero(basis);
        let mut e = vec![0u32; self.n()];
        for (ea, &ca) in self.basis.iter().zip(&self.coeffs) {
            if ca == 0.0 {
                continue;
            }
            for (eb, &cb) in other.basis.iter().zip(&other.coeffs) {
                if cb == 0.0 {
                    continue;
                }
                for i in 0..e.len() {
                    e[i] = ea[i] + eb[i];
                }
                let idx = out.basis.index_of(&e).expect("product degree fits");
                out.coeffs[idx] += ca * cb;
            }
        }
        Ok(out)
    }
}

/// `Σ_m coeffs[m] * rows[m]`, truncated to `len` entries.
pub(crate) fn combine_rows(rows: &[Vec<f64>], coeffs: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (row, &c) in rows.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += c * r;
        }
    }
    out
}
