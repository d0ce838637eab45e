//! Balance functionals as the Walsh–Hadamard transform of cell counts.
//!
//! `G_v = Σ_w (-1)^{v·w} N(w)`. All `G_v` with `v ≠ 0` vanish exactly when the
//! table `N` is constant.

use alloc::vec::Vec;
use core::ops::{Add, Sub};

use crate::cells::{parity, CellCounts, MAX_FACTORS};
use crate::error::{Error, Result};

/// In-place unnormalized Walsh–Hadamard butterfly; `values.len()` must be a
/// power of two.
pub fn wht_in_place<T>(values: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    debug_assert!(values.len().is_power_of_two());
    let mut half = 1;
    while half < values.len() {
        for block in values.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Values `G_v` for every `v ∈ Z_2^s`, indexed like sign vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    s: usize,
    values: Vec<T>,
}

impl<T> Spectrum<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    /// Transform of an arbitrary table of length `2^s`.
    pub fn of_table(s: usize, mut table: Vec<T>) -> Result<Self> {
        if s > MAX_FACTORS {
            return Err(Error::TooManyFactors(s));
        }
        if table.len() != 1 << s {
            return Err(Error::DimensionMismatch { expected: 1 << s, got: table.len() });
        }
        wht_in_place(&mut table);
        Ok(Self { s, values: table })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, v: u32) -> T {
        self.values[v as usize]
    }

    /// Applies the transform again: `2^s` times the original table.
    pub fn inverse_scaled(&self) -> Vec<T> {
        let mut t = self.values.clone();
        wht_in_place(&mut t);
        t
    }
}

/// Exact integer spectrum of a count table.
pub fn wht(counts: &CellCounts) -> Spectrum<i64> {
    let table: Vec<i64> = counts.as_slice().iter().map(|&c| c as i64).collect();
    Spectrum::of_table(counts.s(), table).expect("count tables have valid size")
}

impl Spectrum<i64> {
    /// `Σ_{v ≠ 0} G_v²`.
    pub fn nonzero_energy(&self) -> f64 {
        self.values.iter().skip(1).map(|&g| (g as f64) * (g as f64)).sum()
    }
}

impl Spectrum<f64> {
    pub fn nonzero_energy(&self) -> f64 {
        self.values.iter().skip(1).map(|g| g * g).sum()
    }
}

/// True when every nonzero frequency vanishes.
pub fn is_equidistributed(counts: &CellCounts) -> bool {
    wht(counts).values().iter().skip(1).all(|&g| g == 0)
}

/// Both sides of the counting identity
/// `Σ_{v·u=1} G_v = 2^{s-1} (N(0) - N(u))` for nonzero `u`.
pub fn lemma_identity_check(counts: &CellCounts, u: u32) -> Result<(i64, i64)> {
    if u == 0 {
        return Err(Error::ZeroFrequency);
    }
    let s = counts.s();
    if (u as usize) >= (1 << s) {
        return Err(Error::InvalidArgument("frequency outside Z_2^s"));
    }
    let g = wht(counts);
    let lhs = (0..1u32 << s).filter(|&v| parity(v, u) == 1).map(|v| g.get(v)).sum();
    let table = counts.as_slice();
    let rhs = (1i64 << (s - 1)) * (table[0] as i64 - table[u as usize] as i64);
    Ok((lhs, rhs))
}
