//! Real root isolation for univariate polynomials.
//!
//! Roots of `p` are separated by the roots of `p'`, so the critical points
//! (found recursively) cut `[-B, B]` into intervals on which `p` is monotone.
//! Each interval holds at most one root, located by bisection on a sign
//! change. Roots of even multiplicity without a sign change are not reported;
//! they never separate sign cells.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const TRIM_RELATIVE: f64 = 1e-13;
const MAX_BISECTIONS: usize = 200;

/// Horner evaluation of ascending coefficients.
pub fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Drops leading coefficients that are negligible against the largest one.
pub fn trimmed(coeffs: &[f64]) -> &[f64] {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut len = coeffs.len();
    while len > 0 && coeffs[len - 1].abs() <= TRIM_RELATIVE * scale {
        len -= 1;
    }
    &coeffs[..len]
}

/// Sorted real roots (at sign changes) of the polynomial with ascending
/// coefficients `coeffs`. The zero polynomial and constants have none.
pub fn isolate_real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::RootIsolation("non-finite coefficient"));
    }
    isolate(trimmed(coeffs))
}

fn isolate(p: &[f64]) -> Result<Vec<f64>> {
    let deg = match p.len() {
        0 | 1 => return Ok(Vec::new()),
        l => l - 1,
    };
    if deg == 1 {
        return Ok(alloc::vec![-p[0] / p[1]]);
    }
    let lead = p[deg];
    let bound = 1.0 + p[..deg].iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
    if !bound.is_finite() {
        return Err(Error::RootIsolation("root bound overflow"));
    }
    let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let mut cuts = alloc::vec![-bound];
    for c in isolate(trimmed(&dp))? {
        cuts.push(c.clamp(-bound, bound));
    }
    cuts.push(bound);

    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(p, lo), horner(p, hi));
        if !flo.is_finite() || !fhi.is_finite() {
            return Err(Error::RootIsolation("overflow evaluating on the root bound"));
        }
        if flo == 0.0 {
            push_distinct(&mut roots, lo);
        }
        if flo * fhi < 0.0 {
            push_distinct(&mut roots, bisect(p, lo, hi, flo));
        }
    }
    if horner(p, bound) == 0.0 {
        push_distinct(&mut roots, bound);
    }
    if roots.len() > deg {
        return Err(Error::RootIsolation("more roots than the degree allows"));
    }
    Ok(roots)
}

fn bisect(p: &[f64], mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let neg_at_lo = flo < 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn push_distinct(roots: &mut Vec<f64>, r: f64) {
    if let Some(&last) = roots.last() {
        if (r - last).abs() <= 1e-12 * r.abs().max(1.0) {
            return;
        }
    }
    roots.push(r);
}
