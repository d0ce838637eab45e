//! Polynomial partitioning for finite families of varieties.
//!
//! Given varieties `γ_1, ..., γ_N` in `R^n` and a number of factors `s`, the
//! engine searches tuples `(P_1, ..., P_s)` drawn from the product of spheres
//! `X_s = Π_j S^{2^{j-1}}` (embedded as unit-norm polynomials of degree
//! `D_j`) for one whose `2^s` sign cells are met by equally many varieties.
//! Balance is measured by the Walsh–Hadamard spectrum of the cell counts.
//!
//! The crate also carries a testbed for the topological input: equivariant
//! maps `X_s -> R^{2^s-1}` that change sign under block flips, the explicit
//! model map with exactly `2^s` regular zeros, and homotopy continuation from
//! those zeros to zeros of perturbed maps.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cells;
pub mod equivariant;
pub mod error;
pub mod mollifier;
pub mod polyalg;
pub mod rng;
pub mod roots;
pub mod solver;
pub mod spectrum;
pub mod sphereprod;
pub mod varieties;

pub use cells::{CellCounts, CellSign, LineMode, SamplingConfig, SignVector};
pub use error::{Error, Result};
pub use mollifier::MollConfig;
pub use polyalg::{MonomialBasis, Polynomial};
pub use spectrum::Spectrum;
pub use sphereprod::{Embedding, XsPoint};
pub use varieties::{VarietyKind, VarietySpec, WeightedCloud};
