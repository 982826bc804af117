//! Mass diffusion (network-based inference) on bipartite object/user graphs.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`graph`]: validated bipartite graphs, degrees and connected components.
//! * [`diffusion`]: the column-stochastic operator `W = (A U⁻¹)(O⁻¹ A)ᵀ`,
//!   applied in factored form, and multi-round resource propagation.
//! * [`spectral`]: the stationary eigenpair, the rank-1 limit `W*`, the
//!   subdominant eigenvalue modulus and the number of rounds until `Wᴺ ≈ W*`.
//! * [`ranking`]: global degree ranking, per-user top-k lists for finite and
//!   infinite round counts.
//! * [`eval`]: train/probe splitting and ranking metrics.
//!
//! IO, JSON and the command line live in the `massdiff` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dense;
pub mod diffusion;
mod error;
pub mod eval;
pub mod fixture;
pub mod graph;
pub mod ranking;
pub mod spectral;

pub use dense::DenseMatrix;
pub use diffusion::{DiffusionOperator, ResourceVector, UserResources};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, Component, EdgeRecord, IsolatedPolicy};
pub use ranking::{RankedEntry, RankedList};
pub use spectral::{LimitOperator, SpectralSummary, StationaryPair};
