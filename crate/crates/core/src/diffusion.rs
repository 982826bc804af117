//! Resource spreading between objects and users.
//!
//! One round moves resource objects → users → objects. An object with
//! resource `f(o_j)` gives `f(o_j)/k(o_j)` to each of its users, then every
//! user hands `f(u_l)/k(u_l)` back to each object it collected. As a matrix
//! this is `W = (A U⁻¹)(O⁻¹ A)ᵀ` with
//! `w_ij = (1/k(o_j)) Σ_l a_il a_jl / k(u_l)`, which is column-stochastic.
//!
//! `W` is dense even when `A` is sparse, so [`DiffusionOperator`] keeps the
//! two sparse stages and only [`DiffusionOperator::materialize`] builds the
//! `n × n` matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use crate::dense::DenseMatrix;
use crate::graph::BipartiteGraph;
use crate::{Error, Result};

/// Size cap for dense materialization.
pub const DEFAULT_MAX_DENSE: usize = 1024;

/// Resource mass per object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResourceVector(pub Vec<f64>);

/// Resource mass per user, after the first half of a round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserResources(pub Vec<f64>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl $name {
            pub fn zeros(len: usize) -> Self {
                $name(vec![0.0; len])
            }

            pub fn total(&self) -> f64 {
                self.0.iter().sum()
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                $name(v)
            }
        }
    };
}

vector_newtype!(ResourceVector);
vector_newtype!(UserResources);

/// Factored column-stochastic diffusion operator over a connected graph.
#[derive(Debug, Clone)]
pub struct DiffusionOperator<'g> {
    graph: &'g BipartiteGraph,
    inv_object_degree: Vec<f64>,
    inv_user_degree: Vec<f64>,
}

impl<'g> DiffusionOperator<'g> {
    /// Fails with [`Error::Disconnected`] unless the graph is one component.
    pub fn new(graph: &'g BipartiteGraph) -> Result<Self> {
        graph.require_connected()?;
        Ok(Self::new_unchecked(graph))
    }

    /// Skips the connectivity check. Every linear-algebra identity still holds
    /// per component, but the spectral results assume connectivity.
    pub fn new_unchecked(graph: &'g BipartiteGraph) -> Self {
        DiffusionOperator {
            graph,
            inv_object_degree: graph
                .object_degrees()
                .iter()
                .map(|&k| 1.0 / k as f64)
                .collect(),
            inv_user_degree: graph
                .user_degrees()
                .iter()
                .map(|&k| 1.0 / k as f64)
                .collect(),
        }
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    /// Operator dimension, the number of objects.
    pub fn dim(&self) -> usize {
        self.graph.n_objects()
    }

    /// `f(u_l) = Σ_j a_jl f(o_j) / k(o_j)`.
    pub fn spread_to_users(&self, f: &[f64]) -> Result<UserResources> {
        self.check_objects(f.len())?;
        let mut out = UserResources::zeros(self.graph.n_users());
        self.spread_to_users_into(f, &mut out);
        Ok(out)
    }

    /// `f'(o_i) = Σ_l a_il f(u_l) / k(u_l)`.
    pub fn spread_to_objects(&self, u: &[f64]) -> Result<ResourceVector> {
        if u.len() != self.graph.n_users() {
            return Err(Error::DimensionMismatch {
                what: "user resource vector",
                expected: self.graph.n_users(),
                found: u.len(),
            });
        }
        let mut out = ResourceVector::zeros(self.dim());
        self.spread_to_objects_into(u, &mut out);
        Ok(out)
    }

    fn spread_to_users_into(&self, f: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (j, &mass) in f.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let share = mass * self.inv_object_degree[j];
            for &l in self.graph.object_users(j) {
                out[l] += share;
            }
        }
    }

    fn spread_to_objects_into(&self, u: &[f64], out: &mut [f64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self
                .graph
                .object_users(i)
                .iter()
                .map(|&l| u[l] * self.inv_user_degree[l])
                .sum();
        }
    }

    /// One round, `W f`.
    pub fn apply(&self, f: &[f64]) -> Result<ResourceVector> {
        self.check_objects(f.len())?;
        let mut users = vec![0.0; self.graph.n_users()];
        let mut out = ResourceVector::zeros(self.dim());
        self.apply_into(f, &mut users, &mut out);
        Ok(out)
    }

    /// `W f` into `out`, using `users` as scratch. Lengths must match the
    /// graph; this is the allocation-free inner loop of [`Self::diffuse`].
    pub fn apply_into(&self, f: &[f64], users: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.dim());
        debug_assert_eq!(users.len(), self.graph.n_users());
        debug_assert_eq!(out.len(), self.dim());
        self.spread_to_users_into(f, users);
        self.spread_to_objects_into(users, out);
    }

    /// `Wᵀ x`, i.e. `(Wᵀx)_j = (1/k(o_j)) Σ_l a_jl (1/k(u_l)) Σ_i a_il x_i`.
    pub fn apply_transpose(&self, x: &[f64]) -> Result<ResourceVector> {
        self.check_objects(x.len())?;
        let mut users = vec![0.0; self.graph.n_users()];
        for (i, &v) in x.iter().enumerate() {
            for &l in self.graph.object_users(i) {
                users[l] += v;
            }
        }
        for (l, u) in users.iter_mut().enumerate() {
            *u *= self.inv_user_degree[l];
        }
        let out = (0..self.dim())
            .map(|j| {
                let s: f64 = self.graph.object_users(j).iter().map(|&l| users[l]).sum();
                s * self.inv_object_degree[j]
            })
            .collect();
        Ok(ResourceVector(out))
    }

    /// `Wᴺ f` by `rounds` successive factored applications.
    pub fn diffuse(&self, f: &[f64], rounds: usize) -> Result<ResourceVector> {
        self.check_objects(f.len())?;
        let mut current = f.to_vec();
        let mut next = vec![0.0; self.dim()];
        let mut users = vec![0.0; self.graph.n_users()];
        for _ in 0..rounds {
            self.apply_into(&current, &mut users, &mut next);
            core::mem::swap(&mut current, &mut next);
        }
        Ok(ResourceVector(current))
    }

    /// Dense `W`, built column by column from basis images. Refused when
    /// `dim() > max_n`.
    pub fn materialize(&self, max_n: usize) -> Result<DenseMatrix> {
        let n = self.dim();
        if n > max_n {
            return Err(Error::TooLarge { n, max_n });
        }
        let mut w = DenseMatrix::zeros(n, n);
        let mut basis = vec![0.0; n];
        let mut users = vec![0.0; self.graph.n_users()];
        let mut column = vec![0.0; n];
        for j in 0..n {
            basis[j] = 1.0;
            self.apply_into(&basis, &mut users, &mut column);
            w.set_column(j, &column);
            basis[j] = 0.0;
        }
        Ok(w)
    }

    fn check_objects(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "object resource vector",
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Initial resources for user `l`: one unit on every collected object.
pub fn initial_resources(graph: &BipartiteGraph, l: usize) -> Result<ResourceVector> {
    graph.check_user(l)?;
    let mut f = ResourceVector::zeros(graph.n_objects());
    for &j in graph.user_objects(l) {
        f[j] = 1.0;
    }
    Ok(f)
}

/// Scores of all objects for user `l` after `rounds ≥ 1` rounds. Collected
/// objects are not filtered here.
pub fn score_user(op: &DiffusionOperator<'_>, l: usize, rounds: usize) -> Result<ResourceVector> {
    if rounds == 0 {
        return Err(Error::InvalidParameter(
            "scoring needs at least one diffusion round".into(),
        ));
    }
    let f = initial_resources(op.graph(), l)?;
    op.diffuse(&f, rounds)
}
