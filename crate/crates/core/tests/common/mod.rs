//! Seeded random graphs and dense oracles shared by the integration tests.
//!
//! The oracles build `W` entry by entry from the adjacency matrix and use
//! nalgebra for powers and eigenvalues, so they share no code with the
//! factored operator they check.
#![allow(dead_code)]

use massdiff_core::graph::IsolatedPolicy;
use massdiff_core::BipartiteGraph;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_SIDE: usize = 64;

/// Connected bipartite graph with `2..=64` objects and users: a random
/// spanning tree alternating between the two sides, plus extra edges with a
/// per-graph density in `[0.02, 0.3)`.
pub fn random_connected_graph(seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=MAX_SIDE);
    let m = rng.gen_range(2..=MAX_SIDE);
    random_connected_graph_sized(&mut rng, n, m)
}

pub fn random_connected_graph_sized(rng: &mut ChaCha8Rng, n: usize, m: usize) -> BipartiteGraph {
    let density = rng.gen_range(0.02..0.3);
    let mut edges = vec![(0usize, 0usize)];
    let mut nodes: Vec<(bool, usize)> = (1..n)
        .map(|j| (true, j))
        .chain((1..m).map(|l| (false, l)))
        .collect();
    // Fisher-Yates with the shared rng keeps every draw on one stream.
    for i in (1..nodes.len()).rev() {
        let k = rng.gen_range(0..=i);
        nodes.swap(i, k);
    }
    let mut placed_objects = vec![0usize];
    let mut placed_users = vec![0usize];
    for (is_object, idx) in nodes {
        if is_object {
            let u = placed_users[rng.gen_range(0..placed_users.len())];
            edges.push((idx, u));
            placed_objects.push(idx);
        } else {
            let o = placed_objects[rng.gen_range(0..placed_objects.len())];
            edges.push((o, idx));
            placed_users.push(idx);
        }
    }
    for j in 0..n {
        for l in 0..m {
            if rng.gen_bool(density) {
                edges.push((j, l));
            }
        }
    }
    BipartiteGraph::from_edges(n, m, &edges, IsolatedPolicy::Reject).expect("valid graph")
}

/// `count` graphs from consecutive seeds.
pub fn corpus(count: usize, base_seed: u64) -> Vec<BipartiteGraph> {
    (0..count as u64)
        .map(|i| random_connected_graph(base_seed.wrapping_add(i)))
        .collect()
}

pub fn adjacency(graph: &BipartiteGraph) -> DMatrix<f64> {
    DMatrix::from_fn(graph.n_objects(), graph.n_users(), |j, l| {
        if graph.has_edge(j, l) {
            1.0
        } else {
            0.0
        }
    })
}

/// `w_ij = (1/k(o_j)) Σ_l a_il a_jl / k(u_l)`, straight from the definition.
pub fn oracle_w(graph: &BipartiteGraph) -> DMatrix<f64> {
    let a = adjacency(graph);
    let n = graph.n_objects();
    let ko: Vec<f64> = (0..n).map(|j| a.row(j).sum()).collect();
    let ku: Vec<f64> = (0..graph.n_users()).map(|l| a.column(l).sum()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        let shared: f64 = (0..graph.n_users())
            .map(|l| a[(i, l)] * a[(j, l)] / ku[l])
            .sum();
        shared / ko[j]
    })
}

/// `W* = e_r e_lᵀ` from object degrees.
pub fn oracle_limit(graph: &BipartiteGraph) -> DMatrix<f64> {
    let a = adjacency(graph);
    let n = graph.n_objects();
    let ko: Vec<f64> = (0..n).map(|j| a.row(j).sum()).collect();
    let total: f64 = ko.iter().sum();
    DMatrix::from_fn(n, n, |i, _| ko[i] / total)
}

pub fn oracle_power(w: &DMatrix<f64>, rounds: usize) -> DMatrix<f64> {
    let mut p = DMatrix::identity(w.nrows(), w.ncols());
    for _ in 0..rounds {
        p = w * &p;
    }
    p
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Eigenvalues of `W`, descending, through the symmetric similar matrix
/// `O^{-1/2} (A U⁻¹ Aᵀ) O^{-1/2}`.
pub fn oracle_eigenvalues(graph: &BipartiteGraph) -> Vec<f64> {
    let a = adjacency(graph);
    let n = graph.n_objects();
    let ku: Vec<f64> = (0..graph.n_users()).map(|l| a.column(l).sum()).collect();
    let ko: Vec<f64> = (0..n).map(|j| a.row(j).sum()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        let shared: f64 = (0..graph.n_users())
            .map(|l| a[(i, l)] * a[(j, l)] / ku[l])
            .sum();
        shared / (ko[i] * ko[j]).sqrt()
    });
    let mut values: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// `O^{-1/2} W O^{1/2}` built from [`oracle_w`]. It is symmetric exactly
/// when `W` is self-adjoint under the `1/k(o)`-weighted inner product.
pub fn oracle_symmetrized(graph: &BipartiteGraph) -> DMatrix<f64> {
    let w = oracle_w(graph);
    let ko: Vec<f64> = graph.object_degrees().iter().map(|&d| d as f64).collect();
    DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| {
        w[(i, j)] * (ko[j] / ko[i]).sqrt()
    })
}

pub fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn random_resources(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..10.0)).collect()
}
