//! The built-in reference network: 3 objects, 4 users, 8 edges, with the
//! published values of its operator, eigen data and matrix powers.

use alloc::vec::Vec;

use crate::graph::{build_graph, BipartiteGraph, EdgeRecord, IsolatedPolicy};

/// `(user, object)` pairs of the reference network, ordered so that first
/// appearance gives `o1, o2, o3` and `u1, …, u4` indices `0, 1, 2, …`.
pub const REFERENCE_EDGES: [(&str, &str); 8] = [
    ("u1", "o1"),
    ("u2", "o1"),
    ("u2", "o2"),
    ("u3", "o2"),
    ("u2", "o3"),
    ("u3", "o3"),
    ("u4", "o1"),
    ("u4", "o3"),
];

/// Diffusion operator of the reference network, row-major.
pub const REFERENCE_W: [[f64; 3]; 3] = [
    [11.0 / 18.0, 1.0 / 6.0, 5.0 / 18.0],
    [1.0 / 9.0, 5.0 / 12.0, 5.0 / 18.0],
    [5.0 / 18.0, 5.0 / 12.0, 4.0 / 9.0],
];

/// Rank-1 limit `W* = e_r e_lᵀ`.
pub const REFERENCE_LIMIT: [[f64; 3]; 3] = [
    [3.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0],
    [2.0 / 8.0, 2.0 / 8.0, 2.0 / 8.0],
    [3.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0],
];

pub const REFERENCE_RIGHT_EIGENVECTOR: [f64; 3] = [3.0, 2.0, 3.0];
pub const REFERENCE_ALPHA: f64 = 1.0 / 8.0;
/// Subdominant eigenvalues as printed (4 decimals).
pub const REFERENCE_LAMBDA2: f64 = 0.4034;
pub const REFERENCE_LAMBDA3: f64 = 0.0689;
/// Rounds until `Wᴺ` matches `W*` at 4 decimals.
pub const REFERENCE_ROUNDS: usize = 11;

/// Printed tables of `W²` … `W¹¹` (4 decimals), index 0 is `W²`.
pub const REFERENCE_POWERS: [[[f64; 3]; 3]; 10] = [
    [
        [0.4691, 0.2870, 0.3395],
        [0.1914, 0.3079, 0.2701],
        [0.3395, 0.4051, 0.3904],
    ],
    [
        [0.4129, 0.3392, 0.3609],
        [0.2262, 0.2727, 0.2587],
        [0.3609, 0.3881, 0.3804],
    ],
    [
        [0.3903, 0.3606, 0.3693],
        [0.2404, 0.2591, 0.2536],
        [0.3693, 0.3803, 0.3771],
    ],
    [
        [0.3812, 0.3692, 0.3727],
        [0.2461, 0.2537, 0.2514],
        [0.3727, 0.3772, 0.3758],
    ],
    [
        [0.3775, 0.3727, 0.3741],
        [0.2484, 0.2515, 0.2506],
        [0.3741, 0.3759, 0.3753],
    ],
    [
        [0.3760, 0.3741, 0.3746],
        [0.2494, 0.2506, 0.2502],
        [0.3746, 0.3754, 0.3751],
    ],
    [
        [0.3754, 0.3746, 0.3749],
        [0.2497, 0.2502, 0.2501],
        [0.3749, 0.3751, 0.3751],
    ],
    [
        [0.3752, 0.3748, 0.3749],
        [0.2499, 0.2501, 0.2500],
        [0.3749, 0.3751, 0.3750],
    ],
    [
        [0.3751, 0.3749, 0.3750],
        [0.2500, 0.2500, 0.2500],
        [0.3750, 0.3750, 0.3750],
    ],
    [
        [0.3750, 0.3750, 0.3750],
        [0.2500, 0.2500, 0.2500],
        [0.3750, 0.3750, 0.3750],
    ],
];

pub fn reference_records() -> Vec<EdgeRecord> {
    REFERENCE_EDGES
        .iter()
        .map(|&(u, o)| EdgeRecord::new(u, o).expect("nonempty tokens"))
        .collect()
}

pub fn reference_graph() -> BipartiteGraph {
    build_graph(&reference_records(), IsolatedPolicy::Reject).expect("reference graph is valid")
}

/// The reference network in the edge-list text format.
pub fn reference_edge_list() -> &'static str {
    "# reference network: 3 objects, 4 users\n\
     u1\to1\nu2\to1\nu2\to2\nu3\to2\nu2\to3\nu3\to3\nu4\to1\nu4\to3\n"
}
