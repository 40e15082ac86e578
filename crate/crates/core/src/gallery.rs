//! Small graphs with known automorphisms, used by tests, examples and the CLI docs.
//!
//! JSON copies live in `crates/core/data/`.

use crate::graph::{build_matrix, MatrixKind, WeightedDigraph};
use crate::matrix::MatrixC;
use crate::permutation::Permutation;

/// 12 vertices: a triangle on `{1,2,3}`, the circulant `C₉(1,3)` on `4..=12`,
/// and each `k ∈ {1,2,3}` joined to the circulant vertices congruent to `k` mod 3.
pub fn order9_graph() -> WeightedDigraph {
    let mut g = WeightedDigraph::new(12, false).expect("n > 0");
    for (i, j) in [(1, 2), (2, 3), (1, 3)] {
        g.add_edge(i, j, 1.0).expect("valid edge");
    }
    for a in 0..9 {
        for s in [1, 3] {
            let b = (a + s) % 9;
            g.add_edge(4 + a, 4 + b, 1.0).expect("valid edge");
        }
    }
    for k in 1..=3 {
        for v in 4..=12 {
            if v % 3 == k % 3 {
                g.add_edge(k, v, 1.0).expect("valid edge");
            }
        }
    }
    g
}

pub fn order9_phi() -> Permutation {
    Permutation::parse_cycles("(1 2 3)(4 5 6 7 8 9 10 11 12)", 12).expect("valid cycles")
}

pub fn order9_adjacency() -> MatrixC {
    build_matrix(&order9_graph(), MatrixKind::Adjacency).expect("adjacency always builds")
}

/// 18 vertices: a 12-cycle on `1..=12`, a 6-cycle on `13..=18`, and
/// `13 + h` joined to `h + 1` and `h + 7` for `h = 0..6`.
pub fn order12_graph() -> WeightedDigraph {
    let mut g = WeightedDigraph::new(18, false).expect("n > 0");
    for i in 1..=12 {
        g.add_edge(i, i % 12 + 1, 1.0).expect("valid edge");
    }
    for h in 0..6 {
        g.add_edge(13 + h, 13 + (h + 1) % 6, 1.0)
            .expect("valid edge");
        g.add_edge(13 + h, h + 1, 1.0).expect("valid edge");
        g.add_edge(13 + h, h + 7, 1.0).expect("valid edge");
    }
    g
}

pub fn order12_phi() -> Permutation {
    Permutation::parse_cycles("(1 2 3 4 5 6 7 8 9 10 11 12)(13 14 15 16 17 18)", 18)
        .expect("valid cycles")
}

pub fn order12_adjacency() -> MatrixC {
    build_matrix(&order12_graph(), MatrixKind::Adjacency).expect("adjacency always builds")
}
