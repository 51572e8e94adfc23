//! Small hand-built networks with known serviceability behaviour.

use crate::network::{build_network, EdgeId, EdgeSet, InfraNetwork, NodeRole};

use NodeRole::{Demand as D, Supply as S, Transshipment as T};

const BASE: (f64, f64) = (35.10, -89.95);
const STEP: f64 = 0.02;

fn place(roles: &[(NodeRole, f64, f64)]) -> Vec<(NodeRole, f64, f64)> {
    roles
        .iter()
        .map(|&(r, dy, dx)| (r, BASE.0 + dy * STEP, BASE.1 + dx * STEP))
        .collect()
}

/// Supply - transshipment - demand, `L = 2`.
pub fn line3() -> InfraNetwork {
    build_network(&place(&[(S, 0.0, 0.0), (T, 0.0, 1.0), (D, 0.0, 2.0)]), &[(0, 1), (1, 2)], 2)
        .expect("valid fixture")
}

/// Nine-node power network: one plant (node 0), towers {1, 3, 4} and houses
/// {2, 5, 6, 7, 8}. House 2 hangs off towers 1 and 3, so losing the (1, 2)
/// line never cuts it off. `L = 3`.
pub fn feeder9() -> InfraNetwork {
    let nodes = place(&[
        (S, 0.0, 0.0),
        (T, 1.0, -1.0),
        (D, 2.0, -1.0),
        (T, 1.0, 0.0),
        (T, 1.0, 1.0),
        (D, 2.0, 0.0),
        (D, 2.0, 0.5),
        (D, 2.0, 1.0),
        (D, 2.0, 2.0),
    ]);
    let edges = [
        (0, 1),
        (0, 3),
        (0, 4),
        (1, 2),
        (2, 3),
        (3, 5),
        (3, 6),
        (4, 7),
        (4, 8),
        (5, 7),
    ];
    build_network(&nodes, &edges, 3).expect("valid fixture")
}

/// Failures on lines (1,2), (3,6) and (4,8): houses 6 and 8 lose service,
/// the (1,2) failure is invisible to serviceability.
pub fn feeder9_failures(net: &InfraNetwork) -> EdgeSet {
    EdgeSet::from_ids(net.edge_count(), [EdgeId(3), EdgeId(6), EdgeId(8)])
}

/// Supply hub with three demand leaves, `L = 1`; every edge is the only
/// route to its leaf.
pub fn star4() -> InfraNetwork {
    build_network(
        &place(&[(S, 0.0, 0.0), (D, 1.0, 0.0), (D, 0.0, 1.0), (D, -1.0, 0.0)]),
        &[(0, 1), (0, 2), (0, 3)],
        1,
    )
    .expect("valid fixture")
}

/// 3x3 grid with supplies at two opposite corners and `L = 2`, so the
/// centre and the off-diagonal corners depend on the hop bound.
pub fn bounded_grid() -> InfraNetwork {
    let mut nodes = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let role = match (r, c) {
                (0, 0) | (2, 2) => S,
                (1, 1) => T,
                _ => D,
            };
            nodes.push((role, r as f64, c as f64));
        }
    }
    let mut edges = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let i = r * 3 + c;
            if c + 1 < 3 {
                edges.push((i, i + 1));
            }
            if r + 1 < 3 {
                edges.push((i, i + 3));
            }
        }
    }
    build_network(&place(&nodes), &edges, 2).expect("valid fixture")
}

/// Eight-node ring with four chords, one supply and `L = 3`.
pub fn chorded_ring() -> InfraNetwork {
    let roles = [S, D, T, D, D, T, D, D];
    let nodes: Vec<_> = roles
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let angle = i as f64 * std::f64::consts::TAU / 8.0;
            (r, angle.sin() * 2.0, angle.cos() * 2.0)
        })
        .collect();
    let mut edges: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
    edges.extend([(0, 4), (1, 5), (2, 6), (3, 7)]);
    build_network(&place(&nodes), &edges, 3).expect("valid fixture")
}
