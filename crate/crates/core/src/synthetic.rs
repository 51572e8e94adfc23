//! Desk-scale synthetic networks (grid, ring, star) with seeded role
//! assignment, plus a matching default fragility map.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hazard::{FragilityMap, Vulnerability};
use crate::network::{build_network, InfraNetwork, NodeRole};

/// Anchor of synthetic layouts, in degrees.
pub const ORIGIN: (f64, f64) = (35.10, -89.95);
/// Grid spacing in degrees (about 4-5 km at this latitude).
pub const SPACING_DEG: f64 = 0.045;

const DEMAND_SHARE: f64 = 0.75;

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("size {size} too small for a {kind} network (minimum 3)")]
    BadSize { kind: SyntheticKind, size: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyntheticKind {
    Grid,
    Ring,
    Star,
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::Grid => "grid",
            SyntheticKind::Ring => "ring",
            SyntheticKind::Star => "star",
        })
    }
}

impl FromStr for SyntheticKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "grid" => Ok(SyntheticKind::Grid),
            "ring" => Ok(SyntheticKind::Ring),
            "star" => Ok(SyntheticKind::Star),
            other => Err(format!("unknown network kind '{other}' (expected grid, ring or star)")),
        }
    }
}

/// Generates a synthetic network.
///
/// * `Grid`: `size x size` lattice, corner supplies, `L = size - 1`.
/// * `Ring`: `size` nodes in a cycle, supplies at 0 and (for `size >= 6`)
///   `size / 2`, `L = size / 2`.
/// * `Star`: supply hub with `size - 1` demand leaves, `L = 1`.
///
/// Non-supply grid and ring nodes are demand with probability 0.75 and
/// transshipment otherwise; at least one is always demand.
pub fn generate(kind: SyntheticKind, size: usize, seed: u64) -> Result<InfraNetwork, SyntheticError> {
    if size < 3 {
        return Err(SyntheticError::BadSize { kind, size });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut nodes, edges, hop_bound) = match kind {
        SyntheticKind::Grid => grid(size),
        SyntheticKind::Ring => ring(size),
        SyntheticKind::Star => star(size),
    };
    if kind != SyntheticKind::Star {
        let mut any_demand = false;
        for node in nodes.iter_mut().filter(|n| n.0 != NodeRole::Supply) {
            node.0 = if rng.gen::<f64>() < DEMAND_SHARE {
                any_demand = true;
                NodeRole::Demand
            } else {
                NodeRole::Transshipment
            };
        }
        if !any_demand {
            if let Some(node) = nodes.iter_mut().find(|n| n.0 != NodeRole::Supply) {
                node.0 = NodeRole::Demand;
            }
        }
    }
    Ok(build_network(&nodes, &edges, hop_bound).expect("synthetic layouts are valid"))
}

type Layout = (Vec<(NodeRole, f64, f64)>, Vec<(usize, usize)>, usize);

fn grid(k: usize) -> Layout {
    let mut nodes = Vec::with_capacity(k * k);
    for r in 0..k {
        for c in 0..k {
            let corner = (r == 0 || r == k - 1) && (c == 0 || c == k - 1);
            let role = if corner { NodeRole::Supply } else { NodeRole::Demand };
            nodes.push((role, ORIGIN.0 + r as f64 * SPACING_DEG, ORIGIN.1 + c as f64 * SPACING_DEG));
        }
    }
    let mut edges = Vec::with_capacity(2 * k * (k - 1));
    for r in 0..k {
        for c in 0..k {
            let i = r * k + c;
            if c + 1 < k {
                edges.push((i, i + 1));
            }
            if r + 1 < k {
                edges.push((i, i + k));
            }
        }
    }
    (nodes, edges, k - 1)
}

fn ring(n: usize) -> Layout {
    let radius = SPACING_DEG * n as f64 / std::f64::consts::TAU;
    let nodes = (0..n)
        .map(|i| {
            let angle = i as f64 * std::f64::consts::TAU / n as f64;
            let supply = i == 0 || (n >= 6 && i == n / 2);
            let role = if supply { NodeRole::Supply } else { NodeRole::Demand };
            (role, ORIGIN.0 + radius * angle.sin(), ORIGIN.1 + radius * angle.cos())
        })
        .collect();
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    (nodes, edges, n / 2)
}

fn star(n: usize) -> Layout {
    let mut nodes = vec![(NodeRole::Supply, ORIGIN.0, ORIGIN.1)];
    for i in 1..n {
        let angle = i as f64 * std::f64::consts::TAU / (n - 1) as f64;
        nodes.push((
            NodeRole::Demand,
            ORIGIN.0 + SPACING_DEG * angle.sin(),
            ORIGIN.1 + SPACING_DEG * angle.cos(),
        ));
    }
    let edges = (1..n).map(|i| (0, i)).collect();
    (nodes, edges, 1)
}

/// Fragility used with synthetic networks: demand nodes follow the
/// distribution-node curve (median 1.15 g, beta 0.60); supply and
/// transshipment nodes are invulnerable.
pub fn default_fragility() -> FragilityMap {
    FragilityMap::new()
        .with_role(NodeRole::Supply, Vulnerability::INVULNERABLE)
        .with_role(NodeRole::Transshipment, Vulnerability::INVULNERABLE)
        .with_role(
            NodeRole::Demand,
            Vulnerability::fragile(1.15, 0.60).expect("positive parameters"),
        )
}
