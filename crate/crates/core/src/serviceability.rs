//! Serviced demand sets via hop-bounded multi-source BFS from all supply nodes.
//!
//! A demand node is serviced when some supply node reaches it in at most `L`
//! hops once the failed edges are removed. Supply and transshipment nodes are
//! never members of the serviced set.

use std::collections::VecDeque;

use crate::network::{EdgeId, EdgeSet, InfraNetwork, NodeId, NodeRole, NodeSet};

/// Demand nodes that keep service; always a subset of `V_D`.
pub type ServicedSet = NodeSet;

const UNREACHED: u32 = u32::MAX;

/// Reusable buffers for repeated bounded BFS runs over the same network.
#[derive(Clone, Debug)]
pub struct BoundedBfs {
    dist: Vec<u32>,
    queue: VecDeque<NodeId>,
}

impl BoundedBfs {
    pub fn new(net: &InfraNetwork) -> Self {
        Self {
            dist: vec![UNREACHED; net.node_count()],
            queue: VecDeque::with_capacity(net.node_count()),
        }
    }

    /// Labels every node within `L` hops of a supply node, skipping edges in
    /// `failed` and the optional extra edge.
    pub fn run(&mut self, net: &InfraNetwork, failed: &EdgeSet, extra: Option<EdgeId>) {
        let bound = net.hop_bound() as u32;
        self.dist.clear();
        self.dist.resize(net.node_count(), UNREACHED);
        self.queue.clear();
        for &s in net.supply_nodes() {
            self.dist[s.0] = 0;
            self.queue.push_back(s);
        }
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u.0];
            if du == bound {
                continue;
            }
            for &(v, e) in net.neighbors(u) {
                if self.dist[v.0] != UNREACHED || failed.contains(e) || extra == Some(e) {
                    continue;
                }
                self.dist[v.0] = du + 1;
                self.queue.push_back(v);
            }
        }
    }

    /// Hop distance of `node` from the nearest supply node, if within `L`.
    pub fn distance(&self, node: NodeId) -> Option<u32> {
        match self.dist[node.0] {
            UNREACHED => None,
            d => Some(d),
        }
    }

    #[inline]
    pub fn reached(&self, node: NodeId) -> bool {
        self.dist[node.0] != UNREACHED
    }

    pub fn serviced(&self, net: &InfraNetwork) -> ServicedSet {
        NodeSet::from_ids(
            net.node_count(),
            net.demand_nodes().iter().copied().filter(|&d| self.reached(d)),
        )
    }

    pub fn serviced_count(&self, net: &InfraNetwork) -> usize {
        net.demand_nodes().iter().filter(|&&d| self.reached(d)).count()
    }

    /// Whether every node in `nodes` is reached.
    pub fn covers(&self, nodes: &NodeSet) -> bool {
        nodes.iter().all(|n| self.dist.get(n.0).is_some_and(|&d| d != UNREACHED))
    }

    /// Edges outside `failed` whose individual removal would change some hop
    /// distance within the bound. Uses the labels of the last `run` with the
    /// same `failed` set and no extra edge.
    ///
    /// Removing any other edge leaves every distance, and hence the serviced
    /// set, unchanged: such an edge either joins nodes of the same layer or
    /// unreached nodes, or it is one of several links from the previous layer
    /// into its deeper endpoint.
    pub fn distance_critical_edges(&self, net: &InfraNetwork, failed: &EdgeSet) -> EdgeSet {
        let mut parents = vec![0u32; net.node_count()];
        for (i, &(u, v)) in net.edges().iter().enumerate() {
            if failed.contains(EdgeId(i)) {
                continue;
            }
            if let Some(child) = self.child_endpoint(u, v) {
                parents[child.0] += 1;
            }
        }
        let mut critical = EdgeSet::empty(net.edge_count());
        for (i, &(u, v)) in net.edges().iter().enumerate() {
            if failed.contains(EdgeId(i)) {
                continue;
            }
            if let Some(child) = self.child_endpoint(u, v) {
                if parents[child.0] == 1 {
                    critical.insert(EdgeId(i));
                }
            }
        }
        critical
    }

    /// The deeper endpoint when the edge links consecutive BFS layers.
    fn child_endpoint(&self, u: NodeId, v: NodeId) -> Option<NodeId> {
        let (du, dv) = (self.dist[u.0], self.dist[v.0]);
        if du == UNREACHED || dv == UNREACHED {
            None
        } else if du + 1 == dv {
            Some(v)
        } else if dv + 1 == du {
            Some(u)
        } else {
            None
        }
    }
}

/// Demand nodes with a path of at most `L` edges to some supply node in the
/// network with `failed` removed.
pub fn serviced_set(net: &InfraNetwork, failed: &EdgeSet) -> ServicedSet {
    let mut bfs = BoundedBfs::new(net);
    bfs.run(net, failed, None);
    bfs.serviced(net)
}

/// `true` iff every connectivity probe is still serviced under `failed`.
pub fn is_feasible(net: &InfraNetwork, failed: &EdgeSet, qc: &NodeSet) -> bool {
    let mut bfs = BoundedBfs::new(net);
    bfs.run(net, failed, None);
    qc.iter().all(|n| n.0 < net.node_count() && net.role(n) == NodeRole::Demand && bfs.reached(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;
    use crate::fixtures::{feeder9_failures, feeder9};

    fn line() -> InfraNetwork {
        build_network(
            &[
                (NodeRole::Supply, 0.0, 0.0),
                (NodeRole::Transshipment, 0.0, 0.0),
                (NodeRole::Demand, 0.0, 0.0),
            ],
            &[(0, 1), (1, 2)],
            2,
        )
        .unwrap()
    }

    fn nodes(net: &InfraNetwork, ids: &[usize]) -> NodeSet {
        NodeSet::from_ids(net.node_count(), ids.iter().map(|&i| NodeId(i)))
    }

    fn edges(net: &InfraNetwork, ids: &[usize]) -> EdgeSet {
        EdgeSet::from_ids(net.edge_count(), ids.iter().map(|&i| EdgeId(i)))
    }

    #[test]
    fn line_graph_service() {
        let net = line();
        assert_eq!(serviced_set(&net, &edges(&net, &[])), nodes(&net, &[2]));
        assert!(serviced_set(&net, &edges(&net, &[1])).is_empty());
        // One hop short of the demand node.
        let short = net.with_hop_bound(1).unwrap();
        assert!(serviced_set(&short, &edges(&short, &[])).is_empty());
    }

    #[test]
    fn redundant_failure_keeps_service() {
        let net = feeder9();
        let failed = feeder9_failures(&net);
        // Demand nodes 3, 6, 8 (1-based) stay serviced; 7 and 9 are cut.
        assert_eq!(serviced_set(&net, &failed), nodes(&net, &[2, 5, 7]));
        // Dropping the redundant failure (2,3) leaves S unchanged.
        let mut without = failed.clone();
        without.remove(EdgeId(3));
        assert_eq!(serviced_set(&net, &without), serviced_set(&net, &failed));
    }

    #[test]
    fn feasibility_tracks_qc_containment() {
        let net = line();
        let qc = nodes(&net, &[2]);
        assert!(is_feasible(&net, &edges(&net, &[]), &qc));
        assert!(!is_feasible(&net, &edges(&net, &[0]), &qc));
        assert!(is_feasible(&net, &edges(&net, &[0, 1]), &nodes(&net, &[])));
    }

    #[test]
    fn critical_edges_are_exactly_the_distance_changing_ones() {
        let net = feeder9();
        for mask in 0u32..(1 << net.edge_count()) {
            let failed = EdgeSet::from_ids(
                net.edge_count(),
                (0..net.edge_count()).filter(|i| mask >> i & 1 == 1).map(EdgeId),
            );
            let mut bfs = BoundedBfs::new(&net);
            bfs.run(&net, &failed, None);
            let base: Vec<_> = (0..net.node_count()).map(|i| bfs.distance(NodeId(i))).collect();
            let critical = bfs.distance_critical_edges(&net, &failed);
            for e in net.edge_ids().filter(|&e| !failed.contains(e)) {
                let mut probe = BoundedBfs::new(&net);
                probe.run(&net, &failed, Some(e));
                let after: Vec<_> = (0..net.node_count()).map(|i| probe.distance(NodeId(i))).collect();
                assert_eq!(critical.contains(e), after != base, "mask {mask:#b}, edge {e}");
            }
        }
    }
}
