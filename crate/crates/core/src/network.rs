//! Immutable infrastructure network: typed node roles, canonical edge list and
//! an adjacency index, plus the JSON network file format.

use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense 0-based node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Dense 0-based edge identifier; indexes the canonical edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Identifiers that index a dense `0..n` universe.
pub trait DenseId: Copy + Ord + fmt::Debug {
    fn index(self) -> usize;
    fn from_index(index: usize) -> Self;
}

impl DenseId for NodeId {
    #[inline]
    fn index(self) -> usize {
        self.0
    }
    #[inline]
    fn from_index(index: usize) -> Self {
        NodeId(index)
    }
}

impl DenseId for EdgeId {
    #[inline]
    fn index(self) -> usize {
        self.0
    }
    #[inline]
    fn from_index(index: usize) -> Self {
        EdgeId(index)
    }
}

/// Subset of a dense id universe, stored as a membership mask.
///
/// Iteration is always in ascending id order, which is what keeps greedy
/// tie-breaking and sampling reproducible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IdSet<I> {
    mask: Vec<bool>,
    len: usize,
    _id: PhantomData<I>,
}

pub type EdgeSet = IdSet<EdgeId>;
pub type NodeSet = IdSet<NodeId>;

impl<I: DenseId> IdSet<I> {
    pub fn empty(universe: usize) -> Self {
        Self {
            mask: vec![false; universe],
            len: 0,
            _id: PhantomData,
        }
    }

    pub fn full(universe: usize) -> Self {
        Self {
            mask: vec![true; universe],
            len: universe,
            _id: PhantomData,
        }
    }

    /// Builds a set from ids. Panics if an id lies outside the universe.
    pub fn from_ids<T: IntoIterator<Item = I>>(universe: usize, ids: T) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    /// Size of the underlying universe, not the number of members.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, id: I) -> bool {
        self.mask.get(id.index()).copied().unwrap_or(false)
    }

    /// Returns `true` if the id was newly inserted.
    pub fn insert(&mut self, id: I) -> bool {
        let slot = &mut self.mask[id.index()];
        if *slot {
            false
        } else {
            *slot = true;
            self.len += 1;
            true
        }
    }

    /// Returns `true` if the id was present.
    pub fn remove(&mut self, id: I) -> bool {
        match self.mask.get_mut(id.index()) {
            Some(slot) if *slot => {
                *slot = false;
                self.len -= 1;
                true
            }
            _ => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = I> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| I::from_index(i))
    }

    pub fn to_vec(&self) -> Vec<I> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.len <= other.len && self.iter().all(|id| other.contains(id))
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.iter().filter(|&id| other.contains(id)).count()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for id in other.iter() {
            if id.index() < out.universe() {
                out.insert(id);
            }
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for id in other.iter() {
            out.remove(id);
        }
        out
    }
}

impl<I: DenseId> fmt::Debug for IdSet<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Role of a node in the flow network. The three roles partition `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Supply,
    Demand,
    Transshipment,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::Supply => "supply",
            NodeRole::Demand => "demand",
            NodeRole::Transshipment => "transshipment",
        }
    }
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub role: NodeRole,
    /// WGS84 degrees.
    pub lat: f64,
    /// WGS84 degrees.
    pub lon: f64,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("edge {edge} duplicates edge {first} between nodes {u} and {v}")]
    DuplicateEdge {
        edge: usize,
        first: usize,
        u: usize,
        v: usize,
    },
    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("network has no supply node")]
    NoSupplyNode,
    #[error("network has no demand node")]
    NoDemandNode,
    #[error("{what} index {index} out of range (len {len})")]
    BadIndex {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("hop bound L must be at least 1")]
    ZeroHopBound,
    #[error("node {node} has non-finite coordinates ({lat}, {lon})")]
    BadCoordinate { node: usize, lat: f64, lon: f64 },
    #[error("{what} ids must be contiguous from 0: position {position} has id {found}")]
    NonContiguousId {
        what: &'static str,
        position: usize,
        found: usize,
    },
    #[error("malformed network file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Validated, immutable infrastructure network.
#[derive(Clone, Debug)]
pub struct InfraNetwork {
    nodes: Vec<Node>,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    hop_bound: usize,
    supply: Vec<NodeId>,
    demand: Vec<NodeId>,
}

/// Builds and validates a network. Edge ids are assigned in input order.
pub fn build_network(
    nodes: &[(NodeRole, f64, f64)],
    edges: &[(usize, usize)],
    hop_bound: usize,
) -> Result<InfraNetwork, NetworkError> {
    if hop_bound == 0 {
        return Err(NetworkError::ZeroHopBound);
    }
    let n = nodes.len();
    let mut node_list = Vec::with_capacity(n);
    for (i, &(role, lat, lon)) in nodes.iter().enumerate() {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(NetworkError::BadCoordinate { node: i, lat, lon });
        }
        node_list.push(Node { role, lat, lon });
    }

    let mut adjacency: Vec<Vec<(NodeId, EdgeId)>> = vec![Vec::new(); n];
    let mut seen = std::collections::HashMap::with_capacity(edges.len());
    let mut edge_list = Vec::with_capacity(edges.len());
    for (idx, &(u, v)) in edges.iter().enumerate() {
        for endpoint in [u, v] {
            if endpoint >= n {
                return Err(NetworkError::BadIndex {
                    what: "node",
                    index: endpoint,
                    len: n,
                });
            }
        }
        if u == v {
            return Err(NetworkError::SelfLoop { edge: idx, node: u });
        }
        let key = (u.min(v), u.max(v));
        if let Some(&first) = seen.get(&key) {
            return Err(NetworkError::DuplicateEdge {
                edge: idx,
                first,
                u: key.0,
                v: key.1,
            });
        }
        seen.insert(key, idx);
        let (a, b) = (NodeId(key.0), NodeId(key.1));
        edge_list.push((a, b));
        adjacency[u].push((NodeId(v), EdgeId(idx)));
        adjacency[v].push((NodeId(u), EdgeId(idx)));
    }

    let supply: Vec<NodeId> = (0..n)
        .filter(|&i| node_list[i].role == NodeRole::Supply)
        .map(NodeId)
        .collect();
    let demand: Vec<NodeId> = (0..n)
        .filter(|&i| node_list[i].role == NodeRole::Demand)
        .map(NodeId)
        .collect();
    if supply.is_empty() {
        return Err(NetworkError::NoSupplyNode);
    }
    if demand.is_empty() {
        return Err(NetworkError::NoDemandNode);
    }

    Ok(InfraNetwork {
        nodes: node_list,
        edges: edge_list,
        adjacency,
        hop_bound,
        supply,
        demand,
    })
}

impl InfraNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Service path bound `L` (maximum hop count from a supply node).
    pub fn hop_bound(&self) -> usize {
        self.hop_bound
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, NetworkError> {
        self.nodes.get(id.0).ok_or(NetworkError::BadIndex {
            what: "node",
            index: id.0,
            len: self.nodes.len(),
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn role(&self, id: NodeId) -> NodeRole {
        self.nodes[id.0].role
    }

    /// Endpoints of `e` in ascending id order.
    pub fn edge_endpoints(&self, e: EdgeId) -> Result<(NodeId, NodeId), NetworkError> {
        self.edges.get(e.0).copied().ok_or(NetworkError::BadIndex {
            what: "edge",
            index: e.0,
            len: self.edges.len(),
        })
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    /// `(neighbor, connecting edge)` pairs in insertion order.
    #[inline]
    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[id.0]
    }

    pub fn supply_nodes(&self) -> &[NodeId] {
        &self.supply
    }

    pub fn demand_nodes(&self) -> &[NodeId] {
        &self.demand
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.role == role)
            .map(|(i, _)| NodeId(i))
    }

    pub fn role_counts(&self) -> RoleCounts {
        let mut counts = RoleCounts::default();
        for node in &self.nodes {
            match node.role {
                NodeRole::Supply => counts.supply += 1,
                NodeRole::Demand => counts.demand += 1,
                NodeRole::Transshipment => counts.transshipment += 1,
            }
        }
        counts
    }

    pub fn empty_edge_set(&self) -> EdgeSet {
        EdgeSet::empty(self.edges.len())
    }

    pub fn empty_node_set(&self) -> NodeSet {
        NodeSet::empty(self.nodes.len())
    }

    /// Same topology with a different hop bound.
    pub fn with_hop_bound(&self, hop_bound: usize) -> Result<InfraNetwork, NetworkError> {
        if hop_bound == 0 {
            return Err(NetworkError::ZeroHopBound);
        }
        let mut net = self.clone();
        net.hop_bound = hop_bound;
        Ok(net)
    }

    pub fn from_file_repr(file: &NetworkFile) -> Result<InfraNetwork, NetworkError> {
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (pos, n) in file.nodes.iter().enumerate() {
            if n.id != pos {
                return Err(NetworkError::NonContiguousId {
                    what: "node",
                    position: pos,
                    found: n.id,
                });
            }
            nodes.push((n.role, n.lat, n.lon));
        }
        let mut edges = Vec::with_capacity(file.edges.len());
        for (pos, e) in file.edges.iter().enumerate() {
            if e.id != pos {
                return Err(NetworkError::NonContiguousId {
                    what: "edge",
                    position: pos,
                    found: e.id,
                });
            }
            edges.push((e.u, e.v));
        }
        build_network(&nodes, &edges, file.hop_bound)
    }

    pub fn to_file_repr(&self) -> NetworkFile {
        NetworkFile {
            hop_bound: self.hop_bound,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeRecord {
                    id,
                    role: n.role,
                    lat: n.lat,
                    lon: n.lon,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(id, &(u, v))| EdgeRecord { id, u: u.0, v: v.0 })
                .collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<InfraNetwork, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        Self::from_file_repr(&file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("network serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<InfraNetwork> {
        use anyhow::Context;
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading network file '{}'", path.display()))?;
        Self::from_json_str(&text)
            .with_context(|| format!("parsing network file '{}'", path.display()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoleCounts {
    pub supply: usize,
    pub demand: usize,
    pub transshipment: usize,
}

/// On-disk network representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(rename = "L")]
    pub hop_bound: usize,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub role: NodeRole,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: usize,
    pub u: usize,
    pub v: usize,
}
