//! Electrical network model: nodes with constant-current loads, resistive
//! branches and a designated substation root.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// Unordered node pair stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey(pub NodeId, pub NodeId);

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.0 == n || self.1 == n
    }

    /// The endpoint that is not `n`.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.0 == n {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub from: NodeId,
    pub to: NodeId,
    /// Series resistance in ohms.
    pub r: f64,
    /// Series reactance in ohms; parsed and written back but unused by loss math.
    pub x: Option<f64>,
}

impl Branch {
    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeLoad {
    pub node: NodeId,
    pub p_kw: f64,
    pub q_kvar: f64,
    /// Constant load current phasor in amperes at nominal voltage.
    pub i_load: Complex64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate branch between nodes {0} and {1}")]
    DuplicateBranch(NodeId, NodeId),
    #[error("branch ({0},{0}) is a self-loop")]
    SelfLoop(NodeId),
    #[error("branch ({from},{to}) references unknown node {node}")]
    UnknownNode { from: NodeId, to: NodeId, node: NodeId },
    #[error("root node {0} is not declared in the node list")]
    UnknownRoot(NodeId),
    #[error("network is disconnected: node {0} is unreachable from the root")]
    Disconnected(NodeId),
    #[error("branch ({from},{to}) has negative or non-finite resistance {r}")]
    BadResistance { from: NodeId, to: NodeId, r: f64 },
    #[error("base voltage must be positive, got {0} kV")]
    BadVoltage(f64),
}

impl NetError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            NetError::Malformed(_) => "malformed",
            NetError::DuplicateNode(_) => "duplicate-node",
            NetError::DuplicateBranch(..) => "duplicate-branch",
            NetError::SelfLoop(_) => "self-loop",
            NetError::UnknownNode { .. } => "unknown-node",
            NetError::UnknownRoot(_) => "unknown-root",
            NetError::Disconnected(_) => "disconnected",
            NetError::BadResistance { .. } => "bad-resistance",
            NetError::BadVoltage(_) => "bad-voltage",
        }
    }
}

/// Converts a nodal power demand into a constant current phasor, assuming a
/// zero voltage angle: `I = conj(S) / V`.
pub fn load_current(p_kw: f64, q_kvar: f64, v_base_kv: f64) -> Result<Complex64, NetError> {
    if v_base_kv.is_nan() || v_base_kv <= 0.0 || !v_base_kv.is_finite() {
        return Err(NetError::BadVoltage(v_base_kv));
    }
    // kVA / kV = A
    Ok(Complex64::new(p_kw, -q_kvar) / v_base_kv)
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: NodeId,
    #[serde(default)]
    p_kw: f64,
    #[serde(default)]
    q_kvar: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchDoc {
    from: NodeId,
    to: NodeId,
    r_ohm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_ohm: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    v_base_kv: f64,
    root: NodeId,
    nodes: Vec<NodeDoc>,
    branches: Vec<BranchDoc>,
}

/// A validated, immutable network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    v_base_kv: f64,
    root: NodeId,
    nodes: Vec<NodeLoad>,
    branches: Vec<Branch>,
    node_index: BTreeMap<NodeId, usize>,
    branch_index: BTreeMap<EdgeKey, usize>,
}

const BARAN_WU_33: &str = include_str!("../data/baran_wu_33.json");

impl NetworkModel {
    /// Builds and validates a network from `(id, p_kw, q_kvar)` node tuples.
    pub fn new(
        v_base_kv: f64,
        root: NodeId,
        nodes: &[(NodeId, f64, f64)],
        branches: Vec<Branch>,
    ) -> Result<Self, NetError> {
        let mut loads = Vec::with_capacity(nodes.len());
        let mut node_index = BTreeMap::new();
        for &(id, p, q) in nodes {
            if node_index.insert(id, loads.len()).is_some() {
                return Err(NetError::DuplicateNode(id));
            }
            loads.push(NodeLoad {
                node: id,
                p_kw: p,
                q_kvar: q,
                i_load: load_current(p, q, v_base_kv)?,
            });
        }
        if !node_index.contains_key(&root) {
            return Err(NetError::UnknownRoot(root));
        }
        let mut branch_index = BTreeMap::new();
        for (i, b) in branches.iter().enumerate() {
            if b.from == b.to {
                return Err(NetError::SelfLoop(b.from));
            }
            for n in [b.from, b.to] {
                if !node_index.contains_key(&n) {
                    return Err(NetError::UnknownNode { from: b.from, to: b.to, node: n });
                }
            }
            if b.r.is_nan() || b.r < 0.0 || !b.r.is_finite() {
                return Err(NetError::BadResistance { from: b.from, to: b.to, r: b.r });
            }
            if branch_index.insert(b.key(), i).is_some() {
                return Err(NetError::DuplicateBranch(b.from, b.to));
            }
        }
        let net = NetworkModel { v_base_kv, root, nodes: loads, branches, node_index, branch_index };
        if let Some(n) = net.first_unreachable() {
            return Err(NetError::Disconnected(n));
        }
        Ok(net)
    }

    pub fn parse(input: &[u8]) -> Result<Self, NetError> {
        let doc: NetworkDoc =
            serde_json::from_slice(input).map_err(|e| NetError::Malformed(e.to_string()))?;
        let nodes: Vec<_> = doc.nodes.iter().map(|n| (n.id, n.p_kw, n.q_kvar)).collect();
        let branches = doc
            .branches
            .into_iter()
            .map(|b| Branch { from: b.from, to: b.to, r: b.r_ohm, x: b.x_ohm })
            .collect();
        NetworkModel::new(doc.v_base_kv, doc.root, &nodes, branches)
    }

    pub fn to_json(&self) -> String {
        let doc = NetworkDoc {
            v_base_kv: self.v_base_kv,
            root: self.root,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc { id: n.node, p_kw: n.p_kw, q_kvar: n.q_kvar })
                .collect(),
            branches: self
                .branches
                .iter()
                .map(|b| BranchDoc { from: b.from, to: b.to, r_ohm: b.r, x_ohm: b.x })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("network document serializes")
    }

    /// Looks up a bundled dataset by name (`baran-wu-33`).
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "baran-wu-33" => Some(Self::parse(BARAN_WU_33.as_bytes()).expect("bundled dataset is valid")),
            _ => None,
        }
    }

    pub fn v_base_kv(&self) -> f64 {
        self.v_base_kv
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[NodeLoad] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.node)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, key: EdgeKey) -> Option<&Branch> {
        self.branch_index.get(&key).map(|&i| &self.branches[i])
    }

    pub fn has_node(&self, n: NodeId) -> bool {
        self.node_index.contains_key(&n)
    }

    pub fn resistance(&self, key: EdgeKey) -> Option<f64> {
        self.branch(key).map(|b| b.r)
    }

    /// Load current of `n`; zero for unknown nodes.
    pub fn load(&self, n: NodeId) -> Complex64 {
        self.node_index
            .get(&n)
            .map(|&i| self.nodes[i].i_load)
            .unwrap_or_default()
    }

    pub fn total_load(&self) -> Complex64 {
        self.nodes.iter().map(|n| n.i_load).sum()
    }

    pub fn edge_keys(&self) -> BTreeSet<EdgeKey> {
        self.branch_index.keys().copied().collect()
    }

    pub fn adjacency(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> =
            self.nodes.iter().map(|n| (n.node, BTreeSet::new())).collect();
        for b in &self.branches {
            adj.get_mut(&b.from).unwrap().insert(b.to);
            adj.get_mut(&b.to).unwrap().insert(b.from);
        }
        adj
    }

    fn first_unreachable(&self) -> Option<NodeId> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([self.root]);
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        self.nodes.iter().map(|n| n.node).find(|n| !seen.contains(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(branches: &str) -> String {
        format!(
            r#"{{"v_base_kv": 12.66, "root": 0,
                "nodes": [{{"id":0}},{{"id":1,"p_kw":10}},{{"id":2}},{{"id":3}}],
                "branches": [{branches}]}}"#
        )
    }

    #[test]
    fn load_current_matches_direct_arithmetic() {
        let i = load_current(100.0, 0.0, 12.66).unwrap();
        assert!((i.re - 100.0 / 12.66).abs() < 1e-12);
        assert_eq!(i.im, 0.0);
        assert!((i.re - 7.8989).abs() < 1e-4);

        let i = load_current(90.0, 40.0, 12.66).unwrap();
        assert!((i.re - 7.109004739336493).abs() < 1e-12);
        assert!((i.im + 3.1595576619273302).abs() < 1e-12);

        assert_eq!(load_current(0.0, 0.0, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(load_current(1.0, 1.0, 0.0), Err(NetError::BadVoltage(0.0)));
        assert_eq!(load_current(1.0, 1.0, -3.0), Err(NetError::BadVoltage(-3.0)));
    }

    #[test]
    fn builtin_network_shape() {
        let net = NetworkModel::builtin("baran-wu-33").unwrap();
        assert_eq!(net.nodes().len(), 33);
        assert_eq!(net.branches().len(), 37);
        assert_eq!(net.root(), 0);
        let total = net.total_load() * net.v_base_kv();
        assert!((total.re - 3715.0).abs() < 1e-9);
        assert!((total.im + 2300.0).abs() < 1e-9);
    }

    #[test]
    fn smallest_dyad_parses() {
        let text = r#"{"v_base_kv": 1.0, "root": 0, "nodes": [{"id":0},{"id":1,"p_kw":2}],
                       "branches": [{"from":0,"to":1,"r_ohm":0.5}]}"#;
        let net = NetworkModel::parse(text.as_bytes()).unwrap();
        assert_eq!(net.branches().len(), 1);
        assert_eq!(net.load(1), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn rejects_invalid_documents() {
        let err = |s: String| NetworkModel::parse(s.as_bytes()).unwrap_err();
        let e = err(doc(r#"{"from":0,"to":1,"r_ohm":1},{"from":2,"to":3,"r_ohm":1}"#));
        assert_eq!(e.code(), "disconnected");
        let e = err(doc(
            r#"{"from":0,"to":1,"r_ohm":1},{"from":1,"to":0,"r_ohm":1},{"from":1,"to":2,"r_ohm":1},{"from":2,"to":3,"r_ohm":1}"#,
        ));
        assert_eq!(e, NetError::DuplicateBranch(1, 0));
        let e = err(doc(r#"{"from":0,"to":7,"r_ohm":1}"#));
        assert_eq!(e, NetError::UnknownNode { from: 0, to: 7, node: 7 });
        let e = err(doc(r#"{"from":2,"to":2,"r_ohm":1}"#));
        assert_eq!(e.code(), "self-loop");
        let e = err(doc(r#"{"from":0,"to":1,"r_ohm":-1}"#));
        assert_eq!(e.code(), "bad-resistance");
        let e = err("{\"v_base_kv\": 1".into());
        assert_eq!(e.code(), "malformed");
        let e = NetworkModel::parse(
            br#"{"v_base_kv": 1.0, "root": 9, "nodes": [{"id":0}], "branches": []}"#,
        )
        .unwrap_err();
        assert_eq!(e, NetError::UnknownRoot(9));
    }

    #[test]
    fn serialization_round_trips() {
        let net = NetworkModel::builtin("baran-wu-33").unwrap();
        let again = NetworkModel::parse(net.to_json().as_bytes()).unwrap();
        assert_eq!(net, again);
    }
}
