//! Biconnected partitioning, load aggregation at cutvertices and degree-2
//! edge lifting of each non-trivial component.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::graph::SimpleGraph;
use crate::netmodel::{EdgeKey, NetworkModel, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct BiconnComponent {
    pub vertices: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeKey>,
    /// The network root if it belongs here, otherwise the cutvertex through
    /// which the component is fed.
    pub root: NodeId,
    /// Own load plus the load of everything hanging below each vertex outside
    /// this component. The root entry is never read by loss computations.
    pub aggregated_loads: BTreeMap<NodeId, Complex64>,
}

impl BiconnComponent {
    /// A dyad: two nodes and the single link between them.
    pub fn is_trivial(&self) -> bool {
        self.edges.len() == 1
    }

    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.edges.iter().copied())
    }

    pub fn load(&self, n: NodeId) -> Complex64 {
        self.aggregated_loads.get(&n).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct ComponentSet {
    pub components: Vec<BiconnComponent>,
    pub cut_vertices: BTreeSet<NodeId>,
}

impl ComponentSet {
    pub fn non_trivial(&self) -> impl Iterator<Item = &BiconnComponent> {
        self.components.iter().filter(|c| !c.is_trivial())
    }

    pub fn trivial(&self) -> impl Iterator<Item = &BiconnComponent> {
        self.components.iter().filter(|c| c.is_trivial())
    }
}

struct Tarjan<'a> {
    graph: &'a SimpleGraph,
    disc: BTreeMap<NodeId, usize>,
    low: BTreeMap<NodeId, usize>,
    stack: Vec<EdgeKey>,
    blocks: Vec<BTreeSet<EdgeKey>>,
    cuts: BTreeSet<NodeId>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: NodeId, parent: Option<NodeId>) {
        let t = self.disc.len();
        self.disc.insert(v, t);
        self.low.insert(v, t);
        let mut children = 0;
        let neighbors: Vec<_> = self.graph.neighbors(v).collect();
        for w in neighbors {
            if Some(w) == parent {
                continue;
            }
            match self.disc.get(&w).copied() {
                None => {
                    children += 1;
                    self.stack.push(EdgeKey::new(v, w));
                    self.visit(w, Some(v));
                    let lw = self.low[&w];
                    if lw < self.low[&v] {
                        self.low.insert(v, lw);
                    }
                    if lw >= self.disc[&v] {
                        if parent.is_some() {
                            self.cuts.insert(v);
                        }
                        let key = EdgeKey::new(v, w);
                        let mut block = BTreeSet::new();
                        while let Some(e) = self.stack.pop() {
                            block.insert(e);
                            if e == key {
                                break;
                            }
                        }
                        self.blocks.push(block);
                    }
                }
                Some(dw) if dw < self.disc[&v] => {
                    self.stack.push(EdgeKey::new(v, w));
                    if dw < self.low[&v] {
                        self.low.insert(v, dw);
                    }
                }
                Some(_) => {}
            }
        }
        if parent.is_none() && children > 1 {
            self.cuts.insert(v);
        }
    }
}

fn bfs_distances(graph: &SimpleGraph, source: NodeId) -> BTreeMap<NodeId, usize> {
    let mut dist = BTreeMap::from([(source, 0)]);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for w in graph.neighbors(v) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

/// Splits a connected network into its biconnected components.
pub fn split_biconnected(net: &NetworkModel) -> ComponentSet {
    let mut graph = SimpleGraph::from_edges(net.edge_keys());
    for n in net.node_ids() {
        graph.add_vertex(n);
    }
    let mut tarjan = Tarjan {
        graph: &graph,
        disc: BTreeMap::new(),
        low: BTreeMap::new(),
        stack: Vec::new(),
        blocks: Vec::new(),
        cuts: BTreeSet::new(),
    };
    tarjan.visit(net.root(), None);
    let mut blocks = std::mem::take(&mut tarjan.blocks);
    let cuts = std::mem::take(&mut tarjan.cuts);
    blocks.sort_by_key(|b| *b.iter().next().unwrap());

    let dist = bfs_distances(&graph, net.root());
    let components = blocks
        .into_iter()
        .map(|edges| {
            let vertices: BTreeSet<NodeId> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
            let root = *vertices.iter().min_by_key(|v| (dist[v], **v)).unwrap();
            let mut rest = graph.clone();
            for e in &edges {
                rest.remove_edge(e.0, e.1);
            }
            let aggregated_loads = vertices
                .iter()
                .map(|&v| {
                    let hanging = rest.reachable_avoiding(v, &BTreeSet::new());
                    (v, hanging.iter().map(|&n| net.load(n)).sum())
                })
                .collect();
            BiconnComponent { vertices, edges, root, aggregated_loads }
        })
        .collect();
    ComponentSet { components, cut_vertices: cuts }
}

/// A non-trivial component reduced to a topological minor by lifting
/// degree-2 vertices.
#[derive(Debug, Clone)]
pub struct ReducedComponent {
    pub component: BiconnComponent,
    pub root: NodeId,
    pub minor_vertices: BTreeSet<NodeId>,
    pub minor_edges: BTreeSet<EdgeKey>,
    /// For each minor edge `(u, v)` with `u < v`, the component path `u, k_1, …, k_n, v`.
    pub path_map: BTreeMap<EdgeKey, Vec<NodeId>>,
    /// Valid arcs: a single outgoing arc on root-incident edges, both otherwise.
    pub arcs: BTreeSet<(NodeId, NodeId)>,
    inner_owner: BTreeMap<NodeId, EdgeKey>,
    minor: SimpleGraph,
}

impl ReducedComponent {
    pub fn minor(&self) -> &SimpleGraph {
        &self.minor
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.minor.neighbors(v)
    }

    pub fn is_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.arcs.contains(&(u, v))
    }

    /// Path of minor edge `(u, v)` oriented from `u` to `v`.
    pub fn path(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let p = &self.path_map[&EdgeKey::new(u, v)];
        if u < v {
            p.clone()
        } else {
            p.iter().rev().copied().collect()
        }
    }

    /// Inner vertices of `P_uv` in the canonical (`min → max`) order.
    pub fn inner(&self, key: EdgeKey) -> &[NodeId] {
        let p = &self.path_map[&key];
        &p[1..p.len() - 1]
    }

    /// The minor edge whose path has `n` as an inner vertex.
    pub fn inner_owner(&self, n: NodeId) -> Option<EdgeKey> {
        self.inner_owner.get(&n).copied()
    }

    pub fn inner_vertices(&self) -> impl Iterator<Item = (NodeId, EdgeKey)> + '_ {
        self.inner_owner.iter().map(|(&n, &k)| (n, k))
    }

    pub fn load(&self, n: NodeId) -> Complex64 {
        self.component.load(n)
    }
}

/// Repeatedly lifts non-root degree-2 vertices whose two neighbours are not
/// already adjacent, scanning vertex ids in ascending order until stable.
pub fn edge_lift(comp: &BiconnComponent) -> ReducedComponent {
    reduce_component(comp, true)
}

/// The component itself viewed as its own minor, every path a single edge.
pub fn without_lifting(comp: &BiconnComponent) -> ReducedComponent {
    reduce_component(comp, false)
}

fn reduce_component(comp: &BiconnComponent, lift: bool) -> ReducedComponent {
    let root = comp.root;
    let mut minor = comp.graph();
    let mut paths: BTreeMap<EdgeKey, Vec<NodeId>> =
        comp.edges.iter().map(|&e| (e, vec![e.0, e.1])).collect();

    let oriented = |paths: &BTreeMap<EdgeKey, Vec<NodeId>>, from: NodeId, to: NodeId| {
        let p = &paths[&EdgeKey::new(from, to)];
        if p[0] == from {
            p.clone()
        } else {
            p.iter().rev().copied().collect::<Vec<_>>()
        }
    };

    loop {
        if !lift {
            break;
        }
        let mut changed = false;
        let candidates: Vec<NodeId> = minor.vertices().collect();
        for v in candidates {
            if v == root || minor.degree(v) != 2 {
                continue;
            }
            let ns: Vec<NodeId> = minor.neighbors(v).collect();
            let (a, b) = (ns[0], ns[1]);
            if minor.has_edge(a, b) {
                continue;
            }
            let mut joined = oriented(&paths, a, v);
            joined.extend(oriented(&paths, v, b).into_iter().skip(1));
            if joined[0] > *joined.last().unwrap() {
                joined.reverse();
            }
            paths.remove(&EdgeKey::new(a, v));
            paths.remove(&EdgeKey::new(v, b));
            paths.insert(EdgeKey::new(a, b), joined);
            minor.remove_vertex(v);
            minor.add_edge(a, b);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut inner_owner = BTreeMap::new();
    for (&k, p) in &paths {
        for &n in &p[1..p.len() - 1] {
            inner_owner.insert(n, k);
        }
    }
    let mut arcs = BTreeSet::new();
    for e in minor.edges() {
        if e.0 == root {
            arcs.insert((e.0, e.1));
        } else if e.1 == root {
            arcs.insert((e.1, e.0));
        } else {
            arcs.insert((e.0, e.1));
            arcs.insert((e.1, e.0));
        }
    }
    ReducedComponent {
        component: comp.clone(),
        root,
        minor_vertices: minor.vertices().collect(),
        minor_edges: minor.edges().collect(),
        path_map: paths,
        arcs,
        inner_owner,
        minor,
    }
}

/// Number of spanning trees via the matrix-tree theorem, using exact
/// fraction-free (Bareiss) elimination. Zero for disconnected graphs.
pub fn spanning_tree_count(graph: &SimpleGraph) -> BigUint {
    let verts: Vec<NodeId> = graph.vertices().collect();
    if verts.len() <= 1 {
        return BigUint::from(1u32);
    }
    let index: BTreeMap<NodeId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len() - 1;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, &v) in verts.iter().enumerate().skip(1) {
        m[i - 1][i - 1] = BigInt::from(graph.degree(v));
        for w in graph.neighbors(v) {
            let j = index[&w];
            if j > 0 {
                m[i - 1][j - 1] = BigInt::from(-1);
            }
        }
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigUint::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = &m[n - 1][n - 1] * sign;
    det.abs().to_biguint().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Branch;

    fn net(v: usize, root: NodeId, edges: &[(NodeId, NodeId)]) -> NetworkModel {
        let nodes: Vec<_> = (0..v).map(|i| (i, if i == root { 0.0 } else { 1.0 }, 0.0)).collect();
        let branches = edges.iter().map(|&(a, b)| Branch { from: a, to: b, r: 1.0, x: None }).collect();
        NetworkModel::new(1.0, root, &nodes, branches).unwrap()
    }

    fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges((0..n).map(|i| EdgeKey::new(i, (i + 1) % n)))
    }

    #[test]
    fn matrix_tree_small_cases() {
        assert_eq!(spanning_tree_count(&cycle(4)), BigUint::from(4u32));
        assert_eq!(spanning_tree_count(&cycle(3)), BigUint::from(3u32));
        let k4 = SimpleGraph::from_edges(
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(a, b)| EdgeKey(a, b)),
        );
        assert_eq!(spanning_tree_count(&k4), BigUint::from(16u32));
        let mut split = SimpleGraph::from_edges([EdgeKey(0, 1), EdgeKey(2, 3)]);
        split.add_vertex(4);
        assert_eq!(spanning_tree_count(&split), BigUint::zero());
    }

    #[test]
    fn tree_network_is_all_dyads() {
        let n = net(5, 0, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        let cs = split_biconnected(&n);
        assert_eq!(cs.components.len(), 4);
        assert!(cs.components.iter().all(|c| c.is_trivial()));
        assert_eq!(cs.cut_vertices, BTreeSet::from([1, 3]));
        let c13 = cs.components.iter().find(|c| c.edges.contains(&EdgeKey(1, 3))).unwrap();
        assert_eq!(c13.root, 1);
        assert_eq!(c13.load(3), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn cutvertex_separates_two_cycles() {
        // v0=0, k=1, l=2, m=3, n1=4, n2=5, n3=6
        let n = net(7, 0, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]);
        let cs = split_biconnected(&n);
        assert_eq!(cs.components.len(), 2);
        assert_eq!(cs.cut_vertices, BTreeSet::from([3]));
        let upper = cs.components.iter().find(|c| c.vertices.contains(&0)).unwrap();
        let lower = cs.components.iter().find(|c| c.vertices.contains(&6)).unwrap();
        assert_eq!(upper.root, 0);
        assert_eq!(lower.root, 3);
        assert_eq!(upper.load(3), Complex64::new(4.0, 0.0));
        assert_eq!(lower.load(4), Complex64::new(1.0, 0.0));
        let total: Complex64 = upper.aggregated_loads.iter().filter(|(v, _)| **v != 0).map(|(_, l)| l).sum();
        assert_eq!(total, n.total_load());
    }

    #[test]
    fn lifting_c4_keeps_one_chain_vertex() {
        let n = net(4, 0, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let cs = split_biconnected(&n);
        let red = edge_lift(&cs.components[0]);
        assert_eq!(red.minor_vertices, BTreeSet::from([0, 2, 3]));
        assert_eq!(red.minor_edges, BTreeSet::from([EdgeKey(0, 2), EdgeKey(0, 3), EdgeKey(2, 3)]));
        assert_eq!(red.path_map[&EdgeKey(0, 2)], vec![0, 1, 2]);
        assert_eq!(red.path(2, 0), vec![2, 1, 0]);
        assert_eq!(red.arcs, BTreeSet::from([(0, 2), (0, 3), (2, 3), (3, 2)]));
    }

    #[test]
    fn triangle_is_not_lifted() {
        let n = net(3, 0, &[(0, 1), (1, 2), (2, 0)]);
        let red = edge_lift(&split_biconnected(&n).components[0]);
        assert_eq!(red.minor_vertices.len(), 3);
        assert_eq!(red.minor_edges.len(), 3);
        assert!(red.inner_vertices().next().is_none());
    }
}
