//! Exact spanning-tree oracle, translation between configurations and
//! variable assignments, and QUBO solvers.

pub mod anneal;
pub mod brute;
pub mod trees;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::constraints::{term_lit, ComponentPart, Source, VarKey, VariableRegistry};
use crate::losses::{tree_losses, LossBreakdown};
use crate::netmodel::{EdgeKey, NetworkModel, NodeId};
use crate::reduce::ComponentSet;

pub use anneal::{simulated_annealing, AnnealParams};
pub use brute::brute_force_qubo;
pub use trees::SpanningTrees;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    pub method: String,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: Option<u64>,
    /// Assignments (brute force) or single-flip proposals (annealing) evaluated.
    pub evaluated: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub assignment: Vec<bool>,
    pub energy: f64,
    /// Every assignment found at the best energy.
    pub ties: Vec<Vec<bool>>,
    /// Best-so-far energy after each sweep of the winning run.
    pub trace: Vec<f64>,
    pub stats: SolverStats,
}

/// Relative tolerance under which two configurations count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub tree_count: u64,
    pub best: BTreeSet<EdgeKey>,
    pub losses: LossBreakdown,
    /// Open-link sets of every configuration tied with the best.
    pub ties: Vec<BTreeSet<EdgeKey>>,
}

/// Links of the network not in `tree`.
pub fn open_links(net: &NetworkModel, tree: &BTreeSet<EdgeKey>) -> BTreeSet<EdgeKey> {
    net.edge_keys().difference(tree).copied().collect()
}

/// Enumerates every radial configuration and keeps the one of minimum loss.
/// Ties are broken towards the lexicographically smallest open-link set.
pub fn exhaustive_optimum(net: &NetworkModel, components: &ComponentSet) -> Option<OracleResult> {
    let mut count = 0u64;
    let mut best: Option<(f64, BTreeSet<EdgeKey>, LossBreakdown)> = None;
    let mut all: Vec<(f64, BTreeSet<EdgeKey>)> = Vec::new();
    for tree in SpanningTrees::new(net.edge_keys()) {
        count += 1;
        let l = tree_losses(net, &tree, components)?;
        let open = open_links(net, &tree);
        let better = match &best {
            None => true,
            Some((b, o, _)) => l.switchable_kw < *b || (l.switchable_kw == *b && open < *o),
        };
        if best.as_ref().is_none_or(|(b, _, _)| l.switchable_kw <= b * (1.0 + TIE_TOLERANCE) + TIE_TOLERANCE) {
            all.push((l.switchable_kw, open.clone()));
        }
        if better {
            best = Some((l.switchable_kw, open, l));
        }
    }
    let (b, open, losses) = best?;
    let tol = b.abs() * TIE_TOLERANCE + TIE_TOLERANCE;
    let mut ties: Vec<BTreeSet<EdgeKey>> =
        all.into_iter().filter(|(l, _)| (l - b).abs() <= tol).map(|(_, o)| o).collect();
    ties.sort();
    let best_tree = net.edge_keys().difference(&open).copied().collect();
    Some(OracleResult { tree_count: count, best: best_tree, losses, ties })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("assignment violates {} constraint #{index}", tag.label())]
    Infeasible { index: usize, tag: Source },
    #[error("decoded links do not form a spanning tree")]
    NotATree,
}

/// Orientation of the tree edges of one component away from its root.
fn orient(root: NodeId, edges: impl Iterator<Item = EdgeKey>) -> (BTreeMap<NodeId, NodeId>, Vec<NodeId>) {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    let mut parent = BTreeMap::new();
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    let mut seen = BTreeSet::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                parent.insert(w, v);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    (parent, order)
}

/// Variable assignment representing a spanning tree of the network.
/// Ancillas (if the registry has any) are left unset.
pub fn encode(parts: &[ComponentPart], reg: &VariableRegistry, tree: &BTreeSet<EdgeKey>) -> Vec<bool> {
    let mut x = vec![false; reg.len()];
    for part in parts {
        let minor = &part.minor;
        let comp_edges = minor.component.edges.iter().copied().filter(|e| tree.contains(e));
        let (parent, order) = orient(minor.root, comp_edges);
        let is_ancestor = |a: NodeId, mut n: NodeId| loop {
            if n == a {
                return true;
            }
            match parent.get(&n) {
                Some(&p) => n = p,
                None => return false,
            }
        };

        let mut rank: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &v in &order {
            if minor.minor_vertices.contains(&v) {
                let r = rank.len();
                rank.insert(v, r);
            }
        }
        for (n, k) in minor.inner_vertices() {
            let lo_side = minor.path_map[&k].windows(2).find(|w| w[1] == n).unwrap()[0];
            x[reg.get(VarKey::P(n))] = parent[&n] == lo_side;
        }
        for &(u, v) in &minor.arcs {
            let path = minor.path(u, v);
            if path.windows(2).all(|w| parent.get(&w[1]) == Some(&w[0])) {
                x[reg.get(VarKey::E(u, v))] = true;
            }
        }
        for &k in &part.vars.d {
            // tree arcs follow the BFS order, so ordering by it leaves no cycle directed
            x[reg.get(VarKey::D(k.0, k.1))] = rank[&k.0] < rank[&k.1];
        }
        for &(u, v, n) in part.vars.z.keys() {
            x[reg.get(VarKey::Z(u, v, n))] = x[reg.get(VarKey::E(u, v))] && is_ancestor(v, n);
        }
        for (&(u, v, n), terms) in &part.vars.z {
            if terms.len() >= 2 {
                let sum = terms.iter().filter(|&&t| term_lit(reg, t).eval(&x)).count();
                x[reg.get(VarKey::Y(u, v, n))] = sum == 1;
            }
        }
    }
    x
}

/// Spanning tree represented by a feasible assignment: every bridge, the paths of
/// selected arcs, and each open path minus the segment where its `p` pattern
/// switches.
pub fn decode(
    net: &NetworkModel,
    components: &ComponentSet,
    parts: &[ComponentPart],
    reg: &VariableRegistry,
    x: &[bool],
) -> Result<BTreeSet<EdgeKey>, DecodeError> {
    let mut tree: BTreeSet<EdgeKey> = components.trivial().flat_map(|c| c.edges.iter().copied()).collect();
    for part in parts {
        let minor = &part.minor;
        for (&k, path) in &minor.path_map {
            let on = |u, v| minor.is_arc(u, v) && x[reg.get(VarKey::E(u, v))];
            let segments = path.windows(2).map(|w| EdgeKey::new(w[0], w[1]));
            if on(k.0, k.1) || on(k.1, k.0) {
                tree.extend(segments);
            } else {
                let t = minor.inner(k).iter().take_while(|&&n| x[reg.get(VarKey::P(n))]).count();
                tree.extend(segments.enumerate().filter(|(s, _)| *s != t).map(|(_, e)| e));
            }
        }
    }
    let g = crate::graph::SimpleGraph::from_edges(tree.iter().copied());
    if tree.len() + 1 != net.nodes().len() || g.vertex_count() != net.nodes().len() || !g.is_connected() {
        return Err(DecodeError::NotATree);
    }
    Ok(tree)
}
