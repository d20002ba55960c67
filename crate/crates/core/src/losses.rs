//! Ohmic loss of a radial configuration, both as a closed-form evaluation on
//! a spanning tree and as a quadratic polynomial over the model variables.
//!
//! Currents are in amperes (kW / kV) and resistances in ohms; losses are
//! reported in kW.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;

use crate::constraints::{ComponentPart, VarKey, VariableRegistry};
use crate::netmodel::{EdgeKey, NetworkModel, NodeId};
use crate::poly::Poly;
use crate::reduce::{ComponentSet, ReducedComponent};

const W_PER_KW: f64 = 1000.0;

/// Segment resistances of every lifted path, in canonical (`min → max`) order.
#[derive(Debug, Clone, Default)]
pub struct PathResistanceTable {
    segments: BTreeMap<EdgeKey, Vec<f64>>,
}

impl PathResistanceTable {
    pub fn new(net: &NetworkModel, minor: &ReducedComponent) -> Self {
        let segments = minor
            .path_map
            .iter()
            .map(|(&k, p)| {
                let rs = p.windows(2).map(|w| net.resistance(EdgeKey::new(w[0], w[1])).unwrap()).collect();
                (k, rs)
            })
            .collect();
        PathResistanceTable { segments }
    }

    /// Segment resistances along `u → v`.
    pub fn oriented(&self, u: NodeId, v: NodeId) -> Vec<f64> {
        let s = &self.segments[&EdgeKey::new(u, v)];
        if u < v {
            s.clone()
        } else {
            s.iter().rev().copied().collect()
        }
    }

    pub fn total(&self, u: NodeId, v: NodeId) -> f64 {
        self.segments[&EdgeKey::new(u, v)].iter().sum()
    }
}

fn sq(c: Complex64) -> f64 {
    c.norm_sqr()
}

/// `Re(a · conj(b))`.
fn dot(a: Complex64, b: Complex64) -> f64 {
    (a * b.conj()).re
}

/// Loss of the inner loads of the path `lo = k_0, k_1, …, k_m, k_{m+1} = hi`
/// when the segment after `k_t` is the one left open.
fn inner_loss(rs: &[f64], loads: &[Complex64], t: usize) -> f64 {
    let m = loads.len();
    let mut loss = 0.0;
    for (s, &r) in rs.iter().enumerate() {
        let i: Complex64 = if s < t {
            loads[s..t].iter().sum()
        } else if s > t {
            loads[t..s.min(m)].iter().sum()
        } else {
            Complex64::default()
        };
        loss += r * sq(i);
    }
    loss
}

/// Loss polynomial (kW) of one component, exact on every feasible assignment.
///
/// Each lifted path contributes the loss of its own inner loads as a function
/// of where it is open, linear in its monotone `p` pattern. Each arc `u → v`
/// adds the loss of carrying `v`'s load and everything downstream across
/// `P_uv`, through `e_uv`, the `z_uvn` and products of `z` pairs.
pub fn directed_losses(
    net: &NetworkModel,
    part: &ComponentPart,
    reg: &VariableRegistry,
) -> Poly {
    let minor = &part.minor;
    let table = PathResistanceTable::new(net, minor);
    let mut poly = Poly::new();

    for &k in &minor.minor_edges {
        let inner = minor.inner(k);
        let rs = table.oriented(k.0, k.1);
        let loads: Vec<Complex64> = inner.iter().map(|&n| minor.load(n)).collect();
        let l: Vec<f64> = (0..=inner.len()).map(|t| inner_loss(&rs, &loads, t)).collect();
        poly.add_constant(l[0] / W_PER_KW);
        for (j, &n) in inner.iter().enumerate() {
            poly.add_linear(reg.get(VarKey::P(n)), (l[j + 1] - l[j]) / W_PER_KW);
        }
    }

    let mut by_arc: BTreeMap<(NodeId, NodeId), Vec<NodeId>> = BTreeMap::new();
    for &(u, v, n) in part.vars.z.keys() {
        by_arc.entry((u, v)).or_default().push(n);
    }
    for &(u, v) in &minor.arcs {
        let path = minor.path(u, v);
        let rs = table.oriented(u, v);
        let r_uv: f64 = rs.iter().sum();
        // inner load still to be delivered after each segment when closed u → v
        let suffix: Vec<Complex64> = (0..rs.len())
            .map(|s| path[s + 1..path.len() - 1].iter().map(|&n| minor.load(n)).sum())
            .collect();
        let cross = |i: Complex64| 2.0 * rs.iter().zip(&suffix).map(|(&r, &a)| r * dot(i, a)).sum::<f64>();
        let i_v = minor.load(v);
        poly.add_linear(reg.get(VarKey::E(u, v)), (r_uv * sq(i_v) + cross(i_v)) / W_PER_KW);

        let ns = by_arc.get(&(u, v)).map(Vec::as_slice).unwrap_or(&[]);
        for (a, &n) in ns.iter().enumerate() {
            let i_n = minor.load(n);
            let zn = reg.get(VarKey::Z(u, v, n));
            poly.add_linear(zn, (r_uv * (sq(i_n) + 2.0 * dot(i_n, i_v)) + cross(i_n)) / W_PER_KW);
            for &k in &ns[a + 1..] {
                let zk = reg.get(VarKey::Z(u, v, k));
                poly.add_quadratic(zn, zk, 2.0 * r_uv * dot(i_n, minor.load(k)) / W_PER_KW);
            }
        }
    }
    poly
}

/// Loss polynomial of all components.
pub fn total_loss_terms(net: &NetworkModel, parts: &[ComponentPart], reg: &VariableRegistry) -> Poly {
    let mut poly = Poly::new();
    for p in parts {
        poly.add_scaled(&directed_losses(net, p, reg), 1.0);
    }
    poly
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// Losses on links of non-trivial components; the part reconfiguration can change.
    pub switchable_kw: f64,
    /// Losses on bridges, fixed for every radial configuration.
    pub bridge_kw: f64,
}

impl LossBreakdown {
    pub fn total_kw(&self) -> f64 {
        self.switchable_kw + self.bridge_kw
    }
}

/// Loss of a spanning tree of the network given by its edge set, computed
/// from subtree load sums. Returns `None` if the edges do not form a
/// spanning tree.
pub fn tree_losses(net: &NetworkModel, tree: &BTreeSet<EdgeKey>, components: &ComponentSet) -> Option<LossBreakdown> {
    let n_nodes = net.nodes().len();
    if tree.len() + 1 != n_nodes {
        return None;
    }
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in tree {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    let root = net.root();
    let mut order = vec![root];
    let mut parent = BTreeMap::from([(root, root)]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(w) {
                slot.insert(v);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    if order.len() != n_nodes {
        return None;
    }
    let bridges: BTreeSet<EdgeKey> = components.trivial().flat_map(|c| c.edges.iter().copied()).collect();
    let mut current: BTreeMap<NodeId, Complex64> = net.node_ids().map(|n| (n, net.load(n))).collect();
    let mut out = LossBreakdown { switchable_kw: 0.0, bridge_kw: 0.0 };
    for &v in order.iter().rev() {
        if v == root {
            continue;
        }
        let p = parent[&v];
        let key = EdgeKey::new(p, v);
        let i = current[&v];
        let loss = net.resistance(key).unwrap() * sq(i) / W_PER_KW;
        if bridges.contains(&key) {
            out.bridge_kw += loss;
        } else {
            out.switchable_kw += loss;
        }
        *current.get_mut(&p).unwrap() += i;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_loss_by_open_position() {
        // lo - a - b - hi, unit resistances, unit loads
        let rs = [1.0, 1.0, 1.0];
        let loads = [Complex64::new(1.0, 0.0); 2];
        // open after lo: both fed from hi -> segments (a,b)=1, (b,hi)=2
        assert_eq!(inner_loss(&rs, &loads, 0), 5.0);
        assert_eq!(inner_loss(&rs, &loads, 1), 2.0);
        assert_eq!(inner_loss(&rs, &loads, 2), 5.0);
    }
}
