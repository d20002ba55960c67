//! Independent reference computations and small test networks. Nothing here
//! calls into the loss, reduction or enumeration code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use gridqubo::netmodel::{Branch, EdgeKey, NetworkModel};

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn baran_wu() -> NetworkModel {
    NetworkModel::builtin("baran-wu-33").unwrap()
}

pub fn c4() -> NetworkModel {
    NetworkModel::parse(&std::fs::read(data("c4.json")).unwrap()).unwrap()
}

/// Network with unit resistances and 1 A real loads on every non-root node.
pub fn unit_net(n: usize, root: usize, edges: &[(usize, usize)]) -> NetworkModel {
    let nodes: Vec<_> = (0..n).map(|i| (i, if i == root { 0.0 } else { 1.0 }, 0.0)).collect();
    let branches = edges.iter().map(|&(a, b)| Branch { from: a, to: b, r: 1.0, x: None }).collect();
    NetworkModel::new(1.0, root, &nodes, branches).unwrap()
}

pub fn edge_set(pairs: &[(usize, usize)]) -> BTreeSet<EdgeKey> {
    pairs.iter().map(|&(a, b)| EdgeKey::new(a, b)).collect()
}

fn connected(n: &[usize], edges: &[(usize, usize)]) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::from([n[0]]);
    let mut q = VecDeque::from([n[0]]);
    while let Some(v) = q.pop_front() {
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                q.push_back(w);
            }
        }
    }
    seen.len() == n.len()
}

/// Links whose removal disconnects the network.
pub fn bridges(net: &NetworkModel) -> BTreeSet<EdgeKey> {
    let nodes: Vec<usize> = net.node_ids().collect();
    let all: Vec<(usize, usize)> = net.branches().iter().map(|b| (b.from, b.to)).collect();
    (0..all.len())
        .filter(|&i| {
            let rest: Vec<_> = all.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &e)| e).collect();
            !connected(&nodes, &rest)
        })
        .map(|i| EdgeKey::new(all[i].0, all[i].1))
        .collect()
}

/// `(total_kw, bridge_kw)` of a radial configuration, by summing the load
/// currents below every link of the tree rooted at the substation.
pub fn tree_loss(net: &NetworkModel, tree: &BTreeSet<EdgeKey>, bridges: &BTreeSet<EdgeKey>) -> (f64, f64) {
    let v = net.v_base_kv();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in tree {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    fn below(
        v: usize,
        parent: usize,
        adj: &BTreeMap<usize, Vec<usize>>,
        load: &dyn Fn(usize) -> (f64, f64),
        out: &mut Vec<(usize, usize, (f64, f64))>,
    ) -> (f64, f64) {
        let mut s = load(v);
        for &w in adj.get(&v).into_iter().flatten() {
            if w != parent {
                let c = below(w, v, adj, load, out);
                out.push((v, w, c));
                s = (s.0 + c.0, s.1 + c.1);
            }
        }
        s
    }
    let loads: BTreeMap<usize, (f64, f64)> = net.nodes().iter().map(|n| (n.node, (n.p_kw / v, -n.q_kvar / v))).collect();
    let load = |n: usize| loads[&n];
    let mut flows = Vec::new();
    below(net.root(), usize::MAX, &adj, &load, &mut flows);
    assert_eq!(flows.len() + 1, net.nodes().len(), "not a spanning tree");
    let (mut total, mut fixed) = (0.0, 0.0);
    for (a, b, (re, im)) in flows {
        let k = EdgeKey::new(a, b);
        let l = net.resistance(k).unwrap() * (re * re + im * im) / 1000.0;
        total += l;
        if bridges.contains(&k) {
            fixed += l;
        }
    }
    (total, fixed)
}

/// Spanning-tree count by floating-point elimination on a Laplacian minor.
pub fn tree_count(edges: &BTreeSet<EdgeKey>) -> f64 {
    let verts: Vec<usize> = edges.iter().flat_map(|e| [e.0, e.1]).collect::<BTreeSet<_>>().into_iter().collect();
    let idx: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut m = vec![vec![0.0f64; n]; n];
    for e in edges {
        let (a, b) = (idx[&e.0], idx[&e.1]);
        m[a][a] += 1.0;
        m[b][b] += 1.0;
        m[a][b] -= 1.0;
        m[b][a] -= 1.0;
    }
    let mut m: Vec<Vec<f64>> = m[1..].iter().map(|r| r[1..].to_vec()).collect();
    let k = n - 1;
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in rest {
            let f = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Assignments of `n` bits as bool vectors.
pub fn bits(n: usize, v: u64) -> Vec<bool> {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}
