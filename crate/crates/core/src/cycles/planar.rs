//! Face-tracing planar embedding of 2-connected graphs by incremental path
//! insertion (Demoucron, Malgrange and Pertuiset).
//!
//! Faces are returned as vertex cycles with a consistent orientation: every
//! edge is traversed exactly once in each direction over all faces.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::SimpleGraph;
use crate::netmodel::{EdgeKey, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedError {
    NonPlanar,
    NotBiconnected,
}

/// A piece of the graph not yet embedded, with its attachment vertices.
struct Fragment {
    attachments: BTreeSet<NodeId>,
    /// Either a single chord or the interior vertices of a bridge component.
    interior: BTreeSet<NodeId>,
    chord: Option<EdgeKey>,
}

fn initial_cycle(g: &SimpleGraph) -> Option<Vec<NodeId>> {
    let start = g.vertices().next()?;
    let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut depth: BTreeMap<NodeId, usize> = BTreeMap::from([(start, 0)]);
    let mut stack = vec![(start, g.neighbors(start).collect::<Vec<_>>(), 0usize)];
    while let Some((v, ns, i)) = stack.last_mut() {
        let v = *v;
        if *i == ns.len() {
            stack.pop();
            continue;
        }
        let w = ns[*i];
        *i += 1;
        if parent.get(&v) == Some(&w) {
            continue;
        }
        if let Some(&dw) = depth.get(&w) {
            if dw < depth[&v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[&x];
                    cyc.push(x);
                }
                cyc.reverse();
                return Some(cyc);
            }
            continue;
        }
        parent.insert(w, v);
        depth.insert(w, depth[&v] + 1);
        let wn = g.neighbors(w).collect();
        stack.push((w, wn, 0));
    }
    None
}

fn fragments(g: &SimpleGraph, placed_v: &BTreeSet<NodeId>, placed_e: &BTreeSet<EdgeKey>) -> Vec<Fragment> {
    let mut out = Vec::new();
    for e in g.edges() {
        if placed_v.contains(&e.0) && placed_v.contains(&e.1) && !placed_e.contains(&e) {
            out.push(Fragment {
                attachments: BTreeSet::from([e.0, e.1]),
                interior: BTreeSet::new(),
                chord: Some(e),
            });
        }
    }
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    for v in g.vertices() {
        if placed_v.contains(&v) || seen.contains(&v) {
            continue;
        }
        let comp = g.reachable_avoiding(v, placed_v);
        let attachments = comp
            .iter()
            .flat_map(|&x| g.neighbors(x))
            .filter(|w| placed_v.contains(w))
            .collect();
        seen.extend(comp.iter().copied());
        out.push(Fragment { attachments, interior: comp, chord: None });
    }
    out
}

/// Path `a, k_1, …, k_m, b` through the fragment between two distinct attachments.
fn fragment_path(g: &SimpleGraph, frag: &Fragment) -> Vec<NodeId> {
    if let Some(e) = frag.chord {
        return vec![e.0, e.1];
    }
    let a = *frag.attachments.iter().next().unwrap();
    let mut prev: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for w in g.neighbors(a) {
        if frag.interior.contains(&w) && !prev.contains_key(&w) {
            prev.insert(w, a);
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if let Some(b) = g.neighbors(v).find(|&b| b != a && frag.attachments.contains(&b)) {
            let mut path = vec![b, v];
            let mut x = v;
            while prev[&x] != a {
                x = prev[&x];
                path.push(x);
            }
            path.push(a);
            path.reverse();
            return path;
        }
        for w in g.neighbors(v) {
            if frag.interior.contains(&w) && !prev.contains_key(&w) {
                prev.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("a fragment of a 2-connected graph has two attachments joined through it")
}

/// Splits `face` along `path` (from `path[0]` to its last vertex, both on the face).
fn split_face(face: &[NodeId], path: &[NodeId]) -> (Vec<NodeId>, Vec<NodeId>) {
    let a = path[0];
    let b = *path.last().unwrap();
    let n = face.len();
    let ia = face.iter().position(|&x| x == a).unwrap();
    let ib = face.iter().position(|&x| x == b).unwrap();
    let walk = |from: usize, to: usize| {
        let mut seg = vec![face[from]];
        let mut i = from;
        while i != to {
            i = (i + 1) % n;
            seg.push(face[i]);
        }
        seg
    };
    let inner = &path[1..path.len() - 1];
    // a → … → b along the face, then back to a through the path.
    let mut f1 = walk(ia, ib);
    f1.extend(inner.iter().rev());
    // b → … → a along the face, then a → b through the path.
    let mut f2 = walk(ib, ia);
    f2.extend(inner.iter());
    (f1, f2)
}

/// Computes the faces of a planar embedding of a 2-connected graph.
pub fn embed(g: &SimpleGraph) -> Result<Vec<Vec<NodeId>>, EmbedError> {
    let cycle = initial_cycle(g).ok_or(EmbedError::NotBiconnected)?;
    let mut placed_v: BTreeSet<NodeId> = cycle.iter().copied().collect();
    let mut placed_e: BTreeSet<EdgeKey> = cycle
        .iter()
        .zip(cycle.iter().cycle().skip(1))
        .map(|(&a, &b)| EdgeKey::new(a, b))
        .collect();
    let mut faces = vec![cycle.clone(), cycle.iter().rev().copied().collect()];

    loop {
        let frags = fragments(g, &placed_v, &placed_e);
        if frags.is_empty() {
            break;
        }
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in frags.iter().enumerate() {
            if frag.attachments.len() < 2 {
                return Err(EmbedError::NotBiconnected);
            }
            let admissible: Vec<usize> = faces
                .iter()
                .enumerate()
                .filter(|(_, f)| frag.attachments.iter().all(|a| f.contains(a)))
                .map(|(i, _)| i)
                .collect();
            match admissible.len() {
                0 => return Err(EmbedError::NonPlanar),
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face_idx) = choice.unwrap();
        let path = fragment_path(g, &frags[fi]);
        let (f1, f2) = split_face(&faces[face_idx], &path);
        faces[face_idx] = f1;
        faces.push(f2);
        placed_v.extend(path.iter().copied());
        placed_e.extend(path.windows(2).map(|w| EdgeKey::new(w[0], w[1])));
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(NodeId, NodeId)]) -> SimpleGraph {
        SimpleGraph::from_edges(edges.iter().map(|&(a, b)| EdgeKey::new(a, b)))
    }

    fn check_orientation(graph: &SimpleGraph, faces: &[Vec<NodeId>]) {
        let mut darts = BTreeSet::new();
        for f in faces {
            for i in 0..f.len() {
                let d = (f[i], f[(i + 1) % f.len()]);
                assert!(graph.has_edge(d.0, d.1));
                assert!(darts.insert(d), "dart {d:?} used twice");
            }
        }
        assert_eq!(darts.len(), 2 * graph.edge_count());
    }

    #[test]
    fn euler_formula_holds() {
        let k4 = g(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let faces = embed(&k4).unwrap();
        assert_eq!(faces.len(), 4);
        check_orientation(&k4, &faces);

        let grid = g(&[(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8), (0, 3), (3, 6), (1, 4), (4, 7), (2, 5), (5, 8)]);
        let faces = embed(&grid).unwrap();
        assert_eq!(faces.len(), 12 - 9 + 2);
        check_orientation(&grid, &faces);
    }

    #[test]
    fn rejects_k5_and_k33() {
        let mut k5 = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                k5.push((a, b));
            }
        }
        assert_eq!(embed(&g(&k5)), Err(EmbedError::NonPlanar));
        let mut k33 = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                k33.push((a, b));
            }
        }
        assert_eq!(embed(&g(&k33)), Err(EmbedError::NonPlanar));
    }
}
