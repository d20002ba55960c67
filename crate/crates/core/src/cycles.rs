//! Cycle basis of a reduced component: inner faces of a planar embedding with
//! root faces dropped, virtual cycles around interior vertices, and the
//! registry of edges that carry a direction variable.

pub mod planar;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::netmodel::{EdgeKey, NodeId};
use crate::reduce::ReducedComponent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("reduced component rooted at {root} is not planar")]
    NonPlanar { root: NodeId },
    #[error("reduced component rooted at {root} is not 2-connected")]
    NotBiconnected { root: NodeId },
    #[error("interior vertex {vertex} has degree {degree}; at least 3 is required")]
    LowDegreeInterior { vertex: NodeId, degree: usize },
    #[error("virtual edge {edge} would duplicate an existing edge")]
    ParallelVirtualEdge { edge: EdgeKey },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CycleKind {
    Facial,
    Virtual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    /// Cyclic vertex sequence `k_1, …, k_n`.
    pub vertices: Vec<NodeId>,
    pub kind: CycleKind,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive vertex pairs in the stored direction, closing back to `k_1`.
    pub fn steps(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn edges(&self) -> BTreeSet<EdgeKey> {
        self.steps().map(|(a, b)| EdgeKey::new(a, b)).collect()
    }

    fn canonical(mut vertices: Vec<NodeId>, kind: CycleKind) -> Self {
        let i = vertices.iter().enumerate().min_by_key(|(_, v)| **v).unwrap().0;
        vertices.rotate_left(i);
        if vertices.len() > 2 && vertices[vertices.len() - 1] < vertices[1] {
            vertices[1..].reverse();
        }
        Cycle { vertices, kind }
    }
}

/// Faces of the chosen embedding, split into root faces and basis cycles.
#[derive(Debug, Clone)]
pub struct FacialBasis {
    pub root: NodeId,
    /// Consistently oriented faces, root faces included.
    pub faces: Vec<Vec<NodeId>>,
    pub cycles: Vec<Cycle>,
}

impl FacialBasis {
    pub fn root_faces(&self) -> impl Iterator<Item = &Vec<NodeId>> {
        self.faces.iter().filter(move |f| f.contains(&self.root))
    }
}

#[derive(Debug, Clone)]
pub struct CycleBasis {
    pub cycles: Vec<Cycle>,
    /// Edges carrying a direction variable, with the indices of the cycles containing them.
    pub shared_edges: BTreeMap<EdgeKey, Vec<usize>>,
    /// Edges introduced by virtual cycles; never part of the minor.
    pub virtual_edges: BTreeSet<EdgeKey>,
    /// Interior vertices enclosed by virtual cycles, in processing order.
    pub enclosed: Vec<NodeId>,
}

/// Inner faces of a planar embedding of the minor, excluding every face that
/// contains the root.
pub fn facial_cycles(minor: &ReducedComponent) -> Result<FacialBasis, TopologyError> {
    let root = minor.root;
    let faces = planar::embed(minor.minor()).map_err(|e| match e {
        planar::EmbedError::NonPlanar => TopologyError::NonPlanar { root },
        planar::EmbedError::NotBiconnected => TopologyError::NotBiconnected { root },
    })?;
    let mut cycles: Vec<Cycle> = faces
        .iter()
        .filter(|f| !f.contains(&root))
        .map(|f| Cycle::canonical(f.clone(), CycleKind::Facial))
        .collect();
    cycles.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(FacialBasis { root, faces, cycles })
}

struct Face {
    vertices: Vec<NodeId>,
    kind: CycleKind,
}

/// Encloses every interior vertex (one lying on no root face) with a virtual
/// cycle over its neighbours, splitting the faces around it along the new
/// virtual edges. Each enclosed vertex is then removed from the working
/// embedding, so a neighbouring interior vertex is enclosed against the
/// already-added virtual edges.
pub fn add_virtual_cycles(
    basis: &FacialBasis,
    minor: &ReducedComponent,
) -> Result<CycleBasis, TopologyError> {
    let root = basis.root;
    let on_root_face: BTreeSet<NodeId> = basis.root_faces().flatten().copied().collect();
    let interior: Vec<NodeId> = minor
        .minor_vertices
        .iter()
        .copied()
        .filter(|v| *v != root && !on_root_face.contains(v))
        .collect();

    let mut faces: Vec<Face> = basis
        .faces
        .iter()
        .map(|f| Face { vertices: f.clone(), kind: CycleKind::Facial })
        .collect();
    let mut edges: BTreeSet<EdgeKey> = minor.minor_edges.clone();
    let mut virtual_edges = BTreeSet::new();
    let mut finished: Vec<Cycle> = Vec::new();

    for &x in &interior {
        let degree = edges.iter().filter(|e| e.contains(x)).count();
        if degree < 3 {
            return Err(TopologyError::LowDegreeInterior { vertex: x, degree });
        }
        // corners (prev, x, next) keyed by prev
        let mut corners: BTreeMap<NodeId, (NodeId, usize)> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            let n = f.vertices.len();
            if let Some(i) = f.vertices.iter().position(|&v| v == x) {
                let prev = f.vertices[(i + n - 1) % n];
                let next = f.vertices[(i + 1) % n];
                corners.insert(prev, (next, fi));
            }
        }
        let first = *corners.keys().next().unwrap();
        let mut rotation = vec![first];
        let mut cur = first;
        loop {
            let next = corners[&cur].0;
            if next == first {
                break;
            }
            rotation.push(next);
            cur = next;
        }
        debug_assert_eq!(rotation.len(), corners.len());

        let mut remove = BTreeSet::new();
        let mut added = Vec::new();
        for &a in &rotation {
            let (b, fi) = corners[&a];
            let face = &faces[fi];
            remove.insert(fi);
            let n = face.vertices.len();
            let i = face.vertices.iter().position(|&v| v == a).unwrap();
            let mut rot = face.vertices.clone();
            rot.rotate_left(i);
            debug_assert_eq!(&rot[..3], &[a, x, b]);
            finished.push(Cycle::canonical(vec![a, x, b], face.kind));
            if n > 3 {
                let chord = EdgeKey::new(a, b);
                if edges.contains(&chord) {
                    return Err(TopologyError::ParallelVirtualEdge { edge: chord });
                }
                edges.insert(chord);
                virtual_edges.insert(chord);
                let mut rest = vec![b];
                rest.extend_from_slice(&rot[3..]);
                rest.push(a);
                added.push(Face { vertices: rest, kind: face.kind });
            }
        }
        let mut kept: Vec<Face> = faces
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !remove.contains(i))
            .map(|(_, f)| f)
            .collect();
        kept.extend(added);
        let mut enclosing: Vec<NodeId> = rotation.clone();
        enclosing[1..].reverse();
        kept.push(Face { vertices: enclosing, kind: CycleKind::Virtual });
        faces = kept;
        edges.retain(|e| !e.contains(x));
    }

    let mut cycles = finished;
    cycles.extend(
        faces
            .into_iter()
            .filter(|f| !f.vertices.contains(&root))
            .map(|f| Cycle::canonical(f.vertices, f.kind)),
    );
    cycles.sort_by(|a, b| (a.kind, &a.vertices).cmp(&(b.kind, &b.vertices)));

    let mut out = CycleBasis { cycles, shared_edges: BTreeMap::new(), virtual_edges, enclosed: interior };
    out.shared_edges = shared_edge_registry(&out);
    Ok(out)
}

/// Edges that receive a direction variable: every virtual edge, plus every
/// real edge lying in two or more cycles unless it touches an enclosed vertex.
pub fn shared_edge_registry(basis: &CycleBasis) -> BTreeMap<EdgeKey, Vec<usize>> {
    let mut membership: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (i, c) in basis.cycles.iter().enumerate() {
        for e in c.edges() {
            membership.entry(e).or_default().push(i);
        }
    }
    let enclosed: BTreeSet<NodeId> = basis.enclosed.iter().copied().collect();
    membership
        .into_iter()
        .filter(|(e, cs)| {
            basis.virtual_edges.contains(e)
                || (cs.len() >= 2 && !enclosed.contains(&e.0) && !enclosed.contains(&e.1))
        })
        .collect()
}

/// Facial cycles followed by virtual-cycle enclosure.
pub fn build_cycle_basis(minor: &ReducedComponent) -> Result<CycleBasis, TopologyError> {
    let facial = facial_cycles(minor)?;
    add_virtual_cycles(&facial, minor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Branch, NetworkModel};
    use crate::reduce::{edge_lift, split_biconnected};

    fn reduced(v: usize, root: NodeId, edges: &[(NodeId, NodeId)]) -> ReducedComponent {
        let nodes: Vec<_> = (0..v).map(|i| (i, 1.0, 0.0)).collect();
        let branches = edges.iter().map(|&(a, b)| Branch { from: a, to: b, r: 1.0, x: None }).collect();
        let net = NetworkModel::new(1.0, root, &nodes, branches).unwrap();
        let cs = split_biconnected(&net);
        let red = edge_lift(cs.non_trivial().next().unwrap());
        red
    }

    #[test]
    fn triangle_has_empty_basis() {
        let red = reduced(3, 0, &[(0, 1), (1, 2), (2, 0)]);
        let basis = build_cycle_basis(&red).unwrap();
        assert!(basis.cycles.is_empty());
        assert!(basis.shared_edges.is_empty());
    }

    #[test]
    fn two_triangles_keep_the_rootless_one() {
        let red = reduced(4, 0, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let basis = build_cycle_basis(&red).unwrap();
        assert_eq!(basis.cycles.len(), 1);
        assert_eq!(basis.cycles[0].vertices, vec![1, 2, 3]);
        assert!(basis.shared_edges.is_empty());
    }

    #[test]
    fn wheel_hub_fed_from_outside_gets_a_virtual_rim() {
        // hub 5, rim 1-2-3-4, root 0 feeding rim vertices 1 and 3
        let red = reduced(
            6,
            0,
            &[(0, 1), (0, 3), (1, 2), (2, 3), (3, 4), (4, 1), (5, 1), (5, 2), (5, 3), (5, 4)],
        );
        let basis = build_cycle_basis(&red).unwrap();
        assert_eq!(basis.enclosed, vec![5]);
        assert!(basis.virtual_edges.is_empty());
        let virt: Vec<_> = basis.cycles.iter().filter(|c| c.kind == CycleKind::Virtual).collect();
        assert_eq!(virt.len(), 1);
        assert_eq!(virt[0].vertices, vec![1, 2, 3, 4]);
        assert_eq!(basis.cycles.len(), 5);
        let d: Vec<_> = basis.shared_edges.keys().copied().collect();
        assert_eq!(d, vec![EdgeKey(1, 2), EdgeKey(1, 4), EdgeKey(2, 3), EdgeKey(3, 4)]);
    }
}
