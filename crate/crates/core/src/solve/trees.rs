//! Exhaustive spanning-tree enumeration by edge inclusion and exclusion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::netmodel::{EdgeKey, NodeId};

struct State {
    next: usize,
    labels: Vec<usize>,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
}

/// Lazily yields every spanning tree of a connected graph exactly once, as a
/// set of edges. Each branch either includes the next edge (when it joins two
/// forest components) or excludes it (when the remaining edges still connect
/// the graph), so no branch dead-ends.
pub struct SpanningTrees {
    edges: Vec<(usize, usize)>,
    keys: Vec<EdgeKey>,
    n: usize,
    stack: Vec<State>,
}

impl SpanningTrees {
    pub fn new<I: IntoIterator<Item = EdgeKey>>(edges: I) -> Self {
        let keys: Vec<EdgeKey> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let verts: BTreeSet<NodeId> = keys.iter().flat_map(|k| [k.0, k.1]).collect();
        let index: BTreeMap<NodeId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = keys.iter().map(|k| (index[&k.0], index[&k.1])).collect();
        let n = verts.len();
        let mut out = SpanningTrees { edges, keys, n, stack: Vec::new() };
        let all = State { next: 0, labels: (0..n).collect(), chosen: Vec::new(), excluded: vec![false; out.edges.len()] };
        if n > 0 && out.connected_without(&all.excluded, None) {
            out.stack.push(all);
        }
        out
    }

    fn connected_without(&self, excluded: &[bool], skip: Option<usize>) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if !excluded[i] && Some(i) != skip {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }
}

impl Iterator for SpanningTrees {
    type Item = BTreeSet<EdgeKey>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(s) = self.stack.pop() {
            if s.chosen.len() + 1 == self.n {
                return Some(s.chosen.iter().map(|&i| self.keys[i]).collect());
            }
            let i = s.next;
            let (a, b) = self.edges[i];
            let (la, lb) = (s.labels[a], s.labels[b]);
            let can_exclude = la == lb || self.connected_without(&s.excluded, Some(i));
            let include = (la != lb).then(|| {
                let labels = s.labels.iter().map(|&l| if l == lb { la } else { l }).collect();
                let mut chosen = s.chosen.clone();
                chosen.push(i);
                State { next: i + 1, labels, chosen, excluded: s.excluded.clone() }
            });
            if can_exclude {
                let mut excluded = s.excluded;
                excluded[i] = true;
                self.stack.push(State { next: i + 1, labels: s.labels, chosen: s.chosen, excluded });
            }
            if let Some(st) = include {
                self.stack.push(st);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let c4 = [(0, 1), (1, 2), (2, 3), (0, 3)].map(|(a, b)| EdgeKey(a, b));
        assert_eq!(SpanningTrees::new(c4).count(), 4);
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(a, b)| EdgeKey(a, b));
        let trees: BTreeSet<_> = SpanningTrees::new(k4).collect();
        assert_eq!(trees.len(), 16);
        assert!(trees.iter().all(|t| t.len() == 3));
        assert_eq!(SpanningTrees::new([EdgeKey(0, 1), EdgeKey(2, 3)]).count(), 0);
    }
}
