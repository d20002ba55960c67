//! Binary variables and logical constraints whose feasible assignments are
//! exactly the spanning trees of each reduced component.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::cycles::CycleBasis;
use crate::netmodel::{EdgeKey, NodeId};
use crate::poly::{Lit, VarId};
use crate::reduce::ReducedComponent;

/// Variable identity. The derived order (class, then ids) is the index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKey {
    /// Minor arc `u → v` is in the arborescence.
    E(NodeId, NodeId),
    /// Orientation of a shared or virtual edge `(a, b)`, `a < b`; 1 means `a → b`.
    D(NodeId, NodeId),
    /// Inner vertex `n` is fed from the lower-id end of its path.
    P(NodeId),
    /// Power for `n` flows through arc `u → v`.
    Z(NodeId, NodeId, NodeId),
    /// Sum of the terms defining `z_{u,v,n}`.
    Y(NodeId, NodeId, NodeId),
    Ancilla(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarClass {
    E,
    D,
    P,
    Z,
    Y,
    Ancilla,
}

impl VarClass {
    pub const ALL: [VarClass; 6] =
        [VarClass::E, VarClass::D, VarClass::P, VarClass::Z, VarClass::Y, VarClass::Ancilla];

    pub fn label(self) -> &'static str {
        match self {
            VarClass::E => "e",
            VarClass::D => "d",
            VarClass::P => "p",
            VarClass::Z => "z",
            VarClass::Y => "y",
            VarClass::Ancilla => "aux",
        }
    }
}

impl VarKey {
    pub fn class(&self) -> VarClass {
        match self {
            VarKey::E(..) => VarClass::E,
            VarKey::D(..) => VarClass::D,
            VarKey::P(..) => VarClass::P,
            VarKey::Z(..) => VarClass::Z,
            VarKey::Y(..) => VarClass::Y,
            VarKey::Ancilla(..) => VarClass::Ancilla,
        }
    }

    pub fn parse(name: &str) -> Option<VarKey> {
        let mut parts = name.split('_');
        let head = parts.next()?;
        let ids: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        Some(match (head, ids.as_slice()) {
            ("e", &[u, v]) => VarKey::E(u, v),
            ("d", &[a, b]) => VarKey::D(a, b),
            ("p", &[n]) => VarKey::P(n),
            ("z", &[u, v, n]) => VarKey::Z(u, v, n),
            ("y", &[u, v, n]) => VarKey::Y(u, v, n),
            ("anc", &[k]) => VarKey::Ancilla(k),
            _ => return None,
        })
    }
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKey::E(u, v) => write!(f, "e_{u}_{v}"),
            VarKey::D(a, b) => write!(f, "d_{a}_{b}"),
            VarKey::P(n) => write!(f, "p_{n}"),
            VarKey::Z(u, v, n) => write!(f, "z_{u}_{v}_{n}"),
            VarKey::Y(u, v, n) => write!(f, "y_{u}_{v}_{n}"),
            VarKey::Ancilla(k) => write!(f, "anc_{k}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableRegistry {
    keys: Vec<VarKey>,
    index: HashMap<VarKey, VarId>,
}

impl VariableRegistry {
    /// Indexes the keys in their natural order.
    pub fn from_keys<I: IntoIterator<Item = VarKey>>(keys: I) -> Self {
        let set: BTreeSet<VarKey> = keys.into_iter().collect();
        let keys: Vec<VarKey> = set.into_iter().collect();
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        VariableRegistry { keys, index }
    }

    /// Keeps the given order; used when reading exported models.
    pub fn from_ordered(keys: Vec<VarKey>) -> Option<Self> {
        let index: HashMap<VarKey, VarId> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        (index.len() == keys.len()).then_some(VariableRegistry { keys, index })
    }

    pub fn push_ancilla(&mut self) -> VarId {
        let k = VarKey::Ancilla(self.count(VarClass::Ancilla));
        let id = self.keys.len();
        self.keys.push(k);
        self.index.insert(k, id);
        id
    }

    pub fn id(&self, key: &VarKey) -> Option<VarId> {
        self.index.get(key).copied()
    }

    /// Panics if the key was never allocated.
    pub fn get(&self, key: VarKey) -> VarId {
        match self.index.get(&key) {
            Some(&i) => i,
            None => panic!("variable {key} is not allocated"),
        }
    }

    pub fn key(&self, id: VarId) -> VarKey {
        self.keys[id]
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn name(&self, id: VarId) -> String {
        self.keys[id].to_string()
    }

    pub fn count(&self, class: VarClass) -> usize {
        self.keys.iter().filter(|k| k.class() == class).count()
    }

    pub fn lit_name(&self, l: Lit) -> String {
        if l.neg {
            format!("!{}", self.name(l.var))
        } else {
            self.name(l.var)
        }
    }
}

/// Which constraint family a penalty (or interaction) comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Vertex,
    Edge,
    Cycle,
    Path,
    EdgePath,
    ZDef,
    Losses,
}

impl Source {
    pub const ALL: [Source; 7] =
        [Source::Vertex, Source::Edge, Source::Cycle, Source::Path, Source::EdgePath, Source::ZDef, Source::Losses];

    pub fn label(self) -> &'static str {
        match self {
            Source::Vertex => "vertex",
            Source::Edge => "edge",
            Source::Cycle => "cycle",
            Source::Path => "path",
            Source::EdgePath => "edge-path",
            Source::ZDef => "z",
            Source::Losses => "losses",
        }
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// Exactly one of the variables is set.
    ExactlyOne(Vec<VarId>),
    /// The two literals are never both true.
    ForbiddenPair(Lit, Lit),
    /// `premise ⟹ conclusion`.
    Implication(Lit, Lit),
    /// The literals are never all true at once.
    ProductZero(Vec<Lit>),
    /// `z = arc ∧ (Σ terms)`, where with `y` present `y = Σ terms` and the
    /// terms are at most one-hot.
    ZDefinition { z: VarId, arc: VarId, y: Option<VarId>, terms: Vec<Lit> },
}

impl Constraint {
    pub fn satisfied(&self, x: &[bool]) -> bool {
        match self {
            Constraint::ExactlyOne(vs) => vs.iter().filter(|&&v| x[v]).count() == 1,
            Constraint::ForbiddenPair(a, b) => !(a.eval(x) && b.eval(x)),
            Constraint::Implication(a, b) => !a.eval(x) || b.eval(x),
            Constraint::ProductZero(ls) => !ls.iter().all(|l| l.eval(x)),
            Constraint::ZDefinition { z, arc, y, terms } => {
                let sum = terms.iter().filter(|l| l.eval(x)).count();
                match y {
                    Some(y) => sum == x[*y] as usize && x[*z] == (x[*arc] && x[*y]),
                    None => x[*z] == (x[*arc] && sum == 1),
                }
            }
        }
    }

    fn to_json(&self, reg: &VariableRegistry) -> Value {
        let lits = |ls: &[Lit]| ls.iter().map(|&l| reg.lit_name(l)).collect::<Vec<_>>();
        match self {
            Constraint::ExactlyOne(vs) => {
                json!({"kind": "exactly-one", "vars": vs.iter().map(|&v| reg.name(v)).collect::<Vec<_>>()})
            }
            Constraint::ForbiddenPair(a, b) => json!({"kind": "forbidden-pair", "lits": lits(&[*a, *b])}),
            Constraint::Implication(a, b) => {
                json!({"kind": "implication", "premise": reg.lit_name(*a), "conclusion": reg.lit_name(*b)})
            }
            Constraint::ProductZero(ls) => json!({"kind": "product-zero", "lits": lits(ls)}),
            Constraint::ZDefinition { z, arc, y, terms } => json!({
                "kind": "z-definition",
                "z": reg.name(*z),
                "arc": reg.name(*arc),
                "y": y.map(|y| reg.name(y)),
                "terms": lits(terms),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedConstraint {
    pub constraint: Constraint,
    pub source: Source,
}

/// One summand in the definition of `z_{u,v,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ZTerm {
    /// `e_{v,n}`: `n` is the next minor vertex.
    Arc(NodeId, NodeId),
    /// `n` sits on the path leaving `v`; `negated` when `v` is its higher-id end.
    P { n: NodeId, negated: bool },
    /// Flow continues through `v → m`.
    Z(NodeId, NodeId, NodeId),
}

/// Variable sets allocated for one reduced component.
#[derive(Debug, Clone, Default)]
pub struct ComponentVars {
    pub e: BTreeSet<(NodeId, NodeId)>,
    pub d: BTreeSet<EdgeKey>,
    pub p: BTreeSet<NodeId>,
    /// Live `z` keys with their defining terms; `y` is allocated when there are two or more.
    pub z: BTreeMap<(NodeId, NodeId, NodeId), Vec<ZTerm>>,
}

impl ComponentVars {
    pub fn y_keys(&self) -> impl Iterator<Item = (NodeId, NodeId, NodeId)> + '_ {
        self.z.iter().filter(|(_, t)| t.len() >= 2).map(|(k, _)| *k)
    }

    fn all_keys(&self) -> impl Iterator<Item = VarKey> + '_ {
        self.e
            .iter()
            .map(|&(u, v)| VarKey::E(u, v))
            .chain(self.d.iter().map(|k| VarKey::D(k.0, k.1)))
            .chain(self.p.iter().map(|&n| VarKey::P(n)))
            .chain(self.z.keys().map(|&(u, v, n)| VarKey::Z(u, v, n)))
            .chain(self.y_keys().map(|(u, v, n)| VarKey::Y(u, v, n)))
    }
}

/// Every `(u, v, n)` with `u → v` an arc and `n` a component vertex off
/// `P_uv` other than the root.
pub fn z_candidates(minor: &ReducedComponent) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for &(u, v) in &minor.arcs {
        let on_path: BTreeSet<NodeId> = minor.path(u, v).into_iter().collect();
        for &n in &minor.component.vertices {
            if n != minor.root && !on_path.contains(&n) {
                out.insert((u, v, n));
            }
        }
    }
    out
}

/// For each arc `u → v`, the minor vertices `w` for which some spanning tree
/// reaches `w` through `u → v`: there is a simple root-to-`u` path and a
/// `v`-to-`w` path vertex-disjoint from it.
///
/// Enumerates simple root paths, so the cost grows with the number of such
/// paths; fine for desk-scale minors.
pub fn arc_reach(minor: &ReducedComponent) -> BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>> {
    let g = minor.minor();
    let root = minor.root;
    let mut out = BTreeMap::new();
    for &(u, v) in &minor.arcs {
        let mut reach = BTreeSet::new();
        let mut path = vec![root];
        let mut on_path = BTreeSet::from([root]);
        let mut stack: Vec<Vec<NodeId>> = vec![g.neighbors(root).collect()];
        if u == root {
            reach.extend(g.reachable_avoiding(v, &on_path));
        } else {
            while let Some(next) = stack.last_mut() {
                match next.pop() {
                    None => {
                        stack.pop();
                        on_path.remove(&path.pop().unwrap());
                    }
                    Some(w) if w == v || on_path.contains(&w) => {}
                    Some(w) if w == u => {
                        on_path.insert(u);
                        reach.extend(g.reachable_avoiding(v, &on_path));
                        on_path.remove(&u);
                    }
                    Some(w) => {
                        path.push(w);
                        on_path.insert(w);
                        stack.push(g.neighbors(w).collect());
                    }
                }
            }
        }
        out.insert((u, v), reach);
    }
    out
}

/// Keeps the candidates that some spanning tree can set: `n` itself (a minor
/// vertex) or one end of the path owning it (an inner vertex) must be
/// reachable through the arc.
pub fn prune_null_z(
    minor: &ReducedComponent,
    candidates: &BTreeSet<(NodeId, NodeId, NodeId)>,
) -> BTreeSet<(NodeId, NodeId, NodeId)> {
    let reach = arc_reach(minor);
    candidates
        .iter()
        .copied()
        .filter(|&(u, v, n)| {
            let r = &reach[&(u, v)];
            match minor.inner_owner(n) {
                Some(k) => r.contains(&k.0) || r.contains(&k.1),
                None => r.contains(&n),
            }
        })
        .collect()
}

/// Terms whose sum says that the flow for `n` leaving `v` continues.
pub fn z_terms(
    minor: &ReducedComponent,
    live: &BTreeSet<(NodeId, NodeId, NodeId)>,
    (u, v, n): (NodeId, NodeId, NodeId),
) -> Vec<ZTerm> {
    let mut terms = Vec::new();
    for m in minor.neighbors(v) {
        if m == u {
            continue;
        }
        if m == n {
            terms.push(ZTerm::Arc(v, n));
        } else if minor.inner_owner(n) == Some(EdgeKey::new(v, m)) {
            terms.push(ZTerm::P { n, negated: v > m });
        } else if m != minor.root && live.contains(&(v, m, n)) {
            terms.push(ZTerm::Z(v, m, n));
        }
    }
    terms
}

/// Allocates the `e`, `d`, `p`, live `z` and their terms for one component.
pub fn component_vars(minor: &ReducedComponent, basis: &CycleBasis) -> ComponentVars {
    let live = prune_null_z(minor, &z_candidates(minor));
    let z = live.iter().map(|&k| (k, z_terms(minor, &live, k))).collect();
    ComponentVars {
        e: minor.arcs.clone(),
        d: basis.shared_edges.keys().copied().collect(),
        p: minor.inner_vertices().map(|(n, _)| n).collect(),
        z,
    }
}

fn e_lit(reg: &VariableRegistry, u: NodeId, v: NodeId) -> Lit {
    Lit::pos(reg.get(VarKey::E(u, v)))
}

fn d_lit(reg: &VariableRegistry, a: NodeId, b: NodeId) -> Lit {
    let k = EdgeKey::new(a, b);
    let id = reg.get(VarKey::D(k.0, k.1));
    if a < b {
        Lit::pos(id)
    } else {
        Lit::neg(id)
    }
}

fn p_lit(reg: &VariableRegistry, n: NodeId, negated: bool) -> Lit {
    Lit { var: reg.get(VarKey::P(n)), neg: negated }
}

fn tag(source: Source) -> impl Fn(Constraint) -> TaggedConstraint {
    move |constraint| TaggedConstraint { constraint, source }
}

/// Every non-root minor vertex has exactly one incoming arc.
pub fn vertex_constraints(minor: &ReducedComponent, reg: &VariableRegistry) -> Vec<TaggedConstraint> {
    minor
        .minor_vertices
        .iter()
        .filter(|&&v| v != minor.root)
        .map(|&v| Constraint::ExactlyOne(minor.neighbors(v).map(|u| reg.get(VarKey::E(u, v))).collect()))
        .map(tag(Source::Vertex))
        .collect()
}

/// An edge carries at most one direction; a `d`-edge's arcs must agree with `d`.
pub fn edge_constraints(
    minor: &ReducedComponent,
    vars: &ComponentVars,
    reg: &VariableRegistry,
) -> Vec<TaggedConstraint> {
    let mut out = Vec::new();
    for &k in &minor.minor_edges {
        if k.contains(minor.root) {
            continue;
        }
        let (a, b) = (k.0, k.1);
        if vars.d.contains(&k) {
            out.push(Constraint::Implication(e_lit(reg, a, b), d_lit(reg, a, b)));
            out.push(Constraint::Implication(e_lit(reg, b, a), d_lit(reg, b, a)));
        } else {
            out.push(Constraint::ForbiddenPair(e_lit(reg, a, b), e_lit(reg, b, a)));
        }
    }
    out.into_iter().map(tag(Source::Edge)).collect()
}

/// No basis cycle is directed in either orientation.
pub fn cycle_constraints(basis: &CycleBasis, reg: &VariableRegistry) -> Vec<TaggedConstraint> {
    let mut out = Vec::new();
    for c in &basis.cycles {
        let forward: Vec<(NodeId, NodeId)> = c.steps().collect();
        let backward: Vec<(NodeId, NodeId)> = forward.iter().map(|&(a, b)| (b, a)).collect();
        for steps in [forward, backward] {
            let lits = steps
                .iter()
                .map(|&(a, b)| {
                    if basis.shared_edges.contains_key(&EdgeKey::new(a, b)) {
                        d_lit(reg, a, b)
                    } else {
                        e_lit(reg, a, b)
                    }
                })
                .collect();
            out.push(Constraint::ProductZero(lits));
        }
    }
    out.into_iter().map(tag(Source::Cycle)).collect()
}

/// Along each lifted path, `p` is monotone: once fed from the upper end, every
/// later inner vertex is too.
pub fn path_constraints(minor: &ReducedComponent, reg: &VariableRegistry) -> Vec<TaggedConstraint> {
    let mut out = Vec::new();
    for &k in &minor.minor_edges {
        let inner = minor.inner(k);
        for w in inner.windows(2) {
            out.push(Constraint::Implication(p_lit(reg, w[1], false), p_lit(reg, w[0], false)));
        }
    }
    out.into_iter().map(tag(Source::Path)).collect()
}

/// A selected arc feeds its whole path from the arc's tail.
pub fn edge_path_constraints(minor: &ReducedComponent, reg: &VariableRegistry) -> Vec<TaggedConstraint> {
    let mut out = Vec::new();
    for &k in &minor.minor_edges {
        let inner = minor.inner(k);
        if inner.is_empty() {
            continue;
        }
        if minor.is_arc(k.0, k.1) {
            out.push(Constraint::Implication(e_lit(reg, k.0, k.1), p_lit(reg, *inner.last().unwrap(), false)));
        }
        if minor.is_arc(k.1, k.0) {
            out.push(Constraint::Implication(e_lit(reg, k.1, k.0), p_lit(reg, inner[0], true)));
        }
    }
    out.into_iter().map(tag(Source::EdgePath)).collect()
}

pub fn term_lit(reg: &VariableRegistry, t: ZTerm) -> Lit {
    match t {
        ZTerm::Arc(v, n) => e_lit(reg, v, n),
        ZTerm::P { n, negated } => p_lit(reg, n, negated),
        ZTerm::Z(v, m, n) => Lit::pos(reg.get(VarKey::Z(v, m, n))),
    }
}

/// Defines every live `z` from its arc and its continuation terms.
pub fn z_definitions(vars: &ComponentVars, reg: &VariableRegistry) -> Vec<TaggedConstraint> {
    vars.z
        .iter()
        .map(|(&(u, v, n), terms)| {
            debug_assert!(!terms.is_empty(), "live z_{u}_{v}_{n} without terms");
            Constraint::ZDefinition {
                z: reg.get(VarKey::Z(u, v, n)),
                arc: reg.get(VarKey::E(u, v)),
                y: (terms.len() >= 2).then(|| reg.get(VarKey::Y(u, v, n))),
                terms: terms.iter().map(|&t| term_lit(reg, t)).collect(),
            }
        })
        .map(tag(Source::ZDef))
        .collect()
}

/// A reduced component together with its cycle basis and variables.
#[derive(Debug, Clone)]
pub struct ComponentPart {
    pub minor: ReducedComponent,
    pub basis: CycleBasis,
    pub vars: ComponentVars,
}

impl ComponentPart {
    pub fn new(minor: ReducedComponent, basis: CycleBasis) -> Self {
        let vars = component_vars(&minor, &basis);
        ComponentPart { minor, basis, vars }
    }
}

/// All variables and constraints of a network.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub registry: VariableRegistry,
    pub constraints: Vec<TaggedConstraint>,
}

impl ConstraintSet {
    pub fn build(parts: &[ComponentPart]) -> Self {
        let registry = VariableRegistry::from_keys(parts.iter().flat_map(|p| p.vars.all_keys()));
        let mut constraints = Vec::new();
        for p in parts {
            constraints.extend(vertex_constraints(&p.minor, &registry));
            constraints.extend(edge_constraints(&p.minor, &p.vars, &registry));
            constraints.extend(cycle_constraints(&p.basis, &registry));
            constraints.extend(path_constraints(&p.minor, &registry));
            constraints.extend(edge_path_constraints(&p.minor, &registry));
            constraints.extend(z_definitions(&p.vars, &registry));
        }
        ConstraintSet { registry, constraints }
    }

    /// Index of the first violated constraint, if any. Only the variables the
    /// constraints mention are read.
    pub fn first_violation(&self, x: &[bool]) -> Option<usize> {
        self.constraints.iter().position(|c| !c.constraint.satisfied(x))
    }

    pub fn count_by_source(&self) -> BTreeMap<Source, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(c.source).or_insert(0) += 1;
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.constraints
                .iter()
                .map(|c| {
                    let mut v = c.constraint.to_json(&self.registry);
                    v["source"] = json!(c.source.label());
                    v
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::build_cycle_basis;
    use crate::netmodel::{Branch, NetworkModel};
    use crate::reduce::{edge_lift, split_biconnected};

    fn c4_part() -> ComponentPart {
        let nodes: Vec<_> = (0..4).map(|i| (i, 1.0, 0.0)).collect();
        let branches = [(0, 1), (1, 2), (2, 3), (3, 0)]
            .iter()
            .map(|&(a, b)| Branch { from: a, to: b, r: 1.0, x: None })
            .collect();
        let net = NetworkModel::new(1.0, 0, &nodes, branches).unwrap();
        let cs = split_biconnected(&net);
        let minor = edge_lift(&cs.components[0]);
        let basis = build_cycle_basis(&minor).unwrap();
        ComponentPart::new(minor, basis)
    }

    #[test]
    fn names_round_trip() {
        for k in [VarKey::E(1, 2), VarKey::D(7, 14), VarKey::P(3), VarKey::Z(0, 2, 3), VarKey::Y(2, 3, 1), VarKey::Ancilla(4)] {
            assert_eq!(VarKey::parse(&k.to_string()), Some(k));
        }
        assert_eq!(VarKey::parse("q_1"), None);
        assert_eq!(VarKey::parse("e_1"), None);
    }

    #[test]
    fn c4_variables() {
        let part = c4_part();
        let set = ConstraintSet::build(std::slice::from_ref(&part));
        let names: Vec<String> = (0..set.registry.len()).map(|i| set.registry.name(i)).collect();
        assert_eq!(
            names,
            ["e_0_2", "e_0_3", "e_2_3", "e_3_2", "p_1", "z_0_2_3", "z_0_3_1", "z_0_3_2", "z_3_2_1"]
        );
        assert_eq!(
            part.vars.z[&(0, 3, 1)],
            vec![ZTerm::Z(3, 2, 1)]
        );
        assert_eq!(part.vars.z[&(3, 2, 1)], vec![ZTerm::P { n: 1, negated: true }]);
    }

    #[test]
    fn c4_feasible_assignments_are_its_four_trees() {
        let part = c4_part();
        let set = ConstraintSet::build(std::slice::from_ref(&part));
        let n = set.registry.len();
        let feasible = (0u32..1 << n)
            .filter(|bits| {
                let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                set.first_violation(&x).is_none()
            })
            .count();
        assert_eq!(feasible, 4);
    }
}
