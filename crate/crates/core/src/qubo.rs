//! Penalty gadgets, model assembly, energy evaluation, metrics and export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constraints::{Constraint, ConstraintSet, Source, TaggedConstraint, VarClass, VarKey, VariableRegistry};
use crate::poly::{Lit, Poly, VarId};

/// Minimum energy added by any violated constraint.
pub const PENALTY_GAP: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
    #[error("model file: {0}")]
    Parse(String),
}

/// An ancilla fixed to the conjunction of two literals in every ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AncillaDef {
    pub var: VarId,
    pub inputs: (Lit, Lit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GadgetKind {
    ExactlyOne,
    ForbiddenPair,
    Implication,
    ProductZero,
    ZDefinition,
}

#[derive(Debug, Clone)]
pub struct PenaltyGadget {
    pub kind: GadgetKind,
    pub source: Source,
    pub constraint: Constraint,
    pub scope: Vec<VarId>,
    pub ancillas: Vec<AncillaDef>,
    pub poly: Poly,
}

/// `2(xy − 2a(x + y) + 3a)`: zero iff `a = x ∧ y`, at least 2 otherwise.
pub fn and_gadget(x: Lit, y: Lit, a: VarId) -> Poly {
    let a = Lit::pos(a);
    let mut p = Poly::new();
    p.add_lit_product(x, y, PENALTY_GAP);
    p.add_lit_product(a, x, -2.0 * PENALTY_GAP);
    p.add_lit_product(a, y, -2.0 * PENALTY_GAP);
    p.add_lit(a, 3.0 * PENALTY_GAP);
    p
}

/// `2(Σ l − c)²` expanded over literals, using `l² = l`.
fn squared_sum(lits: &[Lit], c: f64) -> Poly {
    let mut p = Poly::new();
    p.add_constant(PENALTY_GAP * c * c);
    for (i, &l) in lits.iter().enumerate() {
        p.add_lit(l, PENALTY_GAP * (1.0 - 2.0 * c));
        for &m in &lits[i + 1..] {
            p.add_lit_product(l, m, 2.0 * PENALTY_GAP);
        }
    }
    p
}

/// Turns one constraint into its penalty polynomial, allocating any ancillas
/// it needs in `reg`.
pub fn compile_constraint(c: &TaggedConstraint, reg: &mut VariableRegistry) -> PenaltyGadget {
    let mut ancillas = Vec::new();
    let (kind, poly) = match &c.constraint {
        Constraint::ExactlyOne(vs) => {
            let lits: Vec<Lit> = vs.iter().map(|&v| Lit::pos(v)).collect();
            (GadgetKind::ExactlyOne, squared_sum(&lits, 1.0))
        }
        Constraint::ForbiddenPair(a, b) => {
            let mut p = Poly::new();
            p.add_lit_product(*a, *b, PENALTY_GAP);
            (GadgetKind::ForbiddenPair, p)
        }
        Constraint::Implication(a, b) => {
            let mut p = Poly::new();
            p.add_lit_product(*a, b.negate(), PENALTY_GAP);
            (GadgetKind::Implication, p)
        }
        Constraint::ProductZero(ls) => {
            let mut p = Poly::new();
            let mut acc = ls[0];
            for &l in &ls[1..ls.len() - 1] {
                let a = reg.push_ancilla();
                p.add_scaled(&and_gadget(acc, l, a), 1.0);
                ancillas.push(AncillaDef { var: a, inputs: (acc, l) });
                acc = Lit::pos(a);
            }
            p.add_lit_product(acc, ls[ls.len() - 1], PENALTY_GAP);
            (GadgetKind::ProductZero, p)
        }
        Constraint::ZDefinition { z, arc, y, terms } => {
            let p = match y {
                Some(y) => {
                    let mut lits = terms.clone();
                    lits.push(Lit::neg(*y));
                    // (Σ l − y)² = (Σ l + ¬y − 1)²
                    let mut p = squared_sum(&lits, 1.0);
                    p.add_scaled(&and_gadget(Lit::pos(*arc), Lit::pos(*y), *z), 1.0);
                    p
                }
                None => and_gadget(Lit::pos(*arc), terms[0], *z),
            };
            (GadgetKind::ZDefinition, p)
        }
    };
    let mut scope: Vec<VarId> = constraint_vars(&c.constraint).into_iter().collect();
    scope.sort_unstable();
    PenaltyGadget { kind, source: c.source, constraint: c.constraint.clone(), scope, ancillas, poly }
}

fn constraint_vars(c: &Constraint) -> BTreeSet<VarId> {
    match c {
        Constraint::ExactlyOne(vs) => vs.iter().copied().collect(),
        Constraint::ForbiddenPair(a, b) | Constraint::Implication(a, b) => [a.var, b.var].into(),
        Constraint::ProductZero(ls) => ls.iter().map(|l| l.var).collect(),
        Constraint::ZDefinition { z, arc, y, terms } => {
            let mut s: BTreeSet<VarId> = terms.iter().map(|l| l.var).collect();
            s.insert(*z);
            s.insert(*arc);
            s.extend(*y);
            s
        }
    }
}

/// Enumerates every assignment of the gadget's scope and ancillas and returns
/// the smallest min-over-ancilla energy among violating scope assignments
/// (infinite if none violate). Fails if a satisfying assignment cannot reach 0
/// or a violating one drops below [`PENALTY_GAP`].
pub fn certify_gap(g: &PenaltyGadget) -> Result<f64, String> {
    let scope = &g.scope;
    let anc: Vec<VarId> = g.ancillas.iter().map(|a| a.var).collect();
    if scope.len() + anc.len() > 20 {
        return Err(format!("gadget over {} variables is too large to enumerate", scope.len() + anc.len()));
    }
    let size = scope.iter().chain(&anc).max().map_or(0, |m| m + 1);
    let mut x = vec![false; size];
    let mut gap = f64::INFINITY;
    for s in 0u32..1 << scope.len() {
        for (i, &v) in scope.iter().enumerate() {
            x[v] = s >> i & 1 == 1;
        }
        let mut best = f64::INFINITY;
        for a in 0u32..1 << anc.len() {
            for (i, &v) in anc.iter().enumerate() {
                x[v] = a >> i & 1 == 1;
            }
            best = best.min(g.poly.eval(&x));
        }
        if g.constraint.satisfied(&x) {
            if best.abs() > 1e-12 {
                return Err(format!("satisfying assignment {s:b} has minimum energy {best}"));
            }
        } else {
            if best < PENALTY_GAP - 1e-12 {
                return Err(format!("violating assignment {s:b} has minimum energy {best}"));
            }
            gap = gap.min(best);
        }
    }
    Ok(gap)
}

#[derive(Debug, Clone)]
pub struct QuboModel {
    pub registry: VariableRegistry,
    pub linear: Vec<f64>,
    /// Keys `(i, j)` with `i < j`; zero coefficients are dropped.
    pub quadratic: BTreeMap<(VarId, VarId), f64>,
    pub offset: f64,
    pub scale: f64,
    /// Sources contributing to each quadratic pair, as [`Source::bit`] masks.
    /// Empty for models read back from a file.
    pub provenance: BTreeMap<(VarId, VarId), u8>,
    /// Ancilla definitions in allocation order.
    pub ancillas: Vec<AncillaDef>,
    neighbors: Vec<Vec<(VarId, f64)>>,
}

impl QuboModel {
    fn from_parts(
        registry: VariableRegistry,
        linear: Vec<f64>,
        quadratic: BTreeMap<(VarId, VarId), f64>,
        offset: f64,
        scale: f64,
    ) -> Self {
        let mut neighbors = vec![Vec::new(); registry.len()];
        for (&(a, b), &c) in &quadratic {
            neighbors[a].push((b, c));
            neighbors[b].push((a, c));
        }
        QuboModel {
            registry,
            linear,
            quadratic,
            offset,
            scale,
            provenance: BTreeMap::new(),
            ancillas: Vec::new(),
            neighbors,
        }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for (i, &a) in self.linear.iter().enumerate() {
            if x[i] {
                e += a;
            }
        }
        for (&(i, j), &b) in &self.quadratic {
            if x[i] && x[j] {
                e += b;
            }
        }
        e
    }

    /// Energy change from flipping bit `i`.
    pub fn delta(&self, i: VarId, x: &[bool]) -> f64 {
        let field = self.linear[i] + self.neighbors[i].iter().filter(|(j, _)| x[*j]).map(|(_, b)| b).sum::<f64>();
        if x[i] {
            -field
        } else {
            field
        }
    }

    pub fn neighbors(&self, i: VarId) -> &[(VarId, f64)] {
        &self.neighbors[i]
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear.iter().chain(self.quadratic.values()).fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sets every ancilla to the conjunction it stands for.
    pub fn complete_ancillas(&self, x: &mut [bool]) {
        for a in &self.ancillas {
            x[a.var] = a.inputs.0.eval(x) && a.inputs.1.eval(x);
        }
    }

    pub fn metrics(&self) -> ModelMetrics {
        let mut variables = BTreeMap::new();
        for c in VarClass::ALL {
            variables.insert(c, self.registry.count(c));
        }
        let mut interactions: BTreeMap<Source, usize> = Source::ALL.iter().map(|&s| (s, 0)).collect();
        for mask in self.provenance.values() {
            for s in Source::ALL {
                if mask & s.bit() != 0 {
                    *interactions.get_mut(&s).unwrap() += 1;
                }
            }
        }
        let degrees: Vec<usize> = self.neighbors.iter().map(Vec::len).collect();
        let mut histogram = BTreeMap::new();
        for &d in &degrees {
            *histogram.entry(d).or_insert(0) += 1;
        }
        ModelMetrics {
            variables,
            interactions,
            total_variables: self.len(),
            total_interactions: self.quadratic.len(),
            histogram,
            min_degree: degrees.iter().copied().min().unwrap_or(0),
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            mean_degree: if degrees.is_empty() { 0.0 } else { degrees.iter().sum::<usize>() as f64 / degrees.len() as f64 },
        }
    }

    pub fn to_json(&self) -> String {
        let names: Vec<String> = (0..self.len()).map(|i| self.registry.name(i)).collect();
        let mut linear = Map::new();
        for (i, &a) in self.linear.iter().enumerate() {
            if a != 0.0 {
                linear.insert(names[i].clone(), json!(round12(a)));
            }
        }
        let quadratic: Vec<Value> = self
            .quadratic
            .iter()
            .map(|(&(i, j), &b)| json!([names[i], names[j], round12(b)]))
            .collect();
        let v = json!({
            "variables": names,
            "linear": linear,
            "quadratic": quadratic,
            "offset": round12(self.offset),
            "scale": self.scale,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, QuboError> {
        let bad = |m: &str| QuboError::Parse(m.to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| QuboError::Parse(e.to_string()))?;
        let names = v["variables"].as_array().ok_or_else(|| bad("missing \"variables\" array"))?;
        let keys = names
            .iter()
            .map(|n| n.as_str().and_then(VarKey::parse).ok_or_else(|| bad(&format!("bad variable name {n}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let registry = VariableRegistry::from_ordered(keys).ok_or_else(|| bad("duplicate variable names"))?;
        let id = |n: &Value| {
            n.as_str()
                .and_then(VarKey::parse)
                .and_then(|k| registry.id(&k))
                .ok_or_else(|| bad(&format!("unknown variable {n}")))
        };
        let mut linear = vec![0.0; registry.len()];
        for (name, c) in v["linear"].as_object().ok_or_else(|| bad("missing \"linear\" object"))? {
            let i = id(&Value::String(name.clone()))?;
            linear[i] = c.as_f64().ok_or_else(|| bad("linear coefficient is not a number"))?;
        }
        let mut quadratic = BTreeMap::new();
        for t in v["quadratic"].as_array().ok_or_else(|| bad("missing \"quadratic\" array"))? {
            let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("quadratic entries are [a, b, coeff]"))?;
            let (a, b) = (id(&t[0])?, id(&t[1])?);
            let c = t[2].as_f64().ok_or_else(|| bad("quadratic coefficient is not a number"))?;
            if a == b {
                return Err(bad("quadratic self-pair"));
            }
            *quadratic.entry((a.min(b), a.max(b))).or_insert(0.0) += c;
        }
        let offset = v["offset"].as_f64().ok_or_else(|| bad("missing \"offset\""))?;
        let scale = v["scale"].as_f64().ok_or_else(|| bad("missing \"scale\""))?;
        Ok(QuboModel::from_parts(registry, linear, quadratic, offset, scale))
    }

    /// `i j coeff` lines (diagonal for linear terms) after a comment header.
    pub fn to_qubo_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# variables {}", self.len()).unwrap();
        writeln!(s, "# offset {}", round12(self.offset)).unwrap();
        writeln!(s, "# scale {}", self.scale).unwrap();
        for (i, &a) in self.linear.iter().enumerate() {
            if a != 0.0 {
                writeln!(s, "{i} {i} {}", round12(a)).unwrap();
            }
        }
        for (&(i, j), &b) in &self.quadratic {
            writeln!(s, "{i} {j} {}", round12(b)).unwrap();
        }
        s
    }

    /// CPLEX LP format with a quadratic objective over binaries.
    pub fn to_lp(&self) -> String {
        let names: Vec<String> = (0..self.len()).map(|i| self.registry.name(i)).collect();
        let term = |c: f64, body: &str, first: bool| {
            let c = round12(c);
            let sign = if c < 0.0 { "-" } else if first { "" } else { "+" };
            format!("{sign} {} {body}", c.abs())
        };
        let mut s = String::new();
        writeln!(s, "\\ constant offset {}", round12(self.offset)).unwrap();
        writeln!(s, "Minimize").unwrap();
        s.push_str(" obj:");
        let mut first = true;
        for (i, &a) in self.linear.iter().enumerate() {
            if a != 0.0 {
                write!(s, "\n   {}", term(a, &names[i], first)).unwrap();
                first = false;
            }
        }
        if !self.quadratic.is_empty() {
            write!(s, "\n   {} [", if first { "" } else { "+" }).unwrap();
            let mut qfirst = true;
            for (&(i, j), &b) in &self.quadratic {
                write!(s, "\n     {}", term(2.0 * b, &format!("{} * {}", names[i], names[j]), qfirst)).unwrap();
                qfirst = false;
            }
            s.push_str("\n   ] / 2");
            first = false;
        }
        if first {
            s.push_str(" 0");
        }
        s.push_str("\nSubject To\nBinaries\n");
        for n in &names {
            writeln!(s, " {n}").unwrap();
        }
        s.push_str("End\n");
        s
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// Compiles every constraint and adds `scale × losses`.
pub fn assemble(
    constraints: &ConstraintSet,
    losses: &Poly,
    scale: f64,
) -> Result<(QuboModel, Vec<PenaltyGadget>), QuboError> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(QuboError::BadScale(scale));
    }
    let mut registry = constraints.registry.clone();
    let gadgets: Vec<PenaltyGadget> =
        constraints.constraints.iter().map(|c| compile_constraint(c, &mut registry)).collect();

    let mut total = Poly::new();
    let mut provenance: BTreeMap<(VarId, VarId), u8> = BTreeMap::new();
    for g in &gadgets {
        total.add_scaled(&g.poly, 1.0);
        for (&k, &c) in &g.poly.quadratic {
            if c != 0.0 {
                *provenance.entry(k).or_insert(0) |= g.source.bit();
            }
        }
    }
    total.add_scaled(losses, scale);
    for (&k, &c) in &losses.quadratic {
        if c != 0.0 {
            *provenance.entry(k).or_insert(0) |= Source::Losses.bit();
        }
    }

    let mut linear = vec![0.0; registry.len()];
    for (&v, &c) in &total.linear {
        linear[v] = c;
    }
    let quadratic: BTreeMap<(VarId, VarId), f64> = total.quadratic.into_iter().filter(|(_, c)| *c != 0.0).collect();
    provenance.retain(|k, _| quadratic.contains_key(k));
    let mut model = QuboModel::from_parts(registry, linear, quadratic, total.constant, scale);
    model.provenance = provenance;
    model.ancillas = gadgets.iter().flat_map(|g| g.ancillas.iter().copied()).collect();
    Ok((model, gadgets))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelMetrics {
    pub variables: BTreeMap<VarClass, usize>,
    /// Quadratic pairs each source contributes to; a pair fed by several
    /// sources counts once in each.
    pub interactions: BTreeMap<Source, usize>,
    pub total_variables: usize,
    pub total_interactions: usize,
    /// Number of variables by count of distinct quadratic partners.
    pub histogram: BTreeMap<usize, usize>,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
}

impl ModelMetrics {
    /// Most common degree and how many variables have it.
    pub fn histogram_peak(&self) -> Option<(usize, usize)> {
        self.histogram.iter().max_by_key(|(d, n)| (**n, std::cmp::Reverse(**d))).map(|(d, n)| (*d, *n))
    }

    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("interactions,variables\n");
        for (d, n) in &self.histogram {
            writeln!(s, "{d},{n}").unwrap();
        }
        s
    }
}
