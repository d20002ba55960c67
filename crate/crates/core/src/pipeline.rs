//! End-to-end compilation of a network into a QUBO model, with the context
//! needed to translate between configurations and assignments.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::constraints::{ComponentPart, ConstraintSet};
use crate::cycles::{build_cycle_basis, TopologyError};
use crate::losses::{total_loss_terms, tree_losses, LossBreakdown};
use crate::netmodel::{EdgeKey, NetworkModel};
use crate::poly::Poly;
use crate::qubo::{assemble, PenaltyGadget, QuboError, QuboModel};
use crate::reduce::{edge_lift, split_biconnected, ComponentSet};
use crate::solve::{self, DecodeError, SolveResult};

pub const DEFAULT_SCALE: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub net: NetworkModel,
    pub components: ComponentSet,
    pub parts: Vec<ComponentPart>,
    pub constraints: ConstraintSet,
    /// Loss polynomial in kW, before scaling.
    pub losses: Poly,
    pub gadgets: Vec<PenaltyGadget>,
    pub model: QuboModel,
}

impl Compiled {
    pub fn build(net: &NetworkModel, scale: f64) -> Result<Self, CompileError> {
        Self::build_with(net, scale, true)
    }

    /// Like [`Compiled::build`]; without losses the model only penalises
    /// constraint violations.
    pub fn build_with(net: &NetworkModel, scale: f64, with_losses: bool) -> Result<Self, CompileError> {
        let components = split_biconnected(net);
        let parts = components
            .non_trivial()
            .map(|c| {
                let minor = edge_lift(c);
                let basis = build_cycle_basis(&minor)?;
                Ok(ComponentPart::new(minor, basis))
            })
            .collect::<Result<Vec<_>, TopologyError>>()?;
        let constraints = ConstraintSet::build(&parts);
        let losses =
            if with_losses { total_loss_terms(net, &parts, &constraints.registry) } else { Poly::new() };
        let (model, gadgets) = assemble(&constraints, &losses, scale)?;
        Ok(Compiled { net: net.clone(), components, parts, constraints, losses, gadgets, model })
    }

    /// Assignment of a spanning tree, ancillas included.
    pub fn encode(&self, tree: &BTreeSet<EdgeKey>) -> Vec<bool> {
        let mut x = solve::encode(&self.parts, &self.constraints.registry, tree);
        x.resize(self.model.len(), false);
        self.model.complete_ancillas(&mut x);
        x
    }

    /// Checks every constraint, then rebuilds the spanning tree.
    pub fn decode(&self, x: &[bool]) -> Result<BTreeSet<EdgeKey>, DecodeError> {
        if let Some(index) = self.constraints.first_violation(x) {
            let tag = self.constraints.constraints[index].source;
            return Err(DecodeError::Infeasible { index, tag });
        }
        solve::decode(&self.net, &self.components, &self.parts, &self.constraints.registry, x)
    }

    /// Energy contributed by the penalty gadgets alone.
    pub fn penalty(&self, x: &[bool]) -> f64 {
        self.gadgets.iter().map(|g| g.poly.eval(x)).sum()
    }

    pub fn tree_losses(&self, tree: &BTreeSet<EdgeKey>) -> Option<LossBreakdown> {
        tree_losses(&self.net, tree, &self.components)
    }

    pub fn solution_json(&self, result: &SolveResult) -> Value {
        let decoded = self.decode(&result.assignment);
        let mut v = json!({
            "energy": result.energy,
            "feasible": decoded.is_ok(),
            "solver": stats_json(result),
        });
        match decoded {
            Ok(tree) => {
                let l = self.tree_losses(&tree).expect("decoded trees span the network");
                v["open_links"] = links_json(&solve::open_links(&self.net, &tree));
                v["loss_kw"] = json!(l.switchable_kw);
                v["total_loss_kw"] = json!(l.total_kw());
            }
            Err(e) => {
                v["open_links"] = Value::Null;
                v["loss_kw"] = Value::Null;
                v["infeasibility"] = json!(e.to_string());
            }
        }
        v
    }
}

pub fn links_json(links: &BTreeSet<EdgeKey>) -> Value {
    Value::Array(links.iter().map(|e| json!([e.0, e.1])).collect())
}

/// Solver statistics without wall time, so equal runs serialize identically.
pub fn stats_json(result: &SolveResult) -> Value {
    let s = &result.stats;
    json!({
        "method": s.method,
        "sweeps": s.sweeps,
        "restarts": s.restarts,
        "seed": s.seed,
        "evaluated": s.evaluated,
    })
}
