//! Equivalence suite: every radial configuration, encoded, must satisfy all
//! constraints and score exactly its scaled loss, and the model's optimum must
//! agree with the exhaustive oracle.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netmodel::EdgeKey;
use crate::pipeline::Compiled;
use crate::qubo::QuboModel;
use crate::solve::{brute_force_qubo, exhaustive_optimum, open_links, SpanningTrees, TIE_TOLERANCE};

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Relative tolerance of the energy check.
    pub rel_tol: f64,
    /// Random single- to triple-bit perturbations of encoded optima to test.
    pub perturbations: usize,
    pub seed: u64,
    /// Run the full brute-force dominance check when the model is this small.
    pub max_brute_vars: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { rel_tol: 1e-6, perturbations: 2000, seed: 0, max_brute_vars: 26 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub trees: u64,
    pub energy_mismatches: u64,
    pub nonzero_penalties: u64,
    pub roundtrip_failures: u64,
    pub first_failure: Option<String>,
    pub oracle_open: BTreeSet<EdgeKey>,
    pub oracle_loss_kw: f64,
    /// Lowest energy over all encoded configurations and its open links.
    pub best_energy: f64,
    pub best_open: BTreeSet<EdgeKey>,
    pub optimum_agrees: bool,
    pub perturbations_checked: u64,
    pub perturbations_below_optimum: u64,
    /// `Some(ok)` when the brute-force dominance check ran.
    pub brute_force: Option<bool>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.energy_mismatches == 0
            && self.nonzero_penalties == 0
            && self.roundtrip_failures == 0
            && self.optimum_agrees
            && self.perturbations_below_optimum == 0
            && self.brute_force != Some(false)
    }

    fn fail(&mut self, msg: String) {
        if self.first_failure.is_none() {
            self.first_failure = Some(msg);
        }
    }

    pub fn render(&self) -> String {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut lines = vec![
            format!("spanning trees checked: {}", self.trees),
            format!("{} energy = scale x loss ({} mismatches)", verdict(self.energy_mismatches == 0), self.energy_mismatches),
            format!("{} constraint penalty zero ({} nonzero)", verdict(self.nonzero_penalties == 0), self.nonzero_penalties),
            format!("{} decode(encode(T)) = T ({} failures)", verdict(self.roundtrip_failures == 0), self.roundtrip_failures),
            format!(
                "{} optimum cross-check: oracle {:.4} kW open {}, model best energy {:.6} open {}",
                verdict(self.optimum_agrees),
                self.oracle_loss_kw,
                fmt_links(&self.oracle_open),
                self.best_energy,
                fmt_links(&self.best_open)
            ),
            format!(
                "{} infeasible perturbations above optimum ({} checked, {} below)",
                verdict(self.perturbations_below_optimum == 0),
                self.perturbations_checked,
                self.perturbations_below_optimum
            ),
        ];
        match self.brute_force {
            Some(ok) => lines.push(format!("{} brute-force global minimum is an optimal tree", verdict(ok))),
            None => lines.push("SKIP brute-force dominance (model too large)".into()),
        }
        if let Some(f) = &self.first_failure {
            lines.push(format!("first failure: {f}"));
        }
        lines.push(verdict(self.passed()).to_string());
        lines.join("\n") + "\n"
    }
}

pub fn fmt_links(links: &BTreeSet<EdgeKey>) -> String {
    let parts: Vec<String> = links.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Runs the suite against `model`, which defaults to the compiled model and
/// must otherwise have the same variables in the same order.
pub fn equivalence_suite(c: &Compiled, model: Option<&QuboModel>, opts: &ValidateOptions) -> ValidationReport {
    let model = model.unwrap_or(&c.model);
    let scale = model.scale;
    let mut r = ValidationReport { best_energy: f64::INFINITY, ..Default::default() };
    let mut optimal_encodings = Vec::new();

    for tree in SpanningTrees::new(c.net.edge_keys()) {
        r.trees += 1;
        let x = c.encode(&tree);
        let open = open_links(&c.net, &tree);
        let loss = c.tree_losses(&tree).expect("enumerated trees span the network").switchable_kw;
        let e = model.energy(&x);
        let expect = scale * loss;
        if (e - expect).abs() > opts.rel_tol * expect.abs().max(scale) {
            r.energy_mismatches += 1;
            r.fail(format!("open {}: energy {e} but scaled loss {expect}", fmt_links(&open)));
        }
        let pen = c.penalty(&x);
        if pen != 0.0 || c.constraints.first_violation(&x).is_some() {
            r.nonzero_penalties += 1;
            r.fail(format!("open {}: constraint penalty {pen}", fmt_links(&open)));
        }
        match c.decode(&x) {
            Ok(t) if t == tree => {}
            other => {
                r.roundtrip_failures += 1;
                r.fail(format!("open {}: decoded to {other:?}", fmt_links(&open)));
            }
        }
        if e < r.best_energy - 1e-12 || (e - r.best_energy).abs() <= 1e-12 && open < r.best_open {
            r.best_energy = e;
            r.best_open = open;
            optimal_encodings.push(x);
        }
    }

    match exhaustive_optimum(&c.net, &c.components) {
        Some(o) => {
            r.oracle_open = open_links(&c.net, &o.best);
            r.oracle_loss_kw = o.losses.switchable_kw;
            let tol = TIE_TOLERANCE.max(opts.rel_tol) * o.losses.switchable_kw.abs() * scale;
            r.optimum_agrees = o.ties.contains(&r.best_open)
                && (r.best_energy - scale * o.losses.switchable_kw).abs() <= tol.max(1e-9);
            if !r.optimum_agrees {
                r.fail(format!("model optimum {} differs from oracle {}", fmt_links(&r.best_open), fmt_links(&r.oracle_open)));
            }
        }
        None => r.fail("no spanning tree".into()),
    }

    if let Some(base) = optimal_encodings.last() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let n = model.len();
        for _ in 0..opts.perturbations {
            let mut x = base.clone();
            for _ in 0..rng.gen_range(1..=3) {
                let i = rng.gen_range(0..n);
                x[i] = !x[i];
            }
            if c.decode(&x).is_err() {
                r.perturbations_checked += 1;
                if model.energy(&x) <= r.best_energy {
                    r.perturbations_below_optimum += 1;
                    r.fail(format!("infeasible perturbation has energy {} <= optimum", model.energy(&x)));
                }
            }
        }
    }

    if model.len() <= opts.max_brute_vars {
        let ok = match brute_force_qubo(model, opts.max_brute_vars) {
            Ok(res) => res.ties.iter().all(|x| match c.decode(x) {
                Ok(t) => {
                    let l = c.tree_losses(&t).unwrap().switchable_kw;
                    (l - r.oracle_loss_kw).abs() <= 1e-9 * r.oracle_loss_kw.abs().max(1.0)
                }
                Err(_) => false,
            }),
            Err(_) => false,
        };
        if !ok {
            r.fail("brute-force minimum is not an optimal tree".into());
        }
        r.brute_force = Some(ok);
    }
    r
}
