//! Single-flip Metropolis simulated annealing with independent restarts.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{SolveResult, SolverStats};
use crate::qubo::QuboModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Starting temperature; the largest absolute coefficient when unset.
    pub t_start: Option<f64>,
    pub t_end: f64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams { sweeps: 20_000, restarts: 100, seed: 0, t_start: None, t_end: 1e-3 }
    }
}

struct Run {
    best: Vec<bool>,
    energy: f64,
    trace: Vec<f64>,
}

fn run(model: &QuboModel, p: &AnnealParams, restart: usize) -> Run {
    let n = model.len();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    rng.set_stream(restart as u64);
    let mut x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    // local fields h_i = a_i + Σ_j b_ij x_j
    let mut h: Vec<f64> = (0..n)
        .map(|i| model.linear[i] + model.neighbors(i).iter().filter(|(j, _)| x[*j]).map(|(_, b)| b).sum::<f64>())
        .collect();
    let mut e = model.energy(&x);
    let mut best = x.clone();
    let mut best_e = e;
    let mut trace = vec![best_e];

    let t0 = p.t_start.unwrap_or_else(|| model.max_abs_coefficient()).max(p.t_end);
    let ratio = if p.sweeps > 1 { (p.t_end / t0).powf(1.0 / (p.sweeps - 1) as f64) } else { 1.0 };
    let mut t = t0;
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..p.sweeps {
        order.shuffle(&mut rng);
        for &i in &order {
            let d = if x[i] { -h[i] } else { h[i] };
            if d <= 0.0 || rng.gen::<f64>() < (-d / t).exp() {
                let sign = if x[i] { -1.0 } else { 1.0 };
                x[i] = !x[i];
                e += d;
                for &(j, b) in model.neighbors(i) {
                    h[j] += sign * b;
                }
                if e < best_e - 1e-12 {
                    best_e = e;
                    best.copy_from_slice(&x);
                }
            }
        }
        trace.push(best_e);
        t *= ratio;
    }
    let energy = model.energy(&best);
    Run { best, energy, trace }
}

/// Best of `restarts` independent annealing runs, merged by energy and then
/// by lexicographic assignment so the result does not depend on scheduling.
pub fn simulated_annealing(model: &QuboModel, params: &AnnealParams) -> SolveResult {
    let start = Instant::now();
    let runs: Vec<Run> = (0..params.restarts.max(1)).into_par_iter().map(|r| run(model, params, r)).collect();
    let winner = runs
        .into_iter()
        .min_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.best.cmp(&b.best)))
        .unwrap();
    SolveResult {
        energy: winner.energy,
        ties: vec![winner.best.clone()],
        assignment: winner.best,
        trace: winner.trace,
        stats: SolverStats {
            method: "sa".into(),
            sweeps: params.sweeps,
            restarts: params.restarts.max(1),
            seed: Some(params.seed),
            evaluated: (params.sweeps * params.restarts.max(1) * model.len()) as u64,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    }
}
