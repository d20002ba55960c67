//! Exact minimisation by enumerating every assignment in Gray-code order.

use std::time::Instant;

use thiserror::Error;

use super::{SolveResult, SolverStats};
use crate::qubo::QuboModel;

pub const DEFAULT_MAX_VARS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("model has {vars} variables; brute force is capped at {cap}")]
pub struct TooLarge {
    pub vars: usize,
    pub cap: usize,
}

/// Global minimum of the model. Every minimiser (within `1e-9` absolute) is
/// listed in `ties`, in enumeration order.
pub fn brute_force_qubo(model: &QuboModel, max_vars: usize) -> Result<SolveResult, TooLarge> {
    let n = model.len();
    if n > max_vars || n >= 64 {
        return Err(TooLarge { vars: n, cap: max_vars.min(63) });
    }
    let start = Instant::now();
    let mut x = vec![false; n];
    let mut e = model.energy(&x);
    let mut best = e;
    let mut ties = vec![x.clone()];
    for k in 1u64..1 << n {
        let i = k.trailing_zeros() as usize;
        e += model.delta(i, &x);
        x[i] = !x[i];
        if e < best - 1e-9 {
            best = e;
            ties.clear();
            ties.push(x.clone());
        } else if (e - best).abs() <= 1e-9 {
            ties.push(x.clone());
        }
    }
    ties.sort();
    let assignment = ties[0].clone();
    let energy = model.energy(&assignment);
    Ok(SolveResult {
        assignment,
        energy,
        ties,
        trace: Vec::new(),
        stats: SolverStats {
            method: "brute".into(),
            evaluated: 1u64 << n,
            wall_seconds: start.elapsed().as_secs_f64(),
            ..Default::default()
        },
    })
}
