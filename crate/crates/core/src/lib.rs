//! Compiles minimum-loss reconfiguration of radial distribution networks into
//! compact QUBO models, with exact and heuristic solvers.

pub mod cli;
pub mod constraints;
pub mod cycles;
pub mod graph;
pub mod losses;
pub mod netmodel;
pub mod pipeline;
pub mod poly;
pub mod qubo;
pub mod reduce;
pub mod solve;
pub mod validate;
