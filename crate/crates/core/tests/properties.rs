mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridqubo::constraints::{ConstraintSet, VarKey};
use gridqubo::netmodel::{Branch, NetworkModel};
use gridqubo::pipeline::{CompileError, Compiled};
use gridqubo::qubo::{assemble, round12, QuboModel};
use gridqubo::reduce::{edge_lift, split_biconnected};
use gridqubo::solve::{exhaustive_optimum, simulated_annealing, AnnealParams, SpanningTrees};

use common::*;

/// Random biconnected outerplanar graph on a polygon `0..k`, with some links
/// subdivided and a feeder bridge from a new root.
fn random_edges(seed: u64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(3..8);
    let mut edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    let mut stack = vec![(0, k - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let m = rng.gen_range(i + 1..j);
        for (a, b) in [(i, m), (m, j)] {
            if b - a >= 2 && rng.gen_bool(0.6) {
                edges.push((a, b));
            }
            stack.push((a, b));
        }
    }
    let mut n = k;
    let mut out = Vec::new();
    for (a, b) in edges {
        let extra = if rng.gen_bool(0.4) { rng.gen_range(1..3) } else { 0 };
        let mut prev = a;
        for _ in 0..extra {
            out.push((prev, n));
            prev = n;
            n += 1;
        }
        out.push((prev, b));
    }
    let feed = rng.gen_range(0..k);
    out.push((n, feed));
    (n + 1, out)
}

fn random_net(seed: u64, load_scale: f64) -> NetworkModel {
    let (n, edges) = random_edges(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let root = n - 1;
    let nodes: Vec<_> = (0..n)
        .map(|i| {
            let (p, q) = if i == root { (0.0, 0.0) } else { (rng.gen_range(0.0..100.0), rng.gen_range(0.0..60.0)) };
            (i, p * load_scale, q * load_scale)
        })
        .collect();
    let branches = edges.iter().map(|&(a, b)| Branch { from: a, to: b, r: rng.gen_range(0.1..2.0), x: None }).collect();
    NetworkModel::new(12.66, root, &nodes, branches).unwrap()
}

fn build(net: &NetworkModel) -> Option<Compiled> {
    match Compiled::build(net, 0.01) {
        Ok(c) => Some(c),
        Err(CompileError::Topology(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

fn baran_wu_model() -> &'static Compiled {
    static C: OnceLock<Compiled> = OnceLock::new();
    C.get_or_init(|| Compiled::build(&baran_wu(), 0.01).unwrap())
}

fn coefficients(m: &QuboModel) -> BTreeMap<(String, String), f64> {
    let name = |i| match m.registry.key(i) {
        VarKey::Ancilla(_) => None,
        _ => Some(m.registry.name(i)),
    };
    let mut out = BTreeMap::new();
    for (i, &a) in m.linear.iter().enumerate() {
        if let Some(n) = name(i) {
            out.insert((n.clone(), n), round12(a));
        }
    }
    for (&(i, j), &b) in &m.quadratic {
        if let (Some(a), Some(c)) = (name(i), name(j)) {
            let k = if a <= c { (a, c) } else { (c, a) };
            out.insert(k, round12(b));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn encode_decode_round_trip(seed in any::<u64>()) {
        let net = random_net(seed, 1.0);
        let Some(c) = build(&net) else { return Ok(()) };
        let br = bridges(&net);
        for tree in SpanningTrees::new(net.edge_keys()).take(400) {
            let x = c.encode(&tree);
            prop_assert_eq!(c.decode(&x), Ok(tree.clone()));
            prop_assert_eq!(c.penalty(&x), 0.0);
            let (total, fixed) = tree_loss(&net, &tree, &br);
            let expect = 0.01 * (total - fixed);
            prop_assert!((c.model.energy(&x) - expect).abs() <= 1e-8 * expect.max(1e-9));
        }
    }

    #[test]
    fn lifted_minor_accounts_for_every_tree(seed in any::<u64>()) {
        let net = random_net(seed, 1.0);
        let cs = split_biconnected(&net);
        let mut product = 1u64;
        for comp in cs.non_trivial() {
            let minor = edge_lift(comp);
            let mut sum = 0u64;
            for t0 in SpanningTrees::new(minor.minor_edges.iter().copied()) {
                sum += minor
                    .minor_edges
                    .iter()
                    .filter(|e| !t0.contains(e))
                    .map(|e| minor.path_map[e].len() as u64 - 1)
                    .product::<u64>();
            }
            product *= sum;
        }
        prop_assert_eq!(product as f64, tree_count(&net.edge_keys()).round());
    }

    #[test]
    fn scaling_loads_scales_losses_quadratically(seed in any::<u64>(), k in 0.5f64..4.0) {
        let a = random_net(seed, 1.0);
        let b = random_net(seed, k);
        let (Some(ca), Some(cb)) = (build(&a), build(&b)) else { return Ok(()) };
        let oa = exhaustive_optimum(&a, &ca.components).unwrap();
        let ob = exhaustive_optimum(&b, &cb.components).unwrap();
        prop_assert_eq!(&oa.ties, &ob.ties);
        let ratio = ob.losses.switchable_kw / oa.losses.switchable_kw;
        prop_assert!((ratio - k * k).abs() <= 1e-9 * k * k);
        let x = ca.encode(&oa.best);
        let ea = ca.model.energy(&x);
        let eb = cb.model.energy(&cb.encode(&oa.best));
        prop_assert!((eb - k * k * ea).abs() <= 1e-9 * eb.abs().max(1e-12));
    }

    #[test]
    fn merge_order_does_not_change_coefficients(seed in any::<u64>()) {
        let c = baran_wu_model();
        let mut shuffled = c.constraints.constraints.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let set = ConstraintSet { registry: c.constraints.registry.clone(), constraints: shuffled };
        let (m, _) = assemble(&set, &c.losses, 0.01).unwrap();
        prop_assert_eq!(m.len(), c.model.len());
        prop_assert_eq!(coefficients(&m), coefficients(&c.model));
        prop_assert!((m.offset - c.model.offset).abs() < 1e-9);
    }

    #[test]
    fn flip_delta_matches_energy_difference(seed in any::<u64>()) {
        let m = &baran_wu_model().model;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<bool> = (0..m.len()).map(|_| rng.gen_bool(0.3)).collect();
        for _ in 0..20 {
            let i = rng.gen_range(0..m.len());
            let before = m.energy(&x);
            let d = m.delta(i, &x);
            x[i] = !x[i];
            let after = m.energy(&x);
            prop_assert!((after - before - d).abs() <= 1e-9 * before.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn annealing_trace_never_increases(seed in any::<u64>()) {
        let net = random_net(seed, 1.0);
        let Some(c) = build(&net) else { return Ok(()) };
        let r = simulated_annealing(&c.model, &AnnealParams { seed, sweeps: 300, restarts: 2, ..Default::default() });
        prop_assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!((c.model.energy(&r.assignment) - r.energy).abs() <= 1e-9 * r.energy.abs().max(1.0));
        if let Some(&last) = r.trace.last() {
            prop_assert!((last - r.energy).abs() <= 1e-9 * r.energy.abs().max(1.0));
        }
    }
}

#[test]
fn random_networks_reach_several_shapes() {
    let sizes: BTreeSet<usize> = (0..50).map(|s| random_edges(s).1.len()).collect();
    assert!(sizes.len() > 5);
}
