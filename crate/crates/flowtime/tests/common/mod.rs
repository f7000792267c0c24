//! Independent checks shared by the integration tests.

#![allow(dead_code)]

pub mod cases;
pub mod laws;

use flowtime::audit::{audit_log, audit_passes};
use flowtime::construction::{Phase, SolveOutcome};
use flowtime::expand::phi_project;
use flowtime::graph::{NetworkSpec, ResArc, ResidualView, Walk};
use flowtime::statics::find_negative_cycle_in;

/// All simple cycles of a residual network, each listed once (rooted at its smallest node).
pub fn simple_cycles(view: &ResidualView) -> Vec<Walk> {
    let net = view.net;
    let n = net.node_count();
    let mut out = Vec::new();
    for root in 0..n {
        let mut on_path = vec![false; n];
        let mut arcs: Vec<ResArc> = Vec::new();
        fn dfs(
            view: &ResidualView,
            root: usize,
            v: usize,
            on_path: &mut Vec<bool>,
            arcs: &mut Vec<ResArc>,
            out: &mut Vec<Walk>,
        ) {
            let net = view.net;
            for ra in view.out_arcs(v).collect::<Vec<_>>() {
                let w = ra.head(net);
                if w == root {
                    arcs.push(ra);
                    out.push(Walk::from_arcs(net, root, arcs.clone()).unwrap());
                    arcs.pop();
                } else if w > root && !on_path[w] {
                    on_path[w] = true;
                    arcs.push(ra);
                    dfs(view, root, w, on_path, arcs, out);
                    arcs.pop();
                    on_path[w] = false;
                }
            }
        }
        on_path[root] = true;
        dfs(view, root, root, &mut on_path, &mut arcs, &mut out);
    }
    out
}

/// A simple cycle with zero transit and negative cost in the residual of `x`.
pub fn negative_zero_transit_cycle(net: &NetworkSpec, x: &[i64]) -> Option<Walk> {
    let view = ResidualView::new(net, x).unwrap();
    simple_cycles(&view)
        .into_iter()
        .find(|c| c.transit(net) == 0 && c.cost(net) < 0)
}

/// After a completed phase 1.1 the projected residual has no negative zero-transit cycle.
pub fn post_step_1_1(out: &SolveOutcome) -> Option<bool> {
    if !out.log.step_1_1.is_completed() {
        return None;
    }
    let iv = out.after_step_1_1.interval.as_ref()?;
    let phi = phi_project(&out.ten, &out.after_step_1_1.flow, iv).unwrap();
    Some(negative_zero_transit_cycle(out.ten.base_network(), &phi.values).is_none())
}

/// After a completed phase 1.2 the band of the certified interval has no negative cycle.
pub fn post_step_1_2(out: &SolveOutcome) -> Option<bool> {
    if !out.log.step_1_2.is_completed() {
        return None;
    }
    let iv = out.after_step_1_2.interval.as_ref()?;
    let band = out.ten.band(iv.start, iv.end).unwrap();
    let net = out.ten.network();
    let view = ResidualView::new(net, &out.after_step_1_2.flow.values).unwrap();
    Some(find_negative_cycle_in(&view, |ra| ra.cost(net), |v| band.contains_node(&out.ten, v)).is_none())
}

/// Named invariant checks of one run; `None` means the check does not apply.
pub fn invariants(out: &SolveOutcome) -> Vec<(&'static str, Option<bool>)> {
    let log = &out.log;
    let seed_value = out.after_seed.flow.value(&out.ten);
    let strictly_decreasing = log.records.iter().all(|r| r.cost_after < r.cost_before)
        && log.records.windows(2).all(|w| w[1].cost_before == w[0].cost_after);
    let constant_value = out.value == seed_value
        && log.records.iter().all(|r| r.value_before == seed_value && r.value_after == seed_value);
    let step1 = log.step1_iterations() as i128 <= 2 * log.bounds.sum_cost_capacity;
    let net = out.ten.network();
    let view = ResidualView::new(net, &out.flow.values).unwrap();
    let optimal = find_negative_cycle_in(&view, |ra| ra.cost(net), |_| true).is_none();
    let sweep_free = log.phase_records(Phase::Sweep).next().is_none();
    let band_records = || log.records.iter().filter(|r| matches!(r.phase, Phase::Step11 | Phase::Step12));
    let disjoint = band_records().all(|r| {
        let mut seen = std::collections::HashSet::new();
        r.cycles.iter().all(|c| {
            let own: std::collections::HashSet<usize> =
                c.nodes.iter().copied().filter(|&v| !out.ten.is_super(v)).collect();
            own.into_iter().all(|v| seen.insert(v))
        })
    });
    let theta = out.ten.horizon() as i64;
    let certified = band_records().all(|r| match r.predicted {
        Some((lo, hi)) if lo >= 1 && hi <= theta && hi - lo >= 2 => {
            r.interval_after.is_some_and(|(a, b)| a as i64 <= lo && hi <= b as i64)
        }
        _ => true,
    });
    let floor = -(theta as i128) * log.bounds.sum_cost_capacity;
    let bounded_below = log.records.iter().all(|r| r.cost_after >= floor);
    let long_enough = out.interval.as_ref().is_some_and(|iv| {
        log.bounds
            .required_length(out.ten.horizon())
            .is_ok_and(|g| iv.length() as i128 >= g)
    });
    vec![
        ("cost strictly decreasing", Some(strictly_decreasing)),
        ("value constant", Some(constant_value)),
        ("step-1 iterations <= 2 sum|c|u", Some(step1)),
        ("post-1.1 no negative tau=0 cycle", post_step_1_1(out)),
        ("post-1.2 band negative-cycle-free", post_step_1_2(out)),
        ("final residual negative-cycle-free", Some(optimal)),
        ("cost >= -theta sum|c|u", Some(bounded_below)),
        ("lifted families node-disjoint", Some(disjoint)),
        ("predicted interval certified", Some(certified)),
        ("final flow repeated above threshold", log.bounds.above_threshold(out.ten.horizon()).then_some(long_enough)),
        ("audit", Some(audit_passes(&audit_log(log)))),
        ("no sweep needed", Some(sweep_free)),
    ]
}

use flowtime::graph::ArcSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random network on `n` nodes with `m` arcs, transit times in {0, 1}; s = 0, t = n - 1.
pub fn random_unit_network(rng: &mut ChaCha8Rng, n: usize, m: usize, max_u: i64, max_c: i64) -> NetworkSpec {
    let mut arcs = Vec::with_capacity(m);
    while arcs.len() < m {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            arcs.push(ArcSpec::new(
                u,
                v,
                rng.gen_range(1..=max_u),
                rng.gen_range(-max_c..=max_c),
                rng.gen_range(0..=1),
            ));
        }
    }
    NetworkSpec::new(n, 0, n - 1, arcs).unwrap()
}

/// Random walk of at most `len` arcs that may use arcs in both directions, ignoring capacities.
pub fn random_walk(rng: &mut ChaCha8Rng, net: &NetworkSpec, start: usize, len: usize, allowed: impl Fn(ResArc) -> bool) -> Walk {
    let mut v = start;
    let mut arcs = Vec::new();
    for _ in 0..len {
        let options: Vec<ResArc> = net
            .out_arcs(v)
            .iter()
            .map(|&a| ResArc::forward(a))
            .chain(net.in_arcs(v).iter().map(|&a| ResArc::backward(a)))
            .filter(|&ra| allowed(ra))
            .collect();
        if options.is_empty() {
            break;
        }
        let ra = options[rng.gen_range(0..options.len())];
        v = ra.head(net);
        arcs.push(ra);
    }
    Walk::from_arcs(net, start, arcs).unwrap()
}

/// Residual cycles of a flow, at most `limit` of them.
pub fn residual_cycles(net: &NetworkSpec, flow: &[i64], limit: usize) -> Vec<Walk> {
    let view = ResidualView::new(net, flow).unwrap();
    let mut all = simple_cycles(&view);
    all.truncate(limit);
    all
}

/// Arcs lying in some minimum s-t cut, by enumerating every bipartition with s on one side.
pub fn brute_force_cut_arcs(net: &NetworkSpec) -> std::collections::BTreeSet<usize> {
    let n = net.node_count();
    let (s, t) = (net.source(), net.sink());
    let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = i64::MAX;
    let mut arcs = std::collections::BTreeSet::new();
    for mask in 0u32..1 << others.len() {
        let mut side = vec![false; n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = mask & (1 << i) != 0;
        }
        let crossing: Vec<usize> = (0..net.arc_count())
            .filter(|&a| side[net.arc(a).tail] && !side[net.arc(a).head])
            .collect();
        let cap: i64 = crossing.iter().map(|&a| net.arc(a).capacity).sum();
        if cap < best {
            best = cap;
            arcs.clear();
        }
        if cap == best {
            arcs.extend(crossing);
        }
    }
    arcs
}
