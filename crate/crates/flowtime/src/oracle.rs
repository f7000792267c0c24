//! Independent reference solver on the full time-expanded network and result verification.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::bounds::horizon_bounds;
use crate::error::{FlowError, Result};
use crate::expand::{check_repeated, FlowOverTime, RepeatedInterval, TimeExpandedNetwork};
use crate::graph::{NetworkSpec, NormalizedNetwork, ResidualView, INFINITE};
use crate::statics::{find_negative_cycle, max_flow};

/// Largest TEN the oracle will materialize.
pub const DEFAULT_ORACLE_ARC_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub flow: FlowOverTime,
    pub value: i64,
    pub cost: i128,
}

/// Residual graph with paired edges (e, e ^ 1).
struct PairedGraph {
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl PairedGraph {
    fn new(n: usize) -> Self {
        PairedGraph {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.cost.extend([cost, -cost]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        e
    }

    fn push(&mut self, e: usize, amount: i64) {
        self.cap[e] -= amount;
        self.cap[e ^ 1] += amount;
    }

    /// Dijkstra on reduced costs; returns (dist, predecessor edge) and updates potentials.
    fn shortest_paths(&self, from: usize, pot: &mut [i64]) -> (Vec<Option<i64>>, Vec<usize>) {
        let n = self.adj.len();
        let mut dist: Vec<Option<i64>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[from] = Some(0);
        heap.push(Reverse((0i64, from)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u] != Some(d) {
                continue;
            }
            for &e in &self.adj[u] {
                if self.cap[e] <= 0 {
                    continue;
                }
                let v = self.to[e];
                let nd = d + self.cost[e] + pot[u] - pot[v];
                debug_assert!(self.cost[e] + pot[u] - pot[v] >= 0, "negative reduced cost");
                if dist[v].is_none_or(|old| nd < old) {
                    dist[v] = Some(nd);
                    pred[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        let reach_max = dist.iter().flatten().copied().max().unwrap_or(0);
        for (p, d) in pot.iter_mut().zip(&dist) {
            *p += d.unwrap_or(reach_max);
        }
        (dist, pred)
    }

    /// Sends as much as possible from `s` to `t` along shortest paths; returns the amount.
    fn successive_shortest_paths(&mut self, s: usize, t: usize, pot: &mut [i64], limit: i64) -> i64 {
        let mut sent = 0;
        while sent < limit {
            let (dist, pred) = self.shortest_paths(s, pot);
            if dist[t].is_none() {
                break;
            }
            let mut amount = limit - sent;
            let mut v = t;
            while v != s {
                let e = pred[v];
                amount = amount.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pred[v];
                self.push(e, amount);
                v = self.to[e ^ 1];
            }
            sent += amount;
        }
        sent
    }

    /// Label-correcting potentials valid for every residual edge (no negative cycles assumed).
    fn potentials(&self) -> Vec<i64> {
        let n = self.adj.len();
        let mut pot = vec![0i64; n];
        for _ in 0..=n {
            let mut changed = false;
            for u in 0..n {
                for &e in &self.adj[u] {
                    if self.cap[e] > 0 && pot[u] + self.cost[e] < pot[self.to[e]] {
                        pot[self.to[e]] = pot[u] + self.cost[e];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        pot
    }
}

/// Minimum-cost maximum flow on the materialized TEN.
///
/// Negative-cost arcs are saturated up front; the resulting imbalances are routed back by
/// successive shortest paths, which yields a minimum-cost circulation, and then the
/// super-source sends to the super-sink along shortest augmenting paths until none is left.
pub fn oracle_mcmf_ten(net: &NormalizedNetwork, theta: usize, arc_cap: usize) -> Result<OracleSolution> {
    let predicted = TimeExpandedNetwork::predicted_arc_count(&net.network, theta);
    if predicted > arc_cap {
        return Err(FlowError::TooLarge {
            arcs: predicted,
            cap: arc_cap,
        });
    }
    let ten = TimeExpandedNetwork::build(net, theta)?;
    oracle_on_ten(&ten)
}

pub fn oracle_on_ten(ten: &TimeExpandedNetwork) -> Result<OracleSolution> {
    let tn = ten.network();
    let n = tn.node_count();
    let finite_total: i64 = tn.total_capacity();
    let big = finite_total.checked_add(1).ok_or(FlowError::Overflow("oracle capacity bound"))?;
    let mut g = PairedGraph::new(n + 2);
    let mut excess = vec![0i64; n];
    let mut edge_of = Vec::with_capacity(tn.arc_count());
    for a in tn.arcs() {
        let cap = if a.capacity >= INFINITE { big } else { a.capacity };
        let e = g.add(a.tail, a.head, cap, a.cost);
        if a.cost < 0 {
            g.push(e, cap);
            excess[a.tail] -= cap;
            excess[a.head] += cap;
        }
        edge_of.push(e);
    }
    let (ss, tt) = (n, n + 1);
    let mut supply = 0;
    let mut aux = Vec::new();
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            aux.push(g.add(ss, v, x, 0));
            supply += x;
        } else if x < 0 {
            aux.push(g.add(v, tt, -x, 0));
        }
    }
    let mut pot = vec![0i64; n + 2];
    let routed = g.successive_shortest_paths(ss, tt, &mut pot, supply);
    if routed != supply {
        return Err(FlowError::Invariant("oracle could not rebalance pre-saturated arcs".into()));
    }
    for e in aux {
        g.cap[e] = 0;
        g.cap[e ^ 1] = 0;
    }
    let mut pot = g.potentials();
    g.successive_shortest_paths(tn.source(), tn.sink(), &mut pot, i64::MAX);
    let values: Vec<i64> = edge_of.iter().map(|&e| g.cap[e ^ 1]).collect();
    let flow = FlowOverTime { values };
    flow.check_feasible(ten)?;
    Ok(OracleSolution {
        value: flow.value(ten),
        cost: flow.cost(ten),
        flow,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    Pass,
    Fail,
    Skipped,
}

impl Check {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn as_option(self) -> Option<bool> {
        match self {
            Check::Pass => Some(true),
            Check::Fail => Some(false),
            Check::Skipped => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub feasible: bool,
    pub value: i64,
    pub cost: i128,
    pub oracle_value: Option<i64>,
    pub oracle_cost: Option<i128>,
    /// The oracle's value agrees with an independent maximum-flow computation.
    pub oracle_consistent: Check,
    pub value_matches: Check,
    pub cost_matches: Check,
    pub no_negative_cycle: bool,
    pub best_interval: Option<RepeatedInterval>,
    pub theta: usize,
    pub theta_threshold: i128,
    pub above_threshold: bool,
    pub guaranteed_length: i128,
    pub interval_bound: Check,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.feasible
            && self.no_negative_cycle
            && [self.oracle_consistent, self.value_matches, self.cost_matches, self.interval_bound]
                .iter()
                .all(|c| *c != Check::Fail)
    }
}

/// Feasibility, oracle agreement, absence of negative residual cycles and the interval bound.
pub fn verify(ten: &TimeExpandedNetwork, f: &FlowOverTime, arc_cap: usize) -> Result<VerificationReport> {
    let bounds = horizon_bounds(ten.base_network())?;
    let theta = ten.horizon();
    let feasible = f.check_feasible(ten).is_ok();
    let value = f.value(ten);
    let cost = f.cost(ten);
    let oracle = if ten.network().arc_count() <= arc_cap {
        Some(oracle_on_ten(ten)?)
    } else {
        None
    };
    let oracle_consistent = match &oracle {
        Some(o) => Check::from_bool(max_flow(ten.network()).value(ten.network()) == o.value),
        None => Check::Skipped,
    };
    let no_negative_cycle = feasible && {
        let view = ResidualView::new(ten.network(), &f.values)?;
        find_negative_cycle(&view, |ra| ra.cost(ten.network())).is_none()
    };
    let best_interval = if feasible { longest_interval(ten, f) } else { None };
    let above_threshold = bounds.above_threshold(theta);
    let guaranteed_length = bounds.guaranteed_length(theta)?;
    let required = bounds.required_length(theta)?;
    let interval_bound = if above_threshold {
        Check::from_bool(best_interval.as_ref().is_some_and(|iv| iv.length() as i128 >= required))
    } else {
        Check::Skipped
    };
    Ok(VerificationReport {
        feasible,
        value,
        cost,
        oracle_value: oracle.as_ref().map(|o| o.value),
        oracle_cost: oracle.as_ref().map(|o| o.cost),
        oracle_consistent,
        value_matches: oracle.as_ref().map_or(Check::Skipped, |o| Check::from_bool(o.value == value)),
        cost_matches: oracle.as_ref().map_or(Check::Skipped, |o| Check::from_bool(o.cost == cost)),
        no_negative_cycle,
        best_interval,
        theta,
        theta_threshold: bounds.theta_threshold,
        above_threshold,
        guaranteed_length,
        interval_bound,
    })
}

/// Longest maximal repeated interval, earliest on ties.
pub fn longest_interval(ten: &TimeExpandedNetwork, f: &FlowOverTime) -> Option<RepeatedInterval> {
    check_repeated(ten, f)
        .into_iter()
        .min_by_key(|iv| (Reverse(iv.length()), iv.start))
}

/// Value of a maximum flow over time, via the static maximum flow on the TEN.
pub fn max_flow_over_time_value(ten: &TimeExpandedNetwork) -> i64 {
    let net: &NetworkSpec = ten.network();
    max_flow(net).value(net)
}
