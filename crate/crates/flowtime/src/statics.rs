//! Static flow engines: maximum flow, minimum-cost circulation, negative cycles,
//! flow decomposition, reachability and cut arcs.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{FlowError, Result};
use crate::graph::{
    augment, ArcId, IncidenceVector, NetworkSpec, NodeId, ResArc, ResidualView, StaticFlow, Walk, INFINITE,
};

/// Dinic's algorithm; INFINITE capacities are treated as unbounded.
pub fn max_flow(net: &NetworkSpec) -> StaticFlow {
    let n = net.node_count();
    let mut flow = vec![0i64; net.arc_count()];
    let adj: Vec<Vec<ResArc>> = (0..n)
        .map(|v| {
            net.out_arcs(v)
                .iter()
                .map(|&a| ResArc::forward(a))
                .chain(net.in_arcs(v).iter().map(|&a| ResArc::backward(a)))
                .collect()
        })
        .collect();
    let (s, t) = (net.source(), net.sink());
    loop {
        let mut level = vec![usize::MAX; n];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &ra in &adj[v] {
                let w = ra.head(net);
                if level[w] == usize::MAX && ra.residual(net, &flow) > 0 {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if level[t] == usize::MAX {
            break;
        }
        let mut next = vec![0usize; n];
        loop {
            let pushed = dinic_push(net, &adj, &level, &mut next, &mut flow, s, t, INFINITE);
            if pushed == 0 {
                break;
            }
        }
    }
    StaticFlow { values: flow }
}

#[allow(clippy::too_many_arguments)]
fn dinic_push(
    net: &NetworkSpec,
    adj: &[Vec<ResArc>],
    level: &[usize],
    next: &mut [usize],
    flow: &mut [i64],
    v: NodeId,
    t: NodeId,
    limit: i64,
) -> i64 {
    if v == t {
        return limit;
    }
    while next[v] < adj[v].len() {
        let ra = adj[v][next[v]];
        let w = ra.head(net);
        let cap = ra.residual(net, flow);
        if cap > 0 && level[w] == level[v] + 1 {
            let got = dinic_push(net, adj, level, next, flow, w, t, limit.min(cap));
            if got > 0 {
                if ra.backward {
                    flow[ra.arc] -= got;
                } else {
                    flow[ra.arc] += got;
                }
                return got;
            }
        }
        next[v] += 1;
    }
    0
}

/// A negative cycle together with the label vector of the search that found it.
#[derive(Debug, Clone)]
pub struct NegativeCycle {
    pub cycle: Walk,
    pub weight: i64,
    /// Bellman-Ford labels at detection time; usable as potentials.
    pub labels: Vec<i64>,
}

/// Some negative-weight cycle in the residual network, if any exists.
pub fn find_negative_cycle(view: &ResidualView, weight: impl Fn(ResArc) -> i64) -> Option<Walk> {
    find_negative_cycle_in(view, weight, |_| true).map(|nc| nc.cycle)
}

/// Negative-cycle search restricted to residual arcs between allowed nodes.
///
/// Bellman-Ford from a virtual root; after every pass the predecessor graph is scanned and the
/// lightest of its cycles is returned (ties broken by the canonical arc sequence).
pub fn find_negative_cycle_in(
    view: &ResidualView,
    weight: impl Fn(ResArc) -> i64,
    allowed: impl Fn(NodeId) -> bool,
) -> Option<NegativeCycle> {
    let net = view.net;
    let n = net.node_count();
    let mut edges: Vec<(NodeId, NodeId, i64, ResArc)> = Vec::new();
    for ra in view.arcs() {
        let (u, v) = (ra.tail(net), ra.head(net));
        if allowed(u) && allowed(v) {
            edges.push((u, v, weight(ra), ra));
        }
    }
    let active: Vec<NodeId> = (0..n).filter(|&v| allowed(v)).collect();
    let mut dist = vec![0i64; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for _ in 0..=2 * active.len() + 1 {
        let mut changed = false;
        for (i, &(u, v, w, _)) in edges.iter().enumerate() {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                parent[v] = Some(i);
                changed = true;
            }
        }
        if !changed {
            return None;
        }
        let cycles = predecessor_cycles(&edges, &parent, &active, n);
        let best = cycles
            .into_iter()
            .map(|arcs| {
                let w: i64 = arcs.iter().map(|&i| edges[i].2).sum();
                let walk = canonical_cycle(net, arcs.iter().map(|&i| edges[i].3).collect());
                (w, walk)
            })
            .filter(|(w, _)| *w < 0)
            .min_by(|a, b| (a.0, &a.1.arcs).cmp(&(b.0, &b.1.arcs)));
        if let Some((weight, cycle)) = best {
            return Some(NegativeCycle {
                cycle,
                weight,
                labels: dist,
            });
        }
    }
    None
}

/// Cycles of the predecessor graph, each as edge indices in forward order.
fn predecessor_cycles(
    edges: &[(NodeId, NodeId, i64, ResArc)],
    parent: &[Option<usize>],
    active: &[NodeId],
    n: usize,
) -> Vec<Vec<usize>> {
    let mut stamp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for &v in active {
        let mut u = v;
        while stamp[u] == usize::MAX {
            stamp[u] = v;
            match parent[u] {
                Some(e) => u = edges[e].0,
                None => break,
            }
        }
        if stamp[u] == v && parent[u].is_some() {
            let mut cyc = Vec::new();
            let mut x = u;
            loop {
                let e = parent[x].unwrap();
                cyc.push(e);
                x = edges[e].0;
                if x == u {
                    break;
                }
            }
            cyc.reverse();
            out.push(cyc);
        }
    }
    out
}

/// Closed walk over `arcs`, rotated to start at its smallest node.
pub fn canonical_cycle(net: &NetworkSpec, arcs: Vec<ResArc>) -> Walk {
    let start = arcs[0].tail(net);
    let w = Walk::from_arcs(net, start, arcs).expect("predecessor cycles are incident");
    let k = w.arcs.len();
    let pos = (0..k).min_by_key(|&i| w.nodes[i]).unwrap_or(0);
    w.rotated(pos)
}

/// Minimum-weight circulation by cycle cancelling, starting from the zero flow.
pub fn min_cost_circulation(net: &NetworkSpec, weights: &[i64]) -> Result<StaticFlow> {
    let mut flow = vec![0i64; net.arc_count()];
    loop {
        let view = ResidualView { net, flow: &flow };
        let weight = |ra: ResArc| if ra.backward { -weights[ra.arc] } else { weights[ra.arc] };
        let Some(nc) = find_negative_cycle_in(&view, weight, |_| true) else {
            break;
        };
        let amount = nc.cycle.bottleneck(&view);
        if amount >= INFINITE {
            return Err(FlowError::Unbounded);
        }
        flow = augment(net, &flow, &IncidenceVector::from_walk(&nc.cycle), amount)?;
    }
    Ok(StaticFlow { values: flow })
}

/// Paths and cycles of a flow, each with its rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowDecomposition {
    pub paths: Vec<(Walk, i64)>,
    pub cycles: Vec<(Walk, i64)>,
}

/// Standard path/cycle decomposition, always following the lowest-id arc with remaining flow.
pub fn decompose_flow(net: &NetworkSpec, x: &StaticFlow) -> Result<FlowDecomposition> {
    x.check_feasible(net)?;
    let mut rem = x.values.clone();
    let mut paths = Vec::new();
    let mut cycles = Vec::new();
    let (s, t) = (net.source(), net.sink());
    let first_out = |rem: &[i64], v: NodeId| net.out_arcs(v).iter().copied().filter(|&a| rem[a] > 0).min();
    let extract = |rem: &mut Vec<i64>, start: NodeId, stop_at_sink: bool| -> Option<(Walk, i64, bool)> {
        let mut nodes = vec![start];
        let mut arcs: Vec<ArcId> = Vec::new();
        loop {
            let v = *nodes.last().unwrap();
            if stop_at_sink && v == t && !arcs.is_empty() {
                let rate = arcs.iter().map(|&a| rem[a]).min().unwrap();
                for &a in &arcs {
                    rem[a] -= rate;
                }
                let w = Walk::from_arcs(net, start, arcs.into_iter().map(ResArc::forward).collect()).ok()?;
                return Some((w, rate, true));
            }
            let a = first_out(rem, v)?;
            let w = net.arc(a).head;
            arcs.push(a);
            if let Some(p) = nodes.iter().position(|&u| u == w) {
                let cyc: Vec<ArcId> = arcs[p..].to_vec();
                let rate = cyc.iter().map(|&a| rem[a]).min().unwrap();
                for &a in &cyc {
                    rem[a] -= rate;
                }
                let walk = Walk::from_arcs(net, w, cyc.into_iter().map(ResArc::forward).collect()).ok()?;
                return Some((walk, rate, false));
            }
            nodes.push(w);
        }
    };
    while crate::graph::net_outflow(net, &rem, s) > 0 {
        let (w, rate, is_path) =
            extract(&mut rem, s, true).ok_or_else(|| FlowError::Invariant("path extraction got stuck".into()))?;
        if is_path {
            paths.push((w, rate));
        } else {
            cycles.push((w, rate));
        }
    }
    while let Some(v) = (0..net.node_count()).find(|&v| first_out(&rem, v).is_some()) {
        let (w, rate, _) =
            extract(&mut rem, v, false).ok_or_else(|| FlowError::Invariant("cycle extraction got stuck".into()))?;
        cycles.push((w, rate));
    }
    Ok(FlowDecomposition { paths, cycles })
}

/// Nodes reachable from `v` in the residual network, restricted to allowed nodes.
pub fn reachable_from(view: &ResidualView, v: NodeId, allowed: impl Fn(NodeId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; view.net.node_count()];
    seen[v] = true;
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for ra in view.out_arcs(u) {
            let w = ra.head(view.net);
            if !seen[w] && allowed(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Nodes that reach `v` in the residual network.
pub fn reaching_to(view: &ResidualView, v: NodeId) -> Vec<bool> {
    let mut seen = vec![false; view.net.node_count()];
    seen[v] = true;
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for ra in view.in_arcs(u) {
            let w = ra.tail(view.net);
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Hop-shortest residual path between two nodes, using only allowed nodes.
pub fn bfs_path(view: &ResidualView, from: NodeId, to: NodeId, allowed: impl Fn(NodeId) -> bool) -> Option<Walk> {
    let net = view.net;
    let mut pred: Vec<Option<ResArc>> = vec![None; net.node_count()];
    let mut seen = vec![false; net.node_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        let mut outs: Vec<ResArc> = view.out_arcs(u).collect();
        outs.sort();
        for ra in outs {
            let w = ra.head(net);
            if !seen[w] && allowed(w) {
                seen[w] = true;
                pred[w] = Some(ra);
                queue.push_back(w);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut arcs = Vec::new();
    let mut v = to;
    while v != from {
        let ra = pred[v].unwrap();
        arcs.push(ra);
        v = ra.tail(net);
    }
    arcs.reverse();
    Walk::from_arcs(net, from, arcs).ok()
}

/// V(s), V(t), the rest, and the strongly connected components of s and t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityPartition {
    pub source_side: BTreeSet<NodeId>,
    pub sink_side: BTreeSet<NodeId>,
    pub rest: BTreeSet<NodeId>,
    pub source_core: BTreeSet<NodeId>,
    pub sink_core: BTreeSet<NodeId>,
}

/// Partition of the nodes by residual reachability with respect to a maximum flow.
pub fn reachability_partition(net: &NetworkSpec, x: &StaticFlow) -> Result<ReachabilityPartition> {
    let view = ResidualView::new(net, &x.values)?;
    let (s, t) = (net.source(), net.sink());
    let from_s = reachable_from(&view, s, |_| true);
    if from_s[t] {
        return Err(FlowError::NotMaximum);
    }
    let to_s = reaching_to(&view, s);
    let to_t = reaching_to(&view, t);
    let from_t = reachable_from(&view, t, |_| true);
    let mut part = ReachabilityPartition {
        source_side: BTreeSet::new(),
        sink_side: BTreeSet::new(),
        rest: BTreeSet::new(),
        source_core: BTreeSet::new(),
        sink_core: BTreeSet::new(),
    };
    for v in 0..net.node_count() {
        if from_s[v] {
            part.source_side.insert(v);
        } else if to_t[v] {
            part.sink_side.insert(v);
        } else {
            part.rest.insert(v);
        }
        if from_s[v] && to_s[v] {
            part.source_core.insert(v);
        }
        if from_t[v] && to_t[v] {
            part.sink_core.insert(v);
        }
    }
    Ok(part)
}

/// Arcs contained in at least one minimum s-t cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutArcSet {
    pub arcs: BTreeSet<ArcId>,
}

/// An arc (u, v) lies in some minimum cut iff some residual-closed set contains s and u but
/// neither v nor t; the smallest candidate is R(s) together with R(u).
pub fn cut_arcs(net: &NetworkSpec) -> CutArcSet {
    let x = max_flow(net);
    let view = ResidualView { net, flow: &x.values };
    let from_s = reachable_from(&view, net.source(), |_| true);
    let mut arcs = BTreeSet::new();
    for (id, a) in net.arcs().iter().enumerate() {
        if a.capacity >= INFINITE || x.values[id] != a.capacity || from_s[a.head] {
            continue;
        }
        let from_u = reachable_from(&view, a.tail, |_| true);
        if !from_u[a.head] && !from_u[net.sink()] {
            arcs.insert(id);
        }
    }
    CutArcSet { arcs }
}

/// Minimum of (c(H), tau(H)) in lexicographic order over Eulerian subgraphs H of the unit
/// expansion inside the strongly connected components of s and t.
///
/// Returns `None` when the minimum has non-negative cost.
pub fn lex_min_eulerian_subgraph(view: &ResidualView, part: &ReachabilityPartition) -> Result<Option<IncidenceVector>> {
    let net = view.net;
    let sum_tau: i64 = net.arcs().iter().map(|a| a.transit.abs()).sum();
    let sum_u: i64 = net.total_capacity();
    let scale = sum_tau
        .checked_mul(sum_u)
        .and_then(|x| x.checked_mul(2))
        .and_then(|x| x.checked_add(1))
        .ok_or(FlowError::Overflow("lexicographic weight scale"))?;
    let mut h = IncidenceVector::default();
    for core in [&part.source_core, &part.sink_core] {
        if core.len() < 2 {
            continue;
        }
        let local: Vec<NodeId> = core.iter().copied().collect();
        let index = |v: NodeId| local.binary_search(&v).ok();
        let mut aux_arcs = Vec::new();
        let mut origin = Vec::new();
        let mut weights = Vec::new();
        for ra in view.arcs() {
            let (Some(u), Some(v)) = (index(ra.tail(net)), index(ra.head(net))) else {
                continue;
            };
            let w = ra
                .cost(net)
                .checked_mul(scale)
                .and_then(|x| x.checked_add(ra.transit(net)))
                .ok_or(FlowError::Overflow("lexicographic weight"))?;
            aux_arcs.push(crate::graph::ArcSpec::new(u, v, view.capacity(ra), w, 0));
            weights.push(w);
            origin.push(ra);
        }
        let aux = NetworkSpec::new(local.len(), 0, 1, aux_arcs)?;
        let y = min_cost_circulation(&aux, &weights)?;
        for (i, &k) in y.values.iter().enumerate() {
            h.add(origin[i], k as u64);
        }
    }
    if h.cost(net) < 0 {
        Ok(Some(h))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::ArcSpec;

    #[test]
    fn fix2_max_flow_is_one() {
        let net = fixtures::fix2().network;
        assert_eq!(max_flow(&net).value(&net), 1);
    }

    #[test]
    fn fix2_cut_is_first_arc() {
        let net = fixtures::fix2().network;
        assert_eq!(cut_arcs(&net).arcs, BTreeSet::from([0]));
    }

    #[test]
    fn fix2_negative_cycle_swaps_parallel_arcs() {
        let net = fixtures::fix2().network;
        let flow = [1, 1, 0];
        let view = ResidualView::new(&net, &flow).unwrap();
        let c = find_negative_cycle(&view, |ra| ra.cost(&net)).unwrap();
        assert_eq!(c.cost(&net), -10);
        assert!(c.is_cycle());
    }

    #[test]
    fn no_negative_cycle_in_optimal_residual() {
        let net = fixtures::fix2().network;
        let flow = [1, 0, 1];
        let view = ResidualView::new(&net, &flow).unwrap();
        assert!(find_negative_cycle(&view, |ra| ra.cost(&net)).is_none());
    }

    #[test]
    fn circulation_with_infinite_negative_cycle_is_unbounded() {
        let net = NetworkSpec::new(
            2,
            0,
            1,
            vec![ArcSpec::new(0, 1, INFINITE, -1, 0), ArcSpec::new(1, 0, INFINITE, 0, 0)],
        )
        .unwrap();
        assert_eq!(min_cost_circulation(&net, &[-1, 0]), Err(FlowError::Unbounded));
    }

    #[test]
    fn circulation_saturates_negative_loop() {
        let net = fixtures::fix3().network;
        let weights: Vec<i64> = net.arcs().iter().map(|a| a.cost).collect();
        let y = min_cost_circulation(&net, &weights).unwrap();
        assert_eq!(y.values, vec![0, 1, 1]);
    }

    #[test]
    fn decomposition_of_path_plus_cycle() {
        let net = fixtures::fix3().network;
        let x = StaticFlow { values: vec![1, 1, 1] };
        let d = decompose_flow(&net, &x).unwrap();
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].0.nodes, vec![0, 1]);
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].0.nodes, vec![0, 2, 0]);
    }

    #[test]
    fn partition_rejects_non_maximum() {
        let net = fixtures::fix2().network;
        assert_eq!(
            reachability_partition(&net, &StaticFlow::zero(&net)),
            Err(FlowError::NotMaximum)
        );
    }

    #[test]
    fn lex_min_prefers_lower_transit_among_equal_costs() {
        // One negative arc out of s and two zero-cost ways back, with transit 0 and 2.
        let net = NetworkSpec::new(
            3,
            0,
            2,
            vec![
                ArcSpec::new(0, 1, 1, -2, 1),
                ArcSpec::new(1, 0, 1, 0, 2),
                ArcSpec::new(1, 0, 1, 0, 0),
            ],
        )
        .unwrap();
        let x = StaticFlow::zero(&net);
        let part = reachability_partition(&net, &x).unwrap();
        let view = ResidualView::new(&net, &x.values).unwrap();
        let h = lex_min_eulerian_subgraph(&view, &part).unwrap().unwrap();
        assert_eq!(h.cost(&net), -2);
        assert_eq!(h.transit(&net), 1);
    }
}
