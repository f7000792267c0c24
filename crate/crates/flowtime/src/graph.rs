//! Static networks, residual views, walks and their decompositions.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

pub type NodeId = usize;
pub type ArcId = usize;

/// Capacity sentinel for arcs without an upper bound.
pub const INFINITE: i64 = i64::MAX / 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSpec {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: i64,
    pub cost: i64,
    pub transit: i64,
}

impl ArcSpec {
    pub fn new(tail: NodeId, head: NodeId, capacity: i64, cost: i64, transit: i64) -> Self {
        ArcSpec {
            tail,
            head,
            capacity,
            cost,
            transit,
        }
    }
}

/// Directed multigraph with capacities, costs and transit times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    node_count: usize,
    arcs: Vec<ArcSpec>,
    source: NodeId,
    sink: NodeId,
    out_adj: Vec<Vec<ArcId>>,
    in_adj: Vec<Vec<ArcId>>,
}

impl NetworkSpec {
    pub fn new(node_count: usize, source: NodeId, sink: NodeId, arcs: Vec<ArcSpec>) -> Result<Self> {
        if source >= node_count || sink >= node_count {
            return Err(FlowError::InvalidNetwork(format!(
                "terminals ({source}, {sink}) out of range for {node_count} nodes"
            )));
        }
        if source == sink {
            return Err(FlowError::InvalidNetwork("source equals sink".into()));
        }
        let mut out_adj = vec![Vec::new(); node_count];
        let mut in_adj = vec![Vec::new(); node_count];
        for (id, a) in arcs.iter().enumerate() {
            if a.tail >= node_count || a.head >= node_count {
                return Err(FlowError::InvalidNetwork(format!("arc {id} has an endpoint out of range")));
            }
            if a.capacity < 0 {
                return Err(FlowError::InvalidNetwork(format!("arc {id} has negative capacity")));
            }
            out_adj[a.tail].push(id);
            in_adj[a.head].push(id);
        }
        Ok(NetworkSpec {
            node_count,
            arcs,
            source,
            sink,
            out_adj,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[ArcSpec] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &ArcSpec {
        &self.arcs[id]
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn out_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.out_adj[v]
    }

    pub fn in_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.in_adj[v]
    }

    /// Sum of transit times over all arcs.
    pub fn total_transit(&self) -> i64 {
        self.arcs.iter().map(|a| a.transit).sum()
    }

    /// Sum of |c(a)| u(a) over all finite-capacity arcs.
    pub fn total_cost_capacity(&self) -> Result<i128> {
        self.arcs
            .iter()
            .filter(|a| a.capacity < INFINITE)
            .try_fold(0i128, |acc, a| {
                (a.cost.unsigned_abs() as i128)
                    .checked_mul(a.capacity as i128)
                    .and_then(|x| acc.checked_add(x))
            })
            .ok_or(FlowError::Overflow("sum of |c|u"))
    }

    pub fn total_capacity(&self) -> i64 {
        self.arcs.iter().filter(|a| a.capacity < INFINITE).map(|a| a.capacity).sum()
    }

    pub fn is_unit_transit(&self) -> bool {
        self.arcs.iter().all(|a| a.transit == 0 || a.transit == 1)
    }
}

/// A network with transit times in {0, 1} plus the map back to the arcs it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedNetwork {
    pub network: NetworkSpec,
    /// Original arc id -> chain of unit arcs, for every original arc with transit > 1.
    pub subdivision: BTreeMap<ArcId, Vec<ArcId>>,
    /// Unit arc id -> original arc id.
    pub origin: Vec<ArcId>,
    pub original_arc_count: usize,
    pub original_node_count: usize,
}

impl NormalizedNetwork {
    /// Chain of normalized arcs for an original arc.
    pub fn chain(&self, original: ArcId) -> Vec<ArcId> {
        match self.subdivision.get(&original) {
            Some(chain) => chain.clone(),
            None => vec![self.first_arc(original)],
        }
    }

    fn first_arc(&self, original: ArcId) -> ArcId {
        self.origin
            .iter()
            .position(|&o| o == original)
            .expect("every original arc has a normalized image")
    }
}

/// Subdivides every arc of transit k > 1 into k unit-transit arcs.
///
/// The first arc of a chain keeps the cost and every arc of the chain keeps the capacity.
pub fn normalize_transit_times(net: &NetworkSpec) -> Result<NormalizedNetwork> {
    let mut node_count = net.node_count();
    let mut arcs = Vec::new();
    let mut origin = Vec::new();
    let mut subdivision = BTreeMap::new();
    for (id, a) in net.arcs().iter().enumerate() {
        if a.transit < 0 {
            return Err(FlowError::InvalidNetwork(format!("arc {id} has negative transit time")));
        }
        if a.transit <= 1 {
            origin.push(id);
            arcs.push(*a);
            continue;
        }
        let mut chain = Vec::new();
        let mut prev = a.tail;
        for step in 0..a.transit {
            let next = if step + 1 == a.transit {
                a.head
            } else {
                node_count += 1;
                node_count - 1
            };
            let cost = if step == 0 { a.cost } else { 0 };
            chain.push(arcs.len());
            origin.push(id);
            arcs.push(ArcSpec::new(prev, next, a.capacity, cost, 1));
            prev = next;
        }
        subdivision.insert(id, chain);
    }
    let network = NetworkSpec::new(node_count, net.source(), net.sink(), arcs)?;
    Ok(NormalizedNetwork {
        network,
        subdivision,
        origin,
        original_arc_count: net.arc_count(),
        original_node_count: net.node_count(),
    })
}

/// Static flow x: arc id -> value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StaticFlow {
    pub values: Vec<i64>,
}

impl StaticFlow {
    pub fn zero(net: &NetworkSpec) -> Self {
        StaticFlow {
            values: vec![0; net.arc_count()],
        }
    }

    /// Net outflow of the source.
    pub fn value(&self, net: &NetworkSpec) -> i64 {
        net_outflow(net, &self.values, net.source())
    }

    pub fn cost(&self, net: &NetworkSpec) -> i128 {
        flow_cost(net, &self.values)
    }

    pub fn check_feasible(&self, net: &NetworkSpec) -> Result<()> {
        check_feasible(net, &self.values)
    }
}

pub fn net_outflow(net: &NetworkSpec, flow: &[i64], v: NodeId) -> i64 {
    let out: i64 = net.out_arcs(v).iter().map(|&a| flow[a]).sum();
    let inn: i64 = net.in_arcs(v).iter().map(|&a| flow[a]).sum();
    out - inn
}

pub(crate) fn flow_cost(net: &NetworkSpec, flow: &[i64]) -> i128 {
    net.arcs()
        .iter()
        .zip(flow)
        .map(|(a, &x)| a.cost as i128 * x as i128)
        .sum()
}

/// Capacity bounds on every arc and conservation away from source and sink.
pub fn check_feasible(net: &NetworkSpec, flow: &[i64]) -> Result<()> {
    if flow.len() != net.arc_count() {
        return Err(FlowError::InfeasibleFlow(format!(
            "flow has {} entries for {} arcs",
            flow.len(),
            net.arc_count()
        )));
    }
    for (id, (a, &x)) in net.arcs().iter().zip(flow).enumerate() {
        if x < 0 || x > a.capacity {
            return Err(FlowError::InfeasibleFlow(format!(
                "arc {id} carries {x} outside [0, {}]",
                a.capacity
            )));
        }
    }
    for v in 0..net.node_count() {
        if v == net.source() || v == net.sink() {
            continue;
        }
        let excess = net_outflow(net, flow, v);
        if excess != 0 {
            return Err(FlowError::InfeasibleFlow(format!("node {v} has imbalance {excess}")));
        }
    }
    Ok(())
}

/// An arc of a residual network: the forward copy of `arc`, or its reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResArc {
    pub arc: ArcId,
    pub backward: bool,
}

impl ResArc {
    pub fn forward(arc: ArcId) -> Self {
        ResArc { arc, backward: false }
    }

    pub fn backward(arc: ArcId) -> Self {
        ResArc { arc, backward: true }
    }

    pub fn reversed(self) -> Self {
        ResArc {
            arc: self.arc,
            backward: !self.backward,
        }
    }

    pub fn tail(self, net: &NetworkSpec) -> NodeId {
        let a = net.arc(self.arc);
        if self.backward {
            a.head
        } else {
            a.tail
        }
    }

    pub fn head(self, net: &NetworkSpec) -> NodeId {
        let a = net.arc(self.arc);
        if self.backward {
            a.tail
        } else {
            a.head
        }
    }

    pub fn cost(self, net: &NetworkSpec) -> i64 {
        let c = net.arc(self.arc).cost;
        if self.backward {
            -c
        } else {
            c
        }
    }

    pub fn transit(self, net: &NetworkSpec) -> i64 {
        let t = net.arc(self.arc).transit;
        if self.backward {
            -t
        } else {
            t
        }
    }

    /// Residual capacity with respect to `flow`; INFINITE stays INFINITE.
    pub fn residual(self, net: &NetworkSpec, flow: &[i64]) -> i64 {
        let a = net.arc(self.arc);
        if self.backward {
            flow[self.arc]
        } else if a.capacity >= INFINITE {
            INFINITE
        } else {
            a.capacity - flow[self.arc]
        }
    }
}

/// Residual network of a feasible flow.
#[derive(Debug, Clone, Copy)]
pub struct ResidualView<'a> {
    pub net: &'a NetworkSpec,
    pub flow: &'a [i64],
}

impl<'a> ResidualView<'a> {
    /// Residual network of a flow that satisfies capacity bounds (conservation is not required).
    pub fn new(net: &'a NetworkSpec, flow: &'a [i64]) -> Result<Self> {
        if flow.len() != net.arc_count() {
            return Err(FlowError::InfeasibleFlow("flow length mismatch".into()));
        }
        for (id, (a, &x)) in net.arcs().iter().zip(flow).enumerate() {
            if x < 0 || x > a.capacity {
                return Err(FlowError::InfeasibleFlow(format!("arc {id} carries {x} outside [0, {}]", a.capacity)));
            }
        }
        Ok(ResidualView { net, flow })
    }

    pub fn capacity(&self, ra: ResArc) -> i64 {
        ra.residual(self.net, self.flow)
    }

    pub fn contains(&self, ra: ResArc) -> bool {
        self.capacity(ra) > 0
    }

    /// All residual arcs with positive capacity, ordered by (arc id, forward before backward).
    pub fn arcs(&self) -> Vec<ResArc> {
        let mut out = Vec::new();
        for id in 0..self.net.arc_count() {
            for ra in [ResArc::forward(id), ResArc::backward(id)] {
                if self.contains(ra) {
                    out.push(ra);
                }
            }
        }
        out
    }

    /// Residual arcs leaving `v`.
    pub fn out_arcs(&self, v: NodeId) -> impl Iterator<Item = ResArc> + '_ {
        let fwd = self.net.out_arcs(v).iter().map(|&a| ResArc::forward(a));
        let bwd = self.net.in_arcs(v).iter().map(|&a| ResArc::backward(a));
        fwd.chain(bwd).filter(move |&ra| self.contains(ra))
    }

    /// Residual arcs entering `v`.
    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = ResArc> + '_ {
        let fwd = self.net.in_arcs(v).iter().map(|&a| ResArc::forward(a));
        let bwd = self.net.out_arcs(v).iter().map(|&a| ResArc::backward(a));
        fwd.chain(bwd).filter(move |&ra| self.contains(ra))
    }
}

/// A walk v1, a1, v2, ..., vk in some (residual) network.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<ResArc>,
}

impl Walk {
    pub fn trivial(v: NodeId) -> Self {
        Walk {
            nodes: vec![v],
            arcs: Vec::new(),
        }
    }

    /// Builds a walk from a start node and a residual arc sequence, checking incidence.
    pub fn from_arcs(net: &NetworkSpec, start: NodeId, arcs: Vec<ResArc>) -> Result<Self> {
        let mut nodes = vec![start];
        for (i, ra) in arcs.iter().enumerate() {
            let at = *nodes.last().unwrap();
            if ra.tail(net) != at {
                return Err(FlowError::MalformedWalk(format!(
                    "arc {i} ({:?}) does not start at node {at}",
                    ra
                )));
            }
            nodes.push(ra.head(net));
        }
        Ok(Walk { nodes, arcs })
    }

    pub fn validate(&self, net: &NetworkSpec) -> Result<()> {
        if self.nodes.len() != self.arcs.len() + 1 {
            return Err(FlowError::MalformedWalk("node/arc count mismatch".into()));
        }
        for (i, ra) in self.arcs.iter().enumerate() {
            if ra.arc >= net.arc_count() || ra.tail(net) != self.nodes[i] || ra.head(net) != self.nodes[i + 1] {
                return Err(FlowError::MalformedWalk(format!("arc {i} is not incident to its neighbours")));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// Closed, non-empty and no node repeated apart from the closing one.
    pub fn is_cycle(&self) -> bool {
        if self.arcs.is_empty() || !self.is_closed() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        self.nodes[..self.nodes.len() - 1].iter().all(|v| seen.insert(*v))
    }

    /// No node visited twice.
    pub fn is_path(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.nodes.iter().all(|v| seen.insert(*v))
    }

    pub fn cost(&self, net: &NetworkSpec) -> i64 {
        self.arcs.iter().map(|ra| ra.cost(net)).sum()
    }

    pub fn transit(&self, net: &NetworkSpec) -> i64 {
        self.arcs.iter().map(|ra| ra.transit(net)).sum()
    }

    /// Minimum residual capacity along the walk, counting repeated arcs.
    pub fn bottleneck(&self, view: &ResidualView) -> i64 {
        let inc = IncidenceVector::from_walk(self);
        inc.counts
            .iter()
            .map(|(ra, &k)| view.capacity(*ra) / k as i64)
            .min()
            .unwrap_or(INFINITE)
    }

    /// Rotates a closed walk so that it starts at position `pos`.
    pub fn rotated(&self, pos: usize) -> Walk {
        debug_assert!(self.is_closed());
        let k = self.arcs.len();
        if k == 0 {
            return self.clone();
        }
        let pos = pos % k;
        let mut arcs = self.arcs[pos..].to_vec();
        arcs.extend_from_slice(&self.arcs[..pos]);
        let mut nodes = self.nodes[pos..k].to_vec();
        nodes.extend_from_slice(&self.nodes[..=pos]);
        Walk { nodes, arcs }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Walk) -> Result<Walk> {
        if self.end() != other.start() {
            return Err(FlowError::MalformedWalk("concatenated walks do not meet".into()));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        Ok(Walk { nodes, arcs })
    }

    /// The same walk traversed backwards over reversed residual arcs.
    pub fn reversed(&self) -> Walk {
        Walk {
            nodes: self.nodes.iter().rev().copied().collect(),
            arcs: self.arcs.iter().rev().map(|ra| ra.reversed()).collect(),
        }
    }
}

/// Multiset of residual arcs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceVector {
    pub counts: BTreeMap<ResArc, u64>,
}

impl IncidenceVector {
    pub fn from_walk(w: &Walk) -> Self {
        let mut inc = IncidenceVector::default();
        inc.add_walk(w, 1);
        inc
    }

    pub fn add_walk(&mut self, w: &Walk, times: u64) {
        for &ra in &w.arcs {
            *self.counts.entry(ra).or_insert(0) += times;
        }
    }

    pub fn add(&mut self, ra: ResArc, times: u64) {
        if times > 0 {
            *self.counts.entry(ra).or_insert(0) += times;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.values().all(|&k| k == 0)
    }

    pub fn cost(&self, net: &NetworkSpec) -> i128 {
        self.counts.iter().map(|(ra, &k)| ra.cost(net) as i128 * k as i128).sum()
    }

    pub fn transit(&self, net: &NetworkSpec) -> i128 {
        self.counts.iter().map(|(ra, &k)| ra.transit(net) as i128 * k as i128).sum()
    }

    /// Net change of arc flows when augmenting by this multiset once.
    pub fn delta(&self, arc_count: usize) -> Vec<i64> {
        let mut d = vec![0i64; arc_count];
        for (ra, &k) in &self.counts {
            if ra.backward {
                d[ra.arc] -= k as i64;
            } else {
                d[ra.arc] += k as i64;
            }
        }
        d
    }

    /// In-degree equals out-degree everywhere.
    pub fn check_eulerian(&self, net: &NetworkSpec) -> Result<()> {
        let mut indeg: HashMap<NodeId, u64> = HashMap::new();
        let mut outdeg: HashMap<NodeId, u64> = HashMap::new();
        for (ra, &k) in &self.counts {
            *outdeg.entry(ra.tail(net)).or_insert(0) += k;
            *indeg.entry(ra.head(net)).or_insert(0) += k;
        }
        let mut nodes: Vec<NodeId> = indeg.keys().chain(outdeg.keys()).copied().collect();
        nodes.sort_unstable();
        nodes.dedup();
        for v in nodes {
            let i = indeg.get(&v).copied().unwrap_or(0);
            let o = outdeg.get(&v).copied().unwrap_or(0);
            if i != o {
                return Err(FlowError::NotEulerian {
                    node: v,
                    indegree: i,
                    outdegree: o,
                });
            }
        }
        Ok(())
    }
}

/// Removes cycles from a walk at their first revisit.
///
/// Returns the remaining simple path (None when the walk is closed) and the removed cycles in
/// removal order.
pub fn decompose_walk(net: &NetworkSpec, w: &Walk) -> Result<(Option<Walk>, Vec<Walk>)> {
    let (path, cycles) = decompose_walk_anchored(net, w)?;
    Ok((path, cycles.into_iter().map(|c| c.cycle).collect()))
}

/// A cycle removed by [`decompose_walk_anchored`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchoredCycle {
    pub cycle: Walk,
    /// Position of the cycle's start node on the remaining path, if that node survives.
    pub anchor: Option<usize>,
}

pub fn decompose_walk_anchored(net: &NetworkSpec, w: &Walk) -> Result<(Option<Walk>, Vec<AnchoredCycle>)> {
    w.validate(net)?;
    let mut nodes = vec![w.start()];
    let mut arcs: Vec<ResArc> = Vec::new();
    let mut pos: HashMap<NodeId, usize> = HashMap::from([(w.start(), 0)]);
    let mut cycles: Vec<AnchoredCycle> = Vec::new();
    for &ra in &w.arcs {
        let v = ra.head(net);
        arcs.push(ra);
        if let Some(&p) = pos.get(&v) {
            let mut cyc_nodes = nodes[p..].to_vec();
            cyc_nodes.push(v);
            let cyc_arcs = arcs[p..].to_vec();
            for u in &nodes[p + 1..] {
                pos.remove(u);
            }
            nodes.truncate(p + 1);
            arcs.truncate(p);
            for c in cycles.iter_mut() {
                if matches!(c.anchor, Some(a) if a > p) {
                    c.anchor = None;
                }
            }
            cycles.push(AnchoredCycle {
                cycle: Walk {
                    nodes: cyc_nodes,
                    arcs: cyc_arcs,
                },
                anchor: Some(p),
            });
        } else {
            pos.insert(v, nodes.len());
            nodes.push(v);
        }
    }
    let path = if w.is_closed() {
        None
    } else {
        Some(Walk { nodes, arcs })
    };
    if path.is_none() {
        for c in cycles.iter_mut() {
            if c.anchor != Some(0) {
                c.anchor = None;
            }
        }
    }
    Ok((path, cycles))
}

/// Splits an Eulerian multiset of arcs into cycles.
///
/// Deterministic: start at the lowest node with unused out-arcs, always follow the lowest unused
/// arc, and cut a cycle off at the first revisit.
pub fn decompose_eulerian(net: &NetworkSpec, h: &IncidenceVector) -> Result<Vec<Walk>> {
    h.check_eulerian(net)?;
    let mut remaining: BTreeMap<NodeId, BTreeMap<ResArc, u64>> = BTreeMap::new();
    for (&ra, &k) in &h.counts {
        if k > 0 {
            remaining.entry(ra.tail(net)).or_default().insert(ra, k);
        }
    }
    let mut cycles = Vec::new();
    let take = |remaining: &mut BTreeMap<NodeId, BTreeMap<ResArc, u64>>, v: NodeId| -> Option<ResArc> {
        let outs = remaining.get_mut(&v)?;
        let (&ra, k) = outs.iter_mut().next()?;
        *k -= 1;
        if *k == 0 {
            outs.remove(&ra);
        }
        if outs.is_empty() {
            remaining.remove(&v);
        }
        Some(ra)
    };
    while let Some((&start, _)) = remaining.iter().next() {
        let mut nodes = vec![start];
        let mut arcs: Vec<ResArc> = Vec::new();
        let mut pos: HashMap<NodeId, usize> = HashMap::from([(start, 0)]);
        loop {
            let at = *nodes.last().unwrap();
            let Some(ra) = take(&mut remaining, at) else {
                if nodes.len() != 1 {
                    return Err(FlowError::Invariant("Eulerian walk got stuck".into()));
                }
                break;
            };
            let v = ra.head(net);
            arcs.push(ra);
            if let Some(&p) = pos.get(&v) {
                let mut cyc_nodes = nodes[p..].to_vec();
                cyc_nodes.push(v);
                let cyc_arcs = arcs[p..].to_vec();
                for u in &nodes[p + 1..] {
                    pos.remove(u);
                }
                nodes.truncate(p + 1);
                arcs.truncate(p);
                cycles.push(Walk {
                    nodes: cyc_nodes,
                    arcs: cyc_arcs,
                });
            } else {
                pos.insert(v, nodes.len());
                nodes.push(v);
            }
        }
    }
    Ok(cycles)
}

/// The residual network with every arc of capacity k replaced by k unit copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitExpansion {
    /// One entry per unit copy, grouped by residual arc in residual order.
    pub copies: Vec<ResArc>,
}

impl UnitExpansion {
    pub fn copy_count(&self, ra: ResArc) -> usize {
        self.copies.iter().filter(|&&c| c == ra).count()
    }
}

pub fn unit_capacity_expansion(view: &ResidualView, bound: Option<i64>) -> Result<UnitExpansion> {
    let mut copies = Vec::new();
    for ra in view.arcs() {
        let cap = view.capacity(ra);
        let k = if cap >= INFINITE {
            bound.ok_or(FlowError::UnboundedExpansion { arc: ra.arc })?
        } else {
            cap
        };
        copies.extend(std::iter::repeat_n(ra, k.max(0) as usize));
    }
    Ok(UnitExpansion { copies })
}

/// Augments `flow` by `times` copies of the residual multiset `target`.
///
/// Every residual arc must have capacity for its full multiplicity.
pub fn augment(net: &NetworkSpec, flow: &[i64], target: &IncidenceVector, times: i64) -> Result<Vec<i64>> {
    if times < 0 {
        return Err(FlowError::CapacityExceeded("negative augmentation amount".into()));
    }
    for (&ra, &k) in &target.counts {
        if ra.arc >= net.arc_count() {
            return Err(FlowError::MalformedWalk(format!("unknown arc {}", ra.arc)));
        }
        let need = (k as i64).checked_mul(times).ok_or(FlowError::Overflow("augmentation amount"))?;
        let cap = ra.residual(net, flow);
        if cap < need {
            return Err(FlowError::CapacityExceeded(format!(
                "residual arc {:?} has capacity {cap}, needs {need}",
                ra
            )));
        }
    }
    let mut out = flow.to_vec();
    for (i, d) in target.delta(net.arc_count()).into_iter().enumerate() {
        out[i] += d * times;
    }
    Ok(out)
}

/// Augments along a closed walk by its bottleneck (`None`) or a given amount.
pub fn augment_walk(net: &NetworkSpec, flow: &[i64], w: &Walk, amount: Option<i64>) -> Result<Vec<i64>> {
    w.validate(net)?;
    if !w.is_closed() {
        return Err(FlowError::MalformedWalk("augmenting walk is not closed".into()));
    }
    let view = ResidualView { net, flow };
    let times = amount.unwrap_or_else(|| w.bottleneck(&view));
    augment(net, flow, &IncidenceVector::from_walk(w), times)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix2() -> NetworkSpec {
        NetworkSpec::new(
            3,
            0,
            2,
            vec![
                ArcSpec::new(0, 1, 1, 0, 1),
                ArcSpec::new(1, 2, 1, 10, 1),
                ArcSpec::new(1, 2, 1, 0, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn residual_of_single_saturated_arc() {
        let net = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, 1, 3, 1)]).unwrap();
        let flow = [1];
        let view = ResidualView::new(&net, &flow).unwrap();
        let arcs = view.arcs();
        assert_eq!(arcs, vec![ResArc::backward(0)]);
        assert_eq!(arcs[0].cost(&net), -3);
        assert_eq!(arcs[0].transit(&net), -1);
        assert_eq!(view.capacity(arcs[0]), 1);
    }

    #[test]
    fn residual_rejects_overfull_flow() {
        let net = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, 1, 3, 1)]).unwrap();
        assert!(matches!(ResidualView::new(&net, &[2]), Err(FlowError::InfeasibleFlow(_))));
    }

    #[test]
    fn subdivision_of_transit_three() {
        let net = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, 2, 5, 3)]).unwrap();
        let norm = normalize_transit_times(&net).unwrap();
        assert_eq!(norm.network.node_count(), 4);
        assert_eq!(norm.network.arc_count(), 3);
        assert_eq!(norm.subdivision[&0], vec![0, 1, 2]);
        assert!(norm.network.arcs().iter().all(|a| a.transit == 1 && a.capacity == 2));
        let cost: i64 = norm.network.arcs().iter().map(|a| a.cost).sum();
        assert_eq!(cost, 5);
    }

    #[test]
    fn normalized_network_is_untouched() {
        let net = fix2();
        let norm = normalize_transit_times(&net).unwrap();
        assert!(norm.subdivision.is_empty());
        assert_eq!(norm.network, net);
    }

    #[test]
    fn walk_decomposition_of_figure_eight() {
        // 0 -> 1 -> 0 -> 2 -> 0 in a network with arcs in both directions.
        let net = NetworkSpec::new(
            3,
            0,
            2,
            vec![
                ArcSpec::new(0, 1, 1, 1, 1),
                ArcSpec::new(1, 0, 1, 2, 1),
                ArcSpec::new(0, 2, 1, 3, 1),
                ArcSpec::new(2, 0, 1, 4, 1),
            ],
        )
        .unwrap();
        let w = Walk::from_arcs(
            &net,
            0,
            vec![ResArc::forward(0), ResArc::forward(1), ResArc::forward(2), ResArc::forward(3)],
        )
        .unwrap();
        let (path, cycles) = decompose_walk(&net, &w).unwrap();
        assert!(path.is_none());
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].nodes, vec![0, 1, 0]);
        assert_eq!(cycles[1].nodes, vec![0, 2, 0]);
    }

    #[test]
    fn eulerian_decomposition_rejects_unbalanced() {
        let net = fix2();
        let mut h = IncidenceVector::default();
        h.add(ResArc::forward(0), 1);
        assert!(matches!(decompose_eulerian(&net, &h), Err(FlowError::NotEulerian { .. })));
    }

    #[test]
    fn unit_expansion_of_capacity_three() {
        let net = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, 3, 0, 1)]).unwrap();
        let flow = [0];
        let view = ResidualView::new(&net, &flow).unwrap();
        let ue = unit_capacity_expansion(&view, None).unwrap();
        assert_eq!(ue.copy_count(ResArc::forward(0)), 3);
        assert_eq!(ue.copies.len(), 3);
    }

    #[test]
    fn unit_expansion_needs_bound_for_infinite_arcs() {
        let net = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, INFINITE, 0, 0)]).unwrap();
        let flow = [0];
        let view = ResidualView::new(&net, &flow).unwrap();
        assert!(matches!(
            unit_capacity_expansion(&view, None),
            Err(FlowError::UnboundedExpansion { arc: 0 })
        ));
        assert_eq!(unit_capacity_expansion(&view, Some(4)).unwrap().copies.len(), 4);
    }

    #[test]
    fn augment_respects_capacity() {
        let net = fix2();
        let cycle = Walk::from_arcs(&net, 1, vec![ResArc::forward(2), ResArc::backward(1)]).unwrap();
        let flow = [1, 1, 0];
        let out = augment_walk(&net, &flow, &cycle, None).unwrap();
        assert_eq!(out, vec![1, 0, 1]);
        assert!(matches!(
            augment_walk(&net, &flow, &cycle, Some(2)),
            Err(FlowError::CapacityExceeded(_))
        ));
    }
}
