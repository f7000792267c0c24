//! Time-expanded networks, flows over time, repeated intervals and bands.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::graph::{flow_cost, net_outflow, ArcId, ArcSpec, NetworkSpec, NodeId, NormalizedNetwork, StaticFlow, INFINITE};

/// What a TEN arc stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TenArcKind {
    /// Copy of a base arc starting in `layer`.
    Copy { base: ArcId, layer: usize },
    /// Super-source to the source copy in `layer`.
    SourceLink { layer: usize },
    /// Sink copy in `layer` to the super-sink.
    SinkLink { layer: usize },
}

/// Layers 1..=horizon of the base network plus a super-source and a super-sink.
///
/// Node v in layer l has id (l - 1) * n + v; the super-source is horizon * n and the
/// super-sink horizon * n + 1.
#[derive(Debug, Clone)]
pub struct TimeExpandedNetwork {
    base: NormalizedNetwork,
    horizon: usize,
    net: NetworkSpec,
    kinds: Vec<TenArcKind>,
    copy_index: Vec<Vec<Option<ArcId>>>,
    source_links: Vec<ArcId>,
    sink_links: Vec<ArcId>,
}

impl TimeExpandedNetwork {
    pub fn build(base: &NormalizedNetwork, horizon: usize) -> Result<Self> {
        let b = &base.network;
        if !b.is_unit_transit() {
            return Err(FlowError::InvalidNetwork("transit times must be 0 or 1".into()));
        }
        if horizon < 1 {
            return Err(FlowError::HorizonTooSmall { horizon, required: 1 });
        }
        let n = b.node_count();
        let node = |v: NodeId, layer: usize| (layer - 1) * n + v;
        let super_source = horizon * n;
        let super_sink = horizon * n + 1;
        let mut arcs = Vec::new();
        let mut kinds = Vec::new();
        let mut copy_index = vec![vec![None; horizon + 1]; b.arc_count()];
        let mut source_links = vec![usize::MAX; horizon + 1];
        let mut sink_links = vec![usize::MAX; horizon + 1];
        for layer in 1..=horizon {
            for (id, a) in b.arcs().iter().enumerate() {
                let top = layer + a.transit as usize;
                if top > horizon {
                    continue;
                }
                copy_index[id][layer] = Some(arcs.len());
                kinds.push(TenArcKind::Copy { base: id, layer });
                arcs.push(ArcSpec::new(node(a.tail, layer), node(a.head, top), a.capacity, a.cost, a.transit));
            }
            source_links[layer] = arcs.len();
            kinds.push(TenArcKind::SourceLink { layer });
            arcs.push(ArcSpec::new(super_source, node(b.source(), layer), INFINITE, 0, 0));
            sink_links[layer] = arcs.len();
            kinds.push(TenArcKind::SinkLink { layer });
            arcs.push(ArcSpec::new(node(b.sink(), layer), super_sink, INFINITE, 0, 0));
        }
        let net = NetworkSpec::new(horizon * n + 2, super_source, super_sink, arcs)?;
        Ok(TimeExpandedNetwork {
            base: base.clone(),
            horizon,
            net,
            kinds,
            copy_index,
            source_links,
            sink_links,
        })
    }

    /// Number of TEN arcs a build would create, without building.
    pub fn predicted_arc_count(base: &NetworkSpec, horizon: usize) -> usize {
        let copies: usize = base
            .arcs()
            .iter()
            .map(|a| horizon.saturating_sub(a.transit.max(0) as usize))
            .sum();
        copies + 2 * horizon
    }

    pub fn base(&self) -> &NormalizedNetwork {
        &self.base
    }

    pub fn base_network(&self) -> &NetworkSpec {
        &self.base.network
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn network(&self) -> &NetworkSpec {
        &self.net
    }

    pub fn kind(&self, arc: ArcId) -> TenArcKind {
        self.kinds[arc]
    }

    pub fn node(&self, v: NodeId, layer: usize) -> NodeId {
        debug_assert!((1..=self.horizon).contains(&layer));
        (layer - 1) * self.base.network.node_count() + v
    }

    pub fn super_source(&self) -> NodeId {
        self.net.source()
    }

    pub fn super_sink(&self) -> NodeId {
        self.net.sink()
    }

    pub fn is_super(&self, v: NodeId) -> bool {
        v >= self.horizon * self.base.network.node_count()
    }

    /// Layer of a non-super node.
    pub fn layer_of(&self, v: NodeId) -> Option<usize> {
        (!self.is_super(v)).then(|| v / self.base.network.node_count() + 1)
    }

    /// Base node of a TEN node; the super nodes map to source and sink.
    pub fn base_of(&self, v: NodeId) -> NodeId {
        if v == self.super_source() {
            self.base.network.source()
        } else if v == self.super_sink() {
            self.base.network.sink()
        } else {
            v % self.base.network.node_count()
        }
    }

    pub fn copy_arc(&self, base_arc: ArcId, layer: usize) -> Option<ArcId> {
        self.copy_index.get(base_arc)?.get(layer).copied().flatten()
    }

    pub fn source_link(&self, layer: usize) -> ArcId {
        self.source_links[layer]
    }

    pub fn sink_link(&self, layer: usize) -> ArcId {
        self.sink_links[layer]
    }

    /// Number of copies of a base arc.
    pub fn copy_count(&self, base_arc: ArcId) -> usize {
        self.copy_index[base_arc].iter().filter(|c| c.is_some()).count()
    }

    pub fn band(&self, lo: usize, hi: usize) -> Result<BandView> {
        if lo < 1 || lo > hi || hi > self.horizon {
            return Err(FlowError::BadRange {
                lo,
                hi,
                horizon: self.horizon,
            });
        }
        Ok(BandView { lo, hi })
    }
}

/// Per-arc values on a TEN.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowOverTime {
    pub values: Vec<i64>,
}

impl FlowOverTime {
    pub fn zero(ten: &TimeExpandedNetwork) -> Self {
        FlowOverTime {
            values: vec![0; ten.network().arc_count()],
        }
    }

    pub fn value(&self, ten: &TimeExpandedNetwork) -> i64 {
        net_outflow(ten.network(), &self.values, ten.super_source())
    }

    pub fn cost(&self, ten: &TimeExpandedNetwork) -> i128 {
        flow_cost(ten.network(), &self.values)
    }

    pub fn check_feasible(&self, ten: &TimeExpandedNetwork) -> Result<()> {
        crate::graph::check_feasible(ten.network(), &self.values)
    }

    pub fn on_copy(&self, ten: &TimeExpandedNetwork, base_arc: ArcId, layer: usize) -> Option<i64> {
        ten.copy_arc(base_arc, layer).map(|a| self.values[a])
    }
}

/// A maximal interval [start, end] on which a flow over time is repeated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepeatedInterval {
    pub start: usize,
    pub end: usize,
    /// Common value of every in-band copy, per base arc.
    pub pattern: Vec<i64>,
}

impl RepeatedInterval {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    pub fn contains(&self, lo: usize, hi: usize) -> bool {
        self.start <= lo && hi <= self.end
    }
}

/// Layers [lo, hi] of a TEN together with the super nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BandView {
    pub lo: usize,
    pub hi: usize,
}

impl BandView {
    pub fn contains_node(&self, ten: &TimeExpandedNetwork, v: NodeId) -> bool {
        match ten.layer_of(v) {
            Some(l) => self.lo <= l && l <= self.hi,
            None => true,
        }
    }

    pub fn contains_arc(&self, ten: &TimeExpandedNetwork, a: ArcId) -> bool {
        let spec = ten.network().arc(a);
        self.contains_node(ten, spec.tail) && self.contains_node(ten, spec.head)
    }

    pub fn arcs(&self, ten: &TimeExpandedNetwork) -> Vec<ArcId> {
        (0..ten.network().arc_count()).filter(|&a| self.contains_arc(ten, a)).collect()
    }

    pub fn nodes(&self, ten: &TimeExpandedNetwork) -> Vec<NodeId> {
        (0..ten.network().node_count()).filter(|&v| self.contains_node(ten, v)).collect()
    }
}

/// Is f repeated on [lo, hi]: every copy a^t with lo <= t and t + tau(a) <= hi has the same value.
pub fn is_repeated_on(ten: &TimeExpandedNetwork, f: &FlowOverTime, lo: usize, hi: usize) -> bool {
    if lo < 1 || hi > ten.horizon() || hi < lo + 2 {
        return false;
    }
    ten.base_network().arcs().iter().enumerate().all(|(id, a)| {
        let last = hi - a.transit as usize;
        let first = f.on_copy(ten, id, lo);
        (lo..=last).all(|t| f.on_copy(ten, id, t) == first)
    })
}

/// All maximal intervals (length at least 2) on which f is repeated, ordered by start.
pub fn check_repeated(ten: &TimeExpandedNetwork, f: &FlowOverTime) -> Vec<RepeatedInterval> {
    let theta = ten.horizon();
    let base = ten.base_network();
    // g1[t]: all unit-transit arcs agree on copies t and t+1; g0 likewise for zero-transit arcs.
    let mut g1 = vec![true; theta + 2];
    let mut g0 = vec![true; theta + 2];
    for (id, a) in base.arcs().iter().enumerate() {
        let g = if a.transit == 1 { &mut g1 } else { &mut g0 };
        for (t, slot) in g.iter_mut().enumerate().take(theta).skip(1) {
            if let (Some(x), Some(y)) = (f.on_copy(ten, id, t), f.on_copy(ten, id, t + 1)) {
                if x != y {
                    *slot = false;
                }
            }
        }
    }
    // next_fail[t]: smallest t' >= t with g false (theta + 1 when none).
    let next_fail = |g: &[bool]| {
        let mut nf = vec![theta + 1; theta + 2];
        for t in (1..=theta).rev() {
            nf[t] = if !g[t] { t } else { nf[t + 1] };
        }
        nf
    };
    let n1 = next_fail(&g1);
    let n0 = next_fail(&g0);
    let max_end = |lo: usize| theta.min(n1[lo] + 1).min(n0[lo]);
    let mut out = Vec::new();
    for lo in 1..=theta {
        let hi = max_end(lo);
        if hi < lo + 2 {
            continue;
        }
        if lo > 1 && max_end(lo - 1) >= hi {
            continue;
        }
        let pattern = (0..base.arc_count())
            .map(|id| f.on_copy(ten, id, lo).unwrap_or(0))
            .collect();
        out.push(RepeatedInterval { start: lo, end: hi, pattern });
    }
    out
}

/// The static flow read off a repeated interval.
pub fn phi_project(ten: &TimeExpandedNetwork, f: &FlowOverTime, iv: &RepeatedInterval) -> Result<StaticFlow> {
    if !is_repeated_on(ten, f, iv.start, iv.end) {
        return Err(FlowError::NotRepeated {
            start: iv.start,
            end: iv.end,
        });
    }
    let values: Vec<i64> = (0..ten.base_network().arc_count())
        .map(|id| f.on_copy(ten, id, iv.start).unwrap_or(0))
        .collect();
    if values != iv.pattern {
        return Err(FlowError::NotRepeated {
            start: iv.start,
            end: iv.end,
        });
    }
    Ok(StaticFlow { values })
}
