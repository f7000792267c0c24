//! Projection of band walks to the base network, lifting back, heights, repeated components
//! and the two families of lifted cycles used by the band phases.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::expand::{phi_project, BandView, FlowOverTime, RepeatedInterval, TenArcKind, TimeExpandedNetwork};
use crate::graph::{IncidenceVector, NetworkSpec, NodeId, ResArc, ResidualView, Walk};

/// Heights of the nodes of a walk relative to its first node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightProfile {
    pub heights: Vec<i64>,
}

impl HeightProfile {
    pub fn from_transits(transits: &[i64]) -> Self {
        let mut heights = Vec::with_capacity(transits.len() + 1);
        heights.push(0);
        let mut h = 0;
        for t in transits {
            h += t;
            heights.push(h);
        }
        HeightProfile { heights }
    }

    /// h+(W): the largest height.
    pub fn max(&self) -> i64 {
        *self.heights.iter().max().unwrap()
    }

    /// h-(W): the smallest height.
    pub fn min(&self) -> i64 {
        *self.heights.iter().min().unwrap()
    }

    /// h(W) = h+(W) - h-(W).
    pub fn height(&self) -> i64 {
        self.max() - self.min()
    }

    /// Index of the first lowest node.
    pub fn low(&self) -> usize {
        let m = self.min();
        self.heights.iter().position(|&h| h == m).unwrap()
    }

    /// Index of the first highest node.
    pub fn high(&self) -> usize {
        let m = self.max();
        self.heights.iter().position(|&h| h == m).unwrap()
    }

    pub fn last(&self) -> i64 {
        *self.heights.last().unwrap()
    }
}

/// Heights of a base-network walk.
pub fn heights(net: &NetworkSpec, w: &Walk) -> HeightProfile {
    let transits: Vec<i64> = w.arcs.iter().map(|ra| ra.transit(net)).collect();
    HeightProfile::from_transits(&transits)
}

/// Layers of the non-super nodes of a TEN walk.
pub fn layers(ten: &TimeExpandedNetwork, w: &Walk) -> Vec<usize> {
    w.nodes.iter().filter_map(|&v| ten.layer_of(v)).collect()
}

/// Height of a TEN walk: spread of the layers it visits.
pub fn ten_height(ten: &TimeExpandedNetwork, w: &Walk) -> i64 {
    let ls = layers(ten, w);
    match (ls.iter().min(), ls.iter().max()) {
        (Some(lo), Some(hi)) => (*hi - *lo) as i64,
        _ => 0,
    }
}

/// pi: maps a walk of band[lo, hi] to the base network; arcs at the super nodes disappear.
pub fn project_walk(ten: &TimeExpandedNetwork, w: &Walk, band: BandView) -> Result<Walk> {
    let net = ten.network();
    w.validate(net)?;
    if let Some(&v) = w.nodes.iter().find(|&&v| !band.contains_node(ten, v)) {
        return Err(FlowError::OutsideBand(format!(
            "node {v} lies in layer {:?}, band is [{}, {}]",
            ten.layer_of(v),
            band.lo,
            band.hi
        )));
    }
    let base = ten.base_network();
    let mut arcs = Vec::new();
    for ra in &w.arcs {
        if let TenArcKind::Copy { base: b, .. } = ten.kind(ra.arc) {
            arcs.push(ResArc {
                arc: b,
                backward: ra.backward,
            });
        }
    }
    Walk::from_arcs(base, ten.base_of(w.start()), arcs)
}

/// Lifts a base walk into band[lo, hi] so that its lowest node sits in `layer`.
pub fn lift_walk(ten: &TimeExpandedNetwork, w: &Walk, layer: usize, band: BandView) -> Result<Walk> {
    let base = ten.base_network();
    w.validate(base)?;
    let prof = heights(base, w);
    let start = layer as i64 - prof.min();
    let node_layers: Vec<i64> = prof.heights.iter().map(|h| start + h).collect();
    for &l in &node_layers {
        if l < band.lo as i64 || l > band.hi as i64 {
            return Err(FlowError::BandOverflow(format!(
                "layer {l} outside [{}, {}] when lifting at {layer}",
                band.lo, band.hi
            )));
        }
    }
    let mut arcs = Vec::with_capacity(w.arcs.len());
    for (j, ra) in w.arcs.iter().enumerate() {
        let copy_layer = if ra.backward { node_layers[j + 1] } else { node_layers[j] } as usize;
        let copy = ten.copy_arc(ra.arc, copy_layer).ok_or_else(|| {
            FlowError::BandOverflow(format!("arc {} has no copy in layer {copy_layer}", ra.arc))
        })?;
        arcs.push(ResArc {
            arc: copy,
            backward: ra.backward,
        });
    }
    let first = ten.node(w.start(), node_layers[0] as usize);
    Walk::from_arcs(ten.network(), first, arcs)
}

/// How a repeated component begins or ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    /// In the lower boundary layer of the band.
    Lower,
    /// In the upper boundary layer of the band.
    Upper,
    /// Next to the super-source or super-sink.
    Terminal,
    /// The component is the whole (closed) cycle.
    Closed,
}

/// Maximal piece of a TEN cycle between super nodes and boundary-layer crossings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedComponent {
    pub walk: Walk,
    pub start: Endpoint,
    pub end: Endpoint,
    pub inside: bool,
}

impl RepeatedComponent {
    pub fn start_layer(&self, ten: &TimeExpandedNetwork) -> usize {
        ten.layer_of(self.walk.start()).unwrap()
    }

    pub fn end_layer(&self, ten: &TimeExpandedNetwork) -> usize {
        ten.layer_of(self.walk.end()).unwrap()
    }
}

/// Splits a closed TEN walk at the super nodes and at the nodes in layers lo and hi.
pub fn cycle_components(ten: &TimeExpandedNetwork, c: &Walk, lo: usize, hi: usize) -> Result<Vec<RepeatedComponent>> {
    c.validate(ten.network())?;
    if !c.is_closed() {
        return Err(FlowError::MalformedWalk("components need a closed walk".into()));
    }
    let k = c.arcs.len();
    let is_split = |v: NodeId| matches!(ten.layer_of(v), Some(l) if l == lo || l == hi);
    let kind = |v: NodeId, terminal: bool| match ten.layer_of(v) {
        Some(l) if l == lo => Endpoint::Lower,
        Some(l) if l == hi => Endpoint::Upper,
        _ if terminal => Endpoint::Terminal,
        _ => Endpoint::Closed,
    };
    let inside = |w: &Walk| {
        w.nodes
            .iter()
            .all(|&v| matches!(ten.layer_of(v), Some(l) if lo <= l && l <= hi))
    };
    let sub = |w: &Walk, from: usize, to: usize| Walk {
        nodes: w.nodes[from..=to].to_vec(),
        arcs: w.arcs[from..to].to_vec(),
    };
    let mut out = Vec::new();
    let super_pos = (0..k).find(|&i| ten.is_super(c.nodes[i]));
    let Some(sp) = super_pos else {
        let splits: Vec<usize> = (0..k).filter(|&i| is_split(c.nodes[i])).collect();
        if splits.is_empty() {
            out.push(RepeatedComponent {
                walk: c.clone(),
                start: Endpoint::Closed,
                end: Endpoint::Closed,
                inside: inside(c),
            });
            return Ok(out);
        }
        let rot = c.rotated(splits[0]);
        let mut bounds: Vec<usize> = (0..k).filter(|&i| is_split(rot.nodes[i])).collect();
        bounds.push(k);
        for pair in bounds.windows(2) {
            let w = sub(&rot, pair[0], pair[1]);
            out.push(RepeatedComponent {
                start: kind(w.start(), false),
                end: kind(w.end(), false),
                inside: inside(&w),
                walk: w,
            });
        }
        return Ok(out);
    };
    let rot = c.rotated(sp);
    let mut i = 0;
    while i < k {
        if ten.is_super(rot.nodes[i]) {
            i += 1;
            continue;
        }
        let a = i;
        let mut b = i;
        while !ten.is_super(rot.nodes[b + 1]) {
            b += 1;
        }
        let mut bounds = vec![a];
        bounds.extend((a + 1..b).filter(|&j| is_split(rot.nodes[j])));
        bounds.push(b);
        bounds.dedup();
        for pair in bounds.windows(2) {
            let w = sub(&rot, pair[0], pair[1]);
            out.push(RepeatedComponent {
                start: kind(w.start(), pair[0] == a),
                end: kind(w.end(), pair[1] == b),
                inside: inside(&w),
                walk: w,
            });
        }
        i = b + 1;
    }
    Ok(out)
}

/// Components of a closed TEN walk that lie inside the band of `iv`.
pub fn repeated_components(ten: &TimeExpandedNetwork, c: &Walk, iv: &RepeatedInterval) -> Result<Vec<RepeatedComponent>> {
    Ok(cycle_components(ten, c, iv.start, iv.end)?
        .into_iter()
        .filter(|comp| comp.inside)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Source,
    Sink,
}

/// Cycles to augment together, each by `amount` units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFamily {
    pub base_cycle: Walk,
    pub cycles: Vec<Walk>,
    pub amount: i64,
    /// Repetitions of the base cycle inside each member (1 for zero-transit families).
    pub repetitions: i64,
}

impl CycleFamily {
    pub fn incidence(&self) -> IncidenceVector {
        let mut inc = IncidenceVector::default();
        for c in &self.cycles {
            inc.add_walk(c, 1);
        }
        inc
    }

    pub fn cost(&self, ten: &TimeExpandedNetwork) -> i128 {
        self.incidence().cost(ten.network()) * self.amount as i128
    }
}

fn check_base_cycle(net: &NetworkSpec, b: &Walk) -> Result<()> {
    b.validate(net)?;
    if !b.is_cycle() {
        return Err(FlowError::MalformedWalk("base cycle expected".into()));
    }
    if b.cost(net) >= 0 {
        return Err(FlowError::Invariant(format!("cycle cost {} is not negative", b.cost(net))));
    }
    Ok(())
}

fn band_of(ten: &TimeExpandedNetwork, iv: &RepeatedInterval) -> Result<BandView> {
    ten.band(iv.start, iv.end)
}

fn node_sets_disjoint(ten: &TimeExpandedNetwork, cycles: &[Walk]) -> bool {
    let mut seen = HashSet::new();
    cycles.iter().all(|c| {
        let own: HashSet<NodeId> = c.nodes.iter().copied().filter(|&v| !ten.is_super(v)).collect();
        own.into_iter().all(|v| seen.insert(v))
    })
}

/// Lifts a negative zero-transit cycle of the projected residual into every admissible layer.
pub fn lift_zero_cycle_family(
    ten: &TimeExpandedNetwork,
    f: &FlowOverTime,
    iv: &RepeatedInterval,
    b: &Walk,
) -> Result<CycleFamily> {
    let base = ten.base_network();
    check_base_cycle(base, b)?;
    if b.transit(base) != 0 {
        return Err(FlowError::Invariant("zero-transit family needs tau(B) = 0".into()));
    }
    let phi = phi_project(ten, f, iv)?;
    let view = ResidualView::new(base, &phi.values)?;
    let amount = b.bottleneck(&view);
    if amount <= 0 {
        return Err(FlowError::CapacityExceeded("cycle is not in the projected residual".into()));
    }
    let h = heights(base, b).height() as usize;
    if iv.start + h > iv.end {
        return Err(FlowError::IntervalTooSmall(format!(
            "cycle of height {h} does not fit into [{}, {}]",
            iv.start, iv.end
        )));
    }
    let band = band_of(ten, iv)?;
    let cycles = (iv.start..=iv.end - h)
        .map(|layer| lift_walk(ten, b, layer, band))
        .collect::<Result<Vec<_>>>()?;
    if !node_sets_disjoint(ten, &cycles) {
        return Err(FlowError::Invariant("lifted zero-transit cycles intersect".into()));
    }
    Ok(CycleFamily {
        base_cycle: b.clone(),
        cycles,
        amount,
        repetitions: 1,
    })
}

/// Number of repetitions of B that fit between the connectors, for tau(B) > 0.
fn repetitions_for(band_len: i64, p1: &[i64], b: &[i64], p2: &[i64]) -> i64 {
    let hp1 = HeightProfile::from_transits(p1);
    let hp2 = HeightProfile::from_transits(p2);
    let hb = HeightProfile::from_transits(b).height().max(1);
    let start_offset = -hp1.min();
    (band_len - start_offset - hp1.last() - hp2.max()).div_euclid(hb) - 1
}

fn reversed_transits(t: &[i64]) -> Vec<i64> {
    t.iter().rev().map(|x| -x).collect()
}

/// Lifts closed walks P1 + B^r + P2 through s (or t) and closes them over the super node.
///
/// Uses |tau(B)| copies started in consecutive layers so that the copies of B together cover
/// every layer of their span exactly once.
pub fn lift_reachable_cycle_family(
    ten: &TimeExpandedNetwork,
    f: &FlowOverTime,
    iv: &RepeatedInterval,
    b: &Walk,
    side: Terminal,
    p1: &Walk,
    p2: &Walk,
) -> Result<CycleFamily> {
    let base = ten.base_network();
    check_base_cycle(base, b)?;
    let tau_b = b.transit(base);
    if tau_b == 0 {
        return Err(FlowError::Invariant("reachable family needs tau(B) != 0".into()));
    }
    let terminal = match side {
        Terminal::Source => base.source(),
        Terminal::Sink => base.sink(),
    };
    p1.validate(base)?;
    p2.validate(base)?;
    if p1.start() != terminal || p1.end() != b.start() || p2.start() != b.start() || p2.end() != terminal {
        return Err(FlowError::ConnectorsMissing(format!(
            "connectors must run between node {terminal} and node {}",
            b.start()
        )));
    }
    let phi = phi_project(ten, f, iv)?;
    let base_view = ResidualView::new(base, &phi.values)?;
    for w in [p1, b, p2] {
        if w.arcs.iter().any(|&ra| !base_view.contains(ra)) {
            return Err(FlowError::ConnectorsMissing("walk leaves the projected residual".into()));
        }
    }
    let tr = |w: &Walk| -> Vec<i64> { w.arcs.iter().map(|ra| ra.transit(base)).collect() };
    let band_len = (iv.end - iv.start) as i64;
    let r_max = if tau_b > 0 {
        repetitions_for(band_len, &tr(p1), &tr(b), &tr(p2))
    } else {
        repetitions_for(
            band_len,
            &reversed_transits(&tr(p2)),
            &reversed_transits(&tr(b)),
            &reversed_transits(&tr(p1)),
        )
    };
    if r_max < 1 {
        return Err(FlowError::IntervalTooSmall(format!(
            "no repetition of a cycle with transit {tau_b} fits into [{}, {}]",
            iv.start, iv.end
        )));
    }
    let band = band_of(ten, iv)?;
    let net = ten.network();
    let view = ResidualView::new(net, &f.values)?;
    let copies = tau_b.unsigned_abs() as usize;
    let mut last_err = None;
    for r in (1..=r_max).rev() {
        let mut w = p1.clone();
        for _ in 0..r {
            w = w.concat(b)?;
        }
        w = w.concat(p2)?;
        let member_cost = w.cost(base);
        if member_cost >= 0 {
            last_err = Some(FlowError::IntervalTooSmall(format!(
                "{r} repetitions give a closed walk of cost {member_cost}"
            )));
            break;
        }
        let mut cycles = Vec::with_capacity(copies);
        let mut ok = true;
        for i in 0..copies {
            let lifted = match lift_walk(ten, &w, iv.start + i, band) {
                Ok(l) => l,
                Err(e) => {
                    last_err = Some(e);
                    ok = false;
                    break;
                }
            };
            let first = ten.layer_of(lifted.start()).unwrap();
            let last = ten.layer_of(lifted.end()).unwrap();
            let (enter, leave) = match side {
                Terminal::Source => (
                    ResArc::forward(ten.source_link(first)),
                    ResArc::backward(ten.source_link(last)),
                ),
                Terminal::Sink => (
                    ResArc::backward(ten.sink_link(first)),
                    ResArc::forward(ten.sink_link(last)),
                ),
            };
            let hub = enter.tail(net);
            let mut arcs = vec![enter];
            arcs.extend_from_slice(&lifted.arcs);
            arcs.push(leave);
            cycles.push(Walk::from_arcs(net, hub, arcs)?);
        }
        if !ok {
            continue;
        }
        let mut inc = IncidenceVector::default();
        for c in &cycles {
            inc.add_walk(c, 1);
        }
        if let Some((ra, _)) = inc.counts.iter().find(|(ra, &k)| view.capacity(**ra) < k as i64) {
            last_err = Some(FlowError::CapacityExceeded(format!(
                "family needs more than the residual capacity of {ra:?}"
            )));
            continue;
        }
        return Ok(CycleFamily {
            base_cycle: b.clone(),
            cycles,
            amount: 1,
            repetitions: r,
        });
    }
    Err(last_err.unwrap_or_else(|| FlowError::IntervalTooSmall("no admissible repetition count".into())))
}
