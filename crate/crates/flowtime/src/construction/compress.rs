//! Rewriting of positive-transit repeated components of a boundary-phase cycle into
//! bounded-height liftings that cost no more.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expand::{FlowOverTime, RepeatedInterval, TenArcKind, TimeExpandedNetwork};
use crate::graph::{decompose_walk_anchored, IncidenceVector, NetworkSpec, ResArc, ResidualView, Walk};
use crate::lifting::{cycle_components, heights, lift_walk, ten_height, Endpoint, RepeatedComponent};

/// Subsets of removed cycles are enumerated only up to this many cycles.
const MAX_ENUMERATED_CYCLES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompressionCase {
    /// The component runs from a super node up to the upper boundary layer.
    EndsUpper,
    /// The component runs from the lower boundary layer to a super node.
    StartsLower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub case: CompressionCase,
    pub rewritten: bool,
    pub height_before: i64,
    pub height_after: i64,
    pub cost_before: i64,
    pub cost_after: i64,
    /// 2 sum_tau for `EndsUpper`, |V| sum_tau for `StartsLower`.
    pub height_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compression {
    pub cycle: Walk,
    pub changed: bool,
    pub components: Vec<ComponentReport>,
}

fn classify(ten: &TimeExpandedNetwork, comp: &RepeatedComponent) -> Option<CompressionCase> {
    if !comp.inside || comp.end_layer(ten) <= comp.start_layer(ten) {
        return None;
    }
    match (comp.start, comp.end) {
        (Endpoint::Terminal, Endpoint::Upper) => Some(CompressionCase::EndsUpper),
        (Endpoint::Lower, Endpoint::Terminal) => Some(CompressionCase::StartsLower),
        _ => None,
    }
}

/// Inserts `cycle` into `walk` at the last (or first) visit of one of its nodes.
fn insert_cycle(net: &NetworkSpec, walk: &Walk, cycle: &Walk, last: bool) -> Option<Walk> {
    let k = cycle.arcs.len();
    let mut spots = (0..walk.nodes.len()).filter_map(|p| {
        cycle.nodes[..k]
            .iter()
            .position(|&v| v == walk.nodes[p])
            .map(|q| (p, q))
    });
    let (p, q) = if last { spots.next_back()? } else { spots.next()? };
    let rot = cycle.rotated(q);
    let mut arcs = walk.arcs[..p].to_vec();
    arcs.extend_from_slice(&rot.arcs);
    arcs.extend_from_slice(&walk.arcs[p..]);
    Walk::from_arcs(net, walk.start(), arcs).ok()
}

/// Cheapest walk W' made of the path part of W plus some of its cycles in which the end is the
/// highest node (`EndsUpper`) or the start is the lowest node (`StartsLower`).
pub fn compress_walk(net: &NetworkSpec, w: &Walk, case: CompressionCase) -> Result<Option<Walk>> {
    let (path, cycles) = decompose_walk_anchored(net, w)?;
    let path = match path {
        Some(p) => p,
        None => Walk::from_arcs(net, w.start(), Vec::new())?,
    };
    if cycles.len() > MAX_ENUMERATED_CYCLES {
        return Ok(None);
    }
    let mut subsets: Vec<(i64, u32, u32)> = (0u32..1 << cycles.len())
        .map(|mask| {
            let cost = (0..cycles.len())
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| cycles[j].cycle.cost(net))
                .sum::<i64>();
            (cost, mask.count_ones(), mask)
        })
        .collect();
    subsets.sort_unstable();
    'subsets: for (_, _, mask) in subsets {
        let mut cand = path.clone();
        let mut pending: Vec<&Walk> = (0..cycles.len())
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| &cycles[j].cycle)
            .collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for c in pending {
                match insert_cycle(net, &cand, c, case == CompressionCase::EndsUpper) {
                    Some(next) => cand = next,
                    None => rest.push(c),
                }
            }
            if rest.len() == before {
                continue 'subsets;
            }
            pending = rest;
        }
        let prof = heights(net, &cand);
        let ok = match case {
            CompressionCase::EndsUpper => prof.last() == prof.max(),
            CompressionCase::StartsLower => prof.min() == 0,
        };
        if ok {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

fn relayer_link(ten: &TimeExpandedNetwork, ra: ResArc, layer: usize) -> Option<ResArc> {
    let arc = match ten.kind(ra.arc) {
        TenArcKind::SourceLink { .. } => ten.source_link(layer),
        TenArcKind::SinkLink { .. } => ten.sink_link(layer),
        TenArcKind::Copy { .. } => return None,
    };
    Some(ResArc {
        arc,
        backward: ra.backward,
    })
}

fn fits_residual(ten: &TimeExpandedNetwork, f: &FlowOverTime, c: &Walk) -> bool {
    let net = ten.network();
    let Ok(view) = ResidualView::new(net, &f.values) else {
        return false;
    };
    c.is_closed()
        && IncidenceVector::from_walk(c)
            .counts
            .iter()
            .all(|(&ra, &k)| ra.residual(view.net, view.flow) >= k as i64)
}

/// Rewrites one component; returns the new cycle when the rewrite stays a residual cycle of
/// no larger cost.
fn rewrite(
    ten: &TimeExpandedNetwork,
    f: &FlowOverTime,
    iv: &RepeatedInterval,
    rot: &Walk,
    range: (usize, usize),
    case: CompressionCase,
) -> Result<Option<(Walk, Walk)>> {
    let net = ten.network();
    let base = ten.base_network();
    let comp = Walk {
        nodes: rot.nodes[range.0..=range.1].to_vec(),
        arcs: rot.arcs[range.0..range.1].to_vec(),
    };
    let band = ten.band(iv.start, iv.end)?;
    let projected = crate::lifting::project_walk(ten, &comp, band)?;
    let Some(w2) = compress_walk(base, &projected, case)? else {
        return Ok(None);
    };
    let prof = heights(base, &w2);
    let spread = (prof.max() - prof.min()) as usize;
    let low = match case {
        CompressionCase::EndsUpper => match iv.end.checked_sub(spread) {
            Some(l) if l >= iv.start => l,
            _ => return Ok(None),
        },
        CompressionCase::StartsLower => iv.start,
    };
    let lifted = match lift_walk(ten, &w2, low, band) {
        Ok(l) => l,
        Err(_) => return Ok(None),
    };
    let mut arcs = rot.arcs[..range.0].to_vec();
    match case {
        CompressionCase::EndsUpper => {
            let Some(link) = arcs.pop().and_then(|ra| relayer_link(ten, ra, ten.layer_of(lifted.start()).unwrap())) else {
                return Ok(None);
            };
            arcs.push(link);
            arcs.extend_from_slice(&lifted.arcs);
            arcs.extend_from_slice(&rot.arcs[range.1..]);
        }
        CompressionCase::StartsLower => {
            arcs.extend_from_slice(&lifted.arcs);
            let Some(link) = relayer_link(ten, rot.arcs[range.1], ten.layer_of(lifted.end()).unwrap()) else {
                return Ok(None);
            };
            arcs.push(link);
            arcs.extend_from_slice(&rot.arcs[range.1 + 1..]);
        }
    }
    let Ok(cand) = Walk::from_arcs(net, rot.start(), arcs) else {
        return Ok(None);
    };
    if !fits_residual(ten, f, &cand) || cand.cost(net) > rot.cost(net) {
        return Ok(None);
    }
    Ok(Some((cand, lifted)))
}

/// Positions (node index ranges) of the components of a cycle rotated to start at a super node.
fn component_ranges(ten: &TimeExpandedNetwork, rot: &Walk, comps: &[RepeatedComponent]) -> Vec<(usize, usize)> {
    let net = ten.network();
    let mut pos = 0;
    let mut out = Vec::with_capacity(comps.len());
    for comp in comps {
        while ten.is_super(rot.arcs[pos].tail(net)) || ten.is_super(rot.arcs[pos].head(net)) {
            pos += 1;
        }
        out.push((pos, pos + comp.walk.arcs.len()));
        pos += comp.walk.arcs.len();
    }
    out
}

/// Compresses every qualifying repeated component of `c` with respect to `iv`.
///
/// Components keep their original form when no cheaper bounded-height rewrite exists, so the
/// result is always a residual cycle of cost at most that of `c`.
pub fn compress(ten: &TimeExpandedNetwork, f: &FlowOverTime, iv: &RepeatedInterval, c: &Walk) -> Result<Compression> {
    let net = ten.network();
    let unchanged = Compression {
        cycle: c.clone(),
        changed: false,
        components: Vec::new(),
    };
    let Some(sp) = (0..c.arcs.len()).find(|&i| ten.is_super(c.nodes[i])) else {
        return Ok(unchanged);
    };
    let sum_tau = ten.base_network().total_transit();
    let n = ten.base_network().node_count() as i64;
    let mut rot = c.rotated(sp);
    let mut reports = Vec::new();
    let mut changed = false;
    let mut idx = 0;
    loop {
        let comps = cycle_components(ten, &rot, iv.start, iv.end)?;
        let Some(j) = (idx..comps.len()).find(|&j| classify(ten, &comps[j]).is_some()) else {
            break;
        };
        let case = classify(ten, &comps[j]).unwrap();
        let ranges = component_ranges(ten, &rot, &comps);
        let height_before = ten_height(ten, &comps[j].walk);
        let cost_before = comps[j].walk.cost(net);
        let height_bound = match case {
            CompressionCase::EndsUpper => 2 * sum_tau,
            CompressionCase::StartsLower => n * sum_tau,
        };
        let mut report = ComponentReport {
            case,
            rewritten: false,
            height_before,
            height_after: height_before,
            cost_before,
            cost_after: cost_before,
            height_bound,
        };
        if let Some((cand, lifted)) = rewrite(ten, f, iv, &rot, ranges[j], case)? {
            if lifted.arcs != comps[j].walk.arcs {
                report.rewritten = true;
                report.height_after = ten_height(ten, &lifted);
                report.cost_after = lifted.cost(net);
                changed = true;
                rot = cand;
            }
        }
        reports.push(report);
        idx = j + 1;
    }
    Ok(Compression {
        cycle: rot,
        changed,
        components: reports,
    })
}
