//! Phases 1.1 and 1.2: negative cycles of the projected residual, lifted into the band.

use std::collections::BTreeSet;

use super::{ConstructionState, Phase, PhaseStatus};
use crate::error::{FlowError, Result};
use crate::expand::phi_project;
use crate::graph::{decompose_eulerian, decompose_walk, NodeId, ResidualView, Walk};
use crate::lifting::{lift_reachable_cycle_family, lift_zero_cycle_family, project_walk, Terminal};
use crate::statics::{bfs_path, find_negative_cycle, find_negative_cycle_in, lex_min_eulerian_subgraph, reachability_partition};

/// Errors that mean "the interval cannot host this family", not a bug.
fn exhausts(e: &FlowError) -> Option<String> {
    match e {
        FlowError::IntervalTooSmall(m)
        | FlowError::BandOverflow(m)
        | FlowError::CapacityExceeded(m)
        | FlowError::ConnectorsMissing(m) => Some(m.clone()),
        _ => None,
    }
}

impl ConstructionState {
    fn check_no_negative_transit_cycle(&self, phi: &crate::graph::StaticFlow) -> Result<()> {
        let base = self.ten.base_network();
        let view = ResidualView::new(base, &phi.values)?;
        if find_negative_cycle(&view, |ra| ra.transit(base)).is_some() {
            return Err(FlowError::Invariant(
                "projected residual contains a negative-transit cycle".into(),
            ));
        }
        Ok(())
    }

    /// Cancels negative zero-transit cycles of the projected residual, one lifted family at a
    /// time, until a window of sum_tau + 1 layers holds no negative cycle.
    pub fn step_1_1(&mut self) -> Result<()> {
        let sum_tau = self.bounds.sum_transit as usize;
        let mut iteration = 0;
        self.log.step_1_1 = loop {
            let Some(iv) = self.interval.clone() else {
                break PhaseStatus::Skipped("no repeated interval".into());
            };
            let phi = phi_project(&self.ten, &self.f, &iv)?;
            self.check_no_negative_transit_cycle(&phi)?;
            let hi = (iv.start + sum_tau).min(iv.end);
            let full_window = iv.end - iv.start >= sum_tau;
            let net = self.ten.network();
            let view = ResidualView::new(net, &self.f.values)?;
            let ten = &self.ten;
            let found = find_negative_cycle_in(
                &view,
                |ra| ra.cost(net),
                |v| matches!(ten.layer_of(v), Some(l) if iv.start <= l && l <= hi),
            );
            let Some(nc) = found else {
                break if full_window {
                    PhaseStatus::Completed
                } else {
                    PhaseStatus::Exhausted(format!(
                        "interval [{}, {}] is narrower than {} layers",
                        iv.start,
                        iv.end,
                        sum_tau + 1
                    ))
                };
            };
            let base = self.ten.base_network();
            let band = self.ten.band(iv.start, iv.end)?;
            let projected = project_walk(&self.ten, &nc.cycle, band)?;
            let (_, pieces) = decompose_walk(base, &projected)?;
            let b = pieces
                .into_iter()
                .filter(|c| c.cost(base) < 0 && c.transit(base) == 0)
                .min_by(|x, y| (x.cost(base), &x.arcs).cmp(&(y.cost(base), &y.arcs)))
                .ok_or_else(|| FlowError::Invariant("window cycle projects without a negative zero-transit cycle".into()))?;
            let fam = match lift_zero_cycle_family(&self.ten, &self.f, &iv, &b) {
                Ok(fam) => fam,
                Err(e) => match exhausts(&e) {
                    Some(why) => break PhaseStatus::Exhausted(why),
                    None => return Err(e),
                },
            };
            let h = crate::lifting::heights(base, &b).height();
            self.apply_family(
                Phase::Step11,
                iteration,
                &fam,
                (iv.start as i64 + h, iv.end as i64 - h),
            )?;
            iteration += 1;
        };
        Ok(())
    }

    /// Cancels s- and t-reachable negative cycles of the projected residual through the
    /// super-source and super-sink.
    pub fn step_1_2(&mut self) -> Result<()> {
        if !self.log.step_1_1.is_completed() {
            self.log.step_1_2 = PhaseStatus::Skipped("phase 1.1 did not complete".into());
            return Ok(());
        }
        let shrink = 3 * self.bounds.sum_transit as i64;
        let mut iteration = 0;
        self.log.step_1_2 = 'outer: loop {
            let Some(iv) = self.interval.clone() else {
                break PhaseStatus::Exhausted("no repeated interval".into());
            };
            let base = self.ten.base_network().clone();
            let phi = phi_project(&self.ten, &self.f, &iv)?;
            let part = reachability_partition(&base, &phi)
                .map_err(|_| FlowError::Invariant("projection is not a maximum flow".into()))?;
            let view = ResidualView::new(&base, &phi.values)?;
            let Some(h) = lex_min_eulerian_subgraph(&view, &part)? else {
                break PhaseStatus::Completed;
            };
            let pieces = decompose_eulerian(&base, &h)?;
            if pieces.iter().any(|c| c.cost(&base) > 0) {
                return Err(FlowError::Invariant("minimal Eulerian subgraph has a positive cycle".into()));
            }
            let mut progressed = false;
            for b in pieces.iter().filter(|c| c.cost(&base) < 0) {
                let Some(iv) = self.interval.clone() else {
                    break 'outer PhaseStatus::Exhausted("no repeated interval".into());
                };
                let phi = phi_project(&self.ten, &self.f, &iv)?;
                let view = ResidualView::new(&base, &phi.values)?;
                if b.bottleneck(&view) < 1 {
                    break 'outer PhaseStatus::Exhausted("cycle left the projected residual".into());
                }
                let fam = if b.transit(&base) == 0 {
                    lift_zero_cycle_family(&self.ten, &self.f, &iv, b).map(|mut fam| {
                        fam.amount = 1;
                        fam
                    })
                } else {
                    let (side, core) = if b.nodes.iter().all(|v| part.source_core.contains(v)) {
                        (Terminal::Source, &part.source_core)
                    } else if b.nodes.iter().all(|v| part.sink_core.contains(v)) {
                        (Terminal::Sink, &part.sink_core)
                    } else {
                        return Err(FlowError::Invariant("cycle of H is neither s- nor t-reachable".into()));
                    };
                    connectors(&view, b, side, core).and_then(|(rot, p1, p2)| {
                        lift_reachable_cycle_family(&self.ten, &self.f, &iv, &rot, side, &p1, &p2)
                    })
                };
                let fam = match fam {
                    Ok(fam) => fam,
                    Err(e) => match exhausts(&e) {
                        Some(why) => break 'outer PhaseStatus::Exhausted(why),
                        None => return Err(e),
                    },
                };
                self.apply_family(
                    Phase::Step12,
                    iteration,
                    &fam,
                    (iv.start as i64 + shrink, iv.end as i64 - shrink),
                )?;
                progressed = true;
            }
            if progressed {
                iteration += 1;
            }
        };
        Ok(())
    }
}

/// Rotates B to the node nearest to the terminal and finds hop-shortest connectors inside the
/// terminal's component.
fn connectors(view: &ResidualView, b: &Walk, side: Terminal, core: &BTreeSet<NodeId>) -> Result<(Walk, Walk, Walk)> {
    let net = view.net;
    let terminal = match side {
        Terminal::Source => net.source(),
        Terminal::Sink => net.sink(),
    };
    let k = b.arcs.len();
    if let Some(pos) = b.nodes[..k].iter().position(|&v| v == terminal) {
        return Ok((b.rotated(pos), Walk::trivial(terminal), Walk::trivial(terminal)));
    }
    let in_core = |v: NodeId| core.contains(&v);
    let mut best: Option<(usize, usize, Walk)> = None;
    for pos in 0..k {
        if let Some(p) = bfs_path(view, terminal, b.nodes[pos], in_core) {
            if best.as_ref().is_none_or(|(len, _, _)| p.len() < *len) {
                best = Some((p.len(), pos, p));
            }
        }
    }
    let (_, pos, p1) = best.ok_or_else(|| FlowError::ConnectorsMissing("no path from the terminal".into()))?;
    let p2 = bfs_path(view, b.nodes[pos], terminal, in_core)
        .ok_or_else(|| FlowError::ConnectorsMissing("no path back to the terminal".into()))?;
    Ok((b.rotated(pos), p1, p2))
}
