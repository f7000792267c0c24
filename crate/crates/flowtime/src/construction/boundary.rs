//! Phase 2: minimum-cost cycles near the time boundaries, with the difference H to the flow at
//! the start of the phase kept free of non-negative cycles.

use super::compress::compress;
use super::cycles::min_cost_cycle;
use super::{ConstructionState, IterationRecord, Phase, PhaseStatus, Step2Record, Step2Strategy};
use crate::error::{FlowError, Result};
use crate::expand::FlowOverTime;
use crate::graph::{augment_walk, decompose_eulerian, IncidenceVector, ResArc, Walk};
use crate::lifting::{cycle_components, ten_height};

/// H = f - g as a multiset of residual arcs of g.
pub fn flow_difference(f: &FlowOverTime, g: &FlowOverTime) -> IncidenceVector {
    let mut h = IncidenceVector::default();
    for (a, (&x, &y)) in f.values.iter().zip(&g.values).enumerate() {
        if x > y {
            h.add(ResArc::forward(a), (x - y) as u64);
        } else if y > x {
            h.add(ResArc::backward(a), (y - x) as u64);
        }
    }
    h
}

impl ConstructionState {
    fn use_exact_search(&self) -> bool {
        self.config.step2 == Step2Strategy::Exact && self.ten.base_network().node_count() <= self.config.max_exact_nodes
    }

    /// Undoes every cycle of H with non-negative cost; returns (zero, positive) counts.
    fn flush(&mut self, anchor: &FlowOverTime) -> Result<(usize, usize)> {
        let net = self.ten.network().clone();
        let (mut zero, mut positive) = (0, 0);
        loop {
            let h = flow_difference(&self.f, anchor);
            let pieces = decompose_eulerian(&net, &h)?;
            let bad: Vec<&Walk> = pieces.iter().filter(|k| k.cost(&net) >= 0).collect();
            if bad.is_empty() {
                return Ok((zero, positive));
            }
            for k in bad {
                if k.cost(&net) == 0 {
                    zero += 1;
                } else {
                    positive += 1;
                }
                let values = augment_walk(&net, &self.f.values, &k.reversed(), Some(1))?;
                self.f = FlowOverTime { values };
            }
        }
    }

    pub fn step_2(&mut self) -> Result<()> {
        let anchor = self.f.clone();
        let theta = self.theta();
        let exact = self.use_exact_search();
        let mut iteration = 0;
        loop {
            let iv = self.interval.clone();
            let bands = match &iv {
                Some(iv) => vec![(1, iv.end), (iv.start, theta)],
                None => vec![(1, theta)],
            };
            let found = bands.iter().find_map(|&(lo, hi)| {
                let band = self.ten.band(lo, hi).ok()?;
                min_cost_cycle(
                    &self.ten,
                    &self.f,
                    band,
                    exact,
                    self.config.exact_budget,
                    self.config.execution,
                )
                .map(|c| ((lo, hi), c))
            });
            let Some((band, search)) = found else { break };
            let mut cycle = search.cycle;
            let mut compressed = false;
            if let Some(iv) = &iv {
                let out = compress(&self.ten, &self.f, iv, &cycle)?;
                if out.changed {
                    cycle = out.cycle;
                    compressed = true;
                }
            }
            let net = self.ten.network().clone();
            let cycle_cost = cycle.cost(&net);
            let (confined, component_count, component_heights, h_i) = match &iv {
                Some(iv) => {
                    let comps = cycle_components(&self.ten, &cycle, iv.start, iv.end)?;
                    let inside: Vec<_> = comps.iter().filter(|c| c.inside).collect();
                    let layers = crate::lifting::layers(&self.ten, &cycle);
                    let confined = layers.iter().all(|&l| l <= iv.end) || layers.iter().all(|&l| l >= iv.start);
                    let heights = inside.iter().map(|c| ten_height(&self.ten, &c.walk)).collect();
                    let h_i = (iv.start as i64).max(theta as i64 - iv.end as i64);
                    (confined, inside.len(), heights, h_i)
                }
                None => (true, 0, Vec::new(), 0),
            };
            let height_bound = self.bounds.j(h_i as i128)?;
            let cost_before = self.f.cost(&self.ten);
            let value_before = self.f.value(&self.ten);
            let values = augment_walk(&net, &self.f.values, &cycle, Some(1))?;
            self.f = FlowOverTime { values };
            let (flushed_zero, flushed_positive) = self.flush(&anchor)?;
            let h = flow_difference(&self.f, &anchor);
            let h_cycle_costs: Vec<i64> = decompose_eulerian(&net, &h)?.iter().map(|k| k.cost(&net)).collect();
            let cost_after = self.f.cost(&self.ten);
            if cost_after >= cost_before {
                return Err(FlowError::Invariant(format!(
                    "phase 2 step did not lower the cost ({cost_before} -> {cost_after})"
                )));
            }
            let predicted = iv.as_ref().map(|iv| {
                let j = height_bound.min(i64::MAX as i128 / 4) as i64;
                (iv.start as i64 + j, iv.end as i64 - j)
            });
            self.interval = self.select_interval(predicted);
            self.log.records.push(IterationRecord {
                phase: Phase::Step2,
                iteration,
                base_cycle: None,
                cycles: vec![cycle],
                amount: 1,
                cost_before,
                cost_after,
                value_before,
                value_after: self.f.value(&self.ten),
                interval_before: iv.as_ref().map(|iv| (iv.start, iv.end)),
                interval_after: self.interval.as_ref().map(|iv| (iv.start, iv.end)),
                predicted,
                phi_commutes: None,
                uses_cut_arc: false,
                step2: Some(Step2Record {
                    band,
                    exact: search.exact,
                    cycle_cost,
                    compressed,
                    confined,
                    component_count,
                    component_heights,
                    h_i,
                    height_bound,
                    flushed_zero,
                    flushed_positive,
                    h_cycle_costs,
                }),
            });
            iteration += 1;
        }
        self.log.step_2 = PhaseStatus::Completed;
        Ok(())
    }
}
