//! The iterative construction: seed, band phases 1.1 and 1.2, boundary phase 2, final sweep.

mod band;
mod boundary;
pub mod compress;
pub mod cycles;
mod seed;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{horizon_bounds, HorizonBounds};
use crate::error::{FlowError, Result};
use crate::expand::{check_repeated, phi_project, FlowOverTime, RepeatedInterval, TenArcKind, TimeExpandedNetwork};
use crate::graph::{augment, NormalizedNetwork, ResArc, ResidualView, StaticFlow, Walk};
use crate::lifting::CycleFamily;
use crate::statics::{cut_arcs, find_negative_cycle_in, max_flow, CutArcSet};

pub use seed::{ford_fulkerson_seed, temporally_repeated_flow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step2Strategy {
    /// Minimum-cost cycle by branch and bound (falls back to the heuristic per root on budget).
    Exact,
    /// Lightest cycle of the Bellman-Ford predecessor graph.
    Heuristic,
}

impl FromStr for Step2Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Step2Strategy::Exact),
            "heuristic" => Ok(Step2Strategy::Heuristic),
            other => Err(format!("unknown strategy '{other}', expected exact or heuristic")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub step2: Step2Strategy,
    /// Exact cycle search is used only up to this many (normalized) base nodes.
    pub max_exact_nodes: usize,
    /// Branch-and-bound expansions allowed per root node.
    pub exact_budget: u64,
    /// Cancel leftover negative cycles below the horizon threshold.
    pub sweep: bool,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step2: Step2Strategy::Exact,
            max_exact_nodes: 12,
            exact_budget: 20_000,
            sweep: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Step11,
    Step12,
    Step2,
    Sweep,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Step11 => "1.1",
            Phase::Step12 => "1.2",
            Phase::Step2 => "2",
            Phase::Sweep => "sweep",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseStatus {
    NotRun,
    Completed,
    /// Stopped early because the repeated interval could not host the next family.
    Exhausted(String),
    Skipped(String),
}

impl PhaseStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, PhaseStatus::Completed)
    }
}

impl fmt::Display for PhaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseStatus::NotRun => f.write_str("not run"),
            PhaseStatus::Completed => f.write_str("completed"),
            PhaseStatus::Exhausted(why) => write!(f, "exhausted ({why})"),
            PhaseStatus::Skipped(why) => write!(f, "skipped ({why})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseCycleRecord {
    pub arcs: Vec<ResArc>,
    pub cost: i64,
    pub transit: i64,
    pub height: i64,
    pub repetitions: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step2Record {
    pub band: (usize, usize),
    pub exact: bool,
    pub cycle_cost: i64,
    pub compressed: bool,
    /// Whether the cycle stays inside band[1, t2] or band[t1, theta].
    pub confined: bool,
    pub component_count: usize,
    pub component_heights: Vec<i64>,
    pub h_i: i64,
    pub height_bound: i128,
    pub flushed_zero: usize,
    pub flushed_positive: usize,
    /// Costs of the cycles of H after the flush.
    pub h_cycle_costs: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub phase: Phase,
    /// Index of the enclosing loop iteration within the phase.
    pub iteration: usize,
    pub base_cycle: Option<BaseCycleRecord>,
    pub cycles: Vec<Walk>,
    pub amount: i64,
    pub cost_before: i128,
    pub cost_after: i128,
    pub value_before: i64,
    pub value_after: i64,
    pub interval_before: Option<(usize, usize)>,
    pub interval_after: Option<(usize, usize)>,
    pub predicted: Option<(i64, i64)>,
    pub phi_commutes: Option<bool>,
    pub uses_cut_arc: bool,
    pub step2: Option<Step2Record>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionLog {
    pub bounds: HorizonBounds,
    pub node_count: usize,
    pub seed_cost: i128,
    pub step_1_1: PhaseStatus,
    pub step_1_2: PhaseStatus,
    pub step_2: PhaseStatus,
    pub records: Vec<IterationRecord>,
}

impl ConstructionLog {
    pub fn phase_records(&self, phase: Phase) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter(move |r| r.phase == phase)
    }

    /// Loop iterations of the band phases that augmented at least once.
    pub fn step1_iterations(&self) -> usize {
        [Phase::Step11, Phase::Step12]
            .iter()
            .map(|&p| {
                let mut its: Vec<usize> = self.phase_records(p).map(|r| r.iteration).collect();
                its.dedup();
                its.len()
            })
            .sum()
    }
}

/// Flow and certified interval at a phase boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub flow: FlowOverTime,
    pub interval: Option<RepeatedInterval>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub ten: TimeExpandedNetwork,
    pub flow: FlowOverTime,
    pub value: i64,
    pub cost: i128,
    /// Interval certified by the construction at the end.
    pub interval: Option<RepeatedInterval>,
    pub log: ConstructionLog,
    pub after_seed: Checkpoint,
    pub after_step_1_1: Checkpoint,
    pub after_step_1_2: Checkpoint,
    pub after_step_2: Checkpoint,
}

/// Mutable state threaded through the phases.
pub struct ConstructionState {
    pub ten: TimeExpandedNetwork,
    pub config: SolverConfig,
    pub bounds: HorizonBounds,
    pub f: FlowOverTime,
    pub interval: Option<RepeatedInterval>,
    pub log: ConstructionLog,
    max_value: i64,
    cut: CutArcSet,
}

impl ConstructionState {
    /// Builds the TEN and the temporally repeated seed.
    pub fn new(net: &NormalizedNetwork, theta: usize, config: SolverConfig) -> Result<Self> {
        let bounds = horizon_bounds(&net.network)?;
        let ten = TimeExpandedNetwork::build(net, theta)?;
        let (f, _) = temporally_repeated_flow(&ten)?;
        let base = &net.network;
        let max_value = max_flow(base).value(base);
        let cut = cut_arcs(base);
        let seed_cost = f.cost(&ten);
        let mut state = ConstructionState {
            ten,
            config,
            bounds,
            f,
            interval: None,
            log: ConstructionLog {
                bounds,
                node_count: base.node_count(),
                seed_cost,
                step_1_1: PhaseStatus::NotRun,
                step_1_2: PhaseStatus::NotRun,
                step_2: PhaseStatus::NotRun,
                records: Vec::new(),
            },
            max_value,
            cut,
        };
        state.interval = state.select_interval(None);
        Ok(state)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            flow: self.f.clone(),
            interval: self.interval.clone(),
        }
    }

    pub fn theta(&self) -> usize {
        self.ten.horizon()
    }

    /// The maximal repeated interval containing the predicted one when it is non-degenerate,
    /// otherwise the longest (earliest on ties); only intervals whose projection is a maximum
    /// static flow qualify.
    pub fn select_interval(&self, predicted: Option<(i64, i64)>) -> Option<RepeatedInterval> {
        let base = self.ten.base_network();
        let candidates: Vec<RepeatedInterval> = check_repeated(&self.ten, &self.f)
            .into_iter()
            .filter(|iv| StaticFlow { values: iv.pattern.clone() }.value(base) == self.max_value)
            .collect();
        if let Some((lo, hi)) = predicted {
            if lo >= 1 && hi <= self.theta() as i64 && hi - lo >= 2 {
                if let Some(iv) = candidates.iter().find(|iv| iv.contains(lo as usize, hi as usize)) {
                    return Some(iv.clone());
                }
            }
        }
        candidates
            .into_iter()
            .min_by_key(|iv| (std::cmp::Reverse(iv.length()), iv.start))
    }

    fn uses_cut_arc(&self, cycles: &[Walk]) -> bool {
        cycles.iter().flat_map(|c| &c.arcs).any(|ra| match self.ten.kind(ra.arc) {
            TenArcKind::Copy { base, .. } => self.cut.arcs.contains(&base),
            _ => false,
        })
    }

    /// Augments a band family and records the step.
    fn apply_family(
        &mut self,
        phase: Phase,
        iteration: usize,
        fam: &CycleFamily,
        predicted: (i64, i64),
    ) -> Result<()> {
        let base = self.ten.base_network().clone();
        let iv = self
            .interval
            .clone()
            .ok_or_else(|| FlowError::Invariant("family without interval".into()))?;
        let phi_before = phi_project(&self.ten, &self.f, &iv)?;
        let cost_before = self.f.cost(&self.ten);
        let value_before = self.f.value(&self.ten);
        let values = augment(self.ten.network(), &self.f.values, &fam.incidence(), fam.amount)?;
        self.f = FlowOverTime { values };
        let cost_after = self.f.cost(&self.ten);
        if cost_after >= cost_before {
            return Err(FlowError::Invariant(format!(
                "phase {phase} family did not lower the cost ({cost_before} -> {cost_after})"
            )));
        }
        self.interval = self.select_interval(Some(predicted));
        let phi_commutes = match &self.interval {
            Some(new) if predicted.1 - predicted.0 >= 2 && new.contains(predicted.0 as usize, predicted.1 as usize) => {
                let mut expect = phi_before.values.clone();
                for ra in &fam.base_cycle.arcs {
                    expect[ra.arc] += if ra.backward { -fam.amount } else { fam.amount };
                }
                Some(phi_project(&self.ten, &self.f, new)?.values == expect)
            }
            _ => None,
        };
        let prof = crate::lifting::heights(&base, &fam.base_cycle);
        let record = IterationRecord {
            phase,
            iteration,
            base_cycle: Some(BaseCycleRecord {
                arcs: fam.base_cycle.arcs.clone(),
                cost: fam.base_cycle.cost(&base),
                transit: fam.base_cycle.transit(&base),
                height: prof.height(),
                repetitions: fam.repetitions,
            }),
            uses_cut_arc: self.uses_cut_arc(&fam.cycles),
            cycles: fam.cycles.clone(),
            amount: fam.amount,
            cost_before,
            cost_after,
            value_before,
            value_after: self.f.value(&self.ten),
            interval_before: Some((iv.start, iv.end)),
            interval_after: self.interval.as_ref().map(|iv| (iv.start, iv.end)),
            predicted: Some(predicted),
            phi_commutes,
            step2: None,
        };
        self.log.records.push(record);
        Ok(())
    }

    /// Cancels negative cycles left anywhere in the TEN; only allowed below the threshold.
    pub fn final_sweep(&mut self) -> Result<()> {
        let mut iteration = 0;
        loop {
            let net = self.ten.network();
            let view = ResidualView::new(net, &self.f.values)?;
            let Some(nc) = find_negative_cycle_in(&view, |ra| ra.cost(net), |_| true) else {
                return Ok(());
            };
            if self.bounds.above_threshold(self.theta()) || !self.config.sweep {
                return Err(FlowError::OptimalityViolation { cost: nc.weight });
            }
            let amount = nc.cycle.bottleneck(&view);
            let cost_before = self.f.cost(&self.ten);
            let value_before = self.f.value(&self.ten);
            let interval_before = self.interval.as_ref().map(|iv| (iv.start, iv.end));
            let values = crate::graph::augment_walk(net, &self.f.values, &nc.cycle, Some(amount))?;
            self.f = FlowOverTime { values };
            self.interval = self.select_interval(None);
            self.log.records.push(IterationRecord {
                phase: Phase::Sweep,
                iteration,
                base_cycle: None,
                cycles: vec![nc.cycle],
                amount,
                cost_before,
                cost_after: self.f.cost(&self.ten),
                value_before,
                value_after: self.f.value(&self.ten),
                interval_before,
                interval_after: self.interval.as_ref().map(|iv| (iv.start, iv.end)),
                predicted: None,
                phi_commutes: None,
                uses_cut_arc: false,
                step2: None,
            });
            iteration += 1;
        }
    }
}

/// Minimum-cost maximum flow over time for a network with transit times in {0, 1}.
pub fn solve(net: &NormalizedNetwork, theta: usize, config: &SolverConfig) -> Result<SolveOutcome> {
    let mut state = ConstructionState::new(net, theta, config.clone())?;
    let after_seed = state.checkpoint();
    state.step_1_1()?;
    let after_step_1_1 = state.checkpoint();
    state.step_1_2()?;
    let after_step_1_2 = state.checkpoint();
    state.step_2()?;
    let after_step_2 = state.checkpoint();
    state.final_sweep()?;
    let value = state.f.value(&state.ten);
    let cost = state.f.cost(&state.ten);
    Ok(SolveOutcome {
        value,
        cost,
        flow: state.f,
        interval: state.interval,
        log: state.log,
        ten: state.ten,
        after_seed,
        after_step_1_1,
        after_step_1_2,
        after_step_2,
    })
}
