//! Re-checks the per-iteration claims of the construction against its log.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construction::{ConstructionLog, Phase};
use crate::oracle::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuditKind {
    CostDecrease,
    ValuePreserved,
    Step1Count,
    CutAvoidance,
    PhiCommutes,
    ComponentCount,
    ComponentHeight,
    HNegative,
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditKind::CostDecrease => "cost-decrease",
            AuditKind::ValuePreserved => "value-preserved",
            AuditKind::Step1Count => "step1-count",
            AuditKind::CutAvoidance => "cut-avoidance",
            AuditKind::PhiCommutes => "phi-commutes",
            AuditKind::ComponentCount => "component-count",
            AuditKind::ComponentHeight => "component-height",
            AuditKind::HNegative => "h-negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub kind: AuditKind,
    pub phase: Option<Phase>,
    /// Index of the record in the log.
    pub record: Option<usize>,
    pub status: Check,
    pub detail: String,
}

impl AuditEntry {
    pub fn failed(&self) -> bool {
        self.status == Check::Fail
    }
}

/// True when no entry failed.
pub fn audit_passes(entries: &[AuditEntry]) -> bool {
    entries.iter().all(|e| !e.failed())
}

/// One entry per checked claim. Height bounds are only claimed while the interval is longer
/// than 2 J(h_i); otherwise the entry is `Skipped`.
pub fn audit_log(log: &ConstructionLog) -> Vec<AuditEntry> {
    let mut out = Vec::new();
    let Some(first) = log.records.first() else {
        return out;
    };
    let value = first.value_before;
    let n = log.node_count;
    for (idx, r) in log.records.iter().enumerate() {
        let mut push = |kind, status, detail: String| {
            out.push(AuditEntry {
                kind,
                phase: Some(r.phase),
                record: Some(idx),
                status,
                detail,
            })
        };
        push(
            AuditKind::CostDecrease,
            Check::from_bool(r.cost_after < r.cost_before),
            format!("{} -> {}", r.cost_before, r.cost_after),
        );
        push(
            AuditKind::ValuePreserved,
            Check::from_bool(r.value_before == value && r.value_after == value),
            format!("{} -> {} (seed {value})", r.value_before, r.value_after),
        );
        if matches!(r.phase, Phase::Step11 | Phase::Step12) {
            push(
                AuditKind::CutAvoidance,
                Check::from_bool(!r.uses_cut_arc),
                format!("uses cut arc: {}", r.uses_cut_arc),
            );
            push(
                AuditKind::PhiCommutes,
                r.phi_commutes.map_or(Check::Skipped, Check::from_bool),
                format!("{:?}", r.phi_commutes),
            );
        }
        if let Some(s) = &r.step2 {
            let limit = if s.confined { n + 1 } else { 2 * n + 1 };
            push(
                AuditKind::ComponentCount,
                Check::from_bool(s.component_count <= limit),
                format!("{} components, limit {limit}", s.component_count),
            );
            let applies = r
                .interval_before
                .is_some_and(|(lo, hi)| (hi - lo) as i128 > 2 * s.height_bound);
            let tallest = s.component_heights.iter().copied().max().unwrap_or(0);
            push(
                AuditKind::ComponentHeight,
                if applies {
                    Check::from_bool(tallest as i128 <= s.height_bound)
                } else {
                    Check::Skipped
                },
                format!("max height {tallest}, J({}) = {}", s.h_i, s.height_bound),
            );
            push(
                AuditKind::HNegative,
                Check::from_bool(s.h_cycle_costs.iter().all(|&c| c < 0)),
                format!("H cycle costs {:?}", s.h_cycle_costs),
            );
        }
    }
    let step1 = log.step1_iterations();
    if step1 > 0 {
        let limit = 2 * log.bounds.sum_cost_capacity;
        out.push(AuditEntry {
            kind: AuditKind::Step1Count,
            phase: None,
            record: None,
            status: Check::from_bool(step1 as i128 <= limit),
            detail: format!("{step1} iterations, limit {limit}"),
        });
    }
    out
}
