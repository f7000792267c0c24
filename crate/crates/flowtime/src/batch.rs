//! Solving many independent instances, in parallel or one after another.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::audit::{audit_log, audit_passes};
use crate::construction::{solve, Execution, SolverConfig};
use crate::gen::{generate, GenParams};
use crate::oracle::{verify, DEFAULT_ORACLE_ARC_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchItem {
    pub index: usize,
    pub params: GenParams,
    pub value: i64,
    pub cost: i128,
    pub oracle_value: Option<i64>,
    pub oracle_cost: Option<i128>,
    pub verified: bool,
    pub audit_ok: bool,
    pub error: Option<String>,
    pub micros: u128,
}

impl BatchItem {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.verified && self.audit_ok
    }
}

fn run_one(index: usize, params: &GenParams, config: &SolverConfig) -> BatchItem {
    let start = Instant::now();
    let mut item = BatchItem {
        index,
        params: params.clone(),
        value: 0,
        cost: 0,
        oracle_value: None,
        oracle_cost: None,
        verified: false,
        audit_ok: false,
        error: None,
        micros: 0,
    };
    let outcome = generate(params).and_then(|inst| solve(&inst.normalized(), inst.theta, config));
    match outcome {
        Ok(out) => {
            item.value = out.value;
            item.cost = out.cost;
            item.audit_ok = audit_passes(&audit_log(&out.log));
            match verify(&out.ten, &out.flow, DEFAULT_ORACLE_ARC_CAP) {
                Ok(report) => {
                    item.oracle_value = report.oracle_value;
                    item.oracle_cost = report.oracle_cost;
                    item.verified = report.all_ok();
                }
                Err(e) => item.error = Some(e.to_string()),
            }
        }
        Err(e) => item.error = Some(e.to_string()),
    }
    item.micros = start.elapsed().as_micros();
    item
}

/// Generates, solves, verifies and audits every instance. With parallel execution the instances
/// are spread over the thread pool and each solve runs sequentially inside.
pub fn run_batch(params: &[GenParams], config: &SolverConfig, execution: Execution) -> Vec<BatchItem> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let inner = SolverConfig {
                execution: Execution::Sequential,
                ..config.clone()
            };
            params
                .par_iter()
                .enumerate()
                .map(|(i, p)| run_one(i, p, &inner))
                .collect()
        }
        _ => params.iter().enumerate().map(|(i, p)| run_one(i, p, config)).collect(),
    }
}
