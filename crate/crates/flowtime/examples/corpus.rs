//! Solves a seeded corpus and reports oracle agreement, audit results and timing.
//!
//! Usage: `cargo run --release --example corpus -- [count] [seed]`

use std::time::Instant;

use flowtime::batch::run_batch;
use flowtime::construction::{Execution, SolverConfig};
use flowtime::gen::corpus_params;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let params: Vec<_> = (0..count).map(|i| corpus_params(seed, i, 6, 10, 30)).collect();
    let start = Instant::now();
    let items = run_batch(&params, &SolverConfig::default(), Execution::default());
    let elapsed = start.elapsed();
    let mut bad = 0;
    for item in &items {
        if !item.ok() {
            bad += 1;
            println!(
                "#{}: value {} cost {} oracle {:?}/{:?} audit {} error {:?}",
                item.index, item.value, item.cost, item.oracle_value, item.oracle_cost, item.audit_ok, item.error
            );
        }
    }
    let slowest = items.iter().max_by_key(|i| i.micros).map(|i| (i.index, i.micros));
    println!("{count} instances, {bad} failed, {elapsed:.2?} total, slowest {slowest:?} (index, us)");
}
