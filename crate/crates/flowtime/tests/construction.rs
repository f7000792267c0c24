mod common;

use flowtime::construction::{solve, SolverConfig};
use flowtime::gen::{corpus_params, generate};

#[test]
fn corpus_invariants_hold() {
    let mut failures = Vec::new();
    for i in 0..300 {
        let p = corpus_params(11, i, 6, 10, 30);
        let inst = generate(&p).unwrap();
        let out = solve(&inst.normalized(), inst.theta, &SolverConfig::default()).unwrap();
        for (name, ok) in common::invariants(&out) {
            if ok == Some(false) {
                failures.push(format!("instance {i}: {name}"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
