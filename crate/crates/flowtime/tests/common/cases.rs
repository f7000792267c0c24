//! Hand-built boundary-phase cycles for the compression contract, plus cycles harvested from
//! solver runs.

use flowtime::construction::compress::{compress, CompressionCase};
use flowtime::construction::cycles::min_cost_cycle;
use flowtime::construction::{ford_fulkerson_seed, ConstructionState, Execution, SolverConfig};
use flowtime::expand::{is_repeated_on, FlowOverTime, RepeatedInterval, TimeExpandedNetwork};
use flowtime::graph::{augment_walk, ArcSpec, IncidenceVector, NetworkSpec, ResArc, ResidualView, Walk};
use flowtime::io::Instance;

pub struct HandCycle {
    pub name: &'static str,
    pub ten: TimeExpandedNetwork,
    pub f: FlowOverTime,
    pub iv: RepeatedInterval,
    pub cycle: Walk,
    /// Expected rewrite, or `None` when the cycle must come back unchanged.
    pub expected: Option<(CompressionCase, Vec<ResArc>)>,
}

/// s=0, t=1, a=2, b=3: flow on s->t only, and the idle loops t->a->t and t->b->a->t.
pub fn loop_ten() -> (TimeExpandedNetwork, FlowOverTime, RepeatedInterval) {
    let net = NetworkSpec::new(
        4,
        0,
        1,
        vec![
            ArcSpec::new(0, 1, 1, 0, 1),
            ArcSpec::new(1, 2, 1, 1, 0),
            ArcSpec::new(2, 1, 1, 1, 1),
            ArcSpec::new(1, 3, 1, 1, 1),
            ArcSpec::new(3, 2, 1, 0, 0),
        ],
    )
    .unwrap();
    let inst = Instance { network: net, theta: 14 };
    let ten = TimeExpandedNetwork::build(&inst.normalized(), inst.theta).unwrap();
    assert_eq!(ten.base_network(), &inst.network);
    let (f, iv) = ford_fulkerson_seed(&ten).unwrap();
    let pattern = iv.unwrap().pattern;
    assert_eq!(pattern, vec![1, 0, 0, 0, 0]);
    assert!(is_repeated_on(&ten, &f, 4, 12));
    (ten, f, RepeatedInterval { start: 4, end: 12, pattern })
}

pub fn hand_cycles() -> Vec<HandCycle> {
    let (ten, f, iv) = loop_ten();
    let copy = |a, l| ResArc::forward(ten.copy_arc(a, l).unwrap());
    let into_t = |l| ResArc::backward(ten.sink_link(l));
    let out_of_t = |l| ResArc::forward(ten.sink_link(l));
    let walk = |arcs| Walk::from_arcs(ten.network(), ten.super_sink(), arcs).unwrap();
    let mut out = Vec::new();
    let mut push = |name, cycle, expected| {
        out.push(HandCycle {
            name,
            ten: ten.clone(),
            f: f.clone(),
            iv: iv.clone(),
            cycle,
            expected,
        })
    };
    // t a t a t b from layer 9 up to layer 12, then b a t and out; only t->b survives.
    push(
        "ends upper, two loops",
        walk(vec![
            into_t(9),
            copy(1, 9),
            copy(2, 9),
            copy(1, 10),
            copy(2, 10),
            copy(3, 11),
            copy(4, 12),
            copy(2, 12),
            out_of_t(13),
        ]),
        Some((
            CompressionCase::EndsUpper,
            vec![into_t(11), copy(3, 11), copy(4, 12), copy(2, 12), out_of_t(13)],
        )),
    );
    // In at t in layer 3, up to b in layer 4, then b a t a t and out; the loop t a t goes.
    push(
        "starts lower, one loop",
        walk(vec![into_t(3), copy(3, 3), copy(4, 4), copy(2, 4), copy(1, 5), copy(2, 5), out_of_t(6)]),
        Some((
            CompressionCase::StartsLower,
            vec![into_t(3), copy(3, 3), copy(4, 4), copy(2, 4), out_of_t(5)],
        )),
    );
    // Already loop-free between the boundary and the terminal.
    push(
        "ends upper, no loop",
        walk(vec![into_t(11), copy(3, 11), copy(4, 12), copy(2, 12), out_of_t(13)]),
        None,
    );
    // Never reaches a boundary layer.
    push("terminal to terminal", walk(vec![into_t(9), copy(1, 9), copy(2, 9), out_of_t(10)]), None);
    out
}

/// Checks the compression contract on one cycle; returns whether a component was rewritten.
pub fn check_compression(ten: &TimeExpandedNetwork, f: &FlowOverTime, iv: &RepeatedInterval, c: &Walk) -> Result<(Walk, bool), String> {
    let net = ten.network();
    let out = compress(ten, f, iv, c).map_err(|e| e.to_string())?;
    if !out.cycle.is_closed() {
        return Err("result is not closed".into());
    }
    if out.cycle.cost(net) > c.cost(net) {
        return Err(format!("cost rose from {} to {}", c.cost(net), out.cycle.cost(net)));
    }
    let view = ResidualView::new(net, &f.values).unwrap();
    for (ra, &k) in &IncidenceVector::from_walk(&out.cycle).counts {
        if ra.residual(view.net, view.flow) < k as i64 {
            return Err(format!("{ra:?} used {k} times beyond its residual capacity"));
        }
    }
    let sum_tau = ten.base_network().total_transit();
    let n = ten.base_network().node_count() as i64;
    let mut rewritten = false;
    for rep in &out.components {
        let bound = match rep.case {
            CompressionCase::EndsUpper => 2 * sum_tau,
            CompressionCase::StartsLower => n * sum_tau,
        };
        if rep.height_bound != bound || rep.cost_after > rep.cost_before {
            return Err(format!("{rep:?}"));
        }
        if rep.rewritten {
            rewritten = true;
            if rep.height_after > bound {
                return Err(format!("height {} above {bound}", rep.height_after));
            }
        }
    }
    if !out.changed && IncidenceVector::from_walk(&out.cycle) != IncidenceVector::from_walk(c) {
        return Err("unchanged result with different arcs".into());
    }
    Ok((out.cycle, rewritten))
}

/// Runs phases 1.1 and 1.2, then repeatedly compresses and augments the cheapest band cycles.
/// Returns (cycles checked, components rewritten).
pub fn harvest(inst: &Instance, rounds: usize) -> Result<(usize, usize), String> {
    let (mut seen, mut rewritten) = (0, 0);
    let mut state =
        ConstructionState::new(&inst.normalized(), inst.theta, SolverConfig::default()).map_err(|e| e.to_string())?;
    state.step_1_1().map_err(|e| e.to_string())?;
    state.step_1_2().map_err(|e| e.to_string())?;
    let ten = state.ten.clone();
    for _ in 0..rounds {
        let Some(iv) = state.interval.clone() else { break };
        let mut next = None;
        for (lo, hi) in [(1, iv.end), (iv.start, ten.horizon())] {
            let band = ten.band(lo, hi).unwrap();
            let Some(search) = min_cost_cycle(&ten, &state.f, band, false, 0, Execution::Sequential) else {
                continue;
            };
            seen += 1;
            let (c, r) = check_compression(&ten, &state.f, &iv, &search.cycle)?;
            rewritten += r as usize;
            next.get_or_insert(c);
        }
        let Some(c) = next else { break };
        state.f.values = augment_walk(ten.network(), &state.f.values, &c, Some(1)).unwrap();
        state.interval = state.select_interval(None);
    }
    Ok((seen, rewritten))
}
