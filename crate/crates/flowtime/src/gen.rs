//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::graph::{ArcSpec, NetworkSpec, ResidualView, StaticFlow};
use crate::io::{emit_instance, Instance};
use crate::statics::reachable_from;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub nodes: usize,
    pub arcs: usize,
    pub max_u: i64,
    pub max_c: i64,
    pub max_tau: i64,
    pub seed: u64,
    pub theta: usize,
    /// Start with a random s-t path so that every instance is connected.
    pub backbone: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            nodes: 5,
            arcs: 8,
            max_u: 3,
            max_c: 5,
            max_tau: 2,
            seed: 0,
            theta: 12,
            backbone: true,
        }
    }
}

/// Whether t is reachable from s over arcs of positive capacity.
pub fn st_connected(net: &NetworkSpec) -> bool {
    let zero = StaticFlow::zero(net);
    let view = ResidualView::new(net, &zero.values).expect("zero flow is feasible");
    reachable_from(&view, net.source(), |_| true)[net.sink()]
}

/// Node 1 is the source and node `nodes` the sink.
pub fn generate(p: &GenParams) -> Result<Instance> {
    if p.nodes < 2 || p.arcs == 0 || p.max_u < 1 || p.max_c < 0 || p.max_tau < 0 || p.theta < 2 {
        return Err(FlowError::InvalidNetwork(format!("generator parameters out of range: {p:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (s, t) = (0, p.nodes - 1);
    let arc = |rng: &mut ChaCha8Rng, tail: usize, head: usize| {
        ArcSpec::new(
            tail,
            head,
            rng.gen_range(1..=p.max_u),
            rng.gen_range(-p.max_c..=p.max_c),
            rng.gen_range(0..=p.max_tau),
        )
    };
    let mut arcs = Vec::with_capacity(p.arcs);
    if p.backbone {
        let mut inner: Vec<usize> = (1..p.nodes - 1).collect();
        inner.shuffle(&mut rng);
        let hops = rng.gen_range(0..=inner.len().min(p.arcs - 1));
        let mut path = vec![s];
        path.extend_from_slice(&inner[..hops]);
        path.push(t);
        for w in path.windows(2) {
            arcs.push(arc(&mut rng, w[0], w[1]));
        }
    }
    while arcs.len() < p.arcs {
        let tail = rng.gen_range(0..p.nodes);
        let head = rng.gen_range(0..p.nodes);
        if tail != head {
            arcs.push(arc(&mut rng, tail, head));
        }
    }
    Ok(Instance {
        network: NetworkSpec::new(p.nodes, s, t, arcs)?,
        theta: p.theta,
    })
}

/// Parameters of the `i`-th instance of a seeded corpus: up to `max_nodes` nodes, `max_arcs`
/// arcs and horizon `max_theta`, with u <= 3, |c| <= 5 and tau <= 2.
pub fn corpus_params(seed: u64, i: u64, max_nodes: usize, max_arcs: usize, max_theta: usize) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i);
    let nodes = rng.gen_range(2..=max_nodes);
    GenParams {
        nodes,
        arcs: rng.gen_range(nodes - 1..=max_arcs.max(nodes - 1)),
        max_u: 3,
        max_c: 5,
        max_tau: 2,
        seed: rng.gen(),
        theta: rng.gen_range(2..=max_theta),
        backbone: true,
    }
}

/// Instance text with a comment line stating the generator call and s-t connectivity.
pub fn emit_generated(p: &GenParams, inst: &Instance) -> String {
    format!(
        "c gen nodes={} arcs={} max_u={} max_c={} max_tau={} seed={} theta={}\nc st-connected {}\n{}",
        p.nodes,
        p.arcs,
        p.max_u,
        p.max_c,
        p.max_tau,
        p.seed,
        p.theta,
        if st_connected(&inst.network) { "yes" } else { "no" },
        emit_instance(inst)
    )
}
