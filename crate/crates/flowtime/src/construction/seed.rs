use crate::error::{FlowError, Result};
use crate::expand::{FlowOverTime, RepeatedInterval, TimeExpandedNetwork};
use crate::graph::{ArcSpec, NetworkSpec, StaticFlow};
use crate::statics::{decompose_flow, max_flow, min_cost_circulation};

/// Temporally repeated flow of a static flow x maximizing theta |x| - tau(x).
///
/// x comes from a minimum-transit circulation with a return arc t -> s of weight -theta; its
/// paths are sent from every departure layer that still arrives by theta. Cycles of x carry
/// no transit and are dropped.
pub fn temporally_repeated_flow(ten: &TimeExpandedNetwork) -> Result<(FlowOverTime, StaticFlow)> {
    let base = ten.base_network();
    let theta = ten.horizon() as i64;
    let mut arcs = base.arcs().to_vec();
    arcs.push(ArcSpec::new(base.sink(), base.source(), base.total_capacity(), 0, 0));
    let aux = NetworkSpec::new(base.node_count(), base.source(), base.sink(), arcs)?;
    let mut weights: Vec<i64> = base.arcs().iter().map(|a| a.transit).collect();
    weights.push(-theta);
    let circ = min_cost_circulation(&aux, &weights)?;
    let x = StaticFlow {
        values: circ.values[..base.arc_count()].to_vec(),
    };
    let dec = decompose_flow(base, &x)?;
    let mut f = FlowOverTime::zero(ten);
    let mut path_flow = StaticFlow::zero(base);
    for (path, rate) in &dec.paths {
        let tau = path.transit(base);
        if tau >= theta {
            continue;
        }
        for ra in &path.arcs {
            path_flow.values[ra.arc] += rate;
        }
        for depart in 1..=(theta - tau) as usize {
            f.values[ten.source_link(depart)] += rate;
            let mut layer = depart;
            for ra in &path.arcs {
                let copy = ten
                    .copy_arc(ra.arc, layer)
                    .ok_or_else(|| FlowError::Invariant("seed path leaves the horizon".into()))?;
                f.values[copy] += rate;
                layer += base.arc(ra.arc).transit as usize;
            }
            f.values[ten.sink_link(layer)] += rate;
        }
    }
    f.check_feasible(ten)?;
    Ok((f, path_flow))
}

/// The temporally repeated seed together with its longest repeated interval whose projection is
/// a maximum static flow. Needs theta > sum of transit times.
pub fn ford_fulkerson_seed(ten: &TimeExpandedNetwork) -> Result<(FlowOverTime, Option<RepeatedInterval>)> {
    let base = ten.base_network();
    let sum_tau = base.total_transit() as usize;
    if ten.horizon() <= sum_tau {
        return Err(FlowError::HorizonTooSmall {
            horizon: ten.horizon(),
            required: sum_tau + 1,
        });
    }
    let (f, _) = temporally_repeated_flow(ten)?;
    let max_value = max_flow(base).value(base);
    let iv = crate::expand::check_repeated(ten, &f)
        .into_iter()
        .filter(|iv| StaticFlow { values: iv.pattern.clone() }.value(base) == max_value)
        .min_by_key(|iv| (std::cmp::Reverse(iv.length()), iv.start));
    Ok((f, iv))
}
