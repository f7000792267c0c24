//! Randomized checks of the static and time-expanded building blocks.

mod common;

use flowtime::construction::temporally_repeated_flow;
use flowtime::expand::{check_repeated, phi_project, TimeExpandedNetwork};
use flowtime::gen::{corpus_params, generate};
use flowtime::graph::{augment_walk, net_outflow, normalize_transit_times, ResidualView, StaticFlow};
use flowtime::oracle::{oracle_on_ten, max_flow_over_time_value};
use flowtime::statics::{
    cut_arcs, find_negative_cycle, lex_min_eulerian_subgraph, max_flow, min_cost_circulation, reachability_partition,
};
use proptest::prelude::*;
use rand::Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn augmenting_a_cycle_shifts_residuals_and_cost(seed in any::<u64>(), n in 2usize..7, m in 1usize..12) {
        let mut rng = common::rng(seed);
        let net = common::random_unit_network(&mut rng, n, m, 3, 5);
        let x = max_flow(&net);
        // A cycle that uses an arc in both directions cancels itself out on that arc.
        let cycles: Vec<_> = common::residual_cycles(&net, &x.values, 50)
            .into_iter()
            .filter(|c| {
                let mut ids: Vec<usize> = c.arcs.iter().map(|ra| ra.arc).collect();
                ids.sort_unstable();
                ids.windows(2).all(|w| w[0] != w[1])
            })
            .collect();
        prop_assume!(!cycles.is_empty());
        let b = &cycles[rng.gen_range(0..cycles.len())];
        let view = ResidualView::new(&net, &x.values).unwrap();
        let k = rng.gen_range(1..=b.bottleneck(&view));
        let y = augment_walk(&net, &x.values, b, Some(k)).unwrap();
        for ra in &b.arcs {
            prop_assert_eq!(ra.residual(&net, &y), ra.residual(&net, &x.values) - k);
            prop_assert_eq!(ra.reversed().residual(&net, &y), ra.reversed().residual(&net, &x.values) + k);
        }
        let y = StaticFlow { values: y };
        prop_assert_eq!(y.cost(&net), x.cost(&net) + k as i128 * b.cost(&net) as i128);
    }

    #[test]
    fn circulation_leaves_no_negative_cycle(seed in any::<u64>(), n in 2usize..7, m in 1usize..12) {
        let mut rng = common::rng(seed);
        let net = common::random_unit_network(&mut rng, n, m, 3, 5);
        let weights: Vec<i64> = net.arcs().iter().map(|a| a.cost).collect();
        let y = min_cost_circulation(&net, &weights).unwrap();
        let view = ResidualView::new(&net, &y.values).unwrap();
        prop_assert!(find_negative_cycle(&view, |ra| ra.cost(&net)).is_none());
    }

    #[test]
    fn cut_arcs_match_bipartition_enumeration(seed in any::<u64>(), n in 2usize..9, m in 1usize..14) {
        prop_assert_eq!(common::laws::cut_arcs_law(seed, n, m), Ok(()));
    }

    #[test]
    fn partition_survives_cycle_augmentation(seed in any::<u64>(), n in 2usize..7, m in 1usize..12) {
        let mut rng = common::rng(seed);
        let net = common::random_unit_network(&mut rng, n, m, 3, 5);
        let x = max_flow(&net);
        let before = reachability_partition(&net, &x).unwrap();
        for b in common::residual_cycles(&net, &x.values, 20) {
            let y = StaticFlow { values: augment_walk(&net, &x.values, &b, Some(1)).unwrap() };
            let after = reachability_partition(&net, &y).unwrap();
            prop_assert_eq!(&after.source_side, &before.source_side);
            prop_assert_eq!(&after.sink_side, &before.sink_side);
            prop_assert_eq!(&after.rest, &before.rest);
        }
    }

    #[test]
    fn lex_min_subgraph_avoids_cut_arcs(seed in any::<u64>(), n in 2usize..7, m in 1usize..12) {
        let mut rng = common::rng(seed);
        let net = common::random_unit_network(&mut rng, n, m, 3, 5);
        let x = max_flow(&net);
        let part = reachability_partition(&net, &x).unwrap();
        let view = ResidualView::new(&net, &x.values).unwrap();
        let cut = cut_arcs(&net);
        if let Some(h) = lex_min_eulerian_subgraph(&view, &part).unwrap() {
            prop_assert!(h.counts.keys().all(|ra| !cut.arcs.contains(&ra.arc)));
        }
    }

    #[test]
    fn bands_compose(seed in any::<u64>(), n in 2usize..6, m in 1usize..10, theta in 2usize..9) {
        let mut rng = common::rng(seed);
        let net = common::random_unit_network(&mut rng, n, m, 3, 5);
        let ten = TimeExpandedNetwork::build(&normalize_transit_times(&net).unwrap(), theta).unwrap();
        let mut cuts = [rng.gen_range(1..=theta), rng.gen_range(1..=theta), rng.gen_range(1..=theta)];
        cuts.sort_unstable();
        let [a, b, c] = cuts;
        let mut joined = ten.band(a, b).unwrap().arcs(&ten);
        joined.extend(ten.band(b, c).unwrap().arcs(&ten));
        joined.sort_unstable();
        joined.dedup();
        prop_assert_eq!(joined, ten.band(a, c).unwrap().arcs(&ten));
    }
}

proptest! {
    #![proptest_config(cases(150))]

    #[test]
    fn repeated_layers_look_alike_and_project_to_flows(seed in any::<u64>(), i in 0u64..1000) {
        let inst = generate(&corpus_params(seed, i, 6, 10, 20)).unwrap();
        let norm = inst.normalized();
        let ten = TimeExpandedNetwork::build(&norm, inst.theta).unwrap();
        let (f, _) = temporally_repeated_flow(&ten).unwrap();
        let base = ten.base_network();
        for iv in check_repeated(&ten, &f) {
            for a in 0..base.arc_count() {
                let tau = base.arc(a).transit as usize;
                let copies: Vec<(i64, i64)> = (iv.start..=iv.end - tau)
                    .map(|t| {
                        let c = ten.copy_arc(a, t).unwrap();
                        (base.arc(a).capacity - f.values[c], f.values[c])
                    })
                    .collect();
                prop_assert!(copies.windows(2).all(|w| w[0] == w[1]));
            }
            let phi = phi_project(&ten, &f, &iv).unwrap();
            for v in 0..base.node_count() {
                if v != base.source() && v != base.sink() {
                    prop_assert_eq!(net_outflow(base, &phi.values, v), 0);
                }
            }
        }
    }

    #[test]
    fn oracle_is_consistent_and_optimal(seed in any::<u64>(), i in 0u64..1000) {
        let inst = generate(&corpus_params(seed, i, 6, 10, 20)).unwrap();
        let ten = TimeExpandedNetwork::build(&inst.normalized(), inst.theta).unwrap();
        let sol = oracle_on_ten(&ten).unwrap();
        prop_assert_eq!(sol.value, max_flow_over_time_value(&ten));
        let net = ten.network();
        let view = ResidualView::new(net, &sol.flow.values).unwrap();
        prop_assert!(find_negative_cycle(&view, |ra| ra.cost(net)).is_none());
    }
}
