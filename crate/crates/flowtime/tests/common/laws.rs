//! Round-trip laws and the cut-arc law, each as one seeded check.

use std::collections::BTreeMap;

use flowtime::expand::{TenArcKind, TimeExpandedNetwork};
use flowtime::graph::{decompose_eulerian, decompose_walk, normalize_transit_times, IncidenceVector};
use flowtime::lifting::{heights, layers, lift_walk, project_walk};
use flowtime::statics::cut_arcs;
use rand::Rng;

use super::{brute_force_cut_arcs, random_unit_network, random_walk, rng};

pub type LawResult = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> LawResult {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Lifting a base walk and projecting it back returns the walk.
pub fn project_after_lift(seed: u64, n: usize, m: usize, len: usize, extra: usize) -> LawResult {
    let mut rng = rng(seed);
    let net = random_unit_network(&mut rng, n, m, 3, 5);
    let start = rng.gen_range(0..n);
    let w = random_walk(&mut rng, &net, start, len, |_| true);
    let prof = heights(&net, &w);
    let spread = (prof.max() - prof.min()) as usize;
    let theta = (spread + 1 + extra).max(2);
    let ten = TimeExpandedNetwork::build(&normalize_transit_times(&net).unwrap(), theta).unwrap();
    let band = ten.band(1, ten.horizon()).unwrap();
    let layer = rng.gen_range(1..=ten.horizon() - spread);
    let lifted = lift_walk(&ten, &w, layer, band).map_err(|e| e.to_string())?;
    let back = project_walk(&ten, &lifted, band).map_err(|e| e.to_string())?;
    ensure(back == w, || format!("{w:?} came back as {back:?}"))
}

/// Projecting a TEN walk and lifting it at its lowest layer returns the walk.
pub fn lift_after_project(seed: u64, n: usize, m: usize, theta: usize, len: usize) -> LawResult {
    let mut rng = rng(seed);
    let net = random_unit_network(&mut rng, n, m, 3, 5);
    let ten = TimeExpandedNetwork::build(&normalize_transit_times(&net).unwrap(), theta).unwrap();
    let start = ten.node(rng.gen_range(0..n), rng.gen_range(1..=theta));
    let q = random_walk(&mut rng, ten.network(), start, len, |ra| {
        matches!(ten.kind(ra.arc), TenArcKind::Copy { .. })
    });
    let band = ten.band(1, theta).unwrap();
    let low = *layers(&ten, &q).iter().min().unwrap();
    let projected = project_walk(&ten, &q, band).map_err(|e| e.to_string())?;
    let back = lift_walk(&ten, &projected, low, band).map_err(|e| e.to_string())?;
    ensure(back == q, || format!("{q:?} came back as {back:?}"))
}

/// A walk splits into at most one path plus cycles with the same arc multiset.
pub fn walk_decomposition(seed: u64, n: usize, m: usize, len: usize) -> LawResult {
    let mut rng = rng(seed);
    let net = random_unit_network(&mut rng, n, m, 3, 5);
    let start = rng.gen_range(0..n);
    let w = random_walk(&mut rng, &net, start, len, |_| true);
    let (path, cycles) = decompose_walk(&net, &w).map_err(|e| e.to_string())?;
    let mut parts = IncidenceVector::default();
    if let Some(p) = &path {
        ensure(p.is_path(), || format!("path part {p:?} repeats a node"))?;
        parts.add_walk(p, 1);
    }
    for c in &cycles {
        ensure(c.is_cycle(), || format!("{c:?} is not a simple cycle"))?;
        parts.add_walk(c, 1);
    }
    ensure(parts == IncidenceVector::from_walk(&w), || format!("multiset of {w:?} changed"))?;
    ensure(path.is_none() == w.is_closed(), || "path part disagrees with closedness".into())
}

/// An Eulerian multiset decomposes into closed walks that add back up to it.
pub fn eulerian_reassembly(seed: u64, n: usize, m: usize, walks: usize) -> LawResult {
    let mut rng = rng(seed);
    let net = random_unit_network(&mut rng, n, m, 3, 5);
    let mut h = IncidenceVector::default();
    for _ in 0..walks {
        let start = rng.gen_range(0..n);
        let w = random_walk(&mut rng, &net, start, 20, |_| true);
        for c in decompose_walk(&net, &w).unwrap().1 {
            h.add_walk(&c, rng.gen_range(1..3));
        }
    }
    let cycles = decompose_eulerian(&net, &h).map_err(|e| e.to_string())?;
    let mut back = IncidenceVector::default();
    for c in &cycles {
        ensure(c.is_closed() && !c.is_empty(), || format!("{c:?} is not a closed walk"))?;
        back.add_walk(c, 1);
    }
    ensure(back == h, || "pieces do not add up".into())?;
    let mut balance: BTreeMap<usize, i64> = BTreeMap::new();
    for c in &cycles {
        for ra in &c.arcs {
            *balance.entry(ra.tail(&net)).or_default() += 1;
            *balance.entry(ra.head(&net)).or_default() -= 1;
        }
    }
    ensure(balance.values().all(|&d| d == 0), || "unbalanced node".into())
}

/// Arcs in some minimum cut agree with bipartition enumeration.
pub fn cut_arcs_law(seed: u64, n: usize, m: usize) -> LawResult {
    let mut rng = rng(seed);
    let net = random_unit_network(&mut rng, n, m, 3, 5);
    let fast = cut_arcs(&net).arcs;
    let slow = brute_force_cut_arcs(&net);
    ensure(fast == slow, || format!("{fast:?} vs {slow:?}"))
}
