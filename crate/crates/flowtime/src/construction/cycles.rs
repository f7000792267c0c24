//! Minimum-cost cycle search in a band of the residual TEN.

use crate::construction::Execution;
use crate::expand::{BandView, FlowOverTime, TimeExpandedNetwork};
use crate::graph::{ResArc, ResidualView, Walk};
use crate::statics::find_negative_cycle_in;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSearch {
    pub cycle: Walk,
    pub cost: i64,
    /// The cycle is a minimum-cost cycle of the band (no root ran out of budget).
    pub exact: bool,
}

struct LocalGraph {
    /// Per local node: (head, reduced cost, cost, residual arc), sorted by reduced cost.
    out: Vec<Vec<(usize, i64, i64, ResArc)>>,
    min_out: Vec<i64>,
    global: Vec<usize>,
}

/// A negative cycle of the band's residual network, or `None` when there is none.
///
/// The heuristic answer is the lightest cycle of the Bellman-Ford predecessor graph. With
/// `exact` set, a branch and bound over simple cycles rooted at their smallest node improves on
/// it, using the Bellman-Ford labels as potentials for the bound.
pub fn min_cost_cycle(
    ten: &TimeExpandedNetwork,
    f: &FlowOverTime,
    band: BandView,
    exact: bool,
    budget: u64,
    execution: Execution,
) -> Option<CycleSearch> {
    let net = ten.network();
    let view = ResidualView::new(net, &f.values).ok()?;
    let nc = find_negative_cycle_in(&view, |ra| ra.cost(net), |v| band.contains_node(ten, v))?;
    let heuristic = CycleSearch {
        cost: nc.weight,
        cycle: nc.cycle,
        exact: false,
    };
    if !exact {
        return Some(heuristic);
    }
    let global: Vec<usize> = band.nodes(ten);
    let local = |v: usize| global.binary_search(&v).ok();
    let mut out: Vec<Vec<(usize, i64, i64, ResArc)>> = vec![Vec::new(); global.len()];
    for ra in view.arcs() {
        let (Some(u), Some(v)) = (local(ra.tail(net)), local(ra.head(net))) else {
            continue;
        };
        let c = ra.cost(net);
        let rc = c + nc.labels[ra.tail(net)] - nc.labels[ra.head(net)];
        out[u].push((v, rc, c, ra));
    }
    for arcs in out.iter_mut() {
        arcs.sort_by_key(|&(v, rc, _, ra)| (rc, v, ra));
    }
    let min_out = out.iter().map(|a| a.first().map_or(i64::MAX / 4, |e| e.1)).collect();
    let g = LocalGraph { out, min_out, global };
    let bound = heuristic.cost;
    let roots: Vec<usize> = (0..g.global.len()).collect();
    let search = |r: usize| search_root(&g, r, bound, budget);
    let results: Vec<RootResult> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            roots.par_iter().map(|&r| search(r)).collect()
        }
        _ => roots.iter().map(|&r| search(r)).collect(),
    };
    let complete = results.iter().all(|r| r.complete);
    let mut best = (heuristic.cost, heuristic.cycle.arcs.clone());
    for r in results {
        if let Some(c) = r.best {
            if c < best {
                best = c;
            }
        }
    }
    let start = best.1[0].tail(net);
    let cycle = Walk::from_arcs(net, start, best.1).expect("search produces incident cycles");
    Some(CycleSearch {
        cost: best.0,
        cycle,
        exact: complete,
    })
}

struct RootResult {
    best: Option<(i64, Vec<ResArc>)>,
    complete: bool,
}

struct Dfs<'a> {
    g: &'a LocalGraph,
    root: usize,
    visited: Vec<bool>,
    path: Vec<ResArc>,
    neg_rest: i64,
    bound: i64,
    best: Option<(i64, Vec<ResArc>)>,
    budget: u64,
    exhausted: bool,
}

fn search_root(g: &LocalGraph, root: usize, bound: i64, budget: u64) -> RootResult {
    let neg_rest = (root + 1..g.global.len()).map(|u| g.min_out[u].min(0)).sum();
    let mut dfs = Dfs {
        g,
        root,
        visited: vec![false; g.global.len()],
        path: Vec::new(),
        neg_rest,
        bound,
        best: None,
        budget,
        exhausted: false,
    };
    dfs.visited[root] = true;
    dfs.extend(root, 0, 0);
    RootResult {
        best: dfs.best,
        complete: !dfs.exhausted,
    }
}

impl Dfs<'_> {
    /// `reduced` and `cost` are the reduced and actual cost of the current path.
    fn extend(&mut self, v: usize, reduced: i64, cost: i64) {
        if self.exhausted {
            return;
        }
        if self.budget == 0 {
            self.exhausted = true;
            return;
        }
        self.budget -= 1;
        let g = self.g;
        for &(w, rc, c, ra) in &g.out[v] {
            if w == self.root {
                let total = cost + c;
                if total <= self.bound {
                    self.path.push(ra);
                    let cand = (total, self.path.clone());
                    if self.best.as_ref().is_none_or(|b| cand < *b) {
                        self.best = Some(cand);
                        self.bound = total;
                    }
                    self.path.pop();
                }
                continue;
            }
            if w < self.root || self.visited[w] {
                continue;
            }
            let own = g.min_out[w].min(0);
            let lower = reduced + rc + g.min_out[w] + (self.neg_rest - own);
            if lower > self.bound {
                continue;
            }
            self.visited[w] = true;
            self.neg_rest -= own;
            self.path.push(ra);
            self.extend(w, reduced + rc, cost + c);
            self.path.pop();
            self.neg_rest += own;
            self.visited[w] = false;
            if self.exhausted {
                return;
            }
        }
    }
}
