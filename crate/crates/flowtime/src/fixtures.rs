//! The three reference instances used throughout the tests and the CLI examples.

use crate::graph::{ArcSpec, NetworkSpec};
use crate::io::Instance;

/// Single arc s -> t with u = 2, tau = 1, c = 3; horizon 4.
pub fn fix1() -> Instance {
    single_arc(2, 3, 4)
}

/// Single arc s -> t with the given capacity and cost, tau = 1.
pub fn single_arc(capacity: i64, cost: i64, theta: usize) -> Instance {
    let network = NetworkSpec::new(2, 0, 1, vec![ArcSpec::new(0, 1, capacity, cost, 1)]).unwrap();
    Instance { network, theta }
}

/// s -> v, then two parallel unit arcs v -> t of cost 10 and 0; horizon 5.
pub fn fix2() -> Instance {
    fix2_with_costs(10, 0, 5)
}

pub fn fix2_with_costs(c1: i64, c2: i64, theta: usize) -> Instance {
    let network = NetworkSpec::new(
        3,
        0,
        2,
        vec![
            ArcSpec::new(0, 1, 1, 0, 1),
            ArcSpec::new(1, 2, 1, c1, 1),
            ArcSpec::new(1, 2, 1, c2, 1),
        ],
    )
    .unwrap();
    Instance { network, theta }
}

/// s -> t plus a negative-cost loop s -> x -> s; horizon 6.
pub fn fix3() -> Instance {
    let network = NetworkSpec::new(
        3,
        0,
        1,
        vec![
            ArcSpec::new(0, 1, 1, 0, 1),
            ArcSpec::new(0, 2, 1, 2, 1),
            ArcSpec::new(2, 0, 1, -5, 1),
        ],
    )
    .unwrap();
    Instance { network, theta: 6 }
}
