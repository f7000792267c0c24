use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("infeasible flow: {0}")]
    InfeasibleFlow(String),
    #[error("malformed walk: {0}")]
    MalformedWalk(String),
    #[error("not Eulerian at node {node}: in-degree {indegree}, out-degree {outdegree}")]
    NotEulerian {
        node: usize,
        indegree: u64,
        outdegree: u64,
    },
    #[error("cannot unit-expand infinite-capacity arc {arc} without a bound")]
    UnboundedExpansion { arc: usize },
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("horizon {horizon} too small, need at least {required}")]
    HorizonTooSmall { horizon: usize, required: usize },
    #[error("layer range [{lo}, {hi}] invalid for horizon {horizon}")]
    BadRange { lo: usize, hi: usize, horizon: usize },
    #[error("flow is not repeated on [{start}, {end}]")]
    NotRepeated { start: usize, end: usize },
    #[error("negative cycle of infinite capacity")]
    Unbounded,
    #[error("flow is not a maximum flow")]
    NotMaximum,
    #[error("walk leaves the band: {0}")]
    OutsideBand(String),
    #[error("lifted walk does not fit into the band: {0}")]
    BandOverflow(String),
    #[error("connector paths missing: {0}")]
    ConnectorsMissing(String),
    #[error("repeated interval too small: {0}")]
    IntervalTooSmall(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("negative cycle of cost {cost} survives above the horizon threshold")]
    OptimalityViolation { cost: i64 },
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("time-expanded network has {arcs} arcs, above the cap of {cap}")]
    TooLarge { arcs: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, FlowError>;
