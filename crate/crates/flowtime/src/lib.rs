//! Minimum-cost maximum flows over time.
//!
//! The solver starts from a temporally repeated maximum flow, cancels negative cycles inside a
//! shrinking band of the time-expanded network where the flow is repeated, and then removes the
//! remaining negative cycles with minimum-cost cycle cancelling near the time boundaries. Every
//! result can be checked against a successive-shortest-path oracle on the full time-expanded
//! network.

pub mod audit;
pub mod batch;
pub mod bounds;
pub mod construction;
pub mod error;
pub mod expand;
pub mod fixtures;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lifting;
pub mod oracle;
pub mod statics;

pub use error::{FlowError, Result};
