//! Horizon bounds: the height h, the shrink function J and the horizon threshold.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::graph::NetworkSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonBounds {
    pub node_count: i128,
    pub sum_transit: i128,
    pub sum_cost_capacity: i128,
    /// 2 sum_tau (1 + sum |c|u): bound on cycle heights after the band phases.
    pub h: i128,
    /// Lower end of the interval after the band phases, 6 sum|c|u sum_tau.
    pub theta1_j2: i128,
    pub j_theta1: i128,
    pub j_shifted: i128,
    /// Horizons strictly above this get a certified interval of at least `guaranteed_length`.
    pub theta_threshold: i128,
    /// Interval length needed by the band phases, sum_tau (2 sum|c|u + 3).
    pub band_requirement: i128,
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(FlowError::Overflow("horizon bounds"))
}

impl HorizonBounds {
    pub fn from_parts(node_count: i128, sum_transit: i128, sum_cost_capacity: i128) -> Result<Self> {
        let mut b = HorizonBounds {
            node_count,
            sum_transit,
            sum_cost_capacity,
            h: ck(sum_cost_capacity.checked_add(1).and_then(|x| x.checked_mul(2 * sum_transit)))?,
            theta1_j2: ck(sum_cost_capacity.checked_mul(6).and_then(|x| x.checked_mul(sum_transit)))?,
            j_theta1: 0,
            j_shifted: 0,
            theta_threshold: 0,
            band_requirement: ck(sum_cost_capacity
                .checked_mul(2)
                .and_then(|x| x.checked_add(3))
                .and_then(|x| x.checked_mul(sum_transit)))?,
        };
        b.j_theta1 = b.j(b.theta1_j2)?;
        let shifted = ck(b.theta1_j2.checked_add(b.j_theta1))?;
        b.j_shifted = b.j(shifted)?;
        b.theta_threshold = ck(shifted.checked_add(b.j_shifted).and_then(|x| x.checked_mul(2)))?;
        Ok(b)
    }

    /// J(x) = sum_tau ((|V|+1)(2 sum_tau + 3) + 1 + 2h + 2x) sum|c|u + 3 sum_tau.
    pub fn j(&self, x: i128) -> Result<i128> {
        let st = self.sum_transit;
        let inner = (|| {
            let a = (self.node_count + 1).checked_mul(st.checked_mul(2)?.checked_add(3)?)?;
            let b = a.checked_add(1)?.checked_add(self.h.checked_mul(2)?)?.checked_add(x.checked_mul(2)?)?;
            st.checked_mul(b)?.checked_mul(self.sum_cost_capacity)?.checked_add(st.checked_mul(3)?)
        })();
        ck(inner)
    }

    /// Length the final interval is guaranteed to keep, theta - 2 (theta1_j2 + J(theta1_j2)).
    pub fn guaranteed_length(&self, theta: usize) -> Result<i128> {
        ck(self
            .theta1_j2
            .checked_add(self.j_theta1)
            .and_then(|x| x.checked_mul(2))
            .map(|x| theta as i128 - x))
    }

    /// The guaranteed length capped at theta - 1, the longest interval layers 1..=theta allow.
    /// The cap only bites when sum_tau = 0.
    pub fn required_length(&self, theta: usize) -> Result<i128> {
        Ok(self.guaranteed_length(theta)?.min(theta as i128 - 1))
    }

    pub fn above_threshold(&self, theta: usize) -> bool {
        theta as i128 > self.theta_threshold
    }
}

/// Bounds for a network with transit times in {0, 1}.
pub fn horizon_bounds(net: &NetworkSpec) -> Result<HorizonBounds> {
    if !net.is_unit_transit() {
        return Err(FlowError::InvalidNetwork("bounds need transit times in {0, 1}".into()));
    }
    HorizonBounds::from_parts(
        net.node_count() as i128,
        net.total_transit() as i128,
        net.total_cost_capacity()?,
    )
}
