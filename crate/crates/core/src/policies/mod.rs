//! Control laws: the queue-based fair delivery policy and its baselines.

pub mod proposed;
pub mod standard_cc;
pub mod static_policy;
pub mod unicast;
pub mod utility;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

pub use proposed::{admission_rule, routing_rule, scheduling_rule, ProposedPolicy, Routing};
pub use standard_cc::{standard_cc_rate, RoundRobinMulticast, StandardCcRate};
pub use static_policy::{
    full_combination_boundary, in_stability_region, symmetric_static_policy, RateOption, StaticEntry,
    StaticPolicy, SymmetricBoundary,
};
pub use unicast::UnicastOpportunistic;
pub use utility::{g_derivative, g_utility, gamma_opt};

/// Utility shape and drift-plus-penalty constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairnessConfig {
    pub alpha: f64,
    /// Domain shift `d` of the utility.
    pub shift: f64,
    /// Utility/backlog tradeoff `V`.
    pub tradeoff: f64,
    /// Cap on virtual arrivals and on infinite-backlog admissions (files/slot).
    pub gamma_max: f64,
    /// Cap on combinations per subset and slot.
    pub sigma_max: u32,
}

impl Default for FairnessConfig {
    fn default() -> Self {
        FairnessConfig {
            alpha: 1.0,
            shift: 0.01,
            tradeoff: 100.0,
            gamma_max: 2.0,
            sigma_max: 2,
        }
    }
}

impl FairnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return config(format!("alpha {} must be finite and nonnegative", self.alpha));
        }
        if !(self.shift > 0.0 && self.shift.is_finite()) {
            return config(format!("utility shift {} must be positive", self.shift));
        }
        if !(self.tradeoff > 0.0 && self.tradeoff.is_finite()) {
            return config(format!("tradeoff V {} must be positive", self.tradeoff));
        }
        if !(self.gamma_max > 0.0 && self.gamma_max.is_finite()) {
            return config(format!("gamma_max {} must be positive", self.gamma_max));
        }
        if self.sigma_max < 1 {
            return config("sigma_max must be at least 1");
        }
        Ok(())
    }

    pub fn utility(&self, x: f64) -> f64 {
        g_utility(x, self.alpha, self.shift)
    }

    pub fn gamma(&self, virtual_backlog: f64) -> f64 {
        gamma_opt(virtual_backlog, self.alpha, self.shift, self.tradeoff, self.gamma_max)
    }
}

/// Where demands come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ArrivalModel {
    /// Every user always has more requests than can be admitted.
    InfiniteBacklog,
    /// Per-user Poisson requests with mean `rates[k]`, truncated at `cap`.
    Stochastic { rates: Vec<f64>, cap: f64 },
}

impl ArrivalModel {
    pub fn validate(&self, users: usize, fairness: &FairnessConfig) -> Result<()> {
        if let ArrivalModel::Stochastic { rates, cap } = self {
            if rates.len() != users {
                return config(format!(
                    "{} arrival rates given for {users} users",
                    rates.len()
                ));
            }
            if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                return config("arrival rates must be finite and nonnegative");
            }
            if !(cap.is_finite() && *cap > 0.0) {
                return config(format!("arrival cap {cap} must be positive"));
            }
            if fairness.gamma_max < *cap || (fairness.sigma_max as f64) < *cap {
                return config("gamma_max and sigma_max must be at least the arrival cap");
            }
        }
        Ok(())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ArrivalModel::InfiniteBacklog)
    }

    /// Requests of one slot, `None` for infinite backlog.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match self {
            ArrivalModel::InfiniteBacklog => None,
            ArrivalModel::Stochastic { rates, cap } => Some(
                rates
                    .iter()
                    .map(|&lambda| {
                        if lambda == 0.0 {
                            0.0
                        } else {
                            let n: f64 = Poisson::new(lambda).expect("validated rate").sample(rng);
                            n.min(*cap)
                        }
                    })
                    .collect(),
            ),
        }
    }
}
