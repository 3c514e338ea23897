//! Queue-based online delivery with backpressure combination routing.
//!
//! One call to [`ProposedPolicy::decide`] reads the queue state at the start
//! of a slot and the slot's channel, and produces every control variable; the
//! state update itself is [`apply_slot`](crate::queues::apply_slot).

use crate::bc_capacity::{solve_wsr, ChannelState, RateAllocation, SubsetWeights};
use crate::combinatorics::{CodewordTable, SubsetId};
use crate::error::{Error, Result};
use crate::queues::{QueueState, SlotDecision};
use crate::system::SystemParams;

use super::FairnessConfig;

#[derive(Clone, Debug)]
pub struct ProposedPolicy {
    params: SystemParams,
    fairness: FairnessConfig,
    table: CodewordTable,
}

impl ProposedPolicy {
    pub fn new(params: SystemParams, fairness: FairnessConfig) -> Result<Self> {
        params.validate()?;
        fairness.validate()?;
        let table = CodewordTable::new(&params.cache)?;
        Ok(ProposedPolicy {
            params,
            fairness,
            table,
        })
    }

    pub fn table(&self) -> &CodewordTable {
        &self.table
    }

    pub fn fairness(&self) -> &FairnessConfig {
        &self.fairness
    }

    /// `demands` holds the slot's new requests under stochastic arrivals and is
    /// `None` under infinite backlog.
    pub fn decide(
        &self,
        state: &QueueState,
        h: &ChannelState,
        demands: Option<&[f64]>,
    ) -> Result<SlotDecision> {
        let k = self.params.users();
        if state.users() != k || h.users() != k {
            return Err(Error::Contract("state or channel size differs from K".into()));
        }
        let virtual_arrivals: Vec<f64> = state.virtual_.iter().map(|&u| self.fairness.gamma(u)).collect();
        let admissions = admission_rule(&state.virtual_, &state.user, self.fairness.gamma_max, demands);
        let routing = routing_rule(
            &state.user,
            &state.codeword,
            self.fairness.sigma_max as f64,
            &self.table,
            self.params.file_bits(),
        );
        let schedule = scheduling_rule(&state.codeword, h, self.params.power)?;
        Ok(SlotDecision {
            admissions,
            virtual_arrivals,
            combinations: routing.combinations,
            combine_order: routing.order,
            rates: schedule.rates,
            power: schedule.power,
        })
    }
}

/// On-off admission: a user takes `γ_max` files (or its fresh requests) when
/// its virtual queue is at least its user queue.
pub fn admission_rule(virtual_: &[f64], user: &[f64], gamma_max: f64, demands: Option<&[f64]>) -> Vec<f64> {
    virtual_
        .iter()
        .zip(user)
        .enumerate()
        .map(|(k, (&u, &s))| {
            if u >= s {
                demands.map_or(gamma_max, |d| d[k])
            } else {
                0.0
            }
        })
        .collect()
}

/// Requested combinations and the order in which they claim files.
#[derive(Clone, Debug, PartialEq)]
pub struct Routing {
    pub combinations: Vec<f64>,
    pub order: Vec<SubsetId>,
    /// `Σ_{k∈J} S_k - Σ_{I⊆J} b_{J,I} Q_I / F²`, mask-indexed.
    pub scores: Vec<f64>,
}

/// Backpressure routing: combine `σ_max` demands of `J` whenever the users'
/// backlog exceeds the `b`-weighted codeword backlog `J` would feed.
pub fn routing_rule(
    user: &[f64],
    codeword: &[f64],
    sigma_max: f64,
    table: &CodewordTable,
    file_bits: f64,
) -> Routing {
    let k = user.len();
    let full = 1usize << k;
    let inv_f2 = 1.0 / (file_bits * file_bits);
    let mut backlog = vec![0.0; full];
    let mut scores = vec![0.0; full];
    let mut combinations = vec![0.0; full];
    let mut order = Vec::new();
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        backlog[mask] = backlog[mask & (mask - 1)] + user[low];

        let j = mask.count_ones() as usize;
        let mut pressure = 0.0;
        let mut sub = mask;
        while sub != 0 {
            let q = codeword[sub];
            if q != 0.0 {
                pressure += table.get(j, sub.count_ones() as usize) * q;
            }
            sub = (sub - 1) & mask;
        }
        let score = backlog[mask] - pressure * inv_f2;
        scores[mask] = score;
        if score > 0.0 {
            combinations[mask] = sigma_max;
            order.push(SubsetId::new(mask as u32).expect("nonzero"));
        }
    }
    order.sort_by(|a, b| {
        scores[b.index()]
            .total_cmp(&scores[a.index()])
            .then(b.len().cmp(&a.len()))
            .then(a.cmp(b))
    });
    Routing {
        combinations,
        order,
        scores,
    }
}

/// Queue-weighted sum-rate maximization with `θ_J = Q_J`.
pub fn scheduling_rule(codeword: &[f64], h: &ChannelState, power: f64) -> Result<RateAllocation> {
    let weights = SubsetWeights::from_masked(h.users(), codeword.to_vec())?;
    solve_wsr(&weights, h, power)
}
