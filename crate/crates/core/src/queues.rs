//! Queue state of the delivery controller. User queues `S` and virtual
//! queues `U` count files; codeword queues `Q` count bits per nonempty subset.

use serde::{Deserialize, Serialize};

use crate::bc_capacity::{within_region, ChannelState};
use crate::combinatorics::{CodewordTable, SubsetId};
use crate::error::{Error, Result};
use crate::system::SystemParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueState {
    /// Admitted files not yet combined, per user.
    pub user: Vec<f64>,
    /// Codeword backlog in bits, mask-indexed (entry 0 unused).
    pub codeword: Vec<f64>,
    /// Virtual queues, per user.
    pub virtual_: Vec<f64>,
}

impl QueueState {
    pub fn empty(users: usize) -> Self {
        QueueState {
            user: vec![0.0; users],
            codeword: vec![0.0; 1 << users],
            virtual_: vec![0.0; users],
        }
    }

    pub fn users(&self) -> usize {
        self.user.len()
    }

    pub fn codeword_of(&self, subset: SubsetId) -> f64 {
        self.codeword[subset.index()]
    }

    pub fn total_codeword_bits(&self) -> f64 {
        self.codeword.iter().sum()
    }

    /// Codeword bits whose receiver set contains `user`.
    pub fn codeword_bits_for(&self, user: usize) -> f64 {
        self.codeword
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask & (1 << user) != 0)
            .map(|(_, q)| q)
            .sum()
    }

    /// `Σ U + Σ S + Σ Q / F²`, the weighting of the quadratic Lyapunov function.
    pub fn weighted_total(&self, file_bits: f64) -> f64 {
        self.user.iter().sum::<f64>()
            + self.virtual_.iter().sum::<f64>()
            + self.total_codeword_bits() / (file_bits * file_bits)
    }

    pub fn is_drained(&self) -> bool {
        self.user.iter().all(|&s| s == 0.0) && self.codeword.iter().all(|&q| q == 0.0)
    }
}

/// Every control variable of one slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotDecision {
    /// Files admitted per user.
    pub admissions: Vec<f64>,
    /// Arrivals to the virtual queues.
    pub virtual_arrivals: Vec<f64>,
    /// Requested combinations per subset, mask-indexed.
    pub combinations: Vec<f64>,
    /// Order in which requested combinations claim available files; subsets
    /// missing from the list go last in descending size, then ascending mask.
    pub combine_order: Vec<SubsetId>,
    /// Rate per subset in bits per channel use, mask-indexed.
    pub rates: Vec<f64>,
    /// Power per strength position (see [`ChannelState::strength_order`]).
    pub power: Vec<f64>,
}

impl SlotDecision {
    pub fn idle(users: usize) -> Self {
        SlotDecision {
            admissions: vec![0.0; users],
            virtual_arrivals: vec![0.0; users],
            combinations: vec![0.0; 1 << users],
            combine_order: vec![],
            rates: vec![0.0; 1 << users],
            power: vec![0.0; users],
        }
    }

    fn check_shape(&self, users: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Contract(format!("{what} has the wrong length")));
        if self.admissions.len() != users {
            return bad("admissions");
        }
        if self.virtual_arrivals.len() != users {
            return bad("virtual arrivals");
        }
        if self.combinations.len() != 1 << users {
            return bad("combinations");
        }
        if self.rates.len() != 1 << users {
            return bad("rates");
        }
        let all = self
            .admissions
            .iter()
            .chain(&self.virtual_arrivals)
            .chain(&self.combinations[1..])
            .chain(&self.rates[1..]);
        for &x in all {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Contract(format!("decision entry {x} is not a finite nonnegative number")));
            }
        }
        Ok(())
    }

    /// Full contract: shape and `σ ≤ σ_max`, plus rates inside the capacity region
    /// of `h` for the stated power split.
    pub fn validate(&self, h: &ChannelState, params: &SystemParams, sigma_max: f64) -> Result<()> {
        self.check_shape(params.users())?;
        if self.combinations.iter().any(|&c| c > sigma_max) {
            return Err(Error::Contract(format!("combinations exceed sigma_max = {sigma_max}")));
        }
        if !within_region(&self.rates, &self.power, h, params.power, 1e-9) {
            return Err(Error::Contract("rates lie outside the capacity region".into()));
        }
        Ok(())
    }
}

/// What a slot update actually did.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotOutcome {
    /// Bits drained per subset, mask-indexed.
    pub served: Vec<f64>,
    /// Combinations carried out per subset after the availability cap.
    pub combined: Vec<f64>,
}

/// Applies one slot of decisions.
///
/// In order: requested combinations are capped by the files actually waiting
/// (claimed greedily in `combine_order`) and leave the user queues, which then
/// receive admissions; codeword queues drain `min(Q, T μ)` from their previous
/// backlog and receive the bits of the new combinations; virtual queues lose
/// the admissions and gain the virtual arrivals.
pub fn apply_slot(
    state: &mut QueueState,
    decision: &SlotDecision,
    params: &SystemParams,
    table: &CodewordTable,
) -> Result<SlotOutcome> {
    let k = params.users();
    if state.users() != k || table.users() != k {
        return Err(Error::Contract("state, table and parameters disagree on K".into()));
    }
    decision.check_shape(k)?;

    let full = 1usize << k;
    let mut combined = vec![0.0; full];
    let mut available = state.user.clone();
    let mut claim = |mask: usize, combined: &mut Vec<f64>| {
        let want = decision.combinations[mask];
        if want <= 0.0 || combined[mask] > 0.0 {
            return;
        }
        let mut take = want;
        for (u, a) in available.iter().enumerate() {
            if mask & (1 << u) != 0 {
                take = take.min(*a);
            }
        }
        if take <= 0.0 {
            return;
        }
        for (u, a) in available.iter_mut().enumerate() {
            if mask & (1 << u) != 0 {
                *a = (*a - take).max(0.0);
            }
        }
        combined[mask] = take;
    };
    for s in &decision.combine_order {
        if s.index() < full {
            claim(s.index(), &mut combined);
        }
    }
    let mut rest: Vec<usize> = (1..full)
        .filter(|&m| decision.combinations[m] > 0.0 && combined[m] == 0.0)
        .collect();
    rest.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), m));
    for m in rest {
        claim(m, &mut combined);
    }

    for (s, (a, adm)) in state.user.iter_mut().zip(available.into_iter().zip(&decision.admissions)) {
        *s = a + adm;
    }

    let t_slot = params.slot_channel_uses;
    let mut served = vec![0.0; full];
    for mask in 1..full {
        let q = state.codeword[mask];
        let out = q.min(t_slot * decision.rates[mask]);
        served[mask] = out;
        state.codeword[mask] = (q - out).max(0.0);
    }
    for j in 1..full {
        let c = combined[j];
        if c <= 0.0 {
            continue;
        }
        let jj = SubsetId::new(j as u32).expect("nonzero");
        for i in jj.subsets() {
            state.codeword[i.index()] += table.for_pair(jj, i) * c;
        }
    }

    for ((u, a), g) in state
        .virtual_
        .iter_mut()
        .zip(&decision.admissions)
        .zip(&decision.virtual_arrivals)
    {
        *u = (*u - a).max(0.0) + g;
    }

    Ok(SlotOutcome { served, combined })
}

/// Cumulative per-user accounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeliveryLedger {
    pub slots: u64,
    /// Bits credited from codeword-queue service.
    pub drained_bits: Vec<f64>,
    /// `T_slot μ` credited regardless of backlog.
    pub offered_bits: Vec<f64>,
    pub admitted_files: Vec<f64>,
    pub combined_files: Vec<f64>,
    pub rejected_files: Vec<f64>,
    missing_bits: f64,
}

impl DeliveryLedger {
    pub fn new(users: usize, missing_bits: f64) -> Self {
        DeliveryLedger {
            slots: 0,
            drained_bits: vec![0.0; users],
            offered_bits: vec![0.0; users],
            admitted_files: vec![0.0; users],
            combined_files: vec![0.0; users],
            rejected_files: vec![0.0; users],
            missing_bits,
        }
    }

    /// Credits each subset's drained bits to all of its members and adds the
    /// slot's admissions.
    pub fn update(&mut self, served: &[f64], admissions: &[f64]) {
        credit(&mut self.drained_bits, served);
        for (acc, a) in self.admitted_files.iter_mut().zip(admissions) {
            *acc += a;
        }
        self.slots += 1;
    }

    pub fn record_offered(&mut self, rates: &[f64], slot_channel_uses: f64) {
        for (mask, &r) in rates.iter().enumerate().skip(1) {
            if r > 0.0 {
                for (u, acc) in self.offered_bits.iter_mut().enumerate() {
                    if mask & (1 << u) != 0 {
                        *acc += slot_channel_uses * r;
                    }
                }
            }
        }
    }

    pub fn record_combined(&mut self, combined: &[f64]) {
        credit(&mut self.combined_files, combined);
    }

    pub fn record_rejected(&mut self, rejected: &[f64]) {
        for (acc, r) in self.rejected_files.iter_mut().zip(rejected) {
            *acc += r;
        }
    }

    /// Credits bits straight to users (baselines without codeword queues).
    pub fn credit_users(&mut self, bits: &[f64], offered: &[f64]) {
        for (acc, b) in self.drained_bits.iter_mut().zip(bits) {
            *acc += b;
        }
        for (acc, b) in self.offered_bits.iter_mut().zip(offered) {
            *acc += b;
        }
    }

    pub fn tick(&mut self) {
        self.slots += 1;
    }

    pub fn delivered_files(&self, user: usize) -> f64 {
        self.drained_bits[user] / self.missing_bits
    }

    pub fn delivered(&self) -> Vec<f64> {
        (0..self.drained_bits.len()).map(|u| self.delivered_files(u)).collect()
    }

    pub fn missing_bits(&self) -> f64 {
        self.missing_bits
    }
}

fn credit(acc: &mut [f64], by_mask: &[f64]) {
    for (mask, &x) in by_mask.iter().enumerate().skip(1) {
        if x > 0.0 {
            for (u, a) in acc.iter_mut().enumerate() {
                if mask & (1 << u) != 0 {
                    *a += x;
                }
            }
        }
    }
}
