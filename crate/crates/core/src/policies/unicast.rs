//! Opportunistic alpha-fair unicast: full power to one user per slot.

use crate::bc_capacity::ChannelState;

/// Floor on the empirical rate so the first slots have a finite score.
pub const RATE_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct UnicastOpportunistic {
    alpha: f64,
    served_sum: Vec<f64>,
    slots: u64,
}

impl UnicastOpportunistic {
    pub fn new(users: usize, alpha: f64) -> Self {
        UnicastOpportunistic {
            alpha,
            served_sum: vec![0.0; users],
            slots: 0,
        }
    }

    /// Empirical rate of `user` (bits per channel use) over the slots so far.
    pub fn average(&self, user: usize) -> f64 {
        if self.slots == 0 {
            return RATE_FLOOR;
        }
        (self.served_sum[user] / self.slots as f64).max(RATE_FLOOR)
    }

    /// `argmax_k log2(1 + h_k P) / T_k^α` over eligible users; ties go to the
    /// lowest index. Returns the user and its rate.
    pub fn select(&self, h: &ChannelState, power: f64, eligible: Option<&[bool]>) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..h.users() {
            if eligible.is_some_and(|e| !e[k]) {
                continue;
            }
            let rate = (h.gain(k) * power).ln_1p() / std::f64::consts::LN_2;
            let score = rate / self.average(k).powf(self.alpha);
            if best.is_none_or(|(_, s, _)| score > s) {
                best = Some((k, score, rate));
            }
        }
        best.map(|(k, _, r)| (k, r))
    }

    /// Adds one slot to the running averages; `served` is the rate actually
    /// delivered to `user` in bits per channel use.
    pub fn record(&mut self, user: Option<usize>, served: f64) {
        if let Some(k) = user {
            self.served_sum[k] += served;
        }
        self.slots += 1;
    }
}
