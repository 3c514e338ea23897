//! Standard decentralized coded caching over a fading channel: every slot
//! multicasts at the rate of the worst user.

use rand::RngCore;

use crate::channel::{keyed_rng, open_unit, ChannelModel, FadingKind, Stream};
use crate::combinatorics::{standard_cc_load, CacheParams, CodewordTable, SubsetId};
use crate::error::Result;

/// Per-user delivery rate of standard coded caching in files/slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardCcRate {
    pub per_user: f64,
    /// Standard error of `per_user` (0 when the expectation is exact).
    pub std_err: f64,
    pub exact: bool,
}

/// `T E[log2(1 + P min_k h_k)] / (T_tot F)`.
///
/// Deterministic channels are evaluated exactly, fading ones with `draws`
/// Monte Carlo samples. Returns an infinite rate when nothing needs sending.
pub fn standard_cc_rate(
    cache: &CacheParams,
    slot_channel_uses: f64,
    power: f64,
    model: &ChannelModel,
    draws: usize,
) -> Result<StandardCcRate> {
    cache.validate()?;
    let load = standard_cc_load(cache.users, cache.memory);
    let scale = slot_channel_uses / (load * cache.file_bits);
    let (mean, se, exact) = match model.kind() {
        FadingKind::Deterministic => {
            let worst = model.mean_gains().iter().cloned().fold(f64::INFINITY, f64::min);
            ((power * worst).ln_1p() / std::f64::consts::LN_2, 0.0, true)
        }
        FadingKind::IidExponential => {
            // min of independent exponentials is exponential with rate Σ 1/β
            let rate: f64 = model.mean_gains().iter().map(|b| 1.0 / b).sum();
            let mut rng = keyed_rng(model.seed(), Stream::MonteCarlo);
            let n = draws.max(2);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let hmin = -open_unit(rng.next_u64()).ln() / rate;
                let r = (power * hmin).ln_1p() / std::f64::consts::LN_2;
                s1 += r;
                s2 += r * r;
            }
            let mean = s1 / n as f64;
            let var = (s2 / n as f64 - mean * mean).max(0.0) * n as f64 / (n - 1) as f64;
            (mean, (var / n as f64).sqrt(), false)
        }
    };
    if load == 0.0 {
        return Ok(StandardCcRate {
            per_user: f64::INFINITY,
            std_err: 0.0,
            exact,
        });
    }
    Ok(StandardCcRate {
        per_user: scale * mean,
        std_err: scale * se,
        exact,
    })
}

/// Round-robin transmission of the standard delivery codewords, one
/// multicast stream per slot at the worst user's rate.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRobinMulticast {
    users: usize,
    codewords: Vec<(SubsetId, f64)>,
    cursor: usize,
    sent: f64,
}

impl RoundRobinMulticast {
    pub fn new(cache: &CacheParams) -> Result<Self> {
        let table = CodewordTable::new(cache)?;
        let k = cache.users;
        let mut codewords: Vec<(SubsetId, f64)> = (1u32..1 << k)
            .map(|m| {
                let s = SubsetId::new(m).expect("nonzero");
                (s, table.get(k, s.len()))
            })
            .filter(|(_, b)| *b > 0.0)
            .collect();
        codewords.sort_by_key(|(s, _)| (std::cmp::Reverse(s.len()), s.mask()));
        Ok(RoundRobinMulticast {
            users: k,
            codewords,
            cursor: 0,
            sent: 0.0,
        })
    }

    /// Bits of one full delivery round.
    pub fn round_bits(&self) -> f64 {
        self.codewords.iter().map(|(_, b)| b).sum()
    }

    /// Sends `capacity` bits and returns the useful bits credited to each user.
    pub fn step(&mut self, mut capacity: f64) -> Vec<f64> {
        let mut credit = vec![0.0; self.users];
        if self.codewords.is_empty() {
            return credit;
        }
        while capacity > 0.0 {
            let (set, bits) = self.codewords[self.cursor];
            let chunk = capacity.min(bits - self.sent);
            for u in set.users() {
                credit[u] += chunk;
            }
            capacity -= chunk;
            self.sent += chunk;
            if self.sent >= bits {
                self.sent = 0.0;
                self.cursor = (self.cursor + 1) % self.codewords.len();
            }
        }
        credit
    }
}
