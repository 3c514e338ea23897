//! Weighted sum-rate maximization over the degraded Gaussian broadcast channel
//! with one independent message per nonempty user subset.
//!
//! Users are ranked by decreasing channel gain ("positions"; equal gains keep
//! index order). A message intended for a set `J` travels in the superposition
//! layer of the weakest member of `J`, so the `2^K - 1` subset rates collapse
//! into `K` layer rates
//!
//! ```text
//! R_k = log2((1 + h_k Σ_{j≤k} p_j) / (1 + h_k Σ_{j<k} p_j))
//! ```
//!
//! and a weighted sum over subsets is maximized by giving each layer wholly to
//! its heaviest admissible subset. The power split then follows from the upper
//! envelope of the marginal utilities `w_k / (1/h_k + z)` over the cumulative
//! interference level `z ∈ [0, P]`: every `z` belongs to whichever layer has
//! the highest marginal utility there.

pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_user_count, SubsetId};
use crate::error::{domain, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Breakpoints closer than this (relative to the budget) are merged.
const BREAKPOINT_CLAMP: f64 = 1e-12;

/// Fading power gains of one slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelState {
    gains: Vec<f64>,
}

impl ChannelState {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        check_user_count(gains.len())?;
        if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return domain(format!("channel gain {g} must be finite and nonnegative"));
        }
        Ok(ChannelState { gains })
    }

    pub fn users(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn gain(&self, user: usize) -> f64 {
        self.gains[user]
    }

    /// User indices sorted by decreasing gain, ties by index.
    pub fn strength_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.gains.len()).collect();
        order.sort_by(|&a, &b| self.gains[b].total_cmp(&self.gains[a]));
        order
    }
}

/// Nonnegative weight per nonempty subset, stored by mask.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetWeights {
    users: usize,
    by_mask: Vec<f64>,
}

impl SubsetWeights {
    pub fn zeros(users: usize) -> Self {
        SubsetWeights {
            users,
            by_mask: vec![0.0; 1 << users],
        }
    }

    /// Takes a mask-indexed vector of length `2^K`; entry 0 is ignored.
    pub fn from_masked(users: usize, by_mask: Vec<f64>) -> Result<Self> {
        check_user_count(users)?;
        if by_mask.len() != 1 << users {
            return domain(format!(
                "expected {} mask-indexed weights, got {}",
                1usize << users,
                by_mask.len()
            ));
        }
        if let Some(w) = by_mask[1..].iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return domain(format!("subset weight {w} must be finite and nonnegative"));
        }
        let mut by_mask = by_mask;
        by_mask[0] = 0.0;
        Ok(SubsetWeights { users, by_mask })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn get(&self, subset: SubsetId) -> f64 {
        self.by_mask[subset.index()]
    }

    pub fn set(&mut self, subset: SubsetId, weight: f64) {
        debug_assert!(weight >= 0.0);
        self.by_mask[subset.index()] = weight;
    }

    pub fn as_masked(&self) -> &[f64] {
        &self.by_mask
    }

    pub fn scaled(&self, c: f64) -> Self {
        SubsetWeights {
            users: self.users,
            by_mask: self.by_mask.iter().map(|w| w * c).collect(),
        }
    }
}

/// Per-layer weights after collapsing subsets onto their weakest member.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedWeights {
    /// `order[pos]` is the user at strength position `pos`.
    pub order: Vec<usize>,
    /// Largest subset weight the layer at each position can carry.
    pub weights: Vec<f64>,
    /// Subset attaining `weights[pos]`.
    pub argsubset: Vec<SubsetId>,
}

/// Collapses subset weights onto layers.
///
/// The layer at position `k` carries subsets containing user `order[k]` and
/// otherwise only stronger users. Among maximizers the largest subset wins,
/// then the smallest mask.
pub fn reduce_weights(weights: &SubsetWeights, h: &ChannelState) -> Result<ReducedWeights> {
    let k = h.users();
    if weights.users() != k {
        return domain(format!(
            "weights cover {} users but the channel has {k}",
            weights.users()
        ));
    }
    let order = h.strength_order();
    let mut position = vec![0usize; k];
    for (pos, &user) in order.iter().enumerate() {
        position[user] = pos;
    }

    // weakest[mask] = highest position among members
    let full = 1usize << k;
    let mut weakest = vec![0usize; full];
    let mut best_w = vec![f64::NEG_INFINITY; k];
    let mut best_s = vec![0u32; k];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let pos = if rest == 0 {
            position[low]
        } else {
            weakest[rest].max(position[low])
        };
        weakest[mask] = pos;

        let w = weights.by_mask[mask];
        let incumbent = best_s[pos];
        let better = w > best_w[pos]
            || (w == best_w[pos] && {
                let (nc, ic) = (mask.count_ones(), incumbent.count_ones());
                nc > ic || (nc == ic && (mask as u32) < incumbent)
            });
        if better {
            best_w[pos] = w;
            best_s[pos] = mask as u32;
        }
    }

    Ok(ReducedWeights {
        order,
        weights: best_w,
        argsubset: best_s
            .into_iter()
            .map(|m| SubsetId::new(m).expect("every position owns its singleton"))
            .collect(),
    })
}

/// One maximal interval of the marginal-utility envelope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeSegment {
    pub start: f64,
    pub end: f64,
    /// Strength position holding the interval.
    pub position: usize,
}

/// Piecewise assignment of `[0, P]` to layers.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerEnvelope {
    pub segments: Vec<EnvelopeSegment>,
}

impl PowerEnvelope {
    /// Position holding `z`, if any layer has positive weight.
    pub fn holder(&self, z: f64) -> Option<usize> {
        self.segments
            .iter()
            .find(|s| z >= s.start && z <= s.end)
            .map(|s| s.position)
    }
}

#[inline]
fn marginal(weight: f64, gain: f64, z: f64) -> f64 {
    if gain <= 0.0 || weight <= 0.0 {
        0.0
    } else {
        weight / (1.0 / gain + z)
    }
}

/// Upper envelope of `w_k / (1/h_k + z)` over `[0, budget]`.
///
/// Two distinct curves of this family cross at most once, so the envelope is
/// fixed between consecutive pairwise crossings; each piece is attributed by
/// evaluating at its midpoint. Ties go to the stronger position.
pub fn power_envelope(reduced: &ReducedWeights, h: &ChannelState, budget: f64) -> PowerEnvelope {
    let gains: Vec<f64> = reduced.order.iter().map(|&u| h.gain(u)).collect();
    let active: Vec<usize> = (0..gains.len())
        .filter(|&p| reduced.weights[p] > 0.0 && gains[p] > 0.0)
        .collect();
    if active.is_empty() || budget <= 0.0 {
        return PowerEnvelope { segments: vec![] };
    }

    let mut cuts = vec![0.0, budget];
    for (n, &a) in active.iter().enumerate() {
        for &b in &active[n + 1..] {
            let (wa, wb) = (reduced.weights[a], reduced.weights[b]);
            let (na, nb) = (1.0 / gains[a], 1.0 / gains[b]);
            let dw = wa - wb;
            if dw == 0.0 {
                continue;
            }
            let z = (wb * na - wa * nb) / dw;
            if z > 0.0 && z < budget {
                cuts.push(z);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let eps = BREAKPOINT_CLAMP * budget.max(1.0);
    cuts.dedup_by(|b, a| *b - *a <= eps);
    if *cuts.last().unwrap() < budget {
        cuts.push(budget);
    }

    let mut segments: Vec<EnvelopeSegment> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut winner = active[0];
        let mut best = marginal(reduced.weights[winner], gains[winner], mid);
        for &p in &active[1..] {
            let v = marginal(reduced.weights[p], gains[p], mid);
            if v > best {
                best = v;
                winner = p;
            }
        }
        match segments.last_mut() {
            Some(last) if last.position == winner => last.end = hi,
            _ => segments.push(EnvelopeSegment {
                start: lo,
                end: hi,
                position: winner,
            }),
        }
    }
    PowerEnvelope { segments }
}

/// Power per strength position: the measure of the envelope each layer holds.
pub fn allocate_power(reduced: &ReducedWeights, h: &ChannelState, budget: f64) -> Vec<f64> {
    let mut power = vec![0.0; reduced.order.len()];
    for s in power_envelope(reduced, h, budget).segments {
        power[s.position] += s.end - s.start;
    }
    power
}

/// Layer rates (bits per channel use) for a position-indexed power vector.
pub fn rates_from_power(power: &[f64], h: &ChannelState) -> Vec<f64> {
    layer_rates(power, h, &h.strength_order())
}

pub(crate) fn layer_rates(power: &[f64], h: &ChannelState, order: &[usize]) -> Vec<f64> {
    let mut below = 0.0;
    order
        .iter()
        .zip(power)
        .map(|(&user, &p)| {
            let g = h.gain(user);
            let r = (g * p / (1.0 + g * below)).ln_1p() / LN_2;
            below += p;
            r
        })
        .collect()
}

/// Solution of one weighted sum-rate problem.
#[derive(Clone, Debug, PartialEq)]
pub struct RateAllocation {
    pub order: Vec<usize>,
    /// Power per strength position.
    pub power: Vec<f64>,
    /// Layer rate per strength position (bits per channel use).
    pub layer_rates: Vec<f64>,
    /// Rate per subset, mask-indexed (bits per channel use).
    pub rates: Vec<f64>,
    /// Achieved weighted sum rate.
    pub wsr: f64,
}

impl RateAllocation {
    pub fn rate(&self, subset: SubsetId) -> f64 {
        self.rates[subset.index()]
    }

    /// Power in user-index order.
    pub fn user_power(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (pos, &u) in self.order.iter().enumerate() {
            out[u] = self.power[pos];
        }
        out
    }
}

/// Maximizes `Σ_J θ_J r_J` over the capacity region of `h` under power `budget`.
pub fn solve_wsr(weights: &SubsetWeights, h: &ChannelState, budget: f64) -> Result<RateAllocation> {
    if !(budget >= 0.0 && budget.is_finite()) {
        return domain(format!("power budget {budget} must be finite and nonnegative"));
    }
    let reduced = reduce_weights(weights, h)?;
    let power = allocate_power(&reduced, h, budget);
    let layer = layer_rates(&power, h, &reduced.order);
    let mut rates = vec![0.0; 1 << h.users()];
    let mut wsr = 0.0;
    for pos in 0..layer.len() {
        if layer[pos] > 0.0 {
            rates[reduced.argsubset[pos].index()] += layer[pos];
            wsr += reduced.weights[pos] * layer[pos];
        }
    }
    Ok(RateAllocation {
        order: reduced.order,
        power,
        layer_rates: layer,
        rates,
        wsr,
    })
}

/// Checks a mask-indexed rate vector against the capacity region for a given
/// position-indexed power split.
pub fn within_region(rates: &[f64], power: &[f64], h: &ChannelState, budget: f64, tol: f64) -> bool {
    let k = h.users();
    if rates.len() != 1 << k || power.len() != k {
        return false;
    }
    if power.iter().any(|&p| p < -tol) || power.iter().sum::<f64>() > budget + tol {
        return false;
    }
    if rates[1..].iter().any(|&r| r < -tol) {
        return false;
    }
    let order = h.strength_order();
    let mut position = vec![0usize; k];
    for (pos, &u) in order.iter().enumerate() {
        position[u] = pos;
    }
    let caps = layer_rates(power, h, &order);
    let mut load = vec![0.0; k];
    for (mask, &r) in rates.iter().enumerate().skip(1) {
        let weakest = (0..k)
            .filter(|u| mask & (1 << u) != 0)
            .map(|u| position[u])
            .max()
            .unwrap();
        load[weakest] += r;
    }
    load.iter().zip(&caps).all(|(l, c)| *l <= c + tol)
}
