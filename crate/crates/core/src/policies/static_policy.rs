//! Stationary randomized policies that ignore queue state, and the
//! construction of a symmetric point on the boundary of the delivery region
//! for a deterministic channel.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bc_capacity::{layer_rates, within_region, ChannelState};
use crate::channel::{keyed_rng, Stream};
use crate::combinatorics::{CodewordTable, SubsetId};
use crate::error::{config, domain, Result};
use crate::queues::SlotDecision;
use crate::system::SystemParams;

/// One rate vector of a static randomization.
#[derive(Clone, Debug, PartialEq)]
pub struct RateOption {
    pub probability: f64,
    /// Rate per subset, mask-indexed (bits per channel use).
    pub rates: Vec<f64>,
    /// Power per strength position.
    pub power: Vec<f64>,
}

/// Behaviour of a static policy in one channel state.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticEntry {
    pub gains: Vec<f64>,
    /// Files admitted every slot, per user.
    pub admissions: Vec<f64>,
    /// Mean combinations per slot, mask-indexed; realized as `σ_max` with
    /// probability `mean / σ_max`.
    pub combination_means: Vec<f64>,
    pub options: Vec<RateOption>,
}

#[derive(Clone, Debug)]
pub struct StaticPolicy {
    users: usize,
    sigma_max: f64,
    entries: Vec<StaticEntry>,
    rng: ChaCha8Rng,
}

impl StaticPolicy {
    pub fn new(entries: Vec<StaticEntry>, params: &SystemParams, sigma_max: f64, seed: u64) -> Result<Self> {
        let k = params.users();
        if entries.is_empty() {
            return config("static policy table is empty");
        }
        for e in &entries {
            let h = ChannelState::new(e.gains.clone())?;
            if h.users() != k || e.admissions.len() != k || e.combination_means.len() != 1 << k {
                return config("static policy entry does not match the user count");
            }
            if e.combination_means.iter().any(|&c| !(0.0..=sigma_max).contains(&c)) {
                return config("combination means must lie in [0, sigma_max]");
            }
            if e.admissions.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
                return config("admissions must be finite and nonnegative");
            }
            if e.options.is_empty() || e.options.len() > k + 1 {
                return config(format!("a channel state needs between 1 and {} rate vectors", k + 1));
            }
            let total: f64 = e.options.iter().map(|o| o.probability).sum();
            if (total - 1.0).abs() > 1e-9 || e.options.iter().any(|o| o.probability < 0.0) {
                return config("rate vector probabilities must form a distribution");
            }
            for o in &e.options {
                if !within_region(&o.rates, &o.power, &h, params.power, 1e-9) {
                    return config("static rate vector lies outside the capacity region");
                }
            }
        }
        Ok(StaticPolicy {
            users: k,
            sigma_max,
            entries,
            rng: keyed_rng(seed, Stream::Policy),
        })
    }

    pub fn entries(&self) -> &[StaticEntry] {
        &self.entries
    }

    pub fn step(&mut self, h: &ChannelState) -> Result<SlotDecision> {
        let Some(entry) = self.entries.iter().find(|e| e.gains == h.gains()) else {
            return config(format!("channel state {:?} is not in the static policy table", h.gains()));
        };
        let mut d = SlotDecision::idle(self.users);
        d.admissions.clone_from(&entry.admissions);
        for (mask, &mean) in entry.combination_means.iter().enumerate().skip(1) {
            if mean > 0.0 && self.rng.random::<f64>() < mean / self.sigma_max {
                d.combinations[mask] = self.sigma_max;
            }
        }
        let mut u = self.rng.random::<f64>();
        let mut pick = &entry.options[entry.options.len() - 1];
        for o in &entry.options {
            if u < o.probability {
                pick = o;
                break;
            }
            u -= o.probability;
        }
        d.rates.clone_from(&pick.rates);
        d.power.clone_from(&pick.power);
        Ok(d)
    }
}

/// Largest rate `s` of combinations over all `K` users that a deterministic
/// channel sustains, with the power split and per-subset rates serving it.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBoundary {
    /// Combinations of the full user set per slot.
    pub combinations_per_slot: f64,
    /// Power per strength position.
    pub power: Vec<f64>,
    /// Rate per subset, mask-indexed (bits per channel use).
    pub rates: Vec<f64>,
}

/// Bits per combination landing in each strength layer, and per subset.
fn full_combination_loads(params: &SystemParams, h: &ChannelState) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = params.users();
    let table = CodewordTable::new(&params.cache)?;
    let order = h.strength_order();
    let mut position = vec![0usize; k];
    for (pos, &u) in order.iter().enumerate() {
        position[u] = pos;
    }
    let mut by_layer = vec![0.0; k];
    let mut by_subset = vec![0.0; 1 << k];
    for mask in 1u32..1 << k {
        let s = SubsetId::new(mask)?;
        let bits = table.get(k, s.len());
        let weakest = s.users().map(|u| position[u]).max().expect("nonempty");
        by_layer[weakest] += bits;
        by_subset[mask as usize] = bits;
    }
    Ok((by_layer, by_subset))
}

/// Power per position needed to carry `s` combinations per slot.
fn required_power(s: f64, loads: &[f64], h: &ChannelState, order: &[usize], slot: f64) -> Vec<f64> {
    let mut below = 0.0;
    loads
        .iter()
        .zip(order)
        .map(|(&l, &u)| {
            let g = h.gain(u);
            let p = ((s * l / slot).exp2() - 1.0) * (1.0 + g * below) / g;
            below += p;
            p
        })
        .collect()
}

/// Bisects for the largest `s ≤ σ_max` whose layer rates fit the power budget.
pub fn full_combination_boundary(params: &SystemParams, h: &ChannelState, sigma_max: f64) -> Result<SymmetricBoundary> {
    if h.users() != params.users() {
        return config("channel and parameters disagree on K");
    }
    if h.gains().iter().any(|&g| g <= 0.0) {
        return domain("every user needs a positive gain");
    }
    let order = h.strength_order();
    let (loads, per_subset) = full_combination_loads(params, h)?;
    let slot = params.slot_channel_uses;
    let total = |s: f64| required_power(s, &loads, h, &order, slot).iter().sum::<f64>();

    let (mut lo, mut hi) = (0.0, sigma_max);
    if total(hi) > params.power {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) <= params.power {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        lo = hi;
    }
    let power = required_power(lo, &loads, h, &order, slot);
    let caps = layer_rates(&power, h, &order);
    let mut rates: Vec<f64> = per_subset.iter().map(|&b| lo * b / slot).collect();
    // absorb rounding so the vector sits exactly on the layer capacities
    let position: Vec<usize> = {
        let mut p = vec![0; order.len()];
        for (pos, &u) in order.iter().enumerate() {
            p[u] = pos;
        }
        p
    };
    for (mask, r) in rates.iter_mut().enumerate().skip(1) {
        let weakest = (0..order.len())
            .filter(|u| mask & (1 << u) != 0)
            .map(|u| position[u])
            .max()
            .expect("nonempty");
        let demand = lo * loads[weakest] / slot;
        if demand > caps[weakest] {
            *r *= caps[weakest] / demand;
        }
    }
    Ok(SymmetricBoundary {
        combinations_per_slot: lo,
        power,
        rates,
    })
}

/// Static policy admitting `load · s*` files per user per slot, where `s*` is
/// the symmetric boundary of a deterministic channel. Full-set combinations are
/// attempted at rate `(1 + load)/2 · s*`, so `load < 1` lies strictly inside
/// the region and `load > 1` outside.
pub fn symmetric_static_policy(
    params: &SystemParams,
    h: &ChannelState,
    load: f64,
    sigma_max: f64,
    seed: u64,
) -> Result<StaticPolicy> {
    let k = params.users();
    let boundary = full_combination_boundary(params, h, sigma_max)?;
    let s = boundary.combinations_per_slot;
    let mut combination_means = vec![0.0; 1 << k];
    combination_means[(1 << k) - 1] = (0.5 * (1.0 + load) * s).min(sigma_max);
    let entry = StaticEntry {
        gains: h.gains().to_vec(),
        admissions: vec![load * s; k],
        combination_means,
        options: vec![RateOption {
            probability: 1.0,
            rates: boundary.rates,
            power: boundary.power,
        }],
    };
    StaticPolicy::new(vec![entry], params, sigma_max, seed)
}

/// Checks the flow conditions of the delivery region for mean admissions
/// `ā`, combinations `σ̄`, rates `μ̄`: every user's admissions are
/// covered by combinations that include it, and every codeword queue's mean
/// arrivals `Σ_{J⊇I} b_{J,I} σ̄_J` fit within `T μ̄_I`. With `strict`, both
/// must hold with slack wherever there is any flow.
pub fn in_stability_region(
    params: &SystemParams,
    admissions: &[f64],
    combination_means: &[f64],
    mean_rates: &[f64],
    strict: bool,
) -> Result<bool> {
    let k = params.users();
    if admissions.len() != k || combination_means.len() != 1 << k || mean_rates.len() != 1 << k {
        return config("flow vectors do not match the user count");
    }
    let table = CodewordTable::new(&params.cache)?;
    for (u, &a) in admissions.iter().enumerate() {
        let cover: f64 = (1..1usize << k)
            .filter(|m| m & (1 << u) != 0)
            .map(|m| combination_means[m])
            .sum();
        let ok = if strict && a > 0.0 { cover > a } else { cover >= a };
        if !ok {
            return Ok(false);
        }
    }
    for i in 1..1usize << k {
        let ii = SubsetId::new(i as u32)?;
        let inflow: f64 = (1..1usize << k)
            .filter(|&j| j & i == i)
            .map(|j| {
                let jj = SubsetId::new(j as u32).expect("nonzero");
                table.for_pair(jj, ii) * combination_means[j]
            })
            .sum();
        let service = params.slot_channel_uses * mean_rates[i];
        let ok = if strict && inflow > 0.0 { inflow < service } else { inflow <= service };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queues::{apply_slot, QueueState};

    fn params() -> SystemParams {
        SystemParams::new(2, 0.6, 1000.0, 100.0, 10.0).unwrap()
    }

    fn h() -> ChannelState {
        ChannelState::new(vec![1.0, 0.2]).unwrap()
    }

    #[test]
    fn boundary_uses_whole_budget() {
        let b = full_combination_boundary(&params(), &h(), 2.0).unwrap();
        assert!((b.power.iter().sum::<f64>() - 10.0).abs() < 1e-9);
        assert!(b.combinations_per_slot > 0.3 && b.combinations_per_slot < 0.4);
        assert!(within_region(&b.rates, &b.power, &h(), 10.0, 1e-9));
    }

    // Grid over the strong layer's power and the share of symmetric demand
    // served by the pair combination, against every static split of the load.
    #[test]
    fn boundary_is_optimal_for_two_users() {
        let p = params();
        let s = full_combination_boundary(&p, &h(), 2.0).unwrap().combinations_per_slot;
        let (t, pw) = (100.0, 10.0);
        let mut best: f64 = 0.0;
        let n = 20_000;
        for i in 0..=n {
            let p1 = pw * i as f64 / n as f64;
            let c_strong = t * (1.0 + p1).log2();
            let c_weak = t * ((1.0 + 0.2 * pw) / (1.0 + 0.2 * p1)).log2();
            for j in 0..=100 {
                let phi = j as f64 / 100.0;
                // σ1 = σ2 = (1-φ) a, σ12 = φ a
                let strong = 400.0 * (1.0 - phi) + 160.0 * phi;
                let weak = 400.0 * (1.0 - phi) + 400.0 * phi;
                best = best.max((c_strong / strong).min(c_weak / weak));
            }
        }
        assert!((best - s).abs() / s < 1e-3, "grid {best} vs bisection {s}");
    }

    #[test]
    fn region_membership() {
        let p = params();
        let b = full_combination_boundary(&p, &h(), 2.0).unwrap();
        let s = b.combinations_per_slot;
        let mut sigma = vec![0.0; 4];
        sigma[3] = 0.9 * s;
        assert!(in_stability_region(&p, &[0.8 * s; 2], &sigma, &b.rates, true).unwrap());
        sigma[3] = 1.2 * s;
        assert!(!in_stability_region(&p, &[1.2 * s; 2], &sigma, &b.rates, false).unwrap());
        sigma[3] = 0.8 * s;
        assert!(!in_stability_region(&p, &[0.8 * s; 2], &sigma, &b.rates, true).unwrap());
    }

    #[test]
    fn unknown_channel_state_is_a_config_error() {
        let mut pol = symmetric_static_policy(&params(), &h(), 0.8, 2.0, 1).unwrap();
        let other = ChannelState::new(vec![1.0, 0.3]).unwrap();
        assert!(matches!(pol.step(&other), Err(crate::Error::Config(_))));
        assert!(pol.step(&h()).is_ok());
    }

    #[test]
    fn table_validation() {
        let p = params();
        let entry = StaticEntry {
            gains: vec![1.0, 0.2],
            admissions: vec![1.0, 1.0],
            combination_means: vec![0.0; 4],
            options: vec![RateOption {
                probability: 1.0,
                rates: vec![0.0, 10.0, 0.0, 0.0],
                power: vec![10.0, 0.0],
            }],
        };
        assert!(StaticPolicy::new(vec![entry.clone()], &p, 2.0, 0).is_err());
        let mut e = entry.clone();
        e.options[0].probability = 0.5;
        e.options[0].rates = vec![0.0; 4];
        assert!(StaticPolicy::new(vec![e], &p, 2.0, 0).is_err());
    }

    #[test]
    fn zero_rates_grow_queues_linearly() {
        let p = params();
        let t = CodewordTable::new(&p.cache).unwrap();
        let mut combination_means = vec![0.0; 4];
        combination_means[3] = 1.0;
        let entry = StaticEntry {
            gains: vec![1.0, 0.2],
            admissions: vec![0.5, 0.5],
            combination_means,
            options: vec![RateOption {
                probability: 1.0,
                rates: vec![0.0; 4],
                power: vec![0.0, 0.0],
            }],
        };
        let mut pol = StaticPolicy::new(vec![entry], &p, 2.0, 9).unwrap();
        let mut s = QueueState::empty(2);
        let mut totals = vec![];
        for _ in 0..4000 {
            let d = pol.step(&h()).unwrap();
            apply_slot(&mut s, &d, &p, &t).unwrap();
            totals.push(s.total_codeword_bits());
        }
        // each slot adds 0.5 combinations' worth: 0.5 * 560 bits
        let slope = (totals[3999] - totals[1999]) / 2000.0;
        assert!((slope - 280.0).abs() < 15.0, "{slope}");
    }
}
