//! Grid search reference for [`solve_wsr`](super::solve_wsr).
//!
//! Shares nothing with the envelope solver beyond the channel types: the layer
//! weights come from a direct scan over all subsets, and the power split is the
//! best point of a uniform grid over the cumulative power levels
//! `0 ≤ z_1 ≤ … ≤ z_{K-1} ≤ P`. The objective is a chain of terms in
//! consecutive levels, so the exact grid maximum is found by dynamic
//! programming instead of visiting all `O(N^(K-1))` points.

use super::{ChannelState, SubsetWeights};
use crate::error::{domain, Result};

/// Largest user count the grid search accepts.
pub const MAX_ORACLE_USERS: usize = 4;

/// Best weighted sum rate over a power grid of spacing at most `grid_step`.
pub fn wsr_bruteforce(
    weights: &SubsetWeights,
    h: &ChannelState,
    budget: f64,
    grid_step: f64,
) -> Result<f64> {
    let k = h.users();
    if k > MAX_ORACLE_USERS {
        return domain(format!("grid oracle supports at most {MAX_ORACLE_USERS} users, got {k}"));
    }
    if weights.users() != k {
        return domain("weights and channel disagree on the user count");
    }
    if !(grid_step > 0.0) || !(budget >= 0.0) {
        return domain("grid step must be positive and budget nonnegative");
    }

    let mut ranked: Vec<usize> = (0..k).collect();
    ranked.sort_by(|&a, &b| h.gain(b).partial_cmp(&h.gain(a)).unwrap().then(a.cmp(&b)));

    // heaviest subset whose weakest member sits at each rank
    let mut layer_weight = vec![0.0f64; k];
    for (rank, &user) in ranked.iter().enumerate() {
        let allowed: u32 = ranked[..=rank].iter().map(|&u| 1u32 << u).sum();
        for mask in 1u32..(1 << k) {
            if mask & (1 << user) != 0 && mask & !allowed == 0 {
                layer_weight[rank] = layer_weight[rank].max(weights.as_masked()[mask as usize]);
            }
        }
    }

    if budget == 0.0 || layer_weight.iter().all(|&w| w == 0.0) {
        return Ok(0.0);
    }
    if k == 1 {
        return Ok(layer_weight[0] * (1.0 + h.gain(ranked[0]) * budget).log2());
    }

    let steps = (budget / grid_step).ceil().max(1.0) as usize;
    let level = |i: usize| budget * i as f64 / steps as f64;

    // log-terms per rank and grid level
    let logs: Vec<Vec<f64>> = ranked
        .iter()
        .map(|&u| (0..=steps).map(|i| (1.0 + h.gain(u) * level(i)).log2()).collect())
        .collect();

    // best[i]: optimum of ranks 0..r given z_r = level i
    let mut best: Vec<f64> = (0..=steps).map(|i| layer_weight[0] * logs[0][i]).collect();
    for r in 1..k {
        let last = r == k - 1;
        let mut next = vec![f64::NEG_INFINITY; steps + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            if last && i != steps {
                continue;
            }
            let mut acc = f64::NEG_INFINITY;
            for (j, &prev) in best.iter().enumerate().take(i + 1) {
                let v = prev + layer_weight[r] * (logs[r][i] - logs[r][j]);
                if v > acc {
                    acc = v;
                }
            }
            *slot = acc;
        }
        best = next;
    }
    Ok(best[steps])
}

#[cfg(test)]
mod tests {
    use super::super::{rates_from_power, solve_wsr};
    use super::*;

    #[test]
    fn single_user_is_exact() {
        let h = ChannelState::new(vec![0.8]).unwrap();
        let w = SubsetWeights::from_masked(1, vec![0.0, 2.0]).unwrap();
        let r = rates_from_power(&[7.0], &h)[0];
        assert_eq!(wsr_bruteforce(&w, &h, 7.0, 0.5).unwrap(), 2.0 * r);
    }

    #[test]
    fn zero_weights() {
        let h = ChannelState::new(vec![1.0, 0.2, 0.4]).unwrap();
        assert_eq!(wsr_bruteforce(&SubsetWeights::zeros(3), &h, 10.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn matches_two_user_examples() {
        let h = ChannelState::new(vec![1.0, 0.5]).unwrap();
        for w in [vec![0.0, 1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.5, 0.3]] {
            let w = SubsetWeights::from_masked(2, w).unwrap();
            let grid = wsr_bruteforce(&w, &h, 10.0, 1e-3).unwrap();
            let exact = solve_wsr(&w, &h, 10.0).unwrap().wsr;
            assert!((grid - exact).abs() <= 1e-3 * exact.max(1.0), "{grid} vs {exact}");
            assert!(grid <= exact + 1e-12);
        }
    }

    #[test]
    fn refuses_large_instances() {
        let h = ChannelState::new(vec![1.0; 5]).unwrap();
        assert!(wsr_bruteforce(&SubsetWeights::zeros(5), &h, 1.0, 0.1).is_err());
    }
}
