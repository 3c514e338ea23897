//! Self-checks run by `faircache check`. Closed forms are compared with
//! enumeration and the sum-rate solver with a grid search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bc_capacity::oracle::wsr_bruteforce;
use crate::bc_capacity::{solve_wsr, ChannelState, SubsetWeights};
use crate::combinatorics::{binomial, codeword_bits, standard_cc_load, subfile_size, CacheParams};
use crate::error::Result;
use crate::policies::{g_utility, gamma_opt};
use crate::report::write_csv;
use crate::scenario::Scenario;
use crate::sim::{compare, run, RunConfig, Scheme};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }
}

/// Largest relative deviation of the placement identities over
/// `K ≤ max_users` and `m ∈ {0.1, …, 0.9}`. Sub-file sizes must add up to `F`
/// and the codeword bits one user of a demand set receives to `(1-m) F`.
pub fn normalization_max_error(max_users: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=max_users {
        for step in 1..=9 {
            let m = step as f64 / 10.0;
            let p = CacheParams::new(k, m, 1000.0)?;
            let mut total = 0.0;
            for s in 0..=k {
                total += binomial(k, s) * subfile_size(s, &p)?;
            }
            worst = worst.max((total - p.file_bits).abs() / p.file_bits);

            for j in 1..=k {
                // receiver sets inside a j-set that contain a fixed member
                let mut seen = 0.0;
                for i in 1..=j {
                    seen += binomial(j - 1, i - 1) * codeword_bits(j, i, &p)?;
                }
                worst = worst.max((seen - p.missing_bits()).abs() / p.missing_bits());
            }

            let expansion: f64 = (1..=k)
                .map(|s| binomial(k, s) * m.powi(s as i32 - 1) * (1.0 - m).powi((k - s + 1) as i32))
                .sum();
            let load = standard_cc_load(k, m);
            worst = worst.max((expansion - load).abs() / load);
        }
    }
    Ok(worst)
}

/// Random weighted sum-rate instances with 2 to 4 users.
pub fn random_wsr_instance(rng: &mut ChaCha8Rng) -> Result<(SubsetWeights, ChannelState, f64)> {
    let k = rng.random_range(2..=4usize);
    let gains: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..2.0)).collect();
    let mut by_mask = vec![0.0; 1 << k];
    for w in by_mask.iter_mut().skip(1) {
        if rng.random_bool(0.7) {
            *w = rng.random_range(0.0..1.0);
        }
    }
    let power = rng.random_range(0.5..20.0);
    Ok((SubsetWeights::from_masked(k, by_mask)?, ChannelState::new(gains)?, power))
}

/// Largest relative gap between [`solve_wsr`] and the grid search over
/// `instances` random problems.
pub fn wsr_oracle_max_error(instances: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (w, h, p) = random_wsr_instance(&mut rng)?;
        let exact = solve_wsr(&w, &h, p)?.wsr;
        let grid = wsr_bruteforce(&w, &h, p, p / 1000.0)?;
        worst = worst.max((exact - grid).abs() / exact.abs().max(1e-9));
    }
    Ok(worst)
}

/// Largest gap between [`gamma_opt`] and a grid argmax of `V g(x) - U x`.
pub fn gamma_grid_max_error(instances: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let alpha = [0.0, 0.5, 1.0, 2.0, 5.0][rng.random_range(0..5)];
        let d = rng.random_range(0.01..1.0);
        let v = rng.random_range(1.0..100.0);
        let u = rng.random_range(0.0..200.0);
        let gmax = 2.0;
        let closed = gamma_opt(u, alpha, d, v, gmax);
        let obj = |x: f64| v * g_utility(x, alpha, d) - u * x;
        let n = 20_000;
        let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
        for i in 0..=n {
            let x = gmax * i as f64 / n as f64;
            if obj(x) > best {
                best = obj(x);
                best_x = x;
            }
        }
        // α = 0 ties when U = V: either end maximizes
        if alpha == 0.0 && (obj(closed) - best).abs() < 1e-9 {
            continue;
        }
        worst = worst.max((closed - best_x).abs());
    }
    worst
}

fn short(scenario: Scenario, k: usize, scheme: Scheme, alpha: f64, horizon: u64) -> Result<RunConfig> {
    let mut c = scenario.config(k)?;
    c.scheme = scheme;
    c.fairness.alpha = alpha;
    c.horizon = horizon;
    Ok(c)
}

/// Runs every check; never stops at the first failure.
pub fn run_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, r: Result<(bool, String)>| {
        out.push(match r {
            Ok((ok, detail)) => CheckResult::new(name, ok, detail),
            Err(e) => CheckResult::new(name, false, format!("error: {e}")),
        })
    };

    push(
        "placement normalization (K <= 12)",
        normalization_max_error(12).map(|e| (e <= 1e-12, format!("max relative error {e:.2e}"))),
    );
    push(
        "weighted sum rate vs grid search",
        wsr_oracle_max_error(200, 11).map(|e| (e <= 1e-3, format!("200 instances, max relative error {e:.2e}"))),
    );
    push("virtual arrivals vs grid argmax", {
        let e = gamma_grid_max_error(1000, 12);
        Ok((e <= 1e-3, format!("1000 instances, max gap {e:.2e}")))
    });
    push(
        "unicast anchor 0.865 file/slot",
        short(Scenario::DetTwoClass, 4, Scheme::UnicastOpp, 0.0, 20_000)
            .and_then(|c| run(&c))
            .map(|m| {
                let s = m.sum_rate();
                ((s - 0.865).abs() / 0.865 <= 0.01, format!("sum rate {s:.4}"))
            }),
    );
    push(
        "round-robin multicast vs closed form",
        short(Scenario::DetTwoClass, 6, Scheme::StandardCc, 0.0, 20_000)
            .and_then(|c| run(&c))
            .map(|m| {
                let a = m.analytic_rate.unwrap_or(f64::NAN);
                let e = m.rates.iter().map(|r| (r - a).abs() / a).fold(0.0, f64::max);
                (e <= 0.02, format!("analytic {a:.4}, max relative gap {e:.2e}"))
            }),
    );
    push("fixed seed gives identical CSV", {
        short(Scenario::SymFading, 3, Scheme::Proposed, 1.0, 2_000).and_then(|c| {
            let once = || -> Result<Vec<u8>> {
                let ms = compare(&c)?;
                let cs: Vec<RunConfig> = ms.iter().map(|m| RunConfig { scheme: m.scheme, ..c.clone() }).collect();
                let mut buf = Vec::new();
                write_csv(&mut buf, &cs, &ms)?;
                Ok(buf)
            };
            let (a, b) = (once()?, once()?);
            Ok((a == b, format!("{} bytes", a.len())))
        })
    });
    out
}
