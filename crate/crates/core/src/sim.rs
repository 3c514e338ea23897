//! The slot loop: channel draw, control decision, queue update, accounting.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc_capacity::ChannelState;
use crate::channel::{keyed_rng, open_unit, ChannelModel, FadingKind, GainProfile, Stream};
use crate::combinatorics::{binomial, codeword_bits, CodewordTable};
use crate::error::{config, Error, Result};
use crate::policies::{
    standard_cc_rate, symmetric_static_policy, ArrivalModel, FairnessConfig, ProposedPolicy, RoundRobinMulticast,
    StaticPolicy, UnicastOpportunistic,
};
use crate::queues::{apply_slot, DeliveryLedger, QueueState};
use crate::system::SystemParams;

/// Monte Carlo draws for channel expectations.
pub const MC_DRAWS: usize = 1_000_000;

/// Seeds are kept to 63 bits so that config files can carry them.
pub const MAX_SEED: u64 = i64::MAX as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    UnicastOpp,
    StandardCc,
    Static,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Proposed, Scheme::UnicastOpp, Scheme::StandardCc, Scheme::Static];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::UnicastOpp => "unicast_opp",
            Scheme::StandardCc => "standard_cc",
            Scheme::Static => "static",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// Everything that determines one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub params: SystemParams,
    pub fading: FadingKind,
    pub profile: GainProfile,
    pub arrivals: ArrivalModel,
    pub fairness: FairnessConfig,
    pub horizon: u64,
    /// Leading fraction of slots left out of time averages.
    pub warmup_fraction: f64,
    /// Slots between trajectory samples.
    pub sample_period: u64,
    /// Admission scale of the static policy relative to its boundary point.
    pub static_load: f64,
    pub seed: u64,
}

impl RunConfig {
    /// Proposed scheme, infinite backlog, default fairness, 10⁵ slots.
    pub fn new(params: SystemParams, fading: FadingKind, profile: GainProfile) -> Self {
        RunConfig {
            scheme: Scheme::Proposed,
            params,
            fading,
            profile,
            arrivals: ArrivalModel::InfiniteBacklog,
            fairness: FairnessConfig::default(),
            horizon: 100_000,
            warmup_fraction: 0.1,
            sample_period: 100,
            static_load: 0.8,
            seed: 1,
        }
    }

    pub fn users(&self) -> usize {
        self.params.users()
    }

    pub fn mean_gains(&self) -> Result<Vec<f64>> {
        self.profile.gains(self.users())
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        ChannelModel::new(self.fading, self.mean_gains()?, self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.fairness.validate()?;
        self.arrivals.validate(self.users(), &self.fairness)?;
        self.channel_model()?;
        if self.horizon == 0 {
            return config("horizon must be at least one slot");
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return config(format!("warm-up fraction {} not in [0, 1)", self.warmup_fraction));
        }
        if self.seed > MAX_SEED {
            return config(format!("seed {} exceeds {MAX_SEED}", self.seed));
        }
        if self.sample_period == 0 {
            return config("sample period must be at least one slot");
        }
        match self.scheme {
            Scheme::StandardCc if !self.arrivals.is_infinite() => {
                config("standard coded caching is only defined for infinite backlog")
            }
            Scheme::Static if self.fading != FadingKind::Deterministic => {
                config("the static policy needs a deterministic channel")
            }
            Scheme::Static if !(self.static_load > 0.0 && self.static_load.is_finite()) => {
                config(format!("static load {} must be positive", self.static_load))
            }
            _ => Ok(()),
        }
    }

    pub fn warmup_slots(&self) -> u64 {
        (self.warmup_fraction * self.horizon as f64).floor() as u64
    }
}

/// One sampled point of a run's trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub slot: u64,
    pub user_queue_files: f64,
    pub codeword_queue_bits: f64,
    pub virtual_queue_files: f64,
    /// `Σ U + Σ S + Σ Q / F²`.
    pub weighted_total: f64,
    /// Files delivered so far, summed over users.
    pub delivered_files: f64,
}

/// Diagnostic constant of the drift bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BEstimate {
    pub value: f64,
    pub std_err: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub scheme: Scheme,
    pub users: usize,
    pub alpha: f64,
    pub tradeoff: f64,
    pub seed: u64,
    pub horizon: u64,
    pub measured_slots: u64,
    /// Delivered files per slot from drained bits, per user.
    pub rates: Vec<f64>,
    /// Files per slot from offered service `T μ`, per user.
    pub offered_rates: Vec<f64>,
    /// `Σ_k g(r̄_k)`.
    pub utility: f64,
    pub admitted_rates: Vec<f64>,
    pub rejected_rates: Vec<f64>,
    /// Time-average user queue per user (files).
    pub avg_user_queue: Vec<f64>,
    /// Time-average codeword backlog decodable by each user (bits).
    pub avg_codeword_queue: Vec<f64>,
    /// Time-average virtual queue per user.
    pub avg_virtual_queue: Vec<f64>,
    /// Time-average of `Σ_I Q_I` (bits).
    pub avg_codeword_total: f64,
    /// Time-average of `Σ U + Σ S + Σ Q / F²`.
    pub avg_weighted_total: f64,
    /// Closed-form or Monte Carlo rate of standard coded caching.
    pub analytic_rate: Option<f64>,
    pub b_estimate: BEstimate,
    pub trajectory: Vec<TrajectorySample>,
}

impl RunMetrics {
    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// `(max - min) / max` of the per-user rates.
    pub fn rate_spread(&self) -> f64 {
        let max = self.rates.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.rates.iter().cloned().fold(f64::MAX, f64::min);
        if max <= 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }

    /// Sum rate for `α = 0`, otherwise the utility.
    pub fn objective(&self) -> f64 {
        if self.alpha == 0.0 {
            self.sum_rate()
        } else {
            self.utility
        }
    }
}

#[derive(Clone, Debug)]
enum Engine {
    Proposed(Box<ProposedPolicy>),
    Unicast {
        policy: UnicastOpportunistic,
        /// Bits still owed per user under stochastic arrivals.
        backlog: Vec<f64>,
    },
    StandardCc(RoundRobinMulticast),
    Static(Box<StaticPolicy>, CodewordTable),
}

/// A run in progress, advanced one slot at a time.
#[derive(Clone, Debug)]
pub struct Simulation {
    config: RunConfig,
    channel: ChannelModel,
    arrivals_rng: ChaCha8Rng,
    state: QueueState,
    ledger: DeliveryLedger,
    engine: Engine,
    slot: u64,
    admitting: bool,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let k = config.users();
        let p = config.params;
        let channel = config.channel_model()?;
        let engine = match config.scheme {
            Scheme::Proposed => Engine::Proposed(Box::new(ProposedPolicy::new(p, config.fairness)?)),
            Scheme::UnicastOpp => Engine::Unicast {
                policy: UnicastOpportunistic::new(k, config.fairness.alpha),
                backlog: vec![0.0; k],
            },
            Scheme::StandardCc => Engine::StandardCc(RoundRobinMulticast::new(&p.cache)?),
            Scheme::Static => {
                let h = channel.sample(0);
                let policy = symmetric_static_policy(
                    &p,
                    &h,
                    config.static_load,
                    config.fairness.sigma_max as f64,
                    config.seed,
                )?;
                Engine::Static(Box::new(policy), CodewordTable::new(&p.cache)?)
            }
        };
        Ok(Simulation {
            arrivals_rng: keyed_rng(config.seed, Stream::Arrivals),
            state: QueueState::empty(k),
            ledger: DeliveryLedger::new(k, p.missing_bits()),
            channel,
            engine,
            slot: 0,
            admitting: true,
            config,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn state(&self) -> &QueueState {
        &self.state
    }

    pub fn ledger(&self) -> &DeliveryLedger {
        &self.ledger
    }

    /// Slots executed so far.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Stops all admissions from the next slot on; delivery continues.
    pub fn halt_admissions(&mut self) {
        self.admitting = false;
    }

    /// Bits not yet delivered (codeword backlog plus unicast backlog).
    pub fn pending_bits(&self) -> f64 {
        let extra = match &self.engine {
            Engine::Unicast { backlog, .. } => backlog.iter().sum(),
            _ => 0.0,
        };
        self.state.total_codeword_bits() + extra
    }

    pub fn step(&mut self) -> Result<()> {
        let h = self.channel.sample(self.slot);
        let p = self.config.params;
        let k = p.users();
        let demands = if self.admitting {
            self.config.arrivals.draw(&mut self.arrivals_rng)
        } else {
            None
        };
        match &mut self.engine {
            Engine::Proposed(policy) => {
                let mut d = policy.decide(&self.state, &h, demands.as_deref())?;
                if !self.admitting {
                    d.admissions.iter_mut().for_each(|a| *a = 0.0);
                    d.virtual_arrivals.iter_mut().for_each(|g| *g = 0.0);
                }
                let out = apply_slot(&mut self.state, &d, &p, policy.table())?;
                self.ledger.update(&out.served, &d.admissions);
                self.ledger.record_offered(&d.rates, p.slot_channel_uses);
                self.ledger.record_combined(&out.combined);
                if let Some(dem) = &demands {
                    let rejected: Vec<f64> = dem.iter().zip(&d.admissions).map(|(x, a)| x - a).collect();
                    self.ledger.record_rejected(&rejected);
                }
            }
            Engine::Static(policy, table) => {
                let mut d = policy.step(&h)?;
                if !self.admitting {
                    d.admissions.iter_mut().for_each(|a| *a = 0.0);
                }
                let out = apply_slot(&mut self.state, &d, &p, table)?;
                self.ledger.update(&out.served, &d.admissions);
                self.ledger.record_offered(&d.rates, p.slot_channel_uses);
                self.ledger.record_combined(&out.combined);
            }
            Engine::Unicast { policy, backlog } => {
                let infinite = self.config.arrivals.is_infinite() && self.admitting;
                let eligible: Vec<bool> = backlog.iter().map(|&b| b > 0.0).collect();
                let pick = policy.select(&h, p.power, (!infinite).then_some(&eligible[..]));
                let mut bits = vec![0.0; k];
                let mut offered = vec![0.0; k];
                let mut served_rate = 0.0;
                if let Some((u, r)) = pick {
                    let cap = p.slot_channel_uses * r;
                    let sent = if infinite { cap } else { cap.min(backlog[u]) };
                    if !infinite {
                        backlog[u] -= sent;
                    }
                    bits[u] = sent;
                    offered[u] = cap;
                    served_rate = sent / p.slot_channel_uses;
                }
                policy.record(pick.map(|(u, _)| u), served_rate);
                let mut admitted = vec![0.0; k];
                if let Some(dem) = &demands {
                    for ((b, a), x) in backlog.iter_mut().zip(admitted.iter_mut()).zip(dem) {
                        *b += x * p.missing_bits();
                        *a = *x;
                    }
                }
                for (s, b) in self.state.user.iter_mut().zip(backlog.iter()) {
                    *s = b / p.missing_bits();
                }
                self.ledger.credit_users(&bits, &offered);
                for (acc, a) in self.ledger.admitted_files.iter_mut().zip(&admitted) {
                    *acc += a;
                }
                self.ledger.tick();
            }
            Engine::StandardCc(rr) => {
                let worst = h.gains().iter().cloned().fold(f64::INFINITY, f64::min);
                let cap = p.slot_channel_uses * (p.power * worst).ln_1p() / std::f64::consts::LN_2;
                let bits = rr.step(cap);
                self.ledger.credit_users(&bits, &bits);
                self.ledger.tick();
            }
        }
        self.slot += 1;
        Ok(())
    }

    fn sample(&self) -> TrajectorySample {
        let f = self.config.params.file_bits();
        TrajectorySample {
            slot: self.slot,
            user_queue_files: self.state.user.iter().sum(),
            codeword_queue_bits: self.state.total_codeword_bits(),
            virtual_queue_files: self.state.virtual_.iter().sum(),
            weighted_total: self.state.weighted_total(f),
            delivered_files: self.ledger.delivered().iter().sum(),
        }
    }
}

#[derive(Default)]
struct Averages {
    slots: u64,
    user: Vec<f64>,
    codeword_for: Vec<f64>,
    virtual_: Vec<f64>,
    codeword_total: f64,
    weighted: f64,
}

impl Averages {
    fn new(k: usize) -> Self {
        Averages {
            user: vec![0.0; k],
            codeword_for: vec![0.0; k],
            virtual_: vec![0.0; k],
            ..Default::default()
        }
    }

    fn add(&mut self, s: &QueueState, file_bits: f64) {
        self.slots += 1;
        for k in 0..s.users() {
            self.user[k] += s.user[k];
            self.codeword_for[k] += s.codeword_bits_for(k);
            self.virtual_[k] += s.virtual_[k];
        }
        self.codeword_total += s.total_codeword_bits();
        self.weighted += s.weighted_total(file_bits);
    }

    fn mean(v: &[f64], n: f64) -> Vec<f64> {
        v.iter().map(|x| x / n).collect()
    }
}

/// Runs `config.horizon` slots and reports averages over the slots after warm-up.
pub fn run(config: &RunConfig) -> Result<RunMetrics> {
    let (metrics, _) = run_inner(config)?;
    Ok(metrics)
}

fn run_inner(config: &RunConfig) -> Result<(RunMetrics, Simulation)> {
    let mut sim = Simulation::new(config.clone())?;
    let b_estimate = estimate_b(config)?;
    let k = config.users();
    let f = config.params.file_bits();
    let warm = config.warmup_slots();
    let mut base = sim.ledger.clone();
    let mut avg = Averages::new(k);
    let mut trajectory = Vec::new();
    for t in 0..config.horizon {
        if t == warm {
            base = sim.ledger.clone();
        }
        sim.step()?;
        if t >= warm {
            avg.add(&sim.state, f);
        }
        if t % config.sample_period == 0 || t + 1 == config.horizon {
            trajectory.push(sim.sample());
        }
    }

    let n = avg.slots as f64;
    let missing = config.params.missing_bits();
    let per_slot = |now: &[f64], then: &[f64], scale: f64| -> Vec<f64> {
        now.iter().zip(then).map(|(a, b)| (a - b) / scale / n).collect()
    };
    let rates = per_slot(&sim.ledger.drained_bits, &base.drained_bits, missing);
    let utility = rates.iter().map(|&r| config.fairness.utility(r)).sum();
    let analytic_rate = match config.scheme {
        Scheme::StandardCc => {
            let model = config.channel_model()?;
            let r = standard_cc_rate(&config.params.cache, config.params.slot_channel_uses, config.params.power, &model, MC_DRAWS)?;
            Some(r.per_user)
        }
        _ => None,
    };
    let metrics = RunMetrics {
        scheme: config.scheme,
        users: k,
        alpha: config.fairness.alpha,
        tradeoff: config.fairness.tradeoff,
        seed: config.seed,
        horizon: config.horizon,
        measured_slots: avg.slots,
        offered_rates: per_slot(&sim.ledger.offered_bits, &base.offered_bits, missing),
        admitted_rates: per_slot(&sim.ledger.admitted_files, &base.admitted_files, 1.0),
        rejected_rates: per_slot(&sim.ledger.rejected_files, &base.rejected_files, 1.0),
        rates,
        utility,
        avg_user_queue: Averages::mean(&avg.user, n),
        avg_codeword_queue: Averages::mean(&avg.codeword_for, n),
        avg_virtual_queue: Averages::mean(&avg.virtual_, n),
        avg_codeword_total: avg.codeword_total / n,
        avg_weighted_total: avg.weighted / n,
        analytic_rate,
        b_estimate,
        trajectory,
    };
    Ok((metrics, sim))
}

/// Totals after stopping admissions at the horizon and serving until every
/// queue is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct DrainReport {
    pub admitted_files: f64,
    pub delivered_files: f64,
    pub drain_slots: u64,
}

/// [`run`] followed by a drain phase of at most `max_drain_slots` slots.
pub fn run_with_drain(config: &RunConfig, max_drain_slots: u64) -> Result<(RunMetrics, DrainReport)> {
    if !matches!(config.scheme, Scheme::Proposed | Scheme::Static) {
        return config_err_drain(config.scheme);
    }
    let (metrics, mut sim) = run_inner(config)?;
    sim.halt_admissions();
    let start = sim.slot;
    while !sim.state.is_drained() {
        if sim.slot - start >= max_drain_slots {
            return Err(Error::Contract(format!(
                "queues not empty after {max_drain_slots} drain slots"
            )));
        }
        sim.step()?;
    }
    let report = DrainReport {
        admitted_files: sim.ledger.admitted_files.iter().sum(),
        delivered_files: sim.ledger.delivered().iter().sum(),
        drain_slots: sim.slot - start,
    };
    Ok((metrics, report))
}

fn config_err_drain<T>(scheme: Scheme) -> Result<T> {
    config(format!("scheme {scheme} has no finite backlog to drain"))
}

/// `B` from per-user second moments `E[(log2(1 + P h_k))²]`.
pub fn b_constant(params: &SystemParams, gamma_max: f64, sigma_max: f64, rate_second_moments: &[f64]) -> f64 {
    let k = params.users();
    let f = params.file_bits();
    let fanout = 2f64.powi(k as i32 - 1);
    let per_user = gamma_max * gamma_max + 0.5 * (fanout * sigma_max).powi(2);
    let mut codeword = 0.0;
    for j in 1..=k {
        for i in 1..=j {
            let b = codeword_bits(j, i, &params.cache).expect("sizes in range");
            codeword += binomial(k, j) * binomial(j, i) * (sigma_max * b).powi(2);
        }
    }
    let t = params.slot_channel_uses;
    let channel = t * t / (2.0 * f * f) * fanout * rate_second_moments.iter().sum::<f64>();
    k as f64 * per_user + codeword / (2.0 * f * f) + channel
}

/// Evaluates `B` for a run configuration: exactly for deterministic channels,
/// by [`MC_DRAWS`] Monte Carlo draws per user otherwise.
pub fn estimate_b(config: &RunConfig) -> Result<BEstimate> {
    config.validate()?;
    let p = config.params;
    let gains = config.mean_gains()?;
    let sq = |h: f64| ((p.power * h).ln_1p() / std::f64::consts::LN_2).powi(2);
    let (moments, se, exact) = match config.fading {
        FadingKind::Deterministic => (gains.iter().map(|&b| sq(b)).collect::<Vec<_>>(), 0.0, true),
        FadingKind::IidExponential => {
            let mut rng = keyed_rng(config.seed, Stream::MonteCarlo);
            let mut moments = Vec::with_capacity(gains.len());
            let mut var_sum = 0.0;
            for &beta in &gains {
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..MC_DRAWS {
                    let x = sq(-beta * open_unit(rng.next_u64()).ln());
                    s1 += x;
                    s2 += x * x;
                }
                let n = MC_DRAWS as f64;
                let mean = s1 / n;
                var_sum += (s2 / n - mean * mean).max(0.0) / n;
                moments.push(mean);
            }
            (moments, var_sum.sqrt(), false)
        }
    };
    let fz = &config.fairness;
    let value = b_constant(&p, fz.gamma_max, fz.sigma_max as f64, &moments);
    let t = p.slot_channel_uses;
    let f = p.file_bits();
    let fanout = 2f64.powi(p.users() as i32 - 1);
    Ok(BEstimate {
        value,
        std_err: t * t / (2.0 * f * f) * fanout * se,
        exact,
    })
}

/// Proposed, unicast and (under infinite backlog) standard coded caching on
/// the same configuration and seed.
pub fn compare(config: &RunConfig) -> Result<Vec<RunMetrics>> {
    let mut schemes = vec![Scheme::Proposed, Scheme::UnicastOpp];
    if config.arrivals.is_infinite() {
        schemes.push(Scheme::StandardCc);
    }
    let configs: Vec<RunConfig> = schemes
        .into_iter()
        .map(|s| RunConfig {
            scheme: s,
            ..config.clone()
        })
        .collect();
    run_all(&configs)
}

/// Runs independent configurations in parallel, results in input order.
pub fn run_all(configs: &[RunConfig]) -> Result<Vec<RunMetrics>> {
    for c in configs {
        c.validate()?;
    }
    configs.par_iter().map(run).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Users,
    Tradeoff,
    Alpha,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" | "users" => Ok(SweepAxis::Users),
            "V" | "v" | "tradeoff" => Ok(SweepAxis::Tradeoff),
            "alpha" => Ok(SweepAxis::Alpha),
            _ => config(format!("unknown sweep axis '{s}' (expected K, V or alpha)")),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sweep run at `value`; depends only on the base seed and the value.
pub fn sweep_seed(base: u64, value: f64) -> u64 {
    splitmix64(base ^ splitmix64(value.to_bits())) & MAX_SEED
}

/// `base` with one axis set to `value`.
pub fn with_axis(base: &RunConfig, axis: SweepAxis, value: f64) -> Result<RunConfig> {
    let mut c = base.clone();
    match axis {
        SweepAxis::Users => {
            if value.fract() != 0.0 || value < 1.0 {
                return config(format!("user count {value} is not a positive integer"));
            }
            let k = value as usize;
            c.params.cache.users = k;
            if let ArrivalModel::Stochastic { rates, cap } = &base.arrivals {
                let first = rates.first().copied().unwrap_or(0.0);
                if rates.iter().any(|&r| r != first) {
                    return config("a user sweep needs identical per-user arrival rates");
                }
                c.arrivals = ArrivalModel::Stochastic {
                    rates: vec![first; k],
                    cap: *cap,
                };
            }
        }
        SweepAxis::Tradeoff => c.fairness.tradeoff = value,
        SweepAxis::Alpha => c.fairness.alpha = value,
    }
    c.seed = sweep_seed(base.seed, value);
    c.validate()?;
    Ok(c)
}

/// Independent runs along one axis, in the order of `values`.
pub fn sweep(base: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<RunMetrics>> {
    if values.is_empty() {
        return config("sweep needs at least one value");
    }
    let configs = values
        .iter()
        .map(|&v| with_axis(base, axis, v))
        .collect::<Result<Vec<_>>>()?;
    run_all(&configs)
}

/// Sampled channel of slot `t`, exposed for inspection tools.
pub fn channel_at(config: &RunConfig, t: u64) -> Result<ChannelState> {
    Ok(config.channel_model()?.sample(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::two_class_gains;
    use crate::combinatorics::SubsetId;
    use crate::policies::ProposedPolicy;

    fn base(k: usize, fading: FadingKind, profile: GainProfile) -> RunConfig {
        let p = SystemParams::new(k, 0.6, 1000.0, 100.0, 10.0).unwrap();
        RunConfig::new(p, fading, profile)
    }

    #[test]
    fn horizon_one_matches_one_update() {
        let mut c = base(2, FadingKind::Deterministic, GainProfile::TwoClass);
        c.horizon = 1;
        let m = run(&c).unwrap();
        assert_eq!(m.measured_slots, 1);

        let policy = ProposedPolicy::new(c.params, c.fairness).unwrap();
        let mut s = QueueState::empty(2);
        let h = ChannelState::new(two_class_gains(2)).unwrap();
        let d = policy.decide(&s, &h, None).unwrap();
        apply_slot(&mut s, &d, &c.params, policy.table()).unwrap();
        // empty start: everyone admits γ_max, nothing is combined or sent yet
        assert_eq!(s.user, vec![2.0, 2.0]);
        assert_eq!(m.avg_user_queue, s.user);
        assert_eq!(m.avg_virtual_queue, s.virtual_);
        assert_eq!(m.rates, vec![0.0, 0.0]);
    }

    #[test]
    fn horizon_zero_is_rejected() {
        let mut c = base(2, FadingKind::Deterministic, GainProfile::TwoClass);
        c.horizon = 0;
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn b_reduces_to_channel_term() {
        let p = SystemParams::new(3, 0.6, 1000.0, 100.0, 10.0).unwrap();
        let m = [2.0, 3.0, 4.0];
        let b = b_constant(&p, 0.0, 0.0, &m);
        assert!((b - 1e4 / 2e6 * 4.0 * 9.0).abs() < 1e-12);
    }

    #[test]
    fn b_codeword_term_by_enumeration() {
        let p = SystemParams::new(3, 0.6, 1000.0, 100.0, 10.0).unwrap();
        let t = CodewordTable::new(&p.cache).unwrap();
        let mut sum = 0.0;
        for j in 1u32..8 {
            let jj = SubsetId::new(j).unwrap();
            for i in jj.subsets() {
                sum += (2.0 * t.for_pair(jj, i)).powi(2);
            }
        }
        let expect = 3.0 * (1.0 + 0.5 * 64.0) + sum / 2e6;
        assert!((b_constant(&p, 1.0, 2.0, &[0.0; 3]) - expect).abs() < 1e-9);
    }

    #[test]
    fn deterministic_b_is_exact() {
        let c = base(2, FadingKind::Deterministic, GainProfile::TwoClass);
        let b = estimate_b(&c).unwrap();
        assert!(b.exact);
        assert_eq!(b.std_err, 0.0);
        let m = [11f64.log2().powi(2), 3f64.log2().powi(2)];
        assert_eq!(b.value, b_constant(&c.params, 2.0, 2.0, &m));
    }

    #[test]
    fn sweep_rejects_empty_axis() {
        let c = base(2, FadingKind::Deterministic, GainProfile::TwoClass);
        assert!(sweep(&c, SweepAxis::Users, &[]).is_err());
        assert!(with_axis(&c, SweepAxis::Users, 2.5).is_err());
    }

    #[test]
    fn sweep_seeds_are_order_independent() {
        assert_eq!(sweep_seed(7, 100.0), sweep_seed(7, 100.0));
        assert_ne!(sweep_seed(7, 100.0), sweep_seed(7, 1000.0));
        assert_ne!(sweep_seed(7, 100.0), sweep_seed(8, 100.0));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("foo".parse::<Scheme>().is_err());
    }
}
