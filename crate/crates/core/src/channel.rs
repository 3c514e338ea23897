//! Per-slot fading generation.
//!
//! Draws are keyed on `(seed, slot, user)`: the ChaCha keystream of the run
//! seed is addressed directly at word `2 (slot K + user)`, so any slot can be
//! regenerated without replaying history and runs are reproducible across
//! thread counts.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bc_capacity::ChannelState;
use crate::combinatorics::check_user_count;
use crate::error::{config, Result};

/// Independent keystreams derived from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Stream {
    Channel = 1,
    Arrivals = 2,
    Policy = 3,
    MonteCarlo = 4,
}

pub(crate) fn keyed_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Uniform on `(0, 1]`.
#[inline]
pub(crate) fn open_unit(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingKind {
    /// `h = β` in every slot.
    Deterministic,
    /// `h_k` exponential with mean `β_k`, independent over users and slots.
    IidExponential,
}

#[derive(Clone, Debug)]
pub struct ChannelModel {
    kind: FadingKind,
    mean_gains: Vec<f64>,
    seed: u64,
    base: ChaCha8Rng,
}

impl PartialEq for ChannelModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.mean_gains == other.mean_gains && self.seed == other.seed
    }
}

impl ChannelModel {
    pub fn new(kind: FadingKind, mean_gains: Vec<f64>, seed: u64) -> Result<Self> {
        check_user_count(mean_gains.len())?;
        if let Some(b) = mean_gains.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return config(format!("mean channel gain {b} must be positive"));
        }
        Ok(ChannelModel {
            kind,
            mean_gains,
            seed,
            base: keyed_rng(seed, Stream::Channel),
        })
    }

    pub fn kind(&self) -> FadingKind {
        self.kind
    }

    pub fn mean_gains(&self) -> &[f64] {
        &self.mean_gains
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn users(&self) -> usize {
        self.mean_gains.len()
    }

    pub fn sample(&self, slot: u64) -> ChannelState {
        let gains = match self.kind {
            FadingKind::Deterministic => self.mean_gains.clone(),
            FadingKind::IidExponential => {
                let k = self.mean_gains.len();
                let mut rng = self.base.clone();
                rng.set_word_pos(2 * (slot as u128) * k as u128);
                self.mean_gains
                    .iter()
                    .map(|&beta| -beta * open_unit(rng.next_u64()).ln())
                    .collect()
            }
        };
        ChannelState::new(gains).expect("validated gains")
    }
}

/// Mean gains with the first `ceil(K/2)` users strong (1.0) and the rest weak (0.2).
pub fn two_class_gains(users: usize) -> Vec<f64> {
    let strong = users.div_ceil(2);
    (0..users).map(|k| if k < strong { 1.0 } else { 0.2 }).collect()
}

pub fn symmetric_gains(users: usize) -> Vec<f64> {
    vec![1.0; users]
}

/// How mean gains are assigned to users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainProfile {
    Symmetric,
    TwoClass,
    Explicit(Vec<f64>),
}

impl GainProfile {
    pub fn gains(&self, users: usize) -> Result<Vec<f64>> {
        match self {
            GainProfile::Symmetric => Ok(symmetric_gains(users)),
            GainProfile::TwoClass => Ok(two_class_gains(users)),
            GainProfile::Explicit(g) if g.len() == users => Ok(g.clone()),
            GainProfile::Explicit(g) => config(format!("{} mean gains given for {users} users", g.len())),
        }
    }
}
