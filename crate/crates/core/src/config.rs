//! Flat TOML run configuration with units in the key names.
//!
//! Every key is optional; missing keys keep the value of the base
//! configuration (usually a scenario preset). [`FileConfig::resolved`] emits a
//! complete block that parses back to the same [`RunConfig`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{FadingKind, GainProfile};
use crate::error::{config, Result};
use crate::policies::ArrivalModel;
use crate::sim::{RunConfig, Scheme};
use crate::system::db_to_linear;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_memory: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file_size_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot_channel_uses: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_linear: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_kind: Option<FadingKind>,
    /// `symmetric`, `two_class` or `explicit`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_mean_gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utility_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tradeoff_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max_files: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max_files: Option<u32>,
    /// `infinite_backlog` or `stochastic`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrivals: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival_rates_files_per_slot: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrival_cap_files: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub static_load: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_slots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warmup_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_period_slots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Every field of `run`, power in linear scale.
    pub fn resolved(run: &RunConfig) -> Self {
        let (profile, gains) = match &run.profile {
            GainProfile::Symmetric => ("symmetric", None),
            GainProfile::TwoClass => ("two_class", None),
            GainProfile::Explicit(g) => ("explicit", Some(g.clone())),
        };
        let (arrivals, rates, cap) = match &run.arrivals {
            ArrivalModel::InfiniteBacklog => ("infinite_backlog", None, None),
            ArrivalModel::Stochastic { rates, cap } => ("stochastic", Some(rates.clone()), Some(*cap)),
        };
        FileConfig {
            scheme: Some(run.scheme),
            users: Some(run.params.users()),
            normalized_memory: Some(run.params.cache.memory),
            file_size_bits: Some(run.params.cache.file_bits),
            slot_channel_uses: Some(run.params.slot_channel_uses),
            power_linear: Some(run.params.power),
            power_db: None,
            channel_kind: Some(run.fading),
            channel_profile: Some(profile.to_string()),
            channel_mean_gains: gains,
            alpha: Some(run.fairness.alpha),
            utility_shift: Some(run.fairness.shift),
            tradeoff_v: Some(run.fairness.tradeoff),
            gamma_max_files: Some(run.fairness.gamma_max),
            sigma_max_files: Some(run.fairness.sigma_max),
            arrivals: Some(arrivals.to_string()),
            arrival_rates_files_per_slot: rates,
            arrival_cap_files: cap,
            static_load: Some(run.static_load),
            horizon_slots: Some(run.horizon),
            warmup_fraction: Some(run.warmup_fraction),
            sample_period_slots: Some(run.sample_period),
            seed: Some(run.seed),
        }
    }

    /// Applies the keys present here on top of `base` and validates the result.
    pub fn apply(&self, base: &RunConfig) -> Result<RunConfig> {
        let mut c = base.clone();
        if let Some(s) = self.scheme {
            c.scheme = s;
        }
        if let Some(k) = self.users {
            c.params.cache.users = k;
        }
        if let Some(m) = self.normalized_memory {
            c.params.cache.memory = m;
        }
        if let Some(f) = self.file_size_bits {
            c.params.cache.file_bits = f;
        }
        if let Some(t) = self.slot_channel_uses {
            c.params.slot_channel_uses = t;
        }
        match (self.power_linear, self.power_db) {
            (Some(_), Some(_)) => return config("give either power_linear or power_db, not both"),
            (Some(p), None) => c.params.power = p,
            (None, Some(db)) => c.params.power = db_to_linear(db),
            (None, None) => {}
        }
        if let Some(kind) = self.channel_kind {
            c.fading = kind;
        }
        match (self.channel_profile.as_deref(), &self.channel_mean_gains) {
            (Some("symmetric"), None) => c.profile = GainProfile::Symmetric,
            (Some("two_class"), None) => c.profile = GainProfile::TwoClass,
            (Some("explicit") | None, Some(g)) => c.profile = GainProfile::Explicit(g.clone()),
            (Some("explicit"), None) => return config("channel_profile = \"explicit\" needs channel_mean_gains"),
            (Some(p @ ("symmetric" | "two_class")), Some(_)) => {
                return config(format!("channel_mean_gains conflicts with channel_profile = \"{p}\""))
            }
            (Some(p), _) => return config(format!("unknown channel_profile '{p}'")),
            (None, None) => {}
        }
        if let Some(a) = self.alpha {
            c.fairness.alpha = a;
        }
        if let Some(d) = self.utility_shift {
            c.fairness.shift = d;
        }
        if let Some(v) = self.tradeoff_v {
            c.fairness.tradeoff = v;
        }
        if let Some(g) = self.gamma_max_files {
            c.fairness.gamma_max = g;
        }
        if let Some(s) = self.sigma_max_files {
            c.fairness.sigma_max = s;
        }
        c.arrivals = match self.arrivals.as_deref() {
            Some("infinite_backlog") => {
                if self.arrival_rates_files_per_slot.is_some() || self.arrival_cap_files.is_some() {
                    return config("arrival rates and cap need arrivals = \"stochastic\"");
                }
                ArrivalModel::InfiniteBacklog
            }
            Some("stochastic") => {
                let (rates, cap) = match (&self.arrival_rates_files_per_slot, self.arrival_cap_files) {
                    (Some(r), Some(cap)) => (r.clone(), cap),
                    _ => return config("stochastic arrivals need arrival_rates_files_per_slot and arrival_cap_files"),
                };
                ArrivalModel::Stochastic { rates, cap }
            }
            Some(other) => return config(format!("unknown arrivals '{other}'")),
            None => match (&base.arrivals, &self.arrival_rates_files_per_slot, self.arrival_cap_files) {
                (ArrivalModel::Stochastic { rates, cap }, r, k) => ArrivalModel::Stochastic {
                    rates: r.clone().unwrap_or_else(|| rates.clone()),
                    cap: k.unwrap_or(*cap),
                },
                (ArrivalModel::InfiniteBacklog, None, None) => ArrivalModel::InfiniteBacklog,
                _ => return config("arrival rates and cap need arrivals = \"stochastic\""),
            },
        };
        if let Some(l) = self.static_load {
            c.static_load = l;
        }
        if let Some(h) = self.horizon_slots {
            c.horizon = h;
        }
        if let Some(w) = self.warmup_fraction {
            c.warmup_fraction = w;
        }
        if let Some(s) = self.sample_period_slots {
            c.sample_period = s;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        c.validate()?;
        Ok(c)
    }
}
