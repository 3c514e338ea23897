use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_user_count, CacheParams};
use crate::error::{config, Result};

/// Physical constants of one deployment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cache: CacheParams,
    /// Channel uses per slot.
    pub slot_channel_uses: f64,
    /// Transmit power budget (linear, noise-normalized).
    pub power: f64,
}

impl SystemParams {
    pub fn new(users: usize, memory: f64, file_bits: f64, slot_channel_uses: f64, power: f64) -> Result<Self> {
        let p = SystemParams {
            cache: CacheParams {
                users,
                memory,
                file_bits,
            },
            slot_channel_uses,
            power,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_user_count(self.cache.users)?;
        self.cache
            .validate()
            .map_err(|e| crate::Error::Config(e.to_string()))?;
        if self.cache.memory >= 1.0 {
            return config("normalized memory must be below 1 for delivery to carry any bits");
        }
        if !(self.slot_channel_uses > 0.0 && self.slot_channel_uses.is_finite()) {
            return config(format!("slot length {} must be positive", self.slot_channel_uses));
        }
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return config(format!("power {} must be finite and nonnegative", self.power));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.cache.users
    }

    pub fn file_bits(&self) -> f64 {
        self.cache.file_bits
    }

    pub fn missing_bits(&self) -> f64 {
        self.cache.missing_bits()
    }
}

/// Converts a power given in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
