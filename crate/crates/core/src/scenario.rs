//! Named presets: m = 0.6, P = 10 dB, F = 1000 bits, T = 100 channel uses.

use std::fmt;
use std::str::FromStr;

use crate::channel::{FadingKind, GainProfile};
use crate::error::{Error, Result};
use crate::sim::RunConfig;
use crate::system::{db_to_linear, SystemParams};

pub const PRESET_MEMORY: f64 = 0.6;
pub const PRESET_POWER_DB: f64 = 10.0;
pub const PRESET_FILE_BITS: f64 = 1000.0;
pub const PRESET_SLOT_USES: f64 = 100.0;
pub const PRESET_USERS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Fixed gains: half the users at 1.0, the rest at 0.2.
    DetTwoClass,
    /// Exponential fading with unit mean for everyone.
    SymFading,
    /// Exponential fading with two-class means.
    TwoClassFading,
    /// Preset constants with a symmetric deterministic channel, meant to be
    /// overridden by a config file.
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::DetTwoClass,
        Scenario::SymFading,
        Scenario::TwoClassFading,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DetTwoClass => "det_two_class",
            Scenario::SymFading => "sym_fading",
            Scenario::TwoClassFading => "two_class_fading",
            Scenario::Custom => "custom",
        }
    }

    /// Preset run configuration for `users` users.
    pub fn config(self, users: usize) -> Result<RunConfig> {
        let params = SystemParams::new(
            users,
            PRESET_MEMORY,
            PRESET_FILE_BITS,
            PRESET_SLOT_USES,
            db_to_linear(PRESET_POWER_DB),
        )?;
        let (fading, profile) = match self {
            Scenario::DetTwoClass => (FadingKind::Deterministic, GainProfile::TwoClass),
            Scenario::SymFading => (FadingKind::IidExponential, GainProfile::Symmetric),
            Scenario::TwoClassFading => (FadingKind::IidExponential, GainProfile::TwoClass),
            Scenario::Custom => (FadingKind::Deterministic, GainProfile::Symmetric),
        };
        let c = RunConfig::new(params, fading, profile);
        c.validate()?;
        Ok(c)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}
