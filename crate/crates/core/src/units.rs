//! Atomic-unit constants and unit-tagged quantities.
//!
//! Everything inside the library runs in atomic units (ħ = 1, energies in
//! hartree, times in units of ħ/E_h). Conversions to SI happen only when
//! reading configs and writing output.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::ManifoldSpec;

/// One atomic unit of time in seconds.
pub const AU_TIME_SECONDS: f64 = 2.418_884_326_585_7e-17;

pub fn au_to_seconds(t: f64) -> f64 {
    t * AU_TIME_SECONDS
}

pub fn au_to_ns(t: f64) -> f64 {
    t * AU_TIME_SECONDS * 1e9
}

pub fn seconds_to_au(t: f64) -> f64 {
    t / AU_TIME_SECONDS
}

/// Angular frequency in a.u. from an ordinary frequency in Hz.
pub fn hz_to_au_angular(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f * AU_TIME_SECONDS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Au,
    S,
    Ms,
    Us,
    Ns,
    Ps,
    Fs,
    /// Classical Kepler period of the manifold.
    Kepler,
    /// One packet slot, T_K/d.
    Slot,
    /// Revival time T_rev.
    Revival,
}

impl TimeUnit {
    fn tag(self) -> &'static str {
        match self {
            TimeUnit::Au => "au",
            TimeUnit::S => "s",
            TimeUnit::Ms => "ms",
            TimeUnit::Us => "us",
            TimeUnit::Ns => "ns",
            TimeUnit::Ps => "ps",
            TimeUnit::Fs => "fs",
            TimeUnit::Kepler => "kepler",
            TimeUnit::Slot => "slot",
            TimeUnit::Revival => "revival",
        }
    }

    fn parse(tag: &str) -> Option<Self> {
        Some(match tag {
            "au" | "a.u." => TimeUnit::Au,
            "s" => TimeUnit::S,
            "ms" => TimeUnit::Ms,
            "us" | "μs" | "µs" => TimeUnit::Us,
            "ns" => TimeUnit::Ns,
            "ps" => TimeUnit::Ps,
            "fs" => TimeUnit::Fs,
            "kepler" | "keplers" => TimeUnit::Kepler,
            "slot" | "slots" => TimeUnit::Slot,
            "revival" | "revivals" => TimeUnit::Revival,
            _ => return None,
        })
    }
}

/// A time with an explicit unit tag, e.g. `"0.89 ns"` or `"1 kepler"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TimeQuantity {
    pub value: f64,
    pub unit: TimeUnit,
}

impl TimeQuantity {
    pub fn new(value: f64, unit: TimeUnit) -> Self {
        Self { value, unit }
    }

    pub fn au(value: f64) -> Self {
        Self::new(value, TimeUnit::Au)
    }

    pub fn kepler(value: f64) -> Self {
        Self::new(value, TimeUnit::Kepler)
    }

    /// Resolve to atomic units against a manifold.
    pub fn to_au(&self, spec: &ManifoldSpec) -> f64 {
        let scales = spec.time_scales();
        let v = self.value;
        match self.unit {
            TimeUnit::Au => v,
            TimeUnit::S => seconds_to_au(v),
            TimeUnit::Ms => seconds_to_au(v * 1e-3),
            TimeUnit::Us => seconds_to_au(v * 1e-6),
            TimeUnit::Ns => seconds_to_au(v * 1e-9),
            TimeUnit::Ps => seconds_to_au(v * 1e-12),
            TimeUnit::Fs => seconds_to_au(v * 1e-15),
            TimeUnit::Kepler => v * scales.t_kepler,
            TimeUnit::Slot => v * scales.t_kepler / spec.d() as f64,
            TimeUnit::Revival => v * scales.t_revival,
        }
    }
}

impl fmt::Display for TimeQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.tag())
    }
}

impl FromStr for TimeQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (value, unit) = split_quantity(s)?;
        let unit = TimeUnit::parse(unit).ok_or_else(|| Error::Quantity(s.to_string()))?;
        Ok(Self { value, unit })
    }
}

impl TryFrom<String> for TimeQuantity {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TimeQuantity> for String {
    fn from(q: TimeQuantity) -> String {
        q.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyUnit {
    /// Angular frequency in atomic units.
    Au,
    Hz,
    Mhz,
    Ghz,
    /// Multiples of the Kepler angular frequency 2π/T_K.
    Kepler,
}

/// An angular frequency with an explicit unit tag, e.g. `"0 au"` or `"0.5 ghz"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FrequencyQuantity {
    pub value: f64,
    pub unit: FrequencyUnit,
}

impl FrequencyQuantity {
    pub fn au(value: f64) -> Self {
        Self {
            value,
            unit: FrequencyUnit::Au,
        }
    }

    pub fn to_au(&self, spec: &ManifoldSpec) -> f64 {
        let v = self.value;
        match self.unit {
            FrequencyUnit::Au => v,
            FrequencyUnit::Hz => hz_to_au_angular(v),
            FrequencyUnit::Mhz => hz_to_au_angular(v * 1e6),
            FrequencyUnit::Ghz => hz_to_au_angular(v * 1e9),
            FrequencyUnit::Kepler => v * 2.0 * std::f64::consts::PI / spec.time_scales().t_kepler,
        }
    }
}

impl fmt::Display for FrequencyQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.unit {
            FrequencyUnit::Au => "au",
            FrequencyUnit::Hz => "hz",
            FrequencyUnit::Mhz => "mhz",
            FrequencyUnit::Ghz => "ghz",
            FrequencyUnit::Kepler => "kepler",
        };
        write!(f, "{} {}", self.value, tag)
    }
}

impl FromStr for FrequencyQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (value, unit) = split_quantity(s)?;
        let unit = match unit.to_ascii_lowercase().as_str() {
            "au" | "a.u." => FrequencyUnit::Au,
            "hz" => FrequencyUnit::Hz,
            "mhz" => FrequencyUnit::Mhz,
            "ghz" => FrequencyUnit::Ghz,
            "kepler" => FrequencyUnit::Kepler,
            _ => return Err(Error::Quantity(s.to_string())),
        };
        Ok(Self { value, unit })
    }
}

impl TryFrom<String> for FrequencyQuantity {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FrequencyQuantity> for String {
    fn from(q: FrequencyQuantity) -> String {
        q.to_string()
    }
}

fn split_quantity(s: &str) -> Result<(f64, &str)> {
    let mut parts = s.split_whitespace();
    let (Some(v), Some(u), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Quantity(s.to_string()));
    };
    let value: f64 = v.parse().map_err(|_| Error::Quantity(s.to_string()))?;
    if !value.is_finite() {
        return Err(Error::Quantity(s.to_string()));
    }
    Ok((value, u))
}
