//! The d-level Rydberg manifold |n̄ + j, l=1, m=0⟩ and its spectrum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::au_to_seconds;

/// Which spectrum drives free evolution.
///
/// `Exact` is the hydrogenic −1/(2n²) ladder; the Taylor modes truncate its
/// expansion about n̄ and exist for idealised comparisons (`Taylor1` is the
/// equally spaced Kepler regime in which free evolution is a pure SHIFT).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    #[default]
    Exact,
    Taylor1,
    Taylor2,
    Taylor3,
}

impl SpectrumMode {
    pub fn order(self) -> Option<u32> {
        match self {
            SpectrumMode::Exact => None,
            SpectrumMode::Taylor1 => Some(1),
            SpectrumMode::Taylor2 => Some(2),
            SpectrumMode::Taylor3 => Some(3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub t_kepler: f64,
    pub t_revival: f64,
    pub t_superrevival: f64,
}

impl TimeScales {
    pub fn in_seconds(&self) -> [f64; 3] {
        [
            au_to_seconds(self.t_kepler),
            au_to_seconds(self.t_revival),
            au_to_seconds(self.t_superrevival),
        ]
    }

    /// Time of the first full revival, T_rev/2.
    pub fn first_revival(&self) -> f64 {
        0.5 * self.t_revival
    }

    /// Time of the first super-revival, T_sr/6.
    pub fn first_superrevival(&self) -> f64 {
        self.t_superrevival / 6.0
    }
}

/// The computational manifold: mean principal quantum number and level count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawManifold", into = "RawManifold")]
pub struct ManifoldSpec {
    nbar: u32,
    d: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    nbar: u32,
    d: usize,
}

impl TryFrom<RawManifold> for ManifoldSpec {
    type Error = Error;

    fn try_from(raw: RawManifold) -> Result<Self> {
        ManifoldSpec::new(raw.nbar, raw.d)
    }
}

impl From<ManifoldSpec> for RawManifold {
    fn from(spec: ManifoldSpec) -> Self {
        RawManifold {
            nbar: spec.nbar,
            d: spec.d,
        }
    }
}

impl ManifoldSpec {
    pub fn new(nbar: u32, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidManifold(format!("d = {d} must be at least 2")));
        }
        let spec = Self { nbar, d };
        if (nbar as i64) + spec.j_min() < 1 {
            return Err(Error::InvalidManifold(format!(
                "level n = {} is not physical (nbar = {nbar}, d = {d})",
                nbar as i64 + spec.j_min()
            )));
        }
        Ok(spec)
    }

    pub fn nbar(&self) -> u32 {
        self.nbar
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Lowest level index: −d/2+1 for even d, −(d−1)/2 for odd d.
    pub fn j_min(&self) -> i64 {
        let d = self.d as i64;
        if d % 2 == 0 {
            -d / 2 + 1
        } else {
            -(d - 1) / 2
        }
    }

    pub fn j_max(&self) -> i64 {
        self.j_min() + self.d as i64 - 1
    }

    /// Level (and packet) indices in storage order.
    pub fn j_range(&self) -> impl ExactSizeIterator<Item = i64> + Clone {
        let lo = self.j_min();
        (0..self.d).map(move |i| lo + i as i64)
    }

    /// Storage position of a level or packet index.
    pub fn position(&self, j: i64) -> Result<usize> {
        if j < self.j_min() || j > self.j_max() {
            return Err(Error::IndexOutOfRange {
                index: j,
                lo: self.j_min(),
                hi: self.j_max(),
            });
        }
        Ok((j - self.j_min()) as usize)
    }

    /// Index stored at a position.
    pub fn index_at(&self, pos: usize) -> i64 {
        self.j_min() + pos as i64
    }

    /// Storage position of a packet index taken modulo d.
    pub fn wrap(&self, k: i64) -> usize {
        (k - self.j_min()).rem_euclid(self.d as i64) as usize
    }

    /// Whether d² ≪ n̄ holds in the concrete sense d² < n̄/4.
    pub fn kepler_regime_ok(&self) -> bool {
        ((self.d * self.d) as f64) < self.nbar as f64 / 4.0
    }

    pub fn time_scales(&self) -> TimeScales {
        let n = self.nbar as f64;
        TimeScales {
            t_kepler: 2.0 * PI * n.powi(3),
            t_revival: 2.0 * (2.0 * PI * n.powi(4) / 3.0),
            t_superrevival: 6.0 * (PI * n.powi(5) / 6.0),
        }
    }

    /// Duration of one packet slot, T_K/d.
    pub fn slot_time(&self) -> f64 {
        self.time_scales().t_kepler / self.d as f64
    }

    /// ω_j − ω_0 = −1/(2(n̄+j)²) + 1/(2n̄²).
    pub fn exact_detuning(&self, j: i64) -> Result<f64> {
        self.position(j)?;
        Ok(exact_offset(self.nbar as f64, j as f64))
    }

    /// Truncated expansion 2π[j/T_K − j²/T_rev + j³/T_sr].
    pub fn taylor_detuning(&self, j: i64, order: u32) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidOrder(order));
        }
        self.position(j)?;
        let s = self.time_scales();
        let j = j as f64;
        let mut w = j / s.t_kepler;
        if order >= 2 {
            w -= j * j / s.t_revival;
        }
        if order >= 3 {
            w += j * j * j / s.t_superrevival;
        }
        Ok(2.0 * PI * w)
    }

    pub fn detuning(&self, j: i64, mode: SpectrumMode) -> Result<f64> {
        match mode.order() {
            None => self.exact_detuning(j),
            Some(order) => self.taylor_detuning(j, order),
        }
    }

    /// All level detunings ω_j0 in storage order.
    pub fn detunings(&self, mode: SpectrumMode) -> Vec<f64> {
        self.j_range()
            .map(|j| self.detuning(j, mode).expect("index from j_range"))
            .collect()
    }

    /// Period of the best linear fit to the manifold's detunings.
    ///
    /// With the exact spectrum a packet returns to the core slightly later
    /// than T_K because the level spacing shrinks with n; this is the period
    /// of that drift-free return.
    pub fn effective_period(&self, mode: SpectrumMode) -> f64 {
        self.linear_fit(mode).1
    }

    /// Least-squares fit ω_j0 ≈ a + 2πj/P; returns (a, P).
    pub fn linear_fit(&self, mode: SpectrumMode) -> (f64, f64) {
        let w = self.detunings(mode);
        let js: Vec<f64> = self.j_range().map(|j| j as f64).collect();
        let n = js.len() as f64;
        let mj = js.iter().sum::<f64>() / n;
        let mw = w.iter().sum::<f64>() / n;
        let cov: f64 = js.iter().zip(&w).map(|(j, w)| (j - mj) * (w - mw)).sum();
        let var: f64 = js.iter().map(|j| (j - mj) * (j - mj)).sum();
        let slope = cov / var;
        (mw - slope * mj, 2.0 * PI / slope)
    }
}

/// Exact hydrogenic offset from the mean level.
pub(crate) fn exact_offset(nbar: f64, j: f64) -> f64 {
    let n = nbar + j;
    // written as a difference quotient to avoid cancellation at large n̄
    j * (2.0 * nbar + j) / (2.0 * n * n * nbar * nbar)
}
