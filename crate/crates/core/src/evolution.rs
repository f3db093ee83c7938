//! Field-free evolution: phase evolution of the energy amplitudes, the DFT
//! evolution kernel acting on packet amplitudes, the cyclic SHIFT gate and
//! dispersion/revival diagnostics.
//!
//! Free evolution is closed form. Interaction-picture energy amplitudes do
//! not change; everything observable comes from the phases e^{−iω_j0 t}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{packet_amplitudes_at, AmplitudeVector, BasisTag};
use crate::error::{Error, Result};
use crate::manifold::{ManifoldSpec, SpectrumMode};
use crate::trace::TraceRecord;
use crate::units::au_to_ns;

/// Advance the clock of an interaction-picture state by `dt`.
///
/// The amplitudes come back unchanged; this is the explicit wait primitive
/// used by schedules.
pub fn propagate_free(b: &AmplitudeVector, t0: f64, dt: f64) -> Result<(AmplitudeVector, f64)> {
    b.expect_basis(BasisTag::Energy)?;
    if dt < 0.0 || !dt.is_finite() {
        return Err(Error::NegativeInterval(dt));
    }
    Ok((b.clone(), t0 + dt))
}

/// One row of the circulant that maps packet amplitudes at 0 to those at `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionKernel {
    /// `entries[m]` carries amplitude forward by `m` slots:
    /// b̃_k(t) = Σ_m entries[m] · b̃_{k−m}(0), i.e. entries[m] = u_{−m}(t).
    pub entries: Vec<Complex64>,
    pub t: f64,
    pub mode: SpectrumMode,
}

impl EvolutionKernel {
    /// Kernel value u_{offset}(t) with offset = k′ − k.
    pub fn u(&self, offset: i64) -> Complex64 {
        let d = self.entries.len() as i64;
        self.entries[(-offset).rem_euclid(d) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Apply the circulant to packet amplitudes at time 0.
    pub fn apply(&self, bt0: &AmplitudeVector, spec: &ManifoldSpec) -> Result<AmplitudeVector> {
        bt0.expect_basis(BasisTag::Packet)?;
        bt0.expect_len(spec.d())?;
        let d = spec.d();
        let values = (0..d)
            .map(|pos| {
                (0..d)
                    .map(|m| self.entries[m] * bt0.values[(pos + d - m) % d])
                    .sum()
            })
            .collect();
        Ok(AmplitudeVector::new(values, BasisTag::Packet))
    }
}

/// u_{k′−k}(t) = (1/d) Σ_j exp[−iω_j0 t − i2πj(k′−k)/d], stored by forward lag.
pub fn evolution_kernel(spec: &ManifoldSpec, t: f64, mode: SpectrumMode) -> EvolutionKernel {
    let d = spec.d();
    let w = spec.detunings(mode);
    let js: Vec<i64> = spec.j_range().collect();
    let entries = (0..d as i64)
        .map(|m| {
            // lag m ⇔ offset −m
            js.iter()
                .zip(&w)
                .map(|(&j, &wj)| {
                    let phase = (j * m).rem_euclid(d as i64) as f64;
                    Complex64::from_polar(1.0, -wj * t + 2.0 * PI * phase / d as f64)
                })
                .sum::<Complex64>()
                / d as f64
        })
        .collect();
    EvolutionKernel { entries, t, mode }
}

/// Ideal SHIFT: b̃_k → b̃_{k−n} with indices modulo d.
pub fn shift_gate(bt: &AmplitudeVector, n: i64) -> Result<AmplitudeVector> {
    bt.expect_basis(BasisTag::Packet)?;
    let d = bt.len() as i64;
    let values = (0..d)
        .map(|pos| bt.values[(pos - n).rem_euclid(d) as usize])
        .collect();
    Ok(AmplitudeVector::new(values, BasisTag::Packet))
}

/// |⟨SHIFTⁿ b̃ | b̃ evolved for nT_K/d⟩|² under the given spectrum.
pub fn shift_fidelity(
    spec: &ManifoldSpec,
    bt: &AmplitudeVector,
    n: i64,
    mode: SpectrumMode,
) -> Result<f64> {
    let ideal = shift_gate(bt, n)?;
    let kernel = evolution_kernel(spec, n as f64 * spec.slot_time(), mode);
    let evolved = kernel.apply(bt, spec)?;
    Ok(ideal.inner(&evolved).norm_sqr())
}

/// Population lost from a single packet after `periods` Kepler periods,
/// 1 − |b̃_0(periods·T_K)|² starting from b̃ = δ_{k,0}.
pub fn population_decay(spec: &ManifoldSpec, periods: f64, mode: SpectrumMode) -> f64 {
    let t = periods * spec.time_scales().t_kepler;
    let b = AmplitudeVector::uniform(spec.d(), BasisTag::Energy);
    let bt = packet_amplitudes_at(&b, spec, t, mode).expect("uniform state has manifold size");
    1.0 - bt.values[spec.position(0).expect("0 is always in range")].norm_sqr()
}

/// |⟨ψ(0)|ψ(t)⟩|² for interaction-picture energy amplitudes `b`.
pub fn autocorrelation(spec: &ManifoldSpec, b: &AmplitudeVector, t: f64, mode: SpectrumMode) -> f64 {
    spec.detunings(mode)
        .iter()
        .zip(&b.values)
        .map(|(w, a)| a.norm_sqr() * Complex64::from_polar(1.0, -w * t))
        .sum::<Complex64>()
        .norm_sqr()
}

/// Packet populations and autocorrelation sampled on `t_grid`.
///
/// Samples are evaluated in parallel and collected in grid order.
pub fn revival_scan(
    spec: &ManifoldSpec,
    b: &AmplitudeVector,
    t_grid: &[f64],
    mode: SpectrumMode,
) -> Result<TraceRecord> {
    b.expect_basis(BasisTag::Energy)?;
    b.expect_len(spec.d())?;
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(i) = t_grid.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::NonMonotoneGrid(i + 1));
    }
    let rows: Vec<Vec<f64>> = t_grid
        .par_iter()
        .map(|&t| {
            let bt = packet_amplitudes_at(b, spec, t, mode)?;
            let mut row = Vec::with_capacity(spec.d() + 3);
            row.push(t);
            row.push(au_to_ns(t));
            row.extend(bt.populations());
            row.push(autocorrelation(spec, b, t, mode));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(TraceRecord {
        columns: TraceRecord::evolution_columns(spec),
        rows,
    })
}

/// Evenly spaced grid from `t0` to `t1` inclusive with spacing at most `max_step`.
pub fn uniform_grid(t0: f64, t1: f64, max_step: f64) -> Vec<f64> {
    let n = ((t1 - t0) / max_step).ceil().max(1.0) as usize;
    (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevivalPeak {
    pub time: f64,
    pub autocorr: f64,
}

/// Locate the largest autocorrelation sample with `lo ≤ t ≤ hi` and refine
/// it by a parabola through the bracketing samples.
pub fn find_peak(trace: &TraceRecord, lo: f64, hi: f64) -> Option<RevivalPeak> {
    let t = trace.column("t_au")?;
    let a = trace.column("autocorr")?;
    let (best, _) = t
        .iter()
        .zip(&a)
        .enumerate()
        .filter(|(_, (&t, _))| t >= lo && t <= hi)
        .max_by(|(_, (_, x)), (_, (_, y))| x.total_cmp(y))?;
    if best == 0 || best + 1 >= t.len() {
        return Some(RevivalPeak {
            time: t[best],
            autocorr: a[best],
        });
    }
    let (t0, t1, t2) = (t[best - 1], t[best], t[best + 1]);
    let (y0, y1, y2) = (a[best - 1], a[best], a[best + 1]);
    // parabola through three (possibly uneven) samples
    let denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
    let ca = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom;
    let cb = (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom;
    if ca >= 0.0 {
        return Some(RevivalPeak {
            time: t1,
            autocorr: y1,
        });
    }
    let tv = -cb / (2.0 * ca);
    let cc = y1 - ca * t1 * t1 - cb * t1;
    Some(RevivalPeak {
        time: tv,
        autocorr: ca * tv * tv + cb * tv + cc,
    })
}

/// Scan around the first full revival (T_rev/2) of a core-localised packet
/// and return the refined autocorrelation peak.
///
/// The window spans ±5% of T_rev/2 with a grid spacing of T_K/40.
pub fn first_revival_peak(spec: &ManifoldSpec, mode: SpectrumMode) -> Result<RevivalPeak> {
    let s = spec.time_scales();
    let centre = s.first_revival();
    let grid = uniform_grid(0.95 * centre, 1.05 * centre, s.t_kepler / 40.0);
    let b = AmplitudeVector::uniform(spec.d(), BasisTag::Energy);
    let trace = revival_scan(spec, &b, &grid, mode)?;
    find_peak(&trace, grid[0], grid[grid.len() - 1]).ok_or(Error::EmptyGrid)
}

/// Packet amplitudes at time `t` of an initial packet-basis state.
pub fn evolve_packets(
    bt0: &AmplitudeVector,
    spec: &ManifoldSpec,
    t: f64,
    mode: SpectrumMode,
) -> Result<AmplitudeVector> {
    let b = crate::basis::iqft_packet_to_energy(bt0, spec)?;
    packet_amplitudes_at(&b, spec, t, mode)
}
