//! Lowering two-level operations to timed pulse schedules.
//!
//! Protocol for an op on slots (k, k2): wait until k is at the core, π pulse
//! manifold → g; wait until k2 is at the core, π pulse manifold → e; act
//! with u2 on the stored pair (g, e); restore k2 from e and then k from g,
//! each at its core time. De-excitation uses field phase 0 and restoration
//! phase π, which makes the round trip the identity on the packet amplitude.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decompose::{as_shift, decompose_unitary, fuse_phases, Mat2, TwoLevelOp};
use crate::error::{Error, Result};
use crate::evolution::first_revival_peak;
use crate::manifold::{ManifoldSpec, SpectrumMode};
use crate::pulse::{pi_pulse_area_calibration, standard_fwhm, validate_pulse, PulseSpec, Storage, RABI_EXPONENT};
use crate::units::au_to_ns;

/// One schedule step. Manifold pulses carry their absolute centre time;
/// storage operations are instantaneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Wait { dt: f64 },
    ManifoldPiPulse { k: i64, storage: Storage, phase: f64, center: f64 },
    /// g–e rotation by area θ with field phase φ; `detuning` is Δ/Ω of the
    /// g–e drive.
    StoragePulse { theta: f64, phi: f64, detuning: f64 },
    StoragePhase { phase_g: f64, phase_e: f64 },
}

/// Clock used to decide when a slot is at the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// Slot k is at the core at t ≡ −k·T_K/d (mod T_K).
    #[default]
    Kepler,
    /// Same rule with the period P of a linear fit to the exact spectrum.
    Effective,
}

impl Timing {
    /// Linear detuning model ω_j0 ≈ a + 2πj/P behind the clock; returns (a, P).
    pub fn model(self, spec: &ManifoldSpec) -> (f64, f64) {
        match self {
            Timing::Kepler => (0.0, spec.time_scales().t_kepler),
            Timing::Effective => spec.linear_fit(SpectrumMode::Exact),
        }
    }
}

/// Carrier frequency of the manifold pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    /// Resonant with the reference level n̄ (Δ_0 = 0).
    #[default]
    Reference,
    /// Tuned to the middle of the manifold, so the pulse spectrum weights
    /// the levels symmetrically (differs from `Reference` for even d).
    Centre,
}

/// Pulse clock derived from the options: carrier detuning Δ_0, period P and
/// the phase rate α = a + Δ_0 that manifold pulse phases absorb.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Clock {
    carrier_detuning: f64,
    period: f64,
    phase_rate: f64,
}

impl Clock {
    fn new(spec: &ManifoldSpec, opts: &GateOptions) -> Self {
        let (a, period) = opts.timing.model(spec);
        let carrier_detuning = match opts.carrier {
            Carrier::Reference => 0.0,
            Carrier::Centre => {
                let jc = 0.5 * (spec.j_min() + spec.j_max()) as f64;
                -(a + 2.0 * PI * jc / period)
            }
        };
        Self {
            carrier_detuning,
            period,
            phase_rate: a + carrier_detuning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    /// Manifold pulse FWHM (a.u.).
    pub fwhm: f64,
    pub timing: Timing,
    pub carrier: Carrier,
    /// Keep a shared slot stored across consecutive ops.
    pub chain: bool,
    /// Fold diagonal phase ops into neighbouring rotations.
    pub fuse_phases: bool,
    /// Pad the schedule to the first revival peak after its end.
    pub align_to_revival: bool,
}

impl GateOptions {
    /// Defaults: pulses half as long as the dark-packet pulse, carrier at
    /// the manifold centre, Kepler timing, chained ops with fused phases.
    pub fn for_spec(spec: &ManifoldSpec) -> Self {
        Self {
            fwhm: 0.5 * standard_fwhm(spec),
            timing: Timing::Kepler,
            carrier: Carrier::Centre,
            chain: true,
            fuse_phases: true,
            align_to_revival: false,
        }
    }

    /// Pulse FWHM given in slot units T_K/d.
    pub fn with_fwhm_slots(mut self, spec: &ManifoldSpec, slots: f64) -> Self {
        self.fwhm = slots * spec.slot_time();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSchedule {
    pub spec: ManifoldSpec,
    /// FWHM of every manifold pulse (a.u.).
    pub pulse_fwhm: f64,
    /// Calibrated Ω_peak of every manifold pulse (a.u.).
    pub peak_rabi: f64,
    /// Carrier detuning Δ_0 of every manifold pulse (a.u.).
    pub carrier_detuning: f64,
    /// Period of the core-arrival clock (a.u.).
    pub period: f64,
    pub primitives: Vec<Primitive>,
}

impl GateSchedule {
    /// Kepler-timed schedule with no primitives.
    pub fn empty(spec: ManifoldSpec, pulse_fwhm: f64, peak_rabi: f64) -> Self {
        Self {
            spec,
            pulse_fwhm,
            peak_rabi,
            carrier_detuning: 0.0,
            period: spec.time_scales().t_kepler,
            primitives: Vec::new(),
        }
    }

    /// The manifold pulse a primitive describes.
    pub fn pulse_spec(&self, k_storage: Storage, phase: f64, center: f64) -> PulseSpec {
        PulseSpec {
            carrier_detuning: self.carrier_detuning,
            fwhm: self.pulse_fwhm,
            peak_rabi: self.peak_rabi,
            phase,
            center_time: center,
            storage: k_storage,
        }
    }

    fn half_width(&self) -> f64 {
        PulseSpec::new(self.pulse_fwhm, 0.0, Storage::G).half_width()
    }

    /// Clock after the last primitive, starting from 0.
    pub fn total_duration(&self) -> f64 {
        let hw = self.half_width();
        self.primitives.iter().fold(0.0, |t, p| match *p {
            Primitive::Wait { dt } => t + dt,
            Primitive::ManifoldPiPulse { center, .. } => center + hw,
            _ => t,
        })
    }

    /// Total duration in units of T_K.
    pub fn total_kepler(&self) -> f64 {
        self.total_duration() / self.spec.time_scales().t_kepler
    }

    pub fn pulse_count(&self) -> usize {
        self.primitives
            .iter()
            .filter(|p| matches!(p, Primitive::ManifoldPiPulse { .. }))
            .count()
    }

    /// Check that pulses do not overlap, start where the clock is, and fire
    /// when their slot is at the core of the schedule's clock.
    pub fn validate(&self) -> Result<()> {
        let hw = self.half_width();
        let tk = self.period;
        let d = self.spec.d() as i64;
        let slot = tk / d as f64;
        let tol = 1e-9 * tk;
        let mut t = 0.0;
        for (index, p) in self.primitives.iter().enumerate() {
            let fail = |msg: String| Error::Event {
                index,
                source: Box::new(Error::PulseValidation(msg)),
            };
            match *p {
                Primitive::Wait { dt } => {
                    if !(dt >= 0.0) || !dt.is_finite() {
                        return Err(fail(format!("wait of {dt}")));
                    }
                    t += dt;
                }
                Primitive::ManifoldPiPulse { k, center, phase, .. } => {
                    self.spec.position(k).map_err(|e| Error::Event {
                        index,
                        source: Box::new(e),
                    })?;
                    if !phase.is_finite() {
                        return Err(fail("phase is not finite".into()));
                    }
                    if center - hw < t - tol {
                        return Err(fail(format!("pulse starts at {} before clock {}", center - hw, t)));
                    }
                    let m = (center / slot).round();
                    if (center - m * slot).abs() > tol || (m as i64 + k).rem_euclid(d) != 0 {
                        return Err(fail(format!("slot {k} is not at the core at t = {center}")));
                    }
                    t = center + hw;
                }
                Primitive::StoragePulse { theta, phi, detuning } => {
                    if !(theta.is_finite() && phi.is_finite() && detuning.is_finite()) {
                        return Err(fail("storage pulse parameter is not finite".into()));
                    }
                }
                Primitive::StoragePhase { phase_g, phase_e } => {
                    if !(phase_g.is_finite() && phase_e.is_finite()) {
                        return Err(fail("storage phase is not finite".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// g–e rotation for a storage pulse, acting on (b_g, b_e).
pub fn storage_rotation(theta: f64, phi: f64, detuning: f64) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    let scale = (1.0 + detuning * detuning).sqrt();
    let (s, c) = (0.5 * theta * scale).sin_cos();
    let (nx, nz) = (1.0 / scale, detuning / scale);
    // cos(θ'/2) I + i sin(θ'/2) (n_x (cos φ σx − sin φ σy) − n_z σz)
    [
        [c - i * s * nz, i * s * nx * Complex64::from_polar(1.0, phi)],
        [i * s * nx * Complex64::from_polar(1.0, -phi), c + i * s * nz],
    ]
}

/// Resonant factorisation u2 = diag(e^{iα1}, e^{iα2}) · R(θ, 0) · diag(1, e^{iβ}).
/// Returns (θ, α1, α2, β).
pub fn storage_factorisation(u: &Mat2) -> (f64, f64, f64, f64) {
    let c = u[0][0].norm();
    let s = u[0][1].norm();
    let theta = 2.0 * s.atan2(c);
    if s < 1e-15 {
        return (0.0, u[0][0].arg(), u[1][1].arg(), 0.0);
    }
    let a1 = if c < 1e-15 { 0.0 } else { u[0][0].arg() };
    let beta = u[0][1].arg() - FRAC_PI_2 - a1;
    let a2 = u[1][0].arg() - FRAC_PI_2;
    (theta, a1, a2, beta)
}

fn is_zero_phase(p: f64) -> bool {
    (Complex64::from_polar(1.0, p) - 1.0).norm() < 1e-15
}

struct Builder {
    spec: ManifoldSpec,
    hw: f64,
    slot: f64,
    phase_rate: f64,
    clock: f64,
    prims: Vec<Primitive>,
}

impl Builder {
    fn new(spec: ManifoldSpec, fwhm: f64, clock: &Clock) -> Self {
        Self {
            spec,
            hw: PulseSpec::new(fwhm, 0.0, Storage::G).half_width(),
            slot: clock.period / spec.d() as f64,
            phase_rate: clock.phase_rate,
            clock: 0.0,
            prims: Vec::new(),
        }
    }

    fn wait(&mut self, dt: f64) {
        if dt > 0.0 {
            self.prims.push(Primitive::Wait { dt });
            self.clock += dt;
        }
    }

    /// Next pulse for slot k at its core time t ≡ −k·P/d (mod P).
    ///
    /// The field phase gains α·t_c so that capture at t_c and release at
    /// t_r leave no relative phase e^{iα(t_r − t_c)} on the stored amplitude.
    fn pulse(&mut self, k: i64, storage: Storage, phase: f64) {
        let d = self.spec.d() as i64;
        let earliest = ((self.clock + self.hw) / self.slot - 1e-9).ceil() as i64;
        let m = earliest + (-k - earliest).rem_euclid(d);
        let center = m as f64 * self.slot;
        let phase = (phase + self.phase_rate * center).rem_euclid(2.0 * PI);
        self.wait(center - self.hw - self.clock);
        self.prims.push(Primitive::ManifoldPiPulse {
            k,
            storage,
            phase,
            center,
        });
        self.clock = center + self.hw;
    }

    fn storage_op(&mut self, u: &Mat2) {
        let (theta, a1, a2, beta) = storage_factorisation(u);
        if !is_zero_phase(beta) {
            self.prims.push(Primitive::StoragePhase {
                phase_g: 0.0,
                phase_e: beta,
            });
        }
        if theta.abs() > 1e-15 {
            self.prims.push(Primitive::StoragePulse {
                theta,
                phi: 0.0,
                detuning: 0.0,
            });
        }
        if !is_zero_phase(a1) || !is_zero_phase(a2) {
            self.prims.push(Primitive::StoragePhase {
                phase_g: a1,
                phase_e: a2,
            });
        }
    }

    fn pad_to(&mut self, t: f64) {
        self.wait(t - self.clock);
    }

    /// Pad to a whole number of clock periods.
    fn pad_to_period(&mut self) {
        let tk = self.slot * self.spec.d() as f64;
        let n = (self.clock / tk - 1e-9).ceil();
        self.pad_to(n * tk);
    }
}

fn calibrate(spec: &ManifoldSpec, opts: &GateOptions) -> Result<f64> {
    let mut probe = PulseSpec::new(opts.fwhm, 0.0, Storage::G);
    probe.carrier_detuning = Clock::new(spec, opts).carrier_detuning;
    let report = validate_pulse(spec, &probe);
    if !report.passed() {
        return Err(Error::PulseValidation(report.warnings.join("; ")));
    }
    Ok(pi_pulse_area_calibration(spec, &probe, RABI_EXPONENT))
}

fn emit_ops(builder: &mut Builder, ops: &[TwoLevelOp], chain: bool) {
    let mut i = 0;
    while i < ops.len() {
        let mut op = ops[i];
        if chain {
            if let Some(next) = ops.get(i + 1) {
                if next.touches(op.k2) && !next.touches(op.k) {
                    op = op.swapped();
                }
            }
        }
        let anchor = op.k;
        builder.pulse(anchor, Storage::G, 0.0);
        loop {
            builder.pulse(op.k2, Storage::E, 0.0);
            builder.storage_op(&op.u2);
            builder.pulse(op.k2, Storage::E, PI);
            i += 1;
            match ops.get(i) {
                Some(next) if chain && next.touches(anchor) => {
                    op = if next.k == anchor { *next } else { next.swapped() };
                }
                _ => break,
            }
        }
        builder.pulse(anchor, Storage::G, PI);
    }
}

/// Schedule for a single two-level op, padded to whole Kepler periods.
pub fn compile_two_level(op: &TwoLevelOp, spec: &ManifoldSpec, opts: &GateOptions) -> Result<GateSchedule> {
    spec.position(op.k)?;
    spec.position(op.k2)?;
    if op.k == op.k2 {
        return Err(Error::InvalidManifold(format!("two-level op on a single slot {}", op.k)));
    }
    let mut b = Builder::new(*spec, opts.fwhm, &Clock::new(spec, opts));
    emit_ops(&mut b, std::slice::from_ref(op), false);
    b.pad_to_period();
    finish(spec, opts, b)
}

/// Schedule realising U (packet slots in storage order).
///
/// Pure shifts become a single wait; everything else is decomposed into
/// two-level ops, lowered with the storage protocol and padded to whole
/// Kepler periods (or to a revival peak when requested).
pub fn compile_unitary(u: &DMatrix<Complex64>, spec: &ManifoldSpec, opts: &GateOptions) -> Result<GateSchedule> {
    let ops = decompose_unitary(u, spec)?;
    let mut b = Builder::new(*spec, opts.fwhm, &Clock::new(spec, opts));
    if let Some(n) = as_shift(u, spec) {
        b.wait(n as f64 * spec.slot_time());
        return finish(spec, opts, b);
    }
    let ops = if opts.fuse_phases { fuse_phases(&ops) } else { ops };
    emit_ops(&mut b, &ops, opts.chain);
    b.pad_to_period();
    if opts.align_to_revival {
        let tk = b.slot * spec.d() as f64;
        let peak_t = first_revival_peak(spec, SpectrumMode::Exact)?.time;
        let n = (b.clock / peak_t).ceil().max(1.0);
        let target = ((n * peak_t) / tk).round() * tk;
        let target = if target < b.clock { target + tk } else { target };
        b.pad_to(target);
    }
    finish(spec, opts, b)
}

fn finish(spec: &ManifoldSpec, opts: &GateOptions, b: Builder) -> Result<GateSchedule> {
    let clock = Clock::new(spec, opts);
    Ok(GateSchedule {
        spec: *spec,
        pulse_fwhm: opts.fwhm,
        peak_rabi: calibrate(spec, opts)?,
        carrier_detuning: clock.carrier_detuning,
        period: clock.period,
        primitives: b.prims,
    })
}

// Serialized form: one tagged entry per primitive with times in a.u. and ns.

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum PrimitiveRecord {
    Wait {
        dt_au: f64,
        #[serde(default)]
        dt_ns: f64,
    },
    ManifoldPiPulse {
        k: i64,
        storage: Storage,
        phase: f64,
        center_au: f64,
        #[serde(default)]
        center_ns: f64,
    },
    StoragePulse {
        theta: f64,
        phi: f64,
        detuning: f64,
    },
    StoragePhase {
        phase_g: f64,
        phase_e: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleRecord {
    manifold: ManifoldSpec,
    pulse_fwhm_au: f64,
    #[serde(default)]
    pulse_fwhm_ps: f64,
    peak_rabi_au: f64,
    carrier_detuning_au: f64,
    period_au: f64,
    #[serde(default)]
    total_duration_au: f64,
    #[serde(default)]
    total_duration_ns: f64,
    #[serde(default)]
    total_duration_kepler: f64,
    primitives: Vec<PrimitiveRecord>,
}

impl From<Primitive> for PrimitiveRecord {
    fn from(p: Primitive) -> Self {
        match p {
            Primitive::Wait { dt } => Self::Wait {
                dt_au: dt,
                dt_ns: au_to_ns(dt),
            },
            Primitive::ManifoldPiPulse {
                k,
                storage,
                phase,
                center,
            } => Self::ManifoldPiPulse {
                k,
                storage,
                phase,
                center_au: center,
                center_ns: au_to_ns(center),
            },
            Primitive::StoragePulse { theta, phi, detuning } => Self::StoragePulse { theta, phi, detuning },
            Primitive::StoragePhase { phase_g, phase_e } => Self::StoragePhase { phase_g, phase_e },
        }
    }
}

impl From<PrimitiveRecord> for Primitive {
    fn from(p: PrimitiveRecord) -> Self {
        match p {
            PrimitiveRecord::Wait { dt_au, .. } => Self::Wait { dt: dt_au },
            PrimitiveRecord::ManifoldPiPulse {
                k,
                storage,
                phase,
                center_au,
                ..
            } => Self::ManifoldPiPulse {
                k,
                storage,
                phase,
                center: center_au,
            },
            PrimitiveRecord::StoragePulse { theta, phi, detuning } => Self::StoragePulse { theta, phi, detuning },
            PrimitiveRecord::StoragePhase { phase_g, phase_e } => Self::StoragePhase { phase_g, phase_e },
        }
    }
}

impl Serialize for GateSchedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let total = self.total_duration();
        ScheduleRecord {
            manifold: self.spec,
            pulse_fwhm_au: self.pulse_fwhm,
            pulse_fwhm_ps: au_to_ns(self.pulse_fwhm) * 1e3,
            peak_rabi_au: self.peak_rabi,
            carrier_detuning_au: self.carrier_detuning,
            period_au: self.period,
            total_duration_au: total,
            total_duration_ns: au_to_ns(total),
            total_duration_kepler: self.total_kepler(),
            primitives: self.primitives.iter().map(|&p| p.into()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GateSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ScheduleRecord::deserialize(d)?;
        Ok(Self {
            spec: r.manifold,
            pulse_fwhm: r.pulse_fwhm_au,
            peak_rabi: r.peak_rabi_au,
            carrier_detuning: r.carrier_detuning_au,
            period: r.period_au,
            primitives: r.primitives.into_iter().map(Primitive::from).collect(),
        })
    }
}
