//! Short-pulse coupling between the Rydberg manifold and a low-lying storage
//! level (g or e).
//!
//! The full model integrates the rotating-wave amplitude equations
//!
//! ```text
//! ḃ_s = (i/2) f(t) e^{iφ} Σ_j Ω_j e^{−iΔ_j t} b_j
//! ḃ_j = (i/2) f(t) e^{−iφ} Ω_j e^{+iΔ_j t} b_s,      Δ_j = ω_j0 + Δ_0
//! ```
//!
//! with the free phases kept, so packet motion during the pulse is part of
//! the result. The two-level oracle keeps only the core packet k = 0.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{energy_amplitudes_from_packets, packet_amplitudes_at, AmplitudeVector, BasisTag};
use crate::error::{Error, Result};
use crate::integrate::{dopri5, IntegratorOptions, Stats};
use crate::manifold::{ManifoldSpec, SpectrumMode};
use crate::trace::TraceRecord;

/// Envelope is truncated at ±TRUNCATION_SIGMAS standard deviations.
pub const TRUNCATION_SIGMAS: f64 = 4.0;

/// Rabi frequency scaling Ω_j ∝ (n̄ + j)^(−3/2).
pub const RABI_EXPONENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Storage {
    G,
    E,
}

/// Gaussian, transform-limited pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Δ_0 = ω_0 − ω, angular frequency (a.u.).
    pub carrier_detuning: f64,
    /// FWHM of the field-amplitude envelope f(t) (a.u.).
    pub fwhm: f64,
    /// Rabi frequency of the j = 0 level at the envelope peak (a.u.).
    pub peak_rabi: f64,
    pub phase: f64,
    pub center_time: f64,
    pub storage: Storage,
}

impl PulseSpec {
    pub fn new(fwhm: f64, center_time: f64, storage: Storage) -> Self {
        Self {
            carrier_detuning: 0.0,
            fwhm,
            peak_rabi: 0.0,
            phase: 0.0,
            center_time,
            storage,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * LN_2).sqrt())
    }

    pub fn half_width(&self) -> f64 {
        TRUNCATION_SIGMAS * self.sigma()
    }

    pub fn start(&self) -> f64 {
        self.center_time - self.half_width()
    }

    pub fn end(&self) -> f64 {
        self.center_time + self.half_width()
    }

    /// f(t) = exp(−4 ln2 (t − t_c)²/τ_p²) on the truncated support, 0 outside.
    pub fn envelope(&self, t: f64) -> f64 {
        let x = t - self.center_time;
        if x.abs() > self.half_width() * (1.0 + 1e-12) {
            return 0.0;
        }
        (-4.0 * LN_2 * x * x / (self.fwhm * self.fwhm)).exp()
    }

    /// ∫ f dt over the truncated support.
    pub fn envelope_area(&self) -> f64 {
        truncated_gaussian_area(self.sigma())
    }

    pub(crate) fn check(&self) -> Result<()> {
        if !(self.fwhm > 0.0) || !self.fwhm.is_finite() {
            return Err(Error::InvalidPulse(format!("fwhm must be positive, got {}", self.fwhm)));
        }
        for (name, v) in [
            ("peak_rabi", self.peak_rabi),
            ("phase", self.phase),
            ("center_time", self.center_time),
            ("carrier_detuning", self.carrier_detuning),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidPulse(format!("{name} is not finite")));
            }
        }
        Ok(())
    }
}

/// ∫_{−4σ}^{4σ} exp(−x²/2σ²) dx by composite Simpson.
fn truncated_gaussian_area(sigma: f64) -> f64 {
    const N: usize = 4000;
    let a = -TRUNCATION_SIGMAS;
    let h = 2.0 * TRUNCATION_SIGMAS / N as f64;
    let g = |x: f64| (-0.5 * x * x).exp();
    let mut s = g(a) + g(-a);
    for i in 1..N {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
    }
    sigma * s * h / 3.0
}

/// Energy-basis Rabi frequencies and their packet-basis DFT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiProfile {
    pub omega_j: Vec<f64>,
    pub omega_tilde_k: Vec<Complex64>,
}

impl RabiProfile {
    pub fn omega_tilde(&self, spec: &ManifoldSpec, k: i64) -> Result<Complex64> {
        Ok(self.omega_tilde_k[spec.position(k)?])
    }

    /// |Ω̃_k| / |Ω̃_0|.
    pub fn ratio(&self, spec: &ManifoldSpec, k: i64) -> Result<f64> {
        Ok(self.omega_tilde(spec, k)?.norm() / self.omega_tilde(spec, 0)?.norm())
    }
}

/// Ω_j = Ω_ref · ((n̄+j)/n̄)^(−3/2) and Ω̃_k = (1/√d) Σ_j Ω_j e^{−i2πjk/d}.
pub fn rabi_profile(spec: &ManifoldSpec, omega_ref: f64) -> RabiProfile {
    rabi_profile_with_exponent(spec, omega_ref, RABI_EXPONENT)
}

/// As [`rabi_profile`] with Ω_j ∝ (n̄+j)^(−exponent); exponent 0 is a flat profile.
pub fn rabi_profile_with_exponent(spec: &ManifoldSpec, omega_ref: f64, exponent: f64) -> RabiProfile {
    let n = spec.nbar() as f64;
    let d = spec.d();
    let omega_j: Vec<f64> = spec
        .j_range()
        .map(|j| omega_ref * ((n + j as f64) / n).powf(-exponent))
        .collect();
    let js: Vec<i64> = spec.j_range().collect();
    let omega_tilde_k = js
        .iter()
        .map(|&k| {
            js.iter()
                .zip(&omega_j)
                .map(|(&j, &w)| {
                    let p = (j * k).rem_euclid(d as i64) as f64;
                    Complex64::from_polar(w, -2.0 * PI * p / d as f64)
                })
                .sum::<Complex64>()
                / (d as f64).sqrt()
        })
        .collect();
    RabiProfile {
        omega_j,
        omega_tilde_k,
    }
}

/// Ω_peak for which the core packet sees pulse area π:
/// Ω̃_0(Ω_peak) · ∫f dt = π over the truncated support.
pub fn pi_pulse_area_calibration(spec: &ManifoldSpec, pulse: &PulseSpec, exponent: f64) -> f64 {
    let per_unit = rabi_profile_with_exponent(spec, 1.0, exponent).omega_tilde_k
        [spec.position(0).expect("0 in range")]
    .re;
    PI / (per_unit * pulse.envelope_area())
}

/// Pulse area θ = Ω̃_0 · ∫ f dt seen by the core packet.
pub fn pulse_area(spec: &ManifoldSpec, pulse: &PulseSpec, exponent: f64) -> f64 {
    let profile = rabi_profile_with_exponent(spec, pulse.peak_rabi, exponent);
    profile.omega_tilde_k[spec.position(0).expect("0 in range")].norm() * pulse.envelope_area()
}

/// Manifold amplitudes plus the two storage levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationState {
    /// Slowly varying energy amplitudes b_j.
    pub b_energy: Vec<Complex64>,
    pub b_g: Complex64,
    pub b_e: Complex64,
    pub t: f64,
    pub spec: ManifoldSpec,
    pub mode: SpectrumMode,
}

impl SimulationState {
    /// State whose packet amplitudes at time `t` are `bt`; storage empty.
    pub fn from_packets(spec: ManifoldSpec, bt: &AmplitudeVector, t: f64, mode: SpectrumMode) -> Result<Self> {
        let b = energy_amplitudes_from_packets(bt, &spec, t, mode)?;
        Ok(Self {
            b_energy: b.values,
            b_g: Complex64::new(0.0, 0.0),
            b_e: Complex64::new(0.0, 0.0),
            t,
            spec,
            mode,
        })
    }

    pub fn from_energy(spec: ManifoldSpec, b: &AmplitudeVector, t: f64, mode: SpectrumMode) -> Result<Self> {
        b.expect_basis(BasisTag::Energy)?;
        b.expect_len(spec.d())?;
        Ok(Self {
            b_energy: b.values.clone(),
            b_g: Complex64::new(0.0, 0.0),
            b_e: Complex64::new(0.0, 0.0),
            t,
            spec,
            mode,
        })
    }

    pub fn energy(&self) -> AmplitudeVector {
        AmplitudeVector::new(self.b_energy.clone(), BasisTag::Energy)
    }

    /// Packet amplitudes at the current clock.
    pub fn packets(&self) -> AmplitudeVector {
        self.packets_at(self.t)
    }

    /// Packet amplitudes the current energy amplitudes give at time `t`.
    pub fn packets_at(&self, t: f64) -> AmplitudeVector {
        packet_amplitudes_at(&self.energy(), &self.spec, t, self.mode).expect("state has manifold size")
    }

    pub fn storage(&self, s: Storage) -> Complex64 {
        match s {
            Storage::G => self.b_g,
            Storage::E => self.b_e,
        }
    }

    pub(crate) fn storage_mut(&mut self, s: Storage) -> &mut Complex64 {
        match s {
            Storage::G => &mut self.b_g,
            Storage::E => &mut self.b_e,
        }
    }

    pub fn manifold_population(&self) -> f64 {
        self.b_energy.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn total_population(&self) -> f64 {
        self.manifold_population() + self.b_g.norm_sqr() + self.b_e.norm_sqr()
    }

    /// Free evolution: only the clock moves.
    pub fn wait(&mut self, dt: f64) -> Result<()> {
        if dt < 0.0 || !dt.is_finite() {
            return Err(Error::NegativeInterval(dt));
        }
        self.t += dt;
        Ok(())
    }

    pub fn wait_until(&mut self, t: f64) -> Result<()> {
        self.wait(t - self.t)
    }

    pub(crate) fn trace_row(&self, reference_norm: f64) -> Vec<f64> {
        let mut row = vec![self.t, self.b_g.norm_sqr(), self.b_e.norm_sqr()];
        row.extend(self.packets().populations());
        row.push(self.total_population() - reference_norm);
        row
    }
}

/// Levels coupled to one storage amplitude by a common envelope.
///
/// This is the ODE behind both the full manifold model (d levels with Ω_j,
/// Δ_j) and the reduced two-level model (one level with Ω̃_0, Δ_0). Any
/// number of levels is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledLevels {
    pub rabi: Vec<f64>,
    pub detuning: Vec<f64>,
}

impl CoupledLevels {
    /// Derivative of `y = [b_s, b_0, …]` at time `t`.
    fn rhs(&self, t: f64, envelope: f64, phase: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let half_i = Complex64::new(0.0, 0.5 * envelope);
        let bs = y[0];
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&w, &det)) in self.rabi.iter().zip(&self.detuning).enumerate() {
            let rot = Complex64::from_polar(w, det * t);
            acc += rot.conj() * y[i + 1];
            dy[i + 1] = half_i * Complex64::from_polar(1.0, -phase) * rot * bs;
        }
        dy[0] = half_i * Complex64::from_polar(1.0, phase) * acc;
    }

    /// Integrate across the pulse support. `y` is `[b_s, b_0, …]` at the
    /// start of the support; `observe` sees every accepted step.
    pub fn integrate<O>(&self, pulse: &PulseSpec, y: &mut [Complex64], opts: &IntegratorOptions, observe: O) -> Result<Stats>
    where
        O: FnMut(f64, &[Complex64]),
    {
        self.integrate_window(pulse, pulse.start(), pulse.end(), y, opts, observe)
    }

    /// Integrate over [t0, t1] only.
    pub fn integrate_window<O>(
        &self,
        pulse: &PulseSpec,
        t0: f64,
        t1: f64,
        y: &mut [Complex64],
        opts: &IntegratorOptions,
        observe: O,
    ) -> Result<Stats>
    where
        O: FnMut(f64, &[Complex64]),
    {
        pulse.check()?;
        let phase = pulse.phase;
        dopri5(|t, y, dy| self.rhs(t, pulse.envelope(t), phase, y, dy), t0, t1, y, opts, observe)
    }

    pub fn max_detuning(&self) -> f64 {
        self.detuning.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Override of the step cap; `None` uses min(τ_p/50, 2π/(10·max|Δ_j|)).
    pub max_step: Option<f64>,
    pub fixed_step: Option<f64>,
    pub rabi_exponent: f64,
    /// Record a trace row every this many accepted steps (0 disables).
    pub record_every: usize,
}

impl Default for PulseOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: None,
            fixed_step: None,
            rabi_exponent: RABI_EXPONENT,
            record_every: 1,
        }
    }
}

impl PulseOptions {
    fn integrator(&self, pulse: &PulseSpec, max_detuning: f64) -> IntegratorOptions {
        let mut cap = pulse.fwhm / 50.0;
        if max_detuning > 0.0 {
            cap = cap.min(2.0 * PI / (10.0 * max_detuning));
        }
        IntegratorOptions {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step.unwrap_or(cap),
            min_step: 1e-14 * pulse.fwhm,
            max_steps: 10_000_000,
            fixed_step: self.fixed_step,
        }
    }
}

/// Summary of one integrated pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseOutcome {
    pub state: SimulationState,
    pub trace: TraceRecord,
    pub stats: Stats,
    /// |Σ populations after − before|.
    pub norm_error: f64,
}

/// Integrate the full manifold–storage equations across the pulse support.
///
/// The state's clock must not be past the start of the support; it ends at
/// the end of the support.
pub fn integrate_pulse(state: &SimulationState, pulse: &PulseSpec, opts: &PulseOptions) -> Result<PulseOutcome> {
    pulse.check()?;
    if state.t > pulse.start() + 1e-9 * pulse.fwhm {
        return Err(Error::InvalidPulse(format!(
            "pulse starts at {} but the state clock is already at {}",
            pulse.start(),
            state.t
        )));
    }
    integrate_pulse_until(state, pulse, pulse.end(), opts)
}

/// Integrate `pulse` from the state's clock (or the pulse start, if later)
/// up to `t_stop`, which may fall inside the pulse support.
pub fn integrate_pulse_until(
    state: &SimulationState,
    pulse: &PulseSpec,
    t_stop: f64,
    opts: &PulseOptions,
) -> Result<PulseOutcome> {
    let before = state.total_population();
    let mut trace = TraceRecord::new(TraceRecord::pulse_columns(&state.spec));
    let mut step = 0usize;
    let mut last_recorded = false;
    let (out, stats) = integrate_pulse_observed(state, pulse, t_stop, opts, |s| {
        // the observer sees the initial state first, then every accepted step
        let keep = opts.record_every > 0 && step.is_multiple_of(opts.record_every);
        if keep {
            trace.push(s.trace_row(before));
        }
        last_recorded = keep;
        step += 1;
    })?;
    if opts.record_every > 0 && !last_recorded {
        trace.push(out.trace_row(before));
    }
    let norm_error = (out.total_population() - before).abs();
    Ok(PulseOutcome {
        state: out,
        trace,
        stats,
        norm_error,
    })
}

/// Windowed pulse integration that hands the state to `observe` before
/// the first step and after every accepted step.
pub fn integrate_pulse_observed<O>(
    state: &SimulationState,
    pulse: &PulseSpec,
    t_stop: f64,
    opts: &PulseOptions,
    mut observe: O,
) -> Result<(SimulationState, Stats)>
where
    O: FnMut(&SimulationState),
{
    pulse.check()?;
    let t0 = state.t.max(pulse.start());
    let t1 = t_stop.min(pulse.end());
    if !(t1 > t0) {
        return Err(Error::InvalidPulse(format!(
            "empty integration window [{t0}, {t1}] for pulse on [{}, {}]",
            pulse.start(),
            pulse.end()
        )));
    }
    let spec = state.spec;
    let profile = rabi_profile_with_exponent(&spec, pulse.peak_rabi, opts.rabi_exponent);
    let levels = CoupledLevels {
        rabi: profile.omega_j,
        detuning: spec
            .detunings(state.mode)
            .into_iter()
            .map(|w| w + pulse.carrier_detuning)
            .collect(),
    };

    let mut out = state.clone();
    out.t = t0;
    observe(&out);

    let mut y = Vec::with_capacity(spec.d() + 1);
    y.push(out.storage(pulse.storage));
    y.extend_from_slice(&out.b_energy);

    let integ = opts.integrator(pulse, levels.max_detuning());
    let mut snapshot = out.clone();
    let stats = levels.integrate_window(pulse, t0, t1, &mut y, &integ, |t, y| {
        *snapshot.storage_mut(pulse.storage) = y[0];
        snapshot.b_energy.copy_from_slice(&y[1..]);
        snapshot.t = t;
        observe(&snapshot);
    })?;

    *out.storage_mut(pulse.storage) = y[0];
    out.b_energy.copy_from_slice(&y[1..]);
    out.t = t1;
    Ok((out, stats))
}

/// Resonant rotation of (b_s, b̃_0) by pulse area θ with field phase φ.
pub fn two_level_rotation(b_s: Complex64, b_core: Complex64, theta: f64, phase: f64) -> (Complex64, Complex64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    (
        c * b_s + i * Complex64::from_polar(s, phase) * b_core,
        i * Complex64::from_polar(s, -phase) * b_s + c * b_core,
    )
}

/// Reduced storage ↔ core-packet dynamics with coupling Ω̃_0 (at the
/// envelope peak).
///
/// Resonant pulses use the closed-form rotation by θ = Ω̃_0 ∫f dt; detuned
/// pulses integrate the two-amplitude system.
pub fn two_level_oracle(b_s0: Complex64, b_core0: Complex64, pulse: &PulseSpec, omega_tilde0: f64) -> Result<(Complex64, Complex64)> {
    pulse.check()?;
    if pulse.carrier_detuning == 0.0 {
        let theta = omega_tilde0 * pulse.envelope_area();
        return Ok(two_level_rotation(b_s0, b_core0, theta, pulse.phase));
    }
    let levels = CoupledLevels {
        rabi: vec![omega_tilde0],
        detuning: vec![pulse.carrier_detuning],
    };
    let mut y = vec![b_s0, b_core0];
    let opts = PulseOptions::default().integrator(pulse, pulse.carrier_detuning.abs());
    levels.integrate(pulse, &mut y, &opts, |_, _| {})?;
    Ok((y[0], y[1]))
}

/// Instantaneous idealisation of a manifold pulse at time `t`: a two-level
/// rotation between the storage level and packet slot k = 0.
pub fn apply_instantaneous(state: &mut SimulationState, storage: Storage, theta: f64, phase: f64, t: f64) -> Result<()> {
    let spec = state.spec;
    let mut bt = state.packets_at(t);
    let core = spec.position(0)?;
    let (s, c) = two_level_rotation(state.storage(storage), bt.values[core], theta, phase);
    bt.values[core] = c;
    *state.storage_mut(storage) = s;
    state.b_energy = energy_amplitudes_from_packets(&bt, &spec, t, state.mode)?.values;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseReport {
    /// τ_p < T_K/d.
    pub duration_ok: bool,
    /// Spectral FWHM of the field no wider than `BANDWIDTH_LIMIT`·d/T_K.
    pub bandwidth_ok: bool,
    /// Ordinary-frequency FWHM of the field spectrum (1/a.u.).
    pub spectral_fwhm: f64,
    /// `spectral_fwhm` in units of d/T_K.
    pub spectral_fwhm_d_over_tk: f64,
    /// τ_p · spectral FWHM; 2 ln2/π for a transform-limited Gaussian.
    pub time_bandwidth_product: f64,
    pub warnings: Vec<String>,
}

impl PulseReport {
    pub fn passed(&self) -> bool {
        self.duration_ok
    }
}

/// Widest accepted spectral FWHM, in units of d/T_K.
pub const BANDWIDTH_LIMIT: f64 = 2.0;

/// Transform-limited time–bandwidth product of a Gaussian, Δν·τ_p.
pub fn gaussian_time_bandwidth() -> f64 {
    2.0 * LN_2 / PI
}

/// Check τ_p < T_K/d and that the bandwidth stays near d/T_K.
///
/// A bandwidth violation is a warning; only the duration constraint fails
/// the report.
pub fn validate_pulse(spec: &ManifoldSpec, pulse: &PulseSpec) -> PulseReport {
    let tk = spec.time_scales().t_kepler;
    let d = spec.d() as f64;
    let spectral_fwhm = gaussian_time_bandwidth() / pulse.fwhm;
    let in_units = spectral_fwhm * tk / d;
    let duration_ok = pulse.fwhm > 0.0 && pulse.fwhm < tk / d;
    let bandwidth_ok = in_units <= BANDWIDTH_LIMIT;
    let mut warnings = Vec::new();
    if !duration_ok {
        warnings.push(format!(
            "pulse FWHM {:.4} slots is not shorter than T_K/d",
            pulse.fwhm * d / tk
        ));
    }
    if !bandwidth_ok {
        warnings.push(format!(
            "spectral FWHM {in_units:.3} d/T_K exceeds {BANDWIDTH_LIMIT} d/T_K; levels outside the manifold would be excited"
        ));
    }
    PulseReport {
        duration_ok,
        bandwidth_ok,
        spectral_fwhm,
        spectral_fwhm_d_over_tk: in_units,
        time_bandwidth_product: pulse.fwhm * spectral_fwhm,
        warnings,
    }
}

/// Pulse FWHM used for the dark-packet experiment: 0.5 ln2 · T_K/d.
pub fn standard_fwhm(spec: &ManifoldSpec) -> f64 {
    0.5 * LN_2 * spec.slot_time()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn envelope_shape() {
        let p = PulseSpec::new(2.0, 5.0, Storage::G);
        assert_eq!(p.envelope(5.0), 1.0);
        assert!((p.envelope(6.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.envelope(5.0 + 1.01 * p.half_width()), 0.0);
        assert!(p.envelope(p.end()) < 1e-3 && p.envelope(p.end()) > 3e-4);
    }

    #[test]
    fn truncated_area_matches_erfc_constant() {
        // erfc(2√2) = 6.334248366623996e-5
        let sigma = 0.7;
        let full = sigma * (2.0 * PI).sqrt();
        let expect = full * (1.0 - 6.334_248_366_623_996e-5);
        assert!((truncated_gaussian_area(sigma) - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn flat_profile_dft_is_dc_only() {
        let spec = ManifoldSpec::new(180, 8).unwrap();
        let p = rabi_profile_with_exponent(&spec, 0.3, 0.0);
        for (pos, w) in p.omega_tilde_k.iter().enumerate() {
            let expect = if spec.index_at(pos) == 0 { 8f64.sqrt() * 0.3 } else { 0.0 };
            assert!((w - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rabi_parseval() {
        let spec = ManifoldSpec::new(50, 7).unwrap();
        let p = rabi_profile(&spec, 1.0);
        let a: f64 = p.omega_j.iter().map(|w| w * w).sum();
        let b: f64 = p.omega_tilde_k.iter().map(|w| w.norm_sqr()).sum();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn calibration_scales_inversely_with_width() {
        let spec = ManifoldSpec::new(180, 8).unwrap();
        let p1 = PulseSpec::new(100.0, 0.0, Storage::G);
        let p2 = PulseSpec::new(200.0, 0.0, Storage::G);
        let a = pi_pulse_area_calibration(&spec, &p1, RABI_EXPONENT);
        let b = pi_pulse_area_calibration(&spec, &p2, RABI_EXPONENT);
        assert!((a / b - 2.0).abs() < 1e-12);
        let mut p = p1;
        p.peak_rabi = a;
        assert!((pulse_area(&spec, &p, RABI_EXPONENT) - PI).abs() < 1e-12);
    }

    #[test]
    fn oracle_pi_and_two_pi() {
        let mut p = PulseSpec::new(1.0, 0.0, Storage::G);
        let area = p.envelope_area();
        let (g, k) = two_level_oracle(c(0.0, 0.0), c(1.0, 0.0), &p, PI / area).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-14);
        assert!(k.norm() < 1e-14);
        let b0 = (c(0.6, 0.0), c(0.0, 0.8));
        let (g, k) = two_level_oracle(b0.0, b0.1, &p, 2.0 * PI / area).unwrap();
        assert!((g + b0.0).norm() < 1e-14 && (k + b0.1).norm() < 1e-14);
        // detuned branch stays unitary
        p.carrier_detuning = 1.3;
        let (g, k) = two_level_oracle(c(0.0, 0.0), c(1.0, 0.0), &p, PI / area).unwrap();
        assert!((g.norm_sqr() + k.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(g.norm_sqr() < 0.99);
    }

    #[test]
    fn detuned_oracle_converges_to_resonant_limit() {
        let mut p = PulseSpec::new(1.0, 0.0, Storage::G);
        let w = PI / p.envelope_area();
        p.carrier_detuning = 1e-7;
        let (g, _) = two_level_oracle(c(0.0, 0.0), c(1.0, 0.0), &p, w).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn report_for_standard_pulse() {
        let spec = ManifoldSpec::new(180, 8).unwrap();
        let p = PulseSpec::new(standard_fwhm(&spec), 0.0, Storage::G);
        let r = validate_pulse(&spec, &p);
        assert!(r.duration_ok && r.bandwidth_ok && r.warnings.is_empty());
        assert!((r.spectral_fwhm_d_over_tk - 4.0 / PI).abs() < 1e-12);
        let long = PulseSpec::new(10.0 * spec.time_scales().t_kepler, 0.0, Storage::G);
        let r = validate_pulse(&spec, &long);
        assert!(!r.duration_ok && !r.passed());
        let short = PulseSpec::new(0.25 * standard_fwhm(&spec), 0.0, Storage::G);
        let r = validate_pulse(&spec, &short);
        assert!(r.passed() && !r.bandwidth_ok && r.warnings.len() == 1);
    }

    #[test]
    fn bad_pulses_are_rejected() {
        let p = PulseSpec::new(-1.0, 0.0, Storage::G);
        assert!(matches!(p.check(), Err(Error::InvalidPulse(_))));
        let mut p = PulseSpec::new(1.0, 0.0, Storage::G);
        p.phase = f64::NAN;
        assert!(p.check().is_err());
    }

    #[test]
    fn pulse_before_clock_is_rejected() {
        let spec = ManifoldSpec::new(180, 4).unwrap();
        let bt = AmplitudeVector::uniform(4, BasisTag::Packet);
        let state = SimulationState::from_packets(spec, &bt, 10.0, SpectrumMode::Exact).unwrap();
        let p = PulseSpec::new(1.0, 0.0, Storage::G);
        assert!(matches!(
            integrate_pulse(&state, &p, &PulseOptions::default()),
            Err(Error::InvalidPulse(_))
        ));
    }
}
