//! Running schedules and scoring them against target unitaries.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::{storage_rotation, GateSchedule, Primitive};
use crate::basis::{AmplitudeVector, BasisTag};
use crate::error::{Error, Result};
use crate::evolution::evolution_kernel;
use crate::manifold::SpectrumMode;
use crate::pulse::{apply_instantaneous, integrate_pulse, PulseOptions, SimulationState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseModel {
    /// Integrate the multilevel equations across every manifold pulse.
    #[default]
    Full,
    /// Replace each manifold pulse by an exact π rotation between the
    /// storage level and the core slot at the pulse centre.
    Instantaneous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub model: PulseModel,
    pub mode: SpectrumMode,
    pub pulse: PulseOptions,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            model: PulseModel::Full,
            mode: SpectrumMode::Exact,
            pulse: PulseOptions {
                record_every: 0,
                ..Default::default()
            },
        }
    }
}

impl SimulationOptions {
    pub fn ideal() -> Self {
        Self {
            model: PulseModel::Instantaneous,
            mode: SpectrumMode::Taylor1,
            ..Default::default()
        }
    }
}

/// Run `schedule` on packet amplitudes given at clock 0.
pub fn simulate_schedule(
    schedule: &GateSchedule,
    input: &AmplitudeVector,
    opts: &SimulationOptions,
) -> Result<SimulationState> {
    input.expect_basis(BasisTag::Packet)?;
    let state = SimulationState::from_packets(schedule.spec, input, 0.0, opts.mode)?;
    run_schedule(schedule, state, opts)
}

/// Run `schedule` on a full state whose clock is the schedule's clock 0.
///
/// Storage amplitudes are carried through, so a populated storage level
/// takes part in every pulse that addresses it.
pub fn run_schedule(
    schedule: &GateSchedule,
    mut state: SimulationState,
    opts: &SimulationOptions,
) -> Result<SimulationState> {
    if state.spec != schedule.spec {
        return Err(Error::DimensionMismatch {
            expected: schedule.spec.d(),
            found: state.spec.d(),
        });
    }
    let hw = schedule.pulse_spec(crate::pulse::Storage::G, 0.0, 0.0).half_width();
    for (index, p) in schedule.primitives.iter().enumerate() {
        let wrap = |e: Error| Error::Event {
            index,
            source: Box::new(e),
        };
        match *p {
            Primitive::Wait { dt } => state.wait(dt).map_err(wrap)?,
            Primitive::ManifoldPiPulse {
                storage,
                phase,
                center,
                ..
            } => match opts.model {
                PulseModel::Full => {
                    let pulse = schedule.pulse_spec(storage, phase, center);
                    if state.t < pulse.start() {
                        state.t = pulse.start();
                    }
                    state = integrate_pulse(&state, &pulse, &opts.pulse).map_err(wrap)?.state;
                }
                PulseModel::Instantaneous => {
                    if state.t > center - hw + 1e-9 * hw {
                        return Err(wrap(Error::InvalidPulse(format!(
                            "pulse centred at {center} overlaps the clock {}",
                            state.t
                        ))));
                    }
                    // a detuned carrier shifts the effective field phase by −Δ_0·t_c
                    let phase = phase - schedule.carrier_detuning * center;
                    apply_instantaneous(&mut state, storage, PI, phase, center).map_err(wrap)?;
                    state.t = center + hw;
                }
            },
            Primitive::StoragePulse { theta, phi, detuning } => {
                let r = storage_rotation(theta, phi, detuning);
                let (g, e) = (state.b_g, state.b_e);
                state.b_g = r[0][0] * g + r[0][1] * e;
                state.b_e = r[1][0] * g + r[1][1] * e;
            }
            Primitive::StoragePhase { phase_g, phase_e } => {
                state.b_g *= Complex64::from_polar(1.0, phase_g);
                state.b_e *= Complex64::from_polar(1.0, phase_e);
            }
        }
    }
    Ok(state)
}

/// Simulated d×d map on packet amplitudes: column c is the final packet
/// vector (read at the schedule's end clock) for input slot c.
///
/// Columns are simulated in parallel and assembled in a fixed order.
pub fn process_matrix(schedule: &GateSchedule, opts: &SimulationOptions) -> Result<DMatrix<Complex64>> {
    let spec = schedule.spec;
    let d = spec.d();
    if schedule.pulse_count() == 0 {
        // storage stays empty, so the map is the free-evolution circulant
        schedule.validate()?;
        let kernel = evolution_kernel(&spec, schedule.total_duration(), opts.mode);
        return Ok(DMatrix::from_fn(d, d, |r, c| kernel.entries[(r + d - c) % d]));
    }
    let cols: Vec<Result<Vec<Complex64>>> = (0..d)
        .into_par_iter()
        .map(|pos| {
            let input = AmplitudeVector::basis_state(&spec, spec.index_at(pos), BasisTag::Packet)?;
            Ok(simulate_schedule(schedule, &input, opts)?.packets().values)
        })
        .collect();
    let mut m = DMatrix::zeros(d, d);
    for (c, col) in cols.into_iter().enumerate() {
        for (r, v) in col?.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

/// Haar-averaged state fidelity of the map M against unitary U:
/// (Tr(AA†) + |Tr A|²) / (d(d+1)) with A = U†M.
pub fn average_fidelity(m: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> f64 {
    let d = u.nrows() as f64;
    let a = u.adjoint() * m;
    let tr = a.trace();
    let hs: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    (hs + tr.norm_sqr()) / (d * (d + 1.0))
}

/// Process fidelity of `schedule` against `target`, simulated with `opts`.
pub fn process_fidelity(
    schedule: &GateSchedule,
    target: &DMatrix<Complex64>,
    opts: &SimulationOptions,
) -> Result<f64> {
    let d = schedule.spec.d();
    if target.nrows() != d || target.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: target.nrows(),
        });
    }
    let m = process_matrix(schedule, opts)?;
    Ok(average_fidelity(&m, target).clamp(0.0, 1.0))
}

/// Mean of |⟨U k|M k⟩|² over the d packet basis states.
pub fn basis_state_fidelity(m: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> f64 {
    let d = u.ncols();
    (0..d)
        .map(|c| {
            let overlap: Complex64 = (0..d).map(|r| u[(r, c)].conj() * m[(r, c)]).sum();
            overlap.norm_sqr()
        })
        .sum::<f64>()
        / d as f64
}
