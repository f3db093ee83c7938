//! TOML experiment configs.
//!
//! ```toml
//! name = "dark_packet"
//! seed = 7
//! spectrum = "exact"
//! start_time = "-1 slot"
//!
//! [manifold]
//! nbar = 180
//! d = 8
//!
//! [initial_state]
//! kind = "uniform"
//! basis = "packet"
//!
//! [[events]]
//! kind = "pulse"
//! storage = "g"
//! fwhm = "0.3466 slot"
//! center = "0 au"
//! area = 3.141592653589793
//! phase = 0.0
//!
//! [[events]]
//! kind = "wait"
//! duration = "1 kepler"
//!
//! [outputs]
//! trace_step = "0.05 kepler"
//! observables = ["autocorrelation"]
//! ```
//!
//! Times carry unit tags (`au`, `ns`, `ps`, `kepler`, `slot`, `revival`, ...).
//! The only physical default is a zero carrier detuning.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Check, ScenarioReport};
use crate::basis::{AmplitudeVector, BasisTag};
use crate::error::{Error, Result};
use crate::gates::{
    compile_unitary, haar_unitary, process_fidelity, run_schedule, shift_matrix, unitarity_error, Carrier,
    GateOptions, PulseModel, SimulationOptions, Timing, UNITARITY_TOLERANCE,
};
use crate::manifold::{ManifoldSpec, SpectrumMode};
use crate::pulse::{
    integrate_pulse_observed, pi_pulse_area_calibration, validate_pulse, PulseOptions, PulseSpec,
    SimulationState, Storage,
};
use crate::trace::TraceRecord;
use crate::units::{au_to_ns, FrequencyQuantity, TimeQuantity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub spectrum: SpectrumMode,
    /// Clock reading at which `initial_state` holds (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_time: Option<TimeQuantity>,
    pub manifold: ManifoldSpec,
    pub initial_state: InitialState,
    #[serde(default)]
    pub events: Vec<EventConfig>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Equal amplitudes 1/√d in the given basis.
    Uniform { basis: BasisTag },
    /// A single packet slot k.
    Packet { k: i64 },
    /// A single energy level n̄ + j.
    Energy { j: i64 },
    /// Explicit amplitudes in storage order (index j_min first).
    Amplitudes {
        basis: BasisTag,
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
        #[serde(default)]
        normalize: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventConfig {
    Wait {
        duration: TimeQuantity,
    },
    WaitUntil {
        time: TimeQuantity,
    },
    /// A Gaussian manifold pulse. Exactly one of `area` (radians seen by
    /// the core packet) and `peak_rabi` must be given.
    Pulse {
        storage: Storage,
        fwhm: TimeQuantity,
        center: TimeQuantity,
        phase: f64,
        area: Option<f64>,
        peak_rabi: Option<FrequencyQuantity>,
        carrier_detuning: Option<FrequencyQuantity>,
    },
    /// A compiled d-level gate. It starts at the next whole period of its
    /// core-arrival clock; pulse phases are referenced to that start.
    /// Exactly one of `matrix`, `shift` and `haar` names the target.
    Gate {
        matrix: Option<Vec<Vec<[f64; 2]>>>,
        shift: Option<i64>,
        haar: Option<u64>,
        fwhm: TimeQuantity,
        model: Option<PulseModel>,
        carrier: Option<Carrier>,
        timing: Option<Timing>,
    },
}

impl EventConfig {
    /// Target of a gate event.
    pub fn gate_target(&self) -> Result<GateTarget> {
        let EventConfig::Gate { matrix, shift, haar, .. } = self else {
            return Err(config_err("kind", "not a gate event"));
        };
        match (matrix, shift, haar) {
            (Some(m), None, None) => Ok(GateTarget::Matrix(m.clone())),
            (None, Some(n), None) => Ok(GateTarget::Shift(*n)),
            (None, None, Some(h)) => Ok(GateTarget::Haar(*h)),
            _ => Err(config_err("shift", "give exactly one of `matrix`, `shift` and `haar`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateTarget {
    /// Rows of `[re, im]` pairs, storage order.
    Matrix(Vec<Vec<[f64; 2]>>),
    /// Cyclic permutation by n slots.
    Shift(i64),
    /// Haar-random unitary drawn from this seed offset (added to the
    /// scenario seed).
    Haar(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// |⟨ψ(0)|ψ(t)⟩|² of the manifold part, also added to every trace row.
    Autocorrelation,
    /// Process fidelity of every gate event's schedule against its target.
    GateFidelity,
    /// Duration and bandwidth report of every pulse event.
    PulseReports,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Sampling interval for waits; without it only event boundaries are
    /// recorded.
    pub trace_step: Option<TimeQuantity>,
    /// Record every accepted integrator step during pulses.
    #[serde(default)]
    pub pulse_steps: bool,
    #[serde(default)]
    pub observables: Vec<Observable>,
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(s).map_err(|e| {
            let field = match e.span() {
                Some(span) => {
                    let line = s[..span.start.min(s.len())].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "document".to_string(),
            };
            config_err(field, e.message().to_string())
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config { field, message } => Error::Config {
                field: format!("{}: {field}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err("document", e.to_string()))
    }

    /// Semantic checks that the schema alone cannot express.
    pub fn check(&self) -> Result<()> {
        let spec = self.manifold;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(config_err("name", "must be a non-empty file-name-safe string"));
        }
        self.initial_amplitudes()?;
        if let Some(step) = self.outputs.trace_step {
            if !(step.to_au(&spec) > 0.0) {
                return Err(config_err("outputs.trace_step", "must be positive"));
            }
        }
        for (i, ev) in self.events.iter().enumerate() {
            let at = |f: &str| format!("events[{i}].{f}");
            match ev {
                EventConfig::Wait { duration } => {
                    if duration.to_au(&spec) < 0.0 {
                        return Err(config_err(at("duration"), "must be non-negative"));
                    }
                }
                EventConfig::WaitUntil { .. } => {}
                EventConfig::Pulse {
                    fwhm, area, peak_rabi, ..
                } => {
                    if !(fwhm.to_au(&spec) > 0.0) {
                        return Err(config_err(at("fwhm"), "must be positive"));
                    }
                    match (area, peak_rabi) {
                        (Some(_), Some(_)) | (None, None) => {
                            return Err(config_err(at("area"), "give exactly one of `area` and `peak_rabi`"))
                        }
                        (Some(a), None) if !a.is_finite() => {
                            return Err(config_err(at("area"), "must be finite"))
                        }
                        _ => {}
                    }
                }
                EventConfig::Gate { fwhm, .. } => {
                    if !(fwhm.to_au(&spec) > 0.0) {
                        return Err(config_err(at("fwhm"), "must be positive"));
                    }
                    let target = ev.gate_target().map_err(|e| match e {
                        Error::Config { message, .. } => config_err(at("shift"), message),
                        other => other,
                    })?;
                    self.gate_matrix(&target).map_err(|e| match e {
                        Error::Config { message, .. } => config_err(at("matrix"), message),
                        other => other,
                    })?;
                }
            }
        }
        Ok(())
    }

    fn initial_amplitudes(&self) -> Result<AmplitudeVector> {
        let spec = &self.manifold;
        let d = spec.d();
        let field = "initial_state";
        match &self.initial_state {
            InitialState::Uniform { basis } => Ok(AmplitudeVector::uniform(d, *basis)),
            InitialState::Packet { k } => AmplitudeVector::basis_state(spec, *k, BasisTag::Packet)
                .map_err(|e| config_err(format!("{field}.k"), e.to_string())),
            InitialState::Energy { j } => AmplitudeVector::basis_state(spec, *j, BasisTag::Energy)
                .map_err(|e| config_err(format!("{field}.j"), e.to_string())),
            InitialState::Amplitudes {
                basis,
                re,
                im,
                normalize,
            } => {
                if re.len() != d {
                    return Err(config_err(format!("{field}.re"), format!("expected {d} values")));
                }
                if !im.is_empty() && im.len() != d {
                    return Err(config_err(format!("{field}.im"), format!("expected {d} values or none")));
                }
                let values = (0..d)
                    .map(|i| Complex64::new(re[i], im.get(i).copied().unwrap_or(0.0)))
                    .collect();
                let v = AmplitudeVector::new(values, *basis);
                let n = v.norm_sqr();
                if !(n > 0.0) || !n.is_finite() {
                    return Err(config_err(format!("{field}.re"), "amplitudes must have finite non-zero norm"));
                }
                if *normalize {
                    Ok(v.normalized())
                } else if (n - 1.0).abs() > 1e-9 {
                    Err(config_err(
                        format!("{field}.re"),
                        format!("norm² is {n}; set normalize = true to rescale"),
                    ))
                } else {
                    Ok(v)
                }
            }
        }
    }

    fn gate_matrix(&self, target: &GateTarget) -> Result<DMatrix<Complex64>> {
        let spec = &self.manifold;
        let d = spec.d();
        match target {
            GateTarget::Shift(n) => Ok(shift_matrix(spec, *n)),
            GateTarget::Haar(offset) => Ok(haar_unitary(d, self.seed.wrapping_add(*offset))),
            GateTarget::Matrix(rows) => {
                let u = matrix_from_rows(rows, d).map_err(|e| config_err("matrix", e))?;
                let err = unitarity_error(&u);
                if err > UNITARITY_TOLERANCE {
                    return Err(config_err("matrix", format!("not unitary (deviation {err:.3e})")));
                }
                Ok(u)
            }
        }
    }
}

/// Square complex matrix from rows of `[re, im]` pairs.
fn matrix_from_rows(rows: &[Vec<[f64; 2]>], d: usize) -> std::result::Result<DMatrix<Complex64>, String> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(format!("expected a {d}x{d} matrix"));
    }
    Ok(DMatrix::from_fn(d, d, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
}

/// Input of the `compile` and `verify` commands:
/// `{"manifold": {"nbar": 180, "d": 4}, "matrix": [[[re, im], ...], ...], "fwhm": "0.17 slot"}`.
///
/// Rows and columns are packet slots in storage order (k = j_min first).
/// `fwhm` overrides the compiler's default pulse width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryFile {
    pub manifold: ManifoldSpec,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm: Option<TimeQuantity>,
}

impl UnitaryFile {
    pub fn new(manifold: ManifoldSpec, u: &DMatrix<Complex64>) -> Self {
        let matrix = (0..u.nrows())
            .map(|r| (0..u.ncols()).map(|c| [u[(r, c)].re, u[(r, c)].im]).collect())
            .collect();
        Self {
            manifold,
            matrix,
            fwhm: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| config_err(format!("line {}", e.line()), e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The matrix, checked for shape and unitarity.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        let u = matrix_from_rows(&self.matrix, self.manifold.d()).map_err(|e| config_err("matrix", e))?;
        let err = unitarity_error(&u);
        if err > UNITARITY_TOLERANCE {
            return Err(config_err("matrix", format!("not unitary (deviation {err:.3e})")));
        }
        Ok(u)
    }
}

/// Trace header for config runs.
fn columns(spec: &ManifoldSpec) -> Vec<String> {
    let mut cols = vec!["t_au".to_string(), "t_si_ns".to_string(), "pop_g".to_string(), "pop_e".to_string()];
    cols.extend(spec.j_range().map(|k| format!("k={k}")));
    cols.push("autocorr".to_string());
    cols.push("norm_error".to_string());
    cols
}

struct Recorder {
    t0: f64,
    initial: Vec<Complex64>,
    norm0: f64,
    trace: TraceRecord,
}

impl Recorder {
    fn autocorr(&self, s: &SimulationState) -> f64 {
        s.spec
            .detunings(s.mode)
            .iter()
            .zip(&self.initial)
            .zip(&s.b_energy)
            .map(|((w, a0), a)| a0.conj() * a * Complex64::from_polar(1.0, -w * (s.t - self.t0)))
            .sum::<Complex64>()
            .norm_sqr()
    }

    fn row(&self, s: &SimulationState) -> Vec<f64> {
        let mut row = vec![s.t, au_to_ns(s.t), s.b_g.norm_sqr(), s.b_e.norm_sqr()];
        row.extend(s.packets().populations());
        row.push(self.autocorr(s));
        row.push(s.total_population() - self.norm0);
        row
    }

    fn record(&mut self, s: &SimulationState) {
        let row = self.row(s);
        // skip exact repeats at event boundaries
        if self.trace.rows.last() != Some(&row) {
            self.trace.push(row);
        }
    }
}

/// Execute a config. Failures inside the event list carry the event index.
pub fn run_config(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.check()?;
    let spec = cfg.manifold;
    let mode = cfg.spectrum;
    let init = cfg.initial_amplitudes()?;
    let t0 = cfg.start_time.map_or(0.0, |q| q.to_au(&spec));
    let mut state = match init.basis {
        BasisTag::Packet => SimulationState::from_packets(spec, &init, t0, mode)?,
        BasisTag::Energy => SimulationState::from_energy(spec, &init, t0, mode)?,
    };
    let mut rec = Recorder {
        t0,
        initial: state.b_energy.clone(),
        norm0: state.total_population(),
        trace: TraceRecord::new(columns(&spec)),
    };
    rec.record(&state);

    let wants = |o: Observable| cfg.outputs.observables.contains(&o);
    let step = cfg.outputs.trace_step.map(|q| q.to_au(&spec));
    let mut report = ScenarioReport::new(&cfg.name, None);
    let mut gate_records = Vec::new();
    let mut pulse_records = Vec::new();

    for (index, ev) in cfg.events.iter().enumerate() {
        let wrap = |e: Error| Error::Event {
            index,
            source: Box::new(e),
        };
        match ev {
            EventConfig::Wait { duration } => {
                let t1 = state.t + duration.to_au(&spec);
                sampled_wait(&mut state, t1, step, &mut rec).map_err(wrap)?;
            }
            EventConfig::WaitUntil { time } => {
                sampled_wait(&mut state, time.to_au(&spec), step, &mut rec).map_err(wrap)?;
            }
            EventConfig::Pulse {
                storage,
                fwhm,
                center,
                phase,
                area,
                peak_rabi,
                carrier_detuning,
            } => {
                let mut pulse = PulseSpec::new(fwhm.to_au(&spec), center.to_au(&spec), *storage);
                pulse.phase = *phase;
                pulse.carrier_detuning = carrier_detuning.map_or(0.0, |q| q.to_au(&spec));
                let opts = PulseOptions {
                    record_every: 0,
                    ..Default::default()
                };
                pulse.peak_rabi = match (area, peak_rabi) {
                    (Some(a), _) => a / PI * pi_pulse_area_calibration(&spec, &pulse, opts.rabi_exponent),
                    (None, Some(q)) => q.to_au(&spec),
                    (None, None) => unreachable!("checked"),
                };
                if state.t > pulse.start() + 1e-9 * pulse.fwhm {
                    return Err(wrap(Error::InvalidPulse(format!(
                        "pulse starts at {} au but the clock is already at {} au",
                        pulse.start(),
                        state.t
                    ))));
                }
                sampled_wait(&mut state, pulse.start(), step, &mut rec).map_err(wrap)?;
                let every = cfg.outputs.pulse_steps;
                let (out, _) = integrate_pulse_observed(&state, &pulse, pulse.end(), &opts, |s| {
                    if every {
                        rec.record(s);
                    }
                })
                .map_err(wrap)?;
                state = out;
                rec.record(&state);
                if wants(Observable::PulseReports) {
                    let mut v = serde_json::to_value(validate_pulse(&spec, &pulse))?;
                    v["event"] = index.into();
                    v["peak_rabi_au"] = pulse.peak_rabi.into();
                    pulse_records.push(v);
                }
            }
            EventConfig::Gate {
                fwhm,
                model,
                carrier,
                timing,
                ..
            } => {
                let target = ev.gate_target().map_err(wrap)?;
                let u = cfg.gate_matrix(&target).map_err(wrap)?;
                let mut gopts = GateOptions::for_spec(&spec);
                gopts.fwhm = fwhm.to_au(&spec);
                if let Some(c) = carrier {
                    gopts.carrier = *c;
                }
                if let Some(t) = timing {
                    gopts.timing = *t;
                }
                let schedule = compile_unitary(&u, &spec, &gopts).map_err(wrap)?;
                let sim = SimulationOptions {
                    model: model.unwrap_or_default(),
                    mode,
                    ..Default::default()
                };
                // start on the schedule's period grid
                let start = (state.t / schedule.period - 1e-9).ceil().max(0.0) * schedule.period;
                sampled_wait(&mut state, start, step, &mut rec).map_err(wrap)?;
                let local = shift_clock(&state, -start);
                let out = run_schedule(&schedule, local, &sim).map_err(wrap)?;
                state = shift_clock(&out, start);
                state.t = start + schedule.total_duration();
                rec.record(&state);
                let mut g = serde_json::json!({
                    "event": index,
                    "start_au": start,
                    "duration_au": schedule.total_duration(),
                    "duration_kepler": schedule.total_kepler(),
                    "pulses": schedule.pulse_count(),
                });
                if wants(Observable::GateFidelity) {
                    g["process_fidelity"] = process_fidelity(&schedule, &u, &sim).map_err(wrap)?.into();
                }
                gate_records.push(g);
            }
        }
    }

    let norm_error = (state.total_population() - rec.norm0).abs();
    report.observe("seed", cfg.seed);
    report.observe("final_time_au", state.t);
    report.observe("final_packet_populations", state.packets().populations());
    report.observe("final_energy_populations", state.energy().populations());
    report.observe("final_ground_population", state.b_g.norm_sqr());
    report.observe("final_excited_storage_population", state.b_e.norm_sqr());
    report.observe("norm_error", norm_error);
    if wants(Observable::Autocorrelation) {
        report.observe("final_autocorrelation", rec.autocorr(&state));
    }
    if !gate_records.is_empty() {
        report.observe("gates", gate_records);
    }
    if wants(Observable::PulseReports) {
        report.observe("pulses", pulse_records);
    }
    report.check(Check::at_most("norm_error", norm_error, 1e-8));
    report.traces.push(("trace".into(), rec.trace));
    Ok(report)
}

/// The same physical state described on a clock shifted by `dt`: packet
/// amplitudes at new time t + dt equal the old ones at t.
fn shift_clock(state: &SimulationState, dt: f64) -> SimulationState {
    let mut out = state.clone();
    for (b, w) in out.b_energy.iter_mut().zip(state.spec.detunings(state.mode)) {
        *b *= Complex64::from_polar(1.0, w * dt);
    }
    out.t = state.t + dt;
    out
}

fn sampled_wait(state: &mut SimulationState, t1: f64, step: Option<f64>, rec: &mut Recorder) -> Result<()> {
    if t1 < state.t {
        return Err(Error::NegativeInterval(t1 - state.t));
    }
    if let Some(h) = step {
        let t0 = state.t;
        let n = ((t1 - t0) / h).floor() as usize;
        for i in 1..=n {
            state.t = t0 + i as f64 * h;
            if state.t < t1 {
                rec.record(state);
            }
        }
    }
    state.t = t1;
    rec.record(state);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
[manifold]
nbar = 180
d = 8
[initial_state]
kind = "packet"
k = 0
"#;

    #[test]
    fn empty_event_list_keeps_initial_state() {
        let cfg = ScenarioConfig::from_toml(BASE).unwrap();
        let r = run_config(&cfg).unwrap();
        let pops = r.observables["final_packet_populations"].as_array().unwrap().clone();
        let core = cfg.manifold.position(0).unwrap();
        for (i, p) in pops.iter().enumerate() {
            let expect = if i == core { 1.0 } else { 0.0 };
            assert!((p.as_f64().unwrap() - expect).abs() < 1e-15);
        }
        assert_eq!(r.trace("trace").unwrap().len(), 1);
    }

    #[test]
    fn unknown_field_is_rejected_with_line() {
        let text = format!("{BASE}bogus = 1\n");
        match ScenarioConfig::from_toml(&text) {
            Err(Error::Config { field, message }) => {
                assert!(field.starts_with("line"), "{field}");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn untagged_time_is_rejected() {
        let text = format!("{BASE}[[events]]\nkind = \"wait\"\nduration = \"3\"\n");
        assert!(matches!(ScenarioConfig::from_toml(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn pulse_needs_one_strength() {
        let text = format!(
            "{BASE}[[events]]\nkind = \"pulse\"\nstorage = \"g\"\nfwhm = \"0.2 slot\"\ncenter = \"0 au\"\nphase = 0.0\n"
        );
        match ScenarioConfig::from_toml(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "events[0].area"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn late_pulse_reports_event_index() {
        let text = format!(
            "{BASE}[[events]]\nkind = \"wait\"\nduration = \"1 kepler\"\n\
             [[events]]\nkind = \"pulse\"\nstorage = \"g\"\nfwhm = \"0.2 slot\"\ncenter = \"0 au\"\nphase = 0.0\narea = 3.14\n"
        );
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        match run_config(&cfg) {
            Err(Error::Event { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let text = format!(
            "{BASE}seed = 3\n[[events]]\nkind = \"gate\"\nshift = 2\nfwhm = \"0.17 slot\"\n\
             [[events]]\nkind = \"wait\"\nduration = \"0.5 kepler\"\n"
        );
        // top-level keys after a table belong to that table, so move seed up
        let text = text.replace("seed = 3\n", "");
        let text = text.replacen("name = \"t\"", "name = \"t\"\nseed = 3", 1);
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        let again = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn shift_gate_event_moves_the_packet() {
        let text = r#"
name = "shift"
spectrum = "taylor1"
[manifold]
nbar = 180
d = 4
[initial_state]
kind = "packet"
k = 0
[[events]]
kind = "gate"
shift = 1
fwhm = "0.17 slot"
"#;
        let cfg = ScenarioConfig::from_toml(text).unwrap();
        let r = run_config(&cfg).unwrap();
        let pops: Vec<f64> = r.observables["final_packet_populations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert!((pops[cfg.manifold.position(1).unwrap()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_after_offset_matches_gate_at_zero() {
        let make = |wait: &str| {
            format!(
                r#"
name = "g"
seed = 5
spectrum = "taylor1"
[manifold]
nbar = 180
d = 4
[initial_state]
kind = "amplitudes"
basis = "packet"
re = [0.5, 0.5, 0.5, 0.5]
im = [0.0, 0.0, 0.0, 0.0]
[[events]]
kind = "wait"
duration = "{wait}"
[[events]]
kind = "gate"
haar = 1
fwhm = "0.1 slot"
model = "instantaneous"
"#
            )
        };
        let a = run_config(&ScenarioConfig::from_toml(&make("0 au")).unwrap()).unwrap();
        let b = run_config(&ScenarioConfig::from_toml(&make("3 kepler")).unwrap()).unwrap();
        let pa = a.observables["final_packet_populations"].as_array().unwrap();
        let pb = b.observables["final_packet_populations"].as_array().unwrap();
        for (x, y) in pa.iter().zip(pb) {
            assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-10);
        }
    }
}
