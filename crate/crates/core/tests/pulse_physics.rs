use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use rydberg_qudit::integrate::IntegratorOptions;
use rydberg_qudit::pulse::{
    integrate_pulse, pi_pulse_area_calibration, rabi_profile, standard_fwhm, two_level_oracle, CoupledLevels,
    PulseOptions, RABI_EXPONENT,
};
use rydberg_qudit::scenarios::fig2_run;
use rydberg_qudit::{AmplitudeVector, BasisTag, ManifoldSpec, PulseSpec, SimulationState, SpectrumMode, Storage};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn normalized(v: Vec<(f64, f64)>) -> Vec<Complex64> {
    let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn state_strategy(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-2))
        .prop_map(normalized)
}

fn tight(pulse: &PulseSpec) -> IntegratorOptions {
    IntegratorOptions {
        rtol: 1e-12,
        atol: 1e-14,
        max_step: pulse.fwhm / 50.0,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn full_model_conserves_norm(
        (d, bt) in (3usize..=10).prop_flat_map(|d| (Just(d), state_strategy(d))),
        theta in 0.1f64..3.0 * PI,
        phase in 0.0f64..2.0 * PI,
        detune_slots in -2.0f64..2.0,
        fwhm_slots in 0.1f64..0.6,
        into_e in any::<bool>(),
    ) {
        let spec = ManifoldSpec::new(180, d).unwrap();
        let slot = spec.slot_time();
        let storage = if into_e { Storage::E } else { Storage::G };
        let mut pulse = PulseSpec::new(fwhm_slots * slot, 0.0, storage);
        pulse.phase = phase;
        pulse.carrier_detuning = 2.0 * PI * detune_slots / slot;
        pulse.peak_rabi = theta / PI * pi_pulse_area_calibration(&spec, &pulse, RABI_EXPONENT);
        let state = SimulationState::from_packets(
            spec,
            &AmplitudeVector::new(bt, BasisTag::Packet),
            pulse.start(),
            SpectrumMode::Exact,
        )
        .unwrap();
        let out = integrate_pulse(&state, &pulse, &PulseOptions { record_every: 0, ..Default::default() }).unwrap();
        prop_assert!(out.norm_error <= 1e-8, "norm error {:e}", out.norm_error);
        prop_assert!((out.state.total_population() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn single_level_matches_rabi_formula(
        y0 in state_strategy(2),
        theta in 0.0f64..4.0 * PI,
        phase in 0.0f64..2.0 * PI,
        fwhm in 0.5f64..50.0,
    ) {
        let mut pulse = PulseSpec::new(fwhm, 3.0, Storage::G);
        pulse.phase = phase;
        let omega = theta / pulse.envelope_area();
        let levels = CoupledLevels { rabi: vec![omega], detuning: vec![0.0] };
        let mut y = y0.clone();
        levels.integrate(&pulse, &mut y, &tight(&pulse), |_, _| {}).unwrap();
        let (s, co) = (0.5 * theta).sin_cos();
        let i = c(0.0, 1.0);
        let bs = co * y0[0] + i * Complex64::from_polar(s, phase) * y0[1];
        let b1 = i * Complex64::from_polar(s, -phase) * y0[0] + co * y0[1];
        prop_assert!((y[0] - bs).norm() < 1e-8 && (y[1] - b1).norm() < 1e-8, "{y:?} vs {bs} {b1}");
    }

    /// Flipping every level detuning and the field phase maps the solution
    /// to (−b_s*, b_j*).
    #[test]
    fn detuning_reflection_conjugates_amplitudes(
        y0 in (1usize..=6).prop_flat_map(|n| state_strategy(n + 1)),
        raw in prop::collection::vec((0.0f64..6.0, -4.0f64..4.0), 6),
        phase in 0.0f64..2.0 * PI,
    ) {
        let n = y0.len() - 1;
        let mut pulse = PulseSpec::new(1.0, 0.0, Storage::G);
        pulse.phase = phase;
        let forward = CoupledLevels {
            rabi: raw[..n].iter().map(|r| r.0).collect(),
            detuning: raw[..n].iter().map(|r| r.1).collect(),
        };
        let mirrored = CoupledLevels {
            rabi: forward.rabi.clone(),
            detuning: forward.detuning.iter().map(|d| -d).collect(),
        };
        let opts = tight(&pulse);
        let mut y = y0.clone();
        forward.integrate(&pulse, &mut y, &opts, |_, _| {}).unwrap();

        let mut flipped = pulse;
        flipped.phase = -phase;
        let mut z: Vec<Complex64> = y0.iter().map(|a| a.conj()).collect();
        z[0] = -z[0];
        mirrored.integrate(&flipped, &mut z, &opts, |_, _| {}).unwrap();

        prop_assert!((z[0] + y[0].conj()).norm() < 1e-8);
        for (a, b) in y[1..].iter().zip(&z[1..]) {
            prop_assert!((a.conj() - b).norm() < 1e-8);
            prop_assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-8);
        }
    }
}

#[test]
fn shorter_pulses_approach_the_two_level_limit() {
    let spec = ManifoldSpec::new(180, 8).unwrap();
    let slot = spec.slot_time();
    let opts = PulseOptions { record_every: 0, ..Default::default() };
    // τ = T_K/8d, T_K/4d, T_K/2d
    let runs: Vec<_> = [0.125, 0.25, 0.5]
        .iter()
        .map(|f| fig2_run(&spec, f * slot, &opts).unwrap())
        .collect();
    let transfer: Vec<f64> = runs.iter().map(|r| 1.0 - 8.0 * r.core_population()).collect();
    let depletion: Vec<f64> = runs.iter().map(|r| r.neighbour_depletion()).collect();
    let ground_gap: Vec<f64> = runs.iter().map(|r| (r.ground_population() - 0.125).abs()).collect();
    assert!(transfer[0] > transfer[1] && transfer[1] > transfer[2], "{transfer:?}");
    assert!(depletion[0] < depletion[1] && depletion[1] < depletion[2], "{depletion:?}");
    assert!(ground_gap[0] < ground_gap[1] && ground_gap[1] < ground_gap[2], "{ground_gap:?}");
    assert!(transfer[0] > 0.999);
}

#[test]
fn halving_fixed_step_converges_at_fifth_order() {
    let spec = ManifoldSpec::new(180, 8).unwrap();
    let fwhm = standard_fwhm(&spec);
    let reference = fig2_run(
        &spec,
        fwhm,
        &PulseOptions {
            rtol: 1e-13,
            atol: 1e-15,
            record_every: 0,
            ..Default::default()
        },
    )
    .unwrap();
    let mut state_err = Vec::new();
    let mut norm_err = Vec::new();
    for div in [4.0, 8.0, 16.0, 32.0] {
        let run = fig2_run(
            &spec,
            fwhm,
            &PulseOptions {
                fixed_step: Some(fwhm / div),
                record_every: 0,
                ..Default::default()
            },
        )
        .unwrap();
        let e = run
            .after
            .b_energy
            .iter()
            .zip(&reference.after.b_energy)
            .map(|(a, b)| (a - b).norm())
            .fold((run.after.b_g - reference.after.b_g).norm(), f64::max);
        state_err.push(e);
        norm_err.push(run.norm_error);
    }
    // fifth-order stepping: every halving gains at least 2^4 and the
    // average gain over three halvings is at least 2^4.5
    for w in state_err.windows(2) {
        assert!(w[0] / w[1] >= 16.0, "state error {state_err:?}");
    }
    let mean_gain = (state_err[0] / state_err[3]).powf(1.0 / 3.0);
    assert!(mean_gain >= 2f64.powf(4.5), "mean gain {mean_gain}, {state_err:?}");
    for w in norm_err.windows(2) {
        assert!(w[1] < w[0], "norm error {norm_err:?}");
    }
}

#[test]
fn calibrated_two_level_oracle_empties_the_core() {
    for d in [4usize, 8, 12] {
        let spec = ManifoldSpec::new(180, d).unwrap();
        let mut pulse = PulseSpec::new(standard_fwhm(&spec), 0.0, Storage::G);
        pulse.peak_rabi = pi_pulse_area_calibration(&spec, &pulse, RABI_EXPONENT);
        let w0 = rabi_profile(&spec, pulse.peak_rabi).omega_tilde(&spec, 0).unwrap().norm();
        let (bg, core) = two_level_oracle(c(0.0, 0.0), c(1.0, 0.0), &pulse, w0).unwrap();
        assert!(bg.norm_sqr() > 1.0 - 1e-6, "d={d}: {}", bg.norm_sqr());
        assert!(core.norm_sqr() < 1e-6);
        // and back again
        let (_, back) = two_level_oracle(bg, core, &pulse, w0).unwrap();
        assert!(back.norm_sqr() > 1.0 - 1e-6);
    }
}
