//! Compile a Haar-random qudit unitary into a pulse schedule and score it.
//!
//! Writes `unitary.json` and `schedule.json`, which the CLI accepts:
//!
//! ```bash
//! cargo run --release --example compile_gate -- 4 7
//! cargo run --release --bin rydberg-qudit -- verify schedule.json unitary.json
//! ```

use rydberg_qudit::gates::{
    compile_unitary, decompose_unitary, haar_unitary, max_entry_error, process_fidelity, reconstruct,
    GateOptions, PulseModel, SimulationOptions,
};
use rydberg_qudit::scenarios::UnitaryFile;
use rydberg_qudit::{ManifoldSpec, SpectrumMode};

fn main() -> rydberg_qudit::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let spec = ManifoldSpec::new(180, d)?;
    let u = haar_unitary(d, seed);

    let ops = decompose_unitary(&u, &spec)?;
    println!("{} two-level factors (bound {})", ops.len(), d * (d - 1) / 2 + d);
    for op in &ops {
        println!("  slots ({:>2}, {:>2}) diagonal={}", op.k, op.k2, op.is_diagonal());
    }
    println!("reconstruction error {:.2e}", max_entry_error(&reconstruct(&ops, &spec)?, &u));

    let opts = GateOptions::for_spec(&spec);
    let schedule = compile_unitary(&u, &spec, &opts)?;
    println!(
        "\nschedule: {} manifold pulses, {:.3} Kepler periods, pulse FWHM {:.3} T_K/d",
        schedule.pulse_count(),
        schedule.total_kepler(),
        schedule.pulse_fwhm / spec.slot_time()
    );

    let models = [
        ("instantaneous, linear spectrum", PulseModel::Instantaneous, SpectrumMode::Taylor1),
        ("instantaneous, exact spectrum", PulseModel::Instantaneous, SpectrumMode::Exact),
        ("full pulses, exact spectrum", PulseModel::Full, SpectrumMode::Exact),
    ];
    for (label, model, mode) in models {
        let sim = SimulationOptions {
            model,
            mode,
            ..Default::default()
        };
        println!("  {label:<32} F = {:.5}", process_fidelity(&schedule, &u, &sim)?);
    }

    std::fs::write("unitary.json", UnitaryFile::new(spec, &u).to_json()?)?;
    std::fs::write("schedule.json", schedule.to_json()?)?;
    Ok(())
}
