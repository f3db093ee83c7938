//! Pulse design: Rabi DFT, bandwidth check, and the two-level limit.
//!
//! Shorter π pulses approach the ideal two-level swap between g and the
//! core packet; this prints the transfer and neighbour loss as the width
//! shrinks.
//!
//! ```bash
//! cargo run --release --example pulse_design
//! ```

use rydberg_qudit::pulse::{rabi_profile, validate_pulse, PulseOptions, PulseSpec, Storage};
use rydberg_qudit::scenarios::fig2_run;
use rydberg_qudit::ManifoldSpec;

fn main() -> rydberg_qudit::Result<()> {
    let spec = ManifoldSpec::new(180, 8)?;
    let profile = rabi_profile(&spec, 1.0);
    println!("|Omega~_k| / |Omega~_0|:");
    for k in spec.j_range() {
        println!("  k={k:>2}  {:.5}", profile.ratio(&spec, k)?);
    }

    let tk = spec.time_scales().t_kepler;
    let d = spec.d() as f64;
    println!("\n tau_p/(T_K/d)  bandwidth d/T_K  ok   |b_g|^2   core left   k=+-1 depletion");
    for divisor in [8.0, 4.0, 2.0, 1.2] {
        let fwhm = tk / (divisor * d);
        let report = validate_pulse(&spec, &PulseSpec::new(fwhm, 0.0, Storage::G));
        let run = fig2_run(&spec, fwhm, &PulseOptions::default())?;
        println!(
            "   {:>8.4}      {:>8.3}      {:<4} {:.5}   {:.2e}    {:.5}",
            1.0 / divisor,
            report.spectral_fwhm_d_over_tk,
            if report.bandwidth_ok { "yes" } else { "warn" },
            run.ground_population(),
            run.core_population(),
            run.neighbour_depletion()
        );
    }

    let too_long = validate_pulse(&spec, &PulseSpec::new(10.0 * tk, 0.0, Storage::G));
    println!("\n10 T_K pulse: passed = {}, {:?}", too_long.passed(), too_long.warnings);
    Ok(())
}
