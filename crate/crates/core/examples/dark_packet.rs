//! A calibrated π pulse empties the core packet into the ground level.
//!
//! Prints the slot populations before, during and after the pulse and
//! writes the integrator trace to `dark_packet_pulse.csv`.
//!
//! ```bash
//! cargo run --release --example dark_packet
//! ```

use rydberg_qudit::pulse::{standard_fwhm, PulseOptions};
use rydberg_qudit::scenarios::fig2_run;
use rydberg_qudit::units::au_to_ns;
use rydberg_qudit::ManifoldSpec;

fn main() -> rydberg_qudit::Result<()> {
    let spec = ManifoldSpec::new(180, 8)?;
    let fwhm = standard_fwhm(&spec);
    let run = fig2_run(&spec, fwhm, &PulseOptions::default())?;
    let slot = spec.slot_time();

    println!("tau_p = {:.2} ps, peak Rabi {:.4e} au", au_to_ns(fwhm) * 1e3, run.pulse.peak_rabi);
    print!("{:>10}  {:>7}", "t", "|b_g|^2");
    for k in spec.j_range() {
        print!("  {:>7}", format!("k={k}"));
    }
    println!();
    for (label, t, state) in [
        ("-T_K/d", -slot, &run.initial),
        ("0", 0.0, &run.during),
        ("+T_K/d", slot, &run.after),
    ] {
        print!("{label:>10}  {:>7.4}", state.b_g.norm_sqr());
        for p in state.packets_at(t).populations() {
            print!("  {p:>7.4}");
        }
        println!();
    }

    println!("\ncore population left   {:.3e}", run.core_population());
    println!("ground population      {:.4}", run.ground_population());
    println!("k=+-1 depletion        {:.4}", run.neighbour_depletion());
    println!("k=+-1 net change       {:+.4}", run.neighbour_net_change());
    println!("norm error             {:.2e}", run.norm_error);

    run.trace.write_csv(std::fs::File::create("dark_packet_pulse.csv")?)?;
    Ok(())
}
