//! Time scales and the spectrum of a Rydberg manifold.
//!
//! ```bash
//! cargo run --example time_scales -- 180 8
//! ```

use rydberg_qudit::units::au_to_ns;
use rydberg_qudit::{ManifoldSpec, SpectrumMode};

fn main() -> rydberg_qudit::Result<()> {
    let mut args = std::env::args().skip(1);
    let nbar: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(180);
    let d: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let spec = ManifoldSpec::new(nbar, d)?;

    let s = spec.time_scales();
    let [tk, trev, tsr] = s.in_seconds();
    println!("nbar = {nbar}, d = {d}");
    println!("T_K   = {:.6e} au = {:.4} ns", s.t_kepler, tk * 1e9);
    println!("T_rev = {:.6e} au = {:.2} ns", s.t_revival, trev * 1e9);
    println!("T_sr  = {:.6e} au = {:.3} us", s.t_superrevival, tsr * 1e6);
    println!("slot T_K/d = {:.4} ns", au_to_ns(spec.slot_time()));

    println!("\n   j     exact omega_j0      taylor1          taylor2");
    for j in spec.j_range() {
        println!(
            "{j:>4} {:>16.9e} {:>16.9e} {:>16.9e}",
            spec.detuning(j, SpectrumMode::Exact)?,
            spec.detuning(j, SpectrumMode::Taylor1)?,
            spec.detuning(j, SpectrumMode::Taylor2)?,
        );
    }
    let (a, period) = spec.linear_fit(SpectrumMode::Exact);
    println!("\nlinear fit: intercept {a:.4e} au, period {:.6} T_K", period / s.t_kepler);
    Ok(())
}
