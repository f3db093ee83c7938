//! Free evolution in the packet basis: SHIFT gates and dispersion.
//!
//! Under the linear (Kepler) spectrum a wait of n·T_K/d is an exact cyclic
//! SHIFT. The exact spectrum leaks population into neighbouring slots.
//!
//! ```bash
//! cargo run --example free_evolution
//! ```

use rydberg_qudit::evolution::{evolution_kernel, population_decay, shift_fidelity};
use rydberg_qudit::{AmplitudeVector, BasisTag, ManifoldSpec, SpectrumMode};

fn main() -> rydberg_qudit::Result<()> {
    let spec = ManifoldSpec::new(180, 8)?;
    let packet = AmplitudeVector::basis_state(&spec, 0, BasisTag::Packet)?;

    println!(" n   SHIFT fidelity (taylor1)   (exact)");
    for n in 1..=8 {
        println!(
            "{n:>2}   {:.15}          {:.6}",
            shift_fidelity(&spec, &packet, n, SpectrumMode::Taylor1)?,
            shift_fidelity(&spec, &packet, n, SpectrumMode::Exact)?
        );
    }

    let kernel = evolution_kernel(&spec, spec.time_scales().t_kepler, SpectrumMode::Exact);
    println!("\nkernel after one Kepler period, |u|^2 by forward lag:");
    for (m, u) in kernel.entries.iter().enumerate() {
        println!("  lag {m}: {:.5}", u.norm_sqr());
    }

    println!("\n periods  population lost from the core packet");
    for periods in [0.5, 1.0, 2.0, 4.0, 8.0] {
        println!("  {periods:>5}   {:.4}", population_decay(&spec, periods, SpectrumMode::Exact));
    }
    Ok(())
}
