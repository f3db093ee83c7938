//! Energy and wave-packet bases of a qudit: the QFT between them.
//!
//! ```bash
//! cargo run --example packet_basis
//! ```

use num_complex::Complex64;
use rydberg_qudit::basis::{iqft_packet_to_energy, packet_ket, qft_energy_to_packet};
use rydberg_qudit::{AmplitudeVector, BasisTag, ManifoldSpec};

fn show(label: &str, v: &AmplitudeVector) {
    let parts: Vec<String> = v.values.iter().map(|z| format!("{:+.3}{:+.3}i", z.re, z.im)).collect();
    println!("{label:<22} [{}]", parts.join(", "));
}

fn main() -> rydberg_qudit::Result<()> {
    let spec = ManifoldSpec::new(180, 4)?;
    println!("storage order j = {:?}", spec.j_range().collect::<Vec<_>>());

    // uniform energy amplitudes localise in the core packet
    let uniform = AmplitudeVector::uniform(4, BasisTag::Energy);
    show("uniform energy", &uniform);
    show("-> packets", &qft_energy_to_packet(&uniform, &spec)?);

    for k in spec.j_range() {
        show(&format!("|k={k}> in energy basis"), &packet_ket(&spec, k)?);
    }

    let b = AmplitudeVector::new(
        vec![
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.3, -0.3),
            Complex64::new(0.1, 0.58),
        ],
        BasisTag::Energy,
    )
    .normalized();
    let back = iqft_packet_to_energy(&qft_energy_to_packet(&b, &spec)?, &spec)?;
    let err = b.values.iter().zip(&back.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("round-trip error {err:.2e}");
    Ok(())
}
