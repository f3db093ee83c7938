//! Autocorrelation of a core packet around its first revival, as CSV.
//!
//! ```bash
//! cargo run --release --example revival_scan > revival.csv
//! ```

use rydberg_qudit::evolution::{find_peak, revival_scan, uniform_grid};
use rydberg_qudit::{AmplitudeVector, BasisTag, ManifoldSpec, SpectrumMode};

fn main() -> rydberg_qudit::Result<()> {
    let spec = ManifoldSpec::new(180, 8)?;
    let s = spec.time_scales();
    let centre = s.first_revival();
    let grid = uniform_grid(0.9 * centre, 1.1 * centre, s.t_kepler / 40.0);
    let b = AmplitudeVector::uniform(spec.d(), BasisTag::Energy);

    let trace = revival_scan(&spec, &b, &grid, SpectrumMode::Exact)?;
    trace.write_csv(std::io::stdout().lock())?;

    if let Some(peak) = find_peak(&trace, grid[0], grid[grid.len() - 1]) {
        eprintln!(
            "peak at {:.5} T_rev, autocorrelation {:.4}",
            peak.time / s.t_revival,
            peak.autocorr
        );
    }
    Ok(())
}
