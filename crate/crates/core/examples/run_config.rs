//! Run a TOML scenario config and write its summary and trace.
//!
//! ```bash
//! cargo run --release --example run_config -- crates/core/examples/configs/dark_then_shift.toml out/
//! ```

use std::path::PathBuf;

use rydberg_qudit::scenarios::{run_config, ScenarioConfig};

fn main() -> rydberg_qudit::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(
        args.next()
            .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/dark_then_shift.toml").into()),
    );
    let out = PathBuf::from(args.next().unwrap_or_else(|| "scenario-out".into()));

    let cfg = ScenarioConfig::from_path(&path)?;
    let report = run_config(&cfg)?;
    println!("{}", report.summary_line());
    println!("{}", serde_json::to_string_pretty(&report.summary_json())?);
    report.write_outputs(&out)?;
    eprintln!("wrote {}", out.join(&report.name).display());
    Ok(())
}
