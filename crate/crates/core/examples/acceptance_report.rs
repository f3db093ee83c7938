//! Run every registered scenario and print its pass/fail line.
//!
//! ```bash
//! cargo run --release --example acceptance_report
//! ```

use rydberg_qudit::scenarios::registry;

fn main() {
    let mut failures = 0;
    for entry in registry() {
        match entry.run(None) {
            Ok(report) => {
                failures += usize::from(!report.passed());
                println!("{}", report.summary_line());
            }
            Err(e) => {
                failures += 1;
                println!("FAIL {}: {e}", entry.name);
            }
        }
    }
    println!("{} scenarios, {failures} failing", registry().len());
    std::process::exit(i32::from(failures > 0));
}
