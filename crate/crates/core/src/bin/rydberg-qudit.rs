use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;

use rydberg_qudit::gates::{
    compile_unitary, process_fidelity, unitarity_error, GateOptions, GateSchedule, PulseModel, SimulationOptions,
};
use rydberg_qudit::pulse::validate_pulse;
use rydberg_qudit::scenarios::{self, ScenarioReport, UnitaryFile};
use rydberg_qudit::{Error, SpectrumMode, Storage};

#[derive(Parser)]
#[command(name = "rydberg-qudit", version, about = "Rydberg wave-packet qudit scenarios and gate compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios by registered name or TOML config path (`all` runs the registry).
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        /// Directory for summary.json and trace CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run independent scenarios on this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the JSON summary of each scenario after its status line.
        #[arg(long)]
        json: bool,
    },
    /// List registered scenarios.
    List,
    /// Describe a registered scenario.
    Describe { name: String },
    /// Compile a unitary file into a gate schedule (JSON on stdout).
    Compile {
        unitary: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a schedule and report its process fidelity against a unitary.
    Verify {
        schedule: PathBuf,
        unitary: PathBuf,
        /// Pass threshold for the exit code.
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        #[arg(long, value_enum, default_value = "full")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "exact")]
        spectrum: SpectrumArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Full,
    Instantaneous,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SpectrumArg {
    Exact,
    Taylor1,
    Taylor2,
    Taylor3,
}

enum Failure {
    Acceptance,
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn read_unitary(path: &Path) -> Result<(UnitaryFile, DMatrix<Complex64>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let file = UnitaryFile::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let u = file.unitary().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok((file, u))
}

fn print_report(r: &ScenarioReport, json: bool) {
    println!("{}", r.summary_line());
    if json {
        println!("{}", serde_json::to_string_pretty(&r.summary_json()).expect("summary serialises"));
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            for e in scenarios::registry() {
                let c = e.criterion.map_or(String::new(), |c| format!(" [criterion {c}]"));
                println!("{:<24}{}{c}", e.name, e.title);
            }
            Ok(())
        }
        Command::Describe { name } => {
            print!("{}", scenarios::describe(&name)?);
            Ok(())
        }
        Command::Run {
            targets,
            out,
            jobs,
            seed,
            json,
        } => {
            let targets: Vec<String> = if targets.iter().any(|t| t == "all") {
                scenarios::list_scenarios().into_iter().map(String::from).collect()
            } else {
                targets
            };
            let results = scenarios::run_batch(&targets, seed, jobs.max(1));
            let mut failed = false;
            let mut config_error = None;
            for (target, result) in targets.iter().zip(results) {
                match result {
                    Ok(r) => {
                        print_report(&r, json);
                        if let Some(dir) = &out {
                            r.write_outputs(dir)?;
                        }
                        failed |= !r.passed();
                    }
                    Err(e) => {
                        eprintln!("error: {target}: {e}");
                        config_error.get_or_insert(format!("{target}: {e}"));
                    }
                }
            }
            match (config_error, failed) {
                (Some(e), _) => Err(Failure::Config(e)),
                (None, true) => Err(Failure::Acceptance),
                (None, false) => Ok(()),
            }
        }
        Command::Compile { unitary, out } => {
            let (file, u) = read_unitary(&unitary)?;
            let spec = file.manifold;
            let mut opts = GateOptions::for_spec(&spec);
            if let Some(q) = file.fwhm {
                opts.fwhm = q.to_au(&spec);
            }
            let schedule = compile_unitary(&u, &spec, &opts)?;
            let report = validate_pulse(&spec, &schedule.pulse_spec(Storage::G, 0.0, 0.0));
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "{} pulses, {:.3} Kepler periods, unitarity error {:.2e}",
                schedule.pulse_count(),
                schedule.total_kepler(),
                unitarity_error(&u)
            );
            let json = schedule.to_json()?;
            match out {
                Some(p) => std::fs::write(&p, json + "\n").map_err(|e| Failure::Config(e.to_string()))?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Verify {
            schedule,
            unitary,
            threshold,
            model,
            spectrum,
        } => {
            let text =
                std::fs::read_to_string(&schedule).map_err(|e| Failure::Config(format!("{}: {e}", schedule.display())))?;
            let sch = GateSchedule::from_json(&text)?;
            let (file, u) = read_unitary(&unitary)?;
            if file.manifold != sch.spec {
                return Err(Failure::Config("schedule and unitary use different manifolds".into()));
            }
            let opts = SimulationOptions {
                model: match model {
                    ModelArg::Full => PulseModel::Full,
                    ModelArg::Instantaneous => PulseModel::Instantaneous,
                },
                mode: match spectrum {
                    SpectrumArg::Exact => SpectrumMode::Exact,
                    SpectrumArg::Taylor1 => SpectrumMode::Taylor1,
                    SpectrumArg::Taylor2 => SpectrumMode::Taylor2,
                    SpectrumArg::Taylor3 => SpectrumMode::Taylor3,
                },
                ..Default::default()
            };
            let f = process_fidelity(&sch, &u, &opts)?;
            let status = if f >= threshold { "PASS" } else { "FAIL" };
            println!("{status} process_fidelity={f:.6} threshold={threshold}");
            if f >= threshold {
                Ok(())
            } else {
                Err(Failure::Acceptance)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Acceptance) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
