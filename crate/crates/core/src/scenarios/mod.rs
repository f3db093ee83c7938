//! Declarative experiment configs and the registry of built-in scenarios.
//!
//! A scenario produces a [`ScenarioReport`]: named traces (CSV), a JSON
//! summary of observables, and optional range checks. Built-in scenarios
//! each carry the checks for one acceptance criterion.

mod builtin;
mod config;

pub use builtin::{fig2_run, Fig2Run, FIG2_NBAR, FIG2_D};
pub use config::{
    run_config, EventConfig, GateTarget, InitialState, Observable, Outputs, ScenarioConfig, UnitaryFile,
};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::trace::TraceRecord;

/// One range check on a scalar observable. Missing bounds are open.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, min: Option<f64>, max: Option<f64>) -> Self {
        let passed = value.is_finite() && min.is_none_or(|m| value >= m) && max.is_none_or(|m| value <= m);
        Self {
            name: name.to_string(),
            value,
            min,
            max,
            passed,
        }
    }

    pub fn at_most(name: &str, value: f64, max: f64) -> Self {
        Self::new(name, value, None, Some(max))
    }

    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Self::new(name, value, Some(min), None)
    }

    pub fn within(name: &str, value: f64, min: f64, max: f64) -> Self {
        Self::new(name, value, Some(min), Some(max))
    }

    fn describe(&self) -> String {
        let lo = self.min.map_or("-inf".to_string(), |v| format!("{v:.6e}"));
        let hi = self.max.map_or("inf".to_string(), |v| format!("{v:.6e}"));
        format!("{}={:.6e} in [{lo}, {hi}]", self.name, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioReport {
    pub name: String,
    pub criterion: Option<u8>,
    pub checks: Vec<Check>,
    pub observables: Map<String, Value>,
    pub traces: Vec<(String, TraceRecord)>,
}

impl ScenarioReport {
    pub fn new(name: &str, criterion: Option<u8>) -> Self {
        Self {
            name: name.to_string(),
            criterion,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn observe<V: Serialize>(&mut self, key: &str, value: V) {
        let v = serde_json::to_value(value).expect("observable serialises");
        self.observables.insert(key.to_string(), v);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn trace(&self, name: &str) -> Option<&TraceRecord> {
        self.traces.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// `PASS|FAIL|DONE <name> [criterion N]: check; check; ...`
    pub fn summary_line(&self) -> String {
        let status = if self.checks.is_empty() {
            "DONE"
        } else if self.passed() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!("{status} {}", self.name);
        if let Some(c) = self.criterion {
            let _ = write!(line, " [criterion {c}]");
        }
        if !self.checks.is_empty() {
            let parts: Vec<String> = self.checks.iter().map(Check::describe).collect();
            let _ = write!(line, ": {}", parts.join("; "));
        }
        line
    }

    pub fn summary_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("scenario".into(), Value::String(self.name.clone()));
        m.insert("criterion".into(), serde_json::to_value(self.criterion).expect("option"));
        m.insert("passed".into(), Value::Bool(self.passed()));
        m.insert("checks".into(), serde_json::to_value(&self.checks).expect("checks serialise"));
        m.insert("observables".into(), Value::Object(self.observables.clone()));
        let names: Vec<&str> = self.traces.iter().map(|(n, _)| n.as_str()).collect();
        m.insert("traces".into(), serde_json::to_value(names).expect("names"));
        Value::Object(m)
    }

    /// Write `summary.json` and one CSV per trace into `dir/<name>/`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        let out = dir.join(&self.name);
        fs::create_dir_all(&out)?;
        let mut json = serde_json::to_string_pretty(&self.summary_json())?;
        json.push('\n');
        fs::write(out.join("summary.json"), json)?;
        for (name, trace) in &self.traces {
            trace.write_csv(fs::File::create(out.join(format!("{name}.csv")))?)?;
        }
        Ok(())
    }
}

/// A registered scenario.
pub struct ScenarioEntry {
    pub name: &'static str,
    pub criterion: Option<u8>,
    pub title: &'static str,
    pub default_seed: u64,
    describe: fn() -> String,
    run: fn(u64) -> Result<ScenarioReport>,
}

impl ScenarioEntry {
    pub fn describe(&self) -> String {
        let mut s = format!("{}: {}\n", self.name, self.title);
        if let Some(c) = self.criterion {
            let _ = writeln!(s, "acceptance criterion: {c}");
        }
        let _ = writeln!(s, "default seed: {}", self.default_seed);
        s.push_str(&(self.describe)());
        s
    }

    pub fn run(&self, seed: Option<u64>) -> Result<ScenarioReport> {
        let mut report = (self.run)(seed.unwrap_or(self.default_seed))?;
        report.name = self.name.to_string();
        report.criterion = self.criterion;
        Ok(report)
    }
}

pub fn registry() -> &'static [ScenarioEntry] {
    builtin::REGISTRY
}

pub fn list_scenarios() -> Vec<&'static str> {
    registry().iter().map(|e| e.name).collect()
}

pub fn find(name: &str) -> Result<&'static ScenarioEntry> {
    registry()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

pub fn describe(name: &str) -> Result<String> {
    Ok(find(name)?.describe())
}

/// The registered scenario for acceptance criterion `n`.
pub fn for_criterion(n: u8) -> Option<&'static ScenarioEntry> {
    registry().iter().find(|e| e.criterion == Some(n))
}

/// Run a registered scenario by name, or a TOML config if `target` is an
/// existing file.
pub fn run_target(target: &str, seed: Option<u64>) -> Result<ScenarioReport> {
    let path = Path::new(target);
    if path.is_file() {
        let mut cfg = ScenarioConfig::from_path(path)?;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        return run_config(&cfg);
    }
    find(target)?.run(seed)
}

/// Run several targets on a pool of `jobs` threads; results keep input order.
pub fn run_batch(targets: &[String], seed: Option<u64>, jobs: usize) -> Vec<Result<ScenarioReport>> {
    if jobs <= 1 {
        return targets.iter().map(|t| run_target(t, seed)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| targets.par_iter().map(|t| run_target(t, seed)).collect()),
        Err(_) => targets.par_iter().map(|t| run_target(t, seed)).collect(),
    }
}
