//! Check runner behind the `qkz` binary.

pub mod config;
pub mod report;
pub mod suites;

use config::RunConfig;
use report::{RunReport, SuiteReport};
use std::time::Instant;

pub fn run_suite(name: &str, cfg: &RunConfig) -> SuiteReport {
    let t = Instant::now();
    let (mut checks, error) = match suites::run(name, cfg) {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    checks.sort_by(|a, b| a.check.cmp(&b.check));
    SuiteReport {
        suite: name.into(),
        pass: error.is_none() && checks.iter().all(|c| c.pass),
        checks,
        error,
        runtime_ms: t.elapsed().as_secs_f64() * 1e3,
    }
}

/// `all` runs every suite in the fixed order of [`suites::SUITES`].
pub fn run_command(command: &str, cfg: &RunConfig) -> RunReport {
    let t = Instant::now();
    let names: Vec<&str> = if command == "all" { suites::SUITES.to_vec() } else { vec![command] };
    let reports = names.iter().map(|n| run_suite(n, cfg)).collect();
    RunReport::new(command, cfg, reports, t.elapsed().as_secs_f64() * 1e3)
}
