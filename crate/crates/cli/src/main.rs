use clap::{Args, Parser, Subcommand};
use qkz_cli::config::{parse_f64_list, parse_tolerance, parse_usize_list, PartialConfig, QuadratureOverrides, RunConfig, REPORT_DIR_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

// aliases keep clap from treating the parsed lists as repeated arguments
type Floats = Vec<f64>;
type Sizes = Vec<usize>;

#[derive(Parser)]
#[command(name = "qkz", version, about = "Numerical and exact checks for the deformed qKZ toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Yang–Baxter for all R/S families, R₀ reflection, unitarity
    Ybe(Opts),
    /// boundary calibration and commutation with the quantum-group generators
    QgInvariance(Opts),
    /// spectral multiplet structure of the open chain
    Spectrum(Opts),
    /// ψ, χ and dispersion identities
    SpecialFns(Opts),
    /// deformed bilinear relations and period inversion
    Riemann(Opts),
    /// n = 1 qKZ residuals and controls
    QkzCheck(Opts),
    /// polynomiality certificates, skew-symmetry, X kernel
    Mpoly(Opts),
    /// binomial dimension identities and singlet projector ranks
    Dims(Opts),
    /// classical hyperelliptic periods
    Periods(Opts),
    /// small-ν degeneration of the deformed pairing
    ClassicalLimit(Opts),
    /// the n = 1 correlator from the two-point solution
    CorrelatorN1(Opts),
    /// every suite above
    All(Opts),
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// TOML config file (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// comma-separated ν values
    #[arg(long, value_parser = parse_f64_list)]
    nu: Option<Floats>,
    /// n values: "2..10", "2,3" or "4"
    #[arg(long, value_parser = parse_usize_list)]
    n: Option<Sizes>,
    #[arg(long)]
    samples: Option<usize>,
    /// tolerance override, e.g. --tol ybe=1e-12 (repeatable)
    #[arg(long = "tol", value_parser = parse_tolerance)]
    tol: Vec<(String, f64)>,
    /// report directory (overrides $QKZ_REPORT_DIR and the config file)
    #[arg(long)]
    out: Option<PathBuf>,
    /// contour clearance for period quadrature
    #[arg(long)]
    period_clearance: Option<f64>,
    /// comma-separated δ ladder for specialization limits
    #[arg(long, value_parser = parse_f64_list)]
    deltas: Option<Floats>,
    /// Q-table JSON to evaluate in correlator-n1
    #[arg(long)]
    q_table: Option<PathBuf>,
    /// only print the summary line
    #[arg(long)]
    quiet: bool,
}

impl Command {
    fn split(self) -> (&'static str, Opts) {
        match self {
            Command::Ybe(o) => ("ybe", o),
            Command::QgInvariance(o) => ("qg-invariance", o),
            Command::Spectrum(o) => ("spectrum", o),
            Command::SpecialFns(o) => ("special-fns", o),
            Command::Riemann(o) => ("riemann", o),
            Command::QkzCheck(o) => ("qkz-check", o),
            Command::Mpoly(o) => ("mpoly", o),
            Command::Dims(o) => ("dims", o),
            Command::Periods(o) => ("periods", o),
            Command::ClassicalLimit(o) => ("classical-limit", o),
            Command::CorrelatorN1(o) => ("correlator-n1", o),
            Command::All(o) => ("all", o),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, o) = cli.command.split();
    let flags = PartialConfig {
        seed: o.seed,
        nu: o.nu,
        n: o.n,
        samples: o.samples,
        output: o.out,
        tolerances: o.tol.into_iter().collect(),
        quadrature: QuadratureOverrides { period_clearance: o.period_clearance, deltas: o.deltas },
        q_table: o.q_table,
    };
    let cfg = match RunConfig::resolve(o.config.as_deref(), std::env::var(REPORT_DIR_ENV).ok(), flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qkz: {e}");
            return ExitCode::from(2);
        }
    };
    let report = qkz_cli::run_command(name, &cfg);
    for s in &report.suites {
        if !o.quiet {
            for c in &s.checks {
                println!("{} {:<52} residual {:.3e}  tol {:.1e}", if c.pass { "PASS" } else { "FAIL" }, c.check, c.max_residual, c.tolerance);
            }
        }
        if let Some(e) = &s.error {
            println!("ERROR {}: {e}", s.suite);
        }
    }
    let path = match report.write(&cfg.output) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("qkz: cannot write report to {}: {e}", cfg.output.display());
            return ExitCode::from(2);
        }
    };
    let total: usize = report.suites.iter().map(|s| s.checks.len()).sum();
    let failed: usize = report.suites.iter().map(|s| s.checks.iter().filter(|c| !c.pass).count() + s.error.is_some() as usize).sum();
    println!(
        "{}: {} checks, {} failed, {:.1} s; report {}",
        name,
        total,
        failed,
        report.runtime_ms / 1e3,
        path.display()
    );
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
