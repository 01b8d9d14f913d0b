mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use config::{ProblemConfig, ProblemKind};
use num_complex::Complex64;
use serde_json::json;
use singular_heat::asymfit::{fit, FitRequest, HeatContentSamples, Sample};
use singular_heat::coeff::{build_table, BoundaryConditionKind, ExponentPair};
use singular_heat::regint::{interior_coefficients, CollarRegularization};
use singular_heat::verify::{self, DEFAULT_SEED};
use singular_heat::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "singular-heat",
    version,
    about = "Heat-content boundary coefficients for singular data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Robin,
}

impl From<Bc> for BoundaryConditionKind {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Dirichlet => Self::Dirichlet,
            Bc::Robin => Self::Robin,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient table for an exponent pair as JSON.
    Coeffs {
        /// "re" or "re,im"
        #[arg(long, allow_hyphen_values = true)]
        alpha1: String,
        /// "re" or "re,im"
        #[arg(long, allow_hyphen_values = true)]
        alpha2: String,
        #[arg(long, value_enum)]
        bc: Bc,
    },
    /// Simulate β(t) for a problem configuration and write CSV.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the asymptotic model to a sample CSV and print JSON.
    Fit {
        samples: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha1: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha2: f64,
        #[arg(long, default_value_t = 1)]
        boundary_terms: usize,
        #[arg(long, default_value_t = 1)]
        interior_terms: usize,
        /// Interval configuration whose interior coefficients β_0..β_{N-1}
        /// are subtracted before fitting the boundary family.
        #[arg(long, value_name = "CONFIG")]
        subtract_interior: Option<PathBuf>,
        #[arg(long)]
        gap_min: Option<f64>,
    },
    /// Run an invariant suite and print a JSON report.
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Quadrature { .. } | Error::Truncation { .. } | Error::IllConditioned(_) => 3,
            _ => 2,
        };
        Self::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeffs { alpha1, alpha2, bc } => cmd_coeffs(&alpha1, &alpha2, bc.into()),
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::Fit {
            samples,
            alpha1,
            alpha2,
            boundary_terms,
            interior_terms,
            subtract_interior,
            gap_min,
        } => {
            let mut req = FitRequest::new(alpha1, alpha2, interior_terms, boundary_terms);
            if let Some(g) = gap_min {
                req.gap_min = g;
            }
            cmd_fit(&samples, req, subtract_interior.as_deref())
        }
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SINGULAR_HEAT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::new(2, format!("cannot parse {s:?} as re or re,im"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

/// Writes one JSON document to stdout; a closed pipe is not an error.
fn emit(v: &serde_json::Value) -> Result<(), Failure> {
    use std::io::Write;
    let text = output::to_json(v).map_err(|e| Failure::new(1, e))?;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn cmd_coeffs(a1: &str, a2: &str, bc: BoundaryConditionKind) -> Result<(), Failure> {
    let pair = ExponentPair::new(parse_complex(a1)?, parse_complex(a2)?)?;
    let table = build_table(bc, &pair)?;
    emit(&table.to_json())?;
    Ok(())
}

fn read_config(path: &Path) -> Result<ProblemConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    Ok(ProblemConfig::from_json(&text)?)
}

fn cmd_simulate(config: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = read_config(config)?;
    let samples = cfg.simulate()?;
    output::write_csv(out, &samples).map_err(|e| Failure::new(1, format!("{}: {e}", out.display())))
}

fn read_samples(path: &Path) -> Result<HeatContentSamples, Failure> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let entries = rdr
        .deserialize::<Sample>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    Ok(HeatContentSamples::new(path.display().to_string(), entries)?)
}

fn cmd_fit(samples: &Path, mut req: FitRequest, interior: Option<&Path>) -> Result<(), Failure> {
    if req.boundary_terms == 0 && req.interior_terms == 0 {
        return Err(Failure::new(2, "no terms requested; nothing to fit"));
    }
    let data = read_samples(samples)?;
    let mut known = None;
    if let Some(path) = interior {
        let cfg = read_config(path)?;
        if !matches!(cfg.problem, ProblemKind::Interval) {
            return Err(Failure::new(2, "interior subtraction needs an interval configuration"));
        }
        if req.interior_terms == 0 {
            return Err(Failure::new(2, "interior subtraction needs --interior-terms ≥ 1"));
        }
        let phi = cfg.interval_profile(cfg.alpha1)?;
        let rho = cfg.interval_profile(cfg.alpha2)?;
        let beta = interior_coefficients(
            &phi,
            &rho,
            cfg.c_value(),
            req.interior_terms - 1,
            &CollarRegularization::default(),
        )?;
        req = req.with_known_interior(beta.clone());
        known = Some(beta);
    }
    let model = fit(&data, &req)?;
    let mut v = serde_json::to_value(&model).map_err(|e| Failure::new(1, e.to_string()))?;
    if let Some(beta) = known {
        v["beta_interior"] = json!(beta);
    }
    emit(&v)?;
    Ok(())
}

fn cmd_verify(suite: &str, seed: u64) -> Result<(), Failure> {
    let reports = verify::run(suite, seed)?;
    for r in &reports {
        eprintln!("[{}] {}", if r.passed { "PASS" } else { "FAIL" }, r.suite);
        for c in &r.checks {
            eprintln!(
                "    {:<4} {:<28} residual {:.3e} (tolerance {:.0e})",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            );
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    let v = json!({ "seed": seed, "passed": passed, "suites": reports });
    emit(&v)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.suite.as_str()).collect();
        Err(Failure::new(4, format!("checks failed in: {}", failed.join(", "))))
    }
}
