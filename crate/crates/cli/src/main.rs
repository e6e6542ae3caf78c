//! Command-line front end: tabulates kernels, characters, local factors, Poincare
//! probes, norm integrals and moment fits, and runs the acceptance checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use gl2moments::numerics::QuadratureSpec;
use gl2moments::parse::{parse_complex, parse_grid};
use gl2moments::Error;
use num_complex::Complex64;
use std::process::ExitCode;

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "gl2moments", version, about = "Numerics for moments of GL(2) L-functions over number fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Run every reduction on one thread. Output is identical either way.
    #[arg(long, global = true)]
    deterministic: bool,
}

fn complex_arg(text: &str) -> Result<Complex64, String> {
    parse_complex(text).map_err(|e| e.to_string())
}

/// Grid flag value, kept as one clap value.
#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn grid_arg(text: &str) -> Result<Grid, String> {
    parse_grid(text).map(Grid).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gamma kernels, asymptotic and exact local kernels over a t grid.
    Kernel(KernelArgs),
    /// Hecke characters up to a size bound and their kappa budgets.
    Characters(CharacterArgs),
    /// Local Whittaker integrals against their closed forms.
    Whittaker(WhittakerArgs),
    /// Convergence and domination probes for the Poincare series.
    Poincare(PoincareArgs),
    /// p-adic norm integrals and the global product.
    Norms(NormArgs),
    /// Moments of zeta and smoothing weights.
    Moment(MomentArgs),
    /// Runs the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, default_value = "complex")]
    place: gl2moments::fields::PlaceType,
    #[arg(long = "t-grid", visible_alias = "t", value_parser = grid_arg, default_value = "0:20:1")]
    t_grid: Grid,
    #[arg(long, value_parser = complex_arg, default_value = "0.5")]
    s: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0")]
    v: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "2")]
    w: Complex64,
    /// Spectral parameter, taken equal at both entries.
    #[arg(long, value_parser = complex_arg, default_value = "0.1")]
    mu: Complex64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    ell: i64,
    #[arg(long = "t-nu", default_value_t = 0.0, allow_negative_numbers = true)]
    t_nu: f64,
    /// Also evaluate the exact kernel by quadrature.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct CharacterArgs {
    /// Builtin field (Q, Q_i, Q_sqrt2) or path to a field file.
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, default_value_t = 10.0)]
    bound: f64,
    /// Tabulate kappa for every character over this grid.
    #[arg(long = "t-grid", value_parser = grid_arg)]
    t_grid: Option<Grid>,
    /// Report the moment budget at this height.
    #[arg(long = "T")]
    big_t: Option<f64>,
}

#[derive(Debug, Args)]
struct WhittakerArgs {
    /// Largest residue characteristic.
    #[arg(long, default_value_t = 7.0)]
    bound: f64,
    #[arg(long, value_parser = complex_arg, default_value = "2")]
    s: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "2")]
    v: Complex64,
    /// Satake parameter alpha; beta is 1 / conj(alpha).
    #[arg(long, value_parser = complex_arg, default_value = "0.8,0.3")]
    alpha: Complex64,
}

#[derive(Debug, Args)]
struct PoincareArgs {
    /// Point of the upper half plane as "x,y".
    #[arg(long, value_parser = complex_arg, default_value = "0.2,1.3")]
    z: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "2.5")]
    v: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "2.5")]
    w: Complex64,
    /// Largest truncation of the ladder N/8, N/4, N/2, N.
    #[arg(long, default_value_t = 200.0)]
    bound: f64,
    /// Also run the domination check with this epsilon.
    #[arg(long)]
    domination: Option<f64>,
}

#[derive(Debug, Args)]
struct NormArgs {
    /// Largest prime power q.
    #[arg(long, default_value_t = 13.0)]
    bound: f64,
    #[arg(long = "sigma-grid", value_parser = grid_arg, default_value = "1.5:5:0.5")]
    sigma_grid: Grid,
}

#[derive(Debug, Args)]
struct MomentArgs {
    /// 2 or 4.
    #[arg(long, default_value_t = 2)]
    power: u32,
    /// Largest height; the grid runs geometrically from T/8.
    #[arg(long = "T", default_value_t = 4000.0)]
    big_t: f64,
    #[arg(long, default_value_t = 4)]
    points: usize,
    /// Tabulate the smoothing weight over this t grid.
    #[arg(long = "t-grid", value_parser = grid_arg)]
    t_grid: Option<Grid>,
    #[arg(long, default_value = "Q_i")]
    field: String,
    /// Real part of the weight contour.
    #[arg(long, value_parser = complex_arg, default_value = "2")]
    w: Complex64,
    #[arg(long, value_parser = complex_arg, default_value = "0.1")]
    mu: Complex64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
}

/// Exit status and a machine-readable record of why the run did not succeed.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub detail: String,
}

impl Failure {
    pub fn invalid(detail: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "invalid_input",
            detail: detail.into(),
        }
    }

    pub fn check(detail: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "check_failed",
            detail: detail.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure {
                code: 3,
                kind: "numeric_failure",
                detail: e.to_string(),
            }
        } else {
            Failure::invalid(e.to_string())
        }
    }
}

fn report_failure(f: &Failure) -> ExitCode {
    eprintln!("failure exit={} kind={} detail={:?}", f.code, f.kind, f.detail);
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let detail = e.to_string();
            let first = detail.lines().next().unwrap_or("").trim_start_matches("error: ");
            return report_failure(&Failure::invalid(first));
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol >= 1e-14 && cli.tol <= 1e-3) {
        return Err(Failure::invalid(format!("--tol must lie in [1e-14, 1e-3], got {}", cli.tol)));
    }
    let spec = QuadratureSpec::default().with_rel(cli.tol);
    let config = format!("{:?} tol={:e}", cli.command, cli.tol);
    let work = || commands::dispatch(&cli.command, config, &spec);
    let outcome = if cli.deterministic {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Failure::invalid(format!("thread pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    let (mut report, check) = outcome?;
    report.settings.insert(0, ("rel_tol", report::num(spec.rel_tol)));
    report.settings.insert(1, ("abs_tol", report::num(spec.abs_tol)));
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    match check {
        Some(f) => Err(f),
        None => Ok(()),
    }
}
