use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nsac_core::io::{RunManifest, Tolerances};
use nsac_core::{ErrorClass, Result};

mod commands;

/// Diffuse-interface Navier-Stokes/Allen-Cahn laboratory.
#[derive(Debug, Parser)]
#[command(name = "nsac", version, arg_required_else_help = true)]
struct Cli {
    /// Directory for CSV, field dumps and manifest.json.
    #[arg(long, global = true, default_value = "nsac-out")]
    output_dir: PathBuf,
    /// JSON object replacing named tolerances, e.g. '{"nsac.divergence": 1e-5}'.
    #[arg(long, global = true)]
    tol_overrides: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PotentialArg {
    Quartic,
    Sextic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OdeCase {
    /// A = θ₀'' in the linearised equation; exact w = ρθ₀'/2.
    ThetaPp,
    /// A = θ₀', which violates solvability.
    ThetaP,
    /// B = (ν(θ₀)η')' in the weighted equation; exact w = η − ½.
    Weighted,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal profile θ₀, σ and the decay rate.
    Profile {
        #[arg(long, value_enum, default_value = "quartic")]
        potential: PotentialArg,
        /// Sextic coefficients q(u) = a + b u.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        #[arg(long, default_value_t = 15.0)]
        l_rho: f64,
        #[arg(long, default_value_t = 4096)]
        n: usize,
    },
    /// Model ODEs of the inner expansion.
    Ode {
        #[arg(long, value_enum, default_value = "theta-pp")]
        case: OdeCase,
        #[arg(long, default_value_t = 16384)]
        n: usize,
    },
    /// Low eigenvalues of the linearised Allen-Cahn operator.
    Spectrum {
        #[arg(long, num_args = 1.., default_values_t = [1.0])]
        eps: Vec<f64>,
        /// Half-width of the interval in units of ε.
        #[arg(long, default_value_t = 20.0)]
        half_width: f64,
        #[arg(long, default_value_t = 4096)]
        n: usize,
    },
    /// ε-coordinates on a perturbed ellipse: inversion, Jacobian, orthogonality.
    CoordsCheck {
        #[arg(long, num_args = 1.., default_values_t = [0.1, 0.05, 0.025])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        amplitude: f64,
        #[arg(long, default_value_t = 2)]
        mode: u32,
    },
    /// Degenerate parabolic equation on the circle and its κ-uniform estimates.
    Surfpde {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, num_args = 1.., default_values_t = [1.0, 0.25, 0.0625, 0.015625])]
        kappa: Vec<f64>,
    },
    /// Full NSAC run from a JSON configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convergence sweep in ε against the sharp-interface references.
    Study {
        #[arg(long)]
        config: PathBuf,
    },
    /// Interface drift rate for several mobility exponents.
    Mobility {
        #[arg(long)]
        config: PathBuf,
    },
}

fn configure_workers() {
    if let Some(n) = std::env::var("NSAC_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the command and writes the manifest; returns a numerical failure
/// that stopped a sweep early, if any.
fn execute(cli: &Cli) -> Result<Option<String>> {
    let mut tolerances = Tolerances::default();
    if let Some(json) = &cli.tol_overrides {
        tolerances = tolerances.with_overrides(json)?;
    }
    std::fs::create_dir_all(&cli.output_dir)?;
    let start = Instant::now();
    let out = commands::run(&cli.command, &cli.output_dir, &tolerances)?;
    let mut manifest = RunManifest::new(out.name, &out.config, &tolerances)?;
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.outputs = out.files;
    manifest.write(&cli.output_dir)?;
    println!("wrote {} files to {}", manifest.outputs.len(), cli.output_dir.display());
    Ok(out.failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    configure_workers();
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: sweep stopped early: {failure}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Validation | ErrorClass::Physical => ExitCode::from(1),
                ErrorClass::Numerical => ExitCode::from(2),
            }
        }
    }
}
