//! `kirchhoff` command-line driver.
//!
//! Exit codes: 0 success, 1 failed certification or I/O error, 2 invalid
//! input, 3 numerical non-convergence (best iterate still written).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod config;
pub mod output;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    NonConvergence(String),
    Failed(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::NonConvergence(m) => write!(f, "not converged: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kirchhoff", version, about = "Zeros, equilibria and spectra of the Kirchhoff-Stieltjes family")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run file: {subcommand, params, out, seed, deterministic}.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results are merged in input order.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Solver tolerance, or the tolerance override for certify-all.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Hermite,
    Laguerre,
    Jacobi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WArg {
    Harmonic,
    Coulomb,
    Jacobi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShapeArg {
    Polygon,
    Collinear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DiscretizationArg {
    Peierls,
    Naive,
}

/// Superpotential selection shared by equilibrate and susy-check.
#[derive(Debug, Args)]
pub struct WArgs {
    #[arg(long)]
    w: Option<WArg>,
    /// Angular momentum of the Coulomb case.
    #[arg(long)]
    l: Option<u32>,
    /// Jacobi charge at +1.
    #[arg(long)]
    p: Option<f64>,
    /// Jacobi charge at -1.
    #[arg(long)]
    q: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros of a classical orthogonal polynomial.
    PolyZeros {
        #[arg(long)]
        family: Option<FamilyArg>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Integrate point-vortex zero dynamics.
    Evolve {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Stieltjes equilibrium against the classical zeros.
    Equilibrate {
        #[command(flatten)]
        w: WArgs,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Partner potentials, spectra and ground-state annihilation.
    SusyCheck {
        #[command(flatten)]
        w: WArgs,
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Planar Laughlin equilibria from perturbed oracle starts.
    Laughlin {
        #[arg(long)]
        shape: Option<ShapeArg>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_exp: Option<u32>,
        #[arg(long)]
        l_b: Option<f64>,
        #[arg(long)]
        perturbation: Option<f64>,
    },
    /// Low spectrum of the magnetic Laplacian on a Dirichlet box.
    LandauSpectrum {
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        field: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        discretization: Option<DiscretizationArg>,
    },
    /// Run the acceptance criteria.
    CertifyAll {
        /// Comma-separated subset, e.g. `A1,A4`.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<String>>,
    },
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kirchhoff: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let over = config::Overrides {
        config: cli.common.config,
        out: cli.common.out,
        seed: cli.common.seed,
        jobs: cli.common.jobs,
    };
    let tol = cli.common.tol;
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Validation(format!("--tol must be positive, got {t}")));
        }
    }
    match cli.command {
        Command::PolyZeros {
            family,
            degree,
            alpha,
            beta,
        } => commands::poly_zeros(&over, family, degree, alpha, beta),
        Command::Evolve { gamma, t_final } => commands::evolve(&over, gamma, t_final, tol),
        Command::Equilibrate { w, n } => commands::equilibrate(&over, &w, n, tol),
        Command::SusyCheck {
            w,
            energy,
            points,
            levels,
        } => commands::susy_check(&over, &w, energy, points, levels),
        Command::Laughlin {
            shape,
            n,
            n_exp,
            l_b,
            perturbation,
        } => commands::laughlin(&over, shape, n, n_exp, l_b, perturbation, tol),
        Command::LandauSpectrum {
            half_width,
            points,
            field,
            k,
            discretization,
        } => commands::landau_spectrum(&over, half_width, points, field, k, discretization, tol),
        Command::CertifyAll { criteria } => commands::certify_all(&over, criteria, tol),
    }
}
