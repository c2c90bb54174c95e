//! `cpn-harmonic`: verification runs, shooting experiments, spectra and
//! parameter sweeps for equivariant harmonic self-maps of CP^n.
//!
//! Exit status: 0 success, 1 numeric tolerance failure or solver failure,
//! 2 invalid input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "cpn-harmonic", version, about = "Equivariant harmonic self-maps of complex projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SpaceArgs {
    /// Complex dimension of CP^n.
    #[arg(long = "n")]
    pub n: u32,
    /// Size of the first block of the torus action, 0 <= p < n.
    #[arg(long = "p")]
    pub p: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a closed-form solution r = arctan(rho tan t) + l pi.
    ///
    /// Columns: quantity, value, tolerance, pass.
    Verify(commands::VerifyArgs),
    /// Smallest eigenvalues of the equivariant Jacobi operator along the family.
    ///
    /// Columns: j, eigenvalue, [closed_form, rel_error,] negative, null. The
    /// closed-form columns appear for n odd, p = (n-1)/2 and |rho| = 1;
    /// rel_error is measured against max(1, |closed_form|).
    Spectrum(commands::SpectrumArgs),
    /// Integrate the reduced equation from t = 0 and match r(pi/2) = k pi/2.
    ///
    /// Columns: t, r, dr, ddr. The summary goes to stderr.
    Shoot(commands::ShootArgs),
    /// Evaluate one quantity over a range of rho, in parallel.
    ///
    /// gap: rho, delta, gap. residual: rho, max_residual,
    /// max_relative_holomorphicity. spectrum: rho, min_eigenvalue, index, nullity,
    /// lambda_0, lambda_1, ...
    Sweep(commands::SweepArgs),
    /// Compare the Gram-matrix construction of P_t with its diagonal form.
    ///
    /// Columns: t, gram_deviation, trace_deviation.
    Oracle(commands::OracleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match cli.command {
        Command::Verify(a) => (commands::verify(&a), a.output),
        Command::Spectrum(a) => (commands::spectrum(&a), a.output),
        Command::Shoot(a) => (commands::shoot(&a), a.output),
        Command::Sweep(a) => (commands::sweep(&a), a.output),
        Command::Oracle(a) => (commands::oracle(&a), a.output),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    if let Err(e) = report.emit(output.format, output.out.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
