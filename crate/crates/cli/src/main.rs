//! `gup`: plot data for deformed-algebra quantum mechanics as CSV or JSON.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 on a numeric failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{Format, Units};

#[derive(Debug, Parser)]
#[command(name = "gup", version, about = "Plot data for quantum mechanics with a minimal length")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, serde::Serialize)]
pub struct GlobalArgs {
    /// Deformation parameter.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value_t = Units::Scaled)]
    pub units: Units,
    /// Output file; stdout when absent. Relative paths resolve against $GUP_OUTPUT_DIR.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomly drawn states.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Position uncertainty of squeezed states over a (lambda, eta) grid.
    Surface(commands::SurfaceArgs),
    /// A maximally localized state of the truncated theory.
    Maxloc(commands::MaxlocArgs),
    /// Free evolution of a Gaussian packet: density frames and spreading.
    Wavepacket(commands::WavepacketArgs),
    /// Volume momentum, Hubble rate and density of the minisuperspace model.
    Cosmo(commands::CosmoArgs),
    /// Overlap of maximally localized states against their separation.
    Overlap(commands::OverlapArgs),
    /// Forward or round-trip generalized Fourier transforms.
    Transform(commands::TransformArgs),
    /// Frequency and its first two derivatives against wavenumber.
    Dispersion(commands::DispersionArgs),
    /// Uncertainty report of a built-in state.
    VerifyGup(commands::VerifyArgs),
    /// Series-expansion bound against the exact minimal uncertainty.
    SeriesBounds,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Surface(a) => commands::surface(g, a),
        Command::Maxloc(a) => commands::maxloc(g, a),
        Command::Wavepacket(a) => commands::wavepacket(g, a),
        Command::Cosmo(a) => commands::cosmo(g, a),
        Command::Overlap(a) => commands::overlap(g, a),
        Command::Transform(a) => commands::transform(g, a),
        Command::Dispersion(a) => commands::dispersion(g, a),
        Command::VerifyGup(a) => commands::verify_gup(g, a),
        Command::SeriesBounds => commands::series_bounds(g),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = output::emit(&report, g.format, g.output.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
