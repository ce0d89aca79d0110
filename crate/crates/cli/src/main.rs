//! `porovisc`: field data, response maxima, design maps, scalings and
//! self-validation for 1D poro-visco-elastic confined compression.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error,
//! 3 validation failure.

mod commands;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grid::Grid;

#[derive(Parser, Debug)]
#[command(name = "porovisc", version, about = "Poro-visco-elastic confined compression: series solutions and design maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Displacement, velocity, pressure and stresses on an (x, t) grid
    Fields(FieldsArgs),
    /// Step-load peak velocity and power density over an eta grid
    Maxima(MaximaArgs),
    /// Feasibility of (eta, eps) pairs against a velocity threshold
    DesignMap(DesignMapArgs),
    /// Characteristic values and creep estimate of a material preset
    Scale(ScaleArgs),
    /// Run the built-in consistency checks
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pulse {
    Step,
    Trapezoid,
}

#[derive(Args, Debug)]
struct FieldsArgs {
    /// Dimensionless viscosity eta_hat >= 0
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value = "step")]
    pulse: Pulse,
    /// Rise and fall time of the trapezoid
    #[arg(long)]
    eps: Option<f64>,
    /// Plateau duration of the trapezoid
    #[arg(long)]
    tau: Option<f64>,
    /// Number of x points on [0, 1]
    #[arg(long, default_value_t = 101)]
    nx: usize,
    /// Number of t points on [0, tmax]
    #[arg(long, default_value_t = 101)]
    nt: usize,
    #[arg(long, default_value_t = 3.0)]
    tmax: f64,
    /// Absolute series truncation tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MaximaArgs {
    /// eta grid, e.g. log:1e-6:1e2:50
    #[arg(long)]
    eta_grid: Grid,
    /// Material preset; adds SI columns
    #[arg(long)]
    material: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DesignMapArgs {
    #[arg(long)]
    eta_grid: Grid,
    #[arg(long)]
    eps_grid: Grid,
    /// Dimensionless velocity threshold
    #[arg(long, conflicts_with = "vth_si")]
    vth_hat: Option<f64>,
    /// Velocity threshold in m/s; needs --material
    #[arg(long, requires = "material")]
    vth_si: Option<f64>,
    #[arg(long)]
    material: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Writes <prefix>_grid.csv and <prefix>_curve.csv
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args, Debug)]
struct ScaleArgs {
    #[arg(long)]
    material: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Reduced mode counts and grids
    #[arg(long)]
    fast: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fields(a) => commands::fields(a),
        Command::Maxima(a) => commands::maxima(a),
        Command::DesignMap(a) => commands::design_map(a),
        Command::Scale(a) => commands::scale(a),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
