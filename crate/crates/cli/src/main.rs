use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Format;

/// Finite-temperature Casimir free energy of an antiperiodic scalar field.
#[derive(Debug, Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Free energy per unit area at one (a, beta) point
    Energy(EnergyArgs),
    /// Free energy over a one-dimensional grid
    Sweep(SweepArgs),
    /// Temperature-inversion symmetry residuals over a xi grid
    Tis(TisArgs),
    /// Epstein function E2(z; a1, a2) and its z-derivative
    Epstein(EpsteinArgs),
    /// Run the acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative tolerance for all infinite sums
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Cap on terms per summation index
    #[arg(long, default_value_t = 4096)]
    max_terms: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Decomposition,
    FSeries,
    Zeta,
    All,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("temperature").required(true).args(["beta", "xi"])))]
struct EnergyArgs {
    /// Slab width (antiperiod)
    #[arg(long)]
    a: f64,
    /// Inverse temperature
    #[arg(long)]
    beta: Option<f64>,
    /// Reduced temperature a/(pi beta)
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long, value_enum, default_value_t = RouteArg::Decomposition)]
    route: RouteArg,
    /// Also run the mode-sum and cutoff oracles
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariableArg {
    Xi,
    Beta,
    #[value(name = "T")]
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = VariableArg::Xi)]
    variable: VariableArg,
    #[arg(long, default_value_t = 0.05)]
    from: f64,
    #[arg(long, default_value_t = 20.0)]
    to: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
    spacing: SpacingArg,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Decomposition)]
    route: RouteArg,
    /// Evaluate grid points one after another
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    F1,
    F2Corrected,
    F2AsPrinted,
    G,
}

#[derive(Debug, Args)]
struct TisArgs {
    #[arg(long, value_enum, default_value_t = RelationArg::F1)]
    relation: RelationArg,
    #[arg(long, default_value_t = 0.02)]
    from: f64,
    #[arg(long, default_value_t = 50.0)]
    to: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EpsteinArgs {
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 1.0)]
    a2: f64,
    /// Also sum the lattice directly (z > 1 only)
    #[arg(long)]
    direct: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
