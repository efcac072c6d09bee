//! Command-line experiment runner: parameter sweeps written as CSV, plus the
//! validation suite.

pub mod error;
pub mod grid;
pub mod params;
pub mod sweep;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};
pub use params::{parse_config, Command, ConfigFile, Flags, SweepParams};

#[derive(Debug, Parser)]
#[command(
    name = "onebit",
    version,
    about = "1-bit ADC massive MIMO channel estimation and detection experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Estimator MSE against the SNR
    MseVsRho(Flags),
    /// Estimator MSE against the pilot length
    MseVsTau(Flags),
    /// MSE-optimal SNR of the single-user worst-pilot bound
    RhoStar(Flags),
    /// Raw soft symbol estimates for a scatter plot
    DetectScatter(Flags),
    /// Symbol statistics against the number of antennas
    VarVsM(Flags),
    /// Symbol statistics against the SNR
    VarVsRho(Flags),
    /// Symbol statistics against the pilot length
    VarVsTau(Flags),
    /// Monte Carlo symbol error rate against the SNR
    SerVsRho(Flags),
    /// Runs every oracle check; exits with status 2 if any fails
    Validate(Flags),
}

impl CliCommand {
    pub fn split(&self) -> (Command, &Flags) {
        match self {
            CliCommand::MseVsRho(f) => (Command::MseVsRho, f),
            CliCommand::MseVsTau(f) => (Command::MseVsTau, f),
            CliCommand::RhoStar(f) => (Command::RhoStar, f),
            CliCommand::DetectScatter(f) => (Command::DetectScatter, f),
            CliCommand::VarVsM(f) => (Command::VarVsM, f),
            CliCommand::VarVsRho(f) => (Command::VarVsRho, f),
            CliCommand::VarVsTau(f) => (Command::VarVsTau, f),
            CliCommand::SerVsRho(f) => (Command::SerVsRho, f),
            CliCommand::Validate(f) => (Command::Validate, f),
        }
    }
}

/// Resolves, runs and writes one sweep.
pub fn execute(command: Command, flags: &Flags) -> CliResult<()> {
    let params = SweepParams::from_flags(command, flags)?;
    let (table, failed) = sweep::run(&params)?;
    match &params.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(&mut w)?;
            w.flush()?;
        }
        None => table.write(io::stdout().lock())?,
    }
    if failed > 0 {
        return Err(CliError::ValidationFailed {
            failed,
            total: table.len(),
        });
    }
    Ok(())
}
