//! `dsynth`: distributed controller synthesis for Boolean networks.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dsynth", version, about = "Distributed controller synthesis for networks of Boolean subsystems")]
struct Cli {
    /// Cross-check the result against the brute-force oracle when within budget.
    #[arg(long, global = true)]
    oracle: bool,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a network file is well-posed.
    Validate { net: PathBuf },
    /// Synthesize controllers for a network and contract.
    Synthesize {
        net: PathBuf,
        contract: PathBuf,
        /// Solve the flattened network with a single controller instead.
        #[arg(long)]
        central: bool,
        /// Write the controller file here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a controller file against a network and contract.
    Verify {
        net: PathBuf,
        contract: PathBuf,
        controllers: PathBuf,
    },
    /// Show the projected assumption and maximal distributions at one subsystem.
    Distribute {
        net: PathBuf,
        contract: PathBuf,
        #[arg(long)]
        subsystem: String,
    },
    /// Compile a power system topology, synthesize, verify and report.
    Eps {
        topology: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { net } => commands::validate(net),
        Command::Synthesize { net, contract, central, out } => {
            commands::synthesize(net, contract, *central, out.as_deref(), cli.oracle)
        }
        Command::Verify { net, contract, controllers } => commands::verify(net, contract, controllers, cli.oracle),
        Command::Distribute { net, contract, subsystem } => commands::distribute(net, contract, subsystem, cli.oracle),
        Command::Eps { topology, partition } => commands::eps(topology, partition.as_deref(), cli.oracle),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(cli.json));
            ExitCode::from(report.code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
