//! Command-line front end: argument and config parsing, subcommand dispatch,
//! exit-code mapping.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use clap::{Parser, Subcommand};

pub use config::OutputArgs;

/// Validation problems exit with 2, numerical-contract violations with 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<mpjc::Error> for CliError {
    fn from(e: mpjc::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mpjc", version, about = "Binomial code synthesis with multiphoton Jaynes-Cummings dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the amplitudes of a binomial codeword
    Codeword(commands::CodewordArgs),
    /// Build the primitive state and extract both codewords from it
    Primitive(commands::PrimitiveArgs),
    /// Ladder coefficients after interaction time tau
    Evolve(commands::PrepArgs),
    /// Oscillator state after measuring the qubit
    Postselect(commands::PostselectArgs),
    /// Heralded scan over (tau, theta) from one Fock state
    Scan2(commands::ScanArgs),
    /// Heralded scan over (tau, theta, phi) from two Fock states
    Scan3(commands::ScanArgs),
    /// Heralded scan over (tau, theta, phi1, phi2) from three Fock states
    Scan4(commands::ScanArgs),
    /// Grid argmax of the deterministic (qubit traced out) fidelity
    DetArgmax(commands::DetArgs),
    /// Zeros of the middle coefficient of the reduced-order protocol
    CkZeros(commands::CkArgs),
    /// Open-system fidelity against decoherence rate
    LindbladSweep(commands::SweepArgs),
    /// Run the cross-module invariant suite
    Verify(verify::VerifyArgs),
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    use config::resolve;
    match &cli.command {
        Command::Codeword(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::codeword(&o, &a)
        }
        Command::Primitive(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::primitive(&o, &a)
        }
        Command::Evolve(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::evolve(&o, &a)
        }
        Command::Postselect(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::postselect(&o, &a)
        }
        Command::Scan2(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::scan(&o, &a, 1)
        }
        Command::Scan3(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::scan(&o, &a, 2)
        }
        Command::Scan4(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::scan(&o, &a, 3)
        }
        Command::DetArgmax(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::det_argmax(&o, &a)
        }
        Command::CkZeros(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::ck_zeros(&o, &a)
        }
        Command::LindbladSweep(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            commands::lindblad_sweep(&o, &a)
        }
        Command::Verify(a) => {
            let (o, a) = resolve(&cli.output, a)?;
            verify::verify(&o, &a)
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
