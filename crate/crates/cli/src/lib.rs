//! Library side of the `cvtele` command-line tool.

// `!(x < y)` is used on purpose so NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod figures;
pub mod modes_cmd;
pub mod output;
pub mod sweep;
pub mod verify;

use args::{Cli, Command};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<cvtele_core::Error> for CliError {
    fn from(e: cvtele_core::Error) -> Self {
        use cvtele_core::modes::ModeError;
        match &e {
            cvtele_core::Error::Mode(ModeError::Integration(_)) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

macro_rules! core_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                cvtele_core::Error::from(e).into()
            }
        })*
    };
}

core_error!(
    cvtele_core::background::BackgroundError,
    cvtele_core::modes::ModeError,
    cvtele_core::bogoliubov::BogoliubovError,
    cvtele_core::fidelity::FidelityError,
    cvtele_core::gaussian::GaussianError
);

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Fig1(a) => figures::cmd_fig1(a, common),
        Command::Fig2(a) => figures::cmd_fig2(a, common),
        Command::Table(a) => figures::cmd_table(a, common),
        Command::Modes(a) => modes_cmd::cmd_modes(a, common),
        Command::Sweep(a) => sweep::cmd_sweep(a, common),
        Command::Verify => verify::cmd_verify(common),
    }
}
