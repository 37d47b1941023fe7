//! IO, the simulation study and the command line for `symspace-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod simulate;
pub mod verify;

pub use error::{CliError, CliResult};
