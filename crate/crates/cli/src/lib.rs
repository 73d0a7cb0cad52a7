//! Command-line front end: parameter scans over tori, sign and character
//! tables, uniqueness sweeps and the acceptance driver.

pub mod acceptance;
pub mod commands;
pub mod job;
pub mod output;

pub use commands::{execute, Outcome};
pub use job::{Cli, Command, Format, JobArgs, Mode};
