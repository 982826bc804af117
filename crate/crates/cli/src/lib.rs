//! File formats and the `massdiff` command line on top of `massdiff-core`.
//!
//! Machine-readable results go to standard output as JSON (one object, or
//! one object per line). Diagnostics go to standard error.
//!
//! Exit codes: `0` success, `1` usage or input error, `2` a numerical
//! self-check failed.

pub mod args;
mod commands;
pub mod edgelist;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

/// Failure of one subcommand, mapped to an exit code by [`run`].
#[derive(Debug)]
pub enum RunError {
    Input(String),
    Verification(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => EXIT_INPUT,
            RunError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(m) => f.write_str(m),
            RunError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<massdiff_core::Error> for RunError {
    fn from(e: massdiff_core::Error) -> Self {
        match e {
            massdiff_core::Error::Verification(_) => RunError::Verification(e.to_string()),
            other => RunError::Input(other.to_string()),
        }
    }
}

impl From<edgelist::LoadError> for RunError {
    fn from(e: edgelist::LoadError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Input(format!("write error: {e}"))
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Input(format!("serialization error: {e}"))
    }
}

/// Parses `args` (program name first) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::Recommend(a) => commands::recommend(&a, stdout, stderr),
        Command::Grm(a) => commands::grm(&a, stdout, stderr),
        Command::Spectrum(a) => commands::spectrum(&a, stdout, stderr),
        Command::Converge(a) => commands::converge(&a, stdout, stderr),
        Command::VerifyLimit(a) => commands::verify_limit(&a, stdout, stderr),
        Command::Eval(a) => commands::eval(&a, stdout, stderr),
        Command::PaperExample => commands::paper_example(stdout, stderr),
    };
    let result = result.and_then(|()| stdout.flush().map_err(RunError::from));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "massdiff: {e}");
            e.exit_code()
        }
    }
}
