//! Command-line front end: reads CSV or JSON input, dispatches to the
//! library, and writes JSON reports (CSV for convergence traces).
//!
//! Exit codes: 0 success, 1 bad input or a failed demo check, 2 usage
//! error, 3 numerically or mathematically inadmissible request.

mod commands;
mod config;
mod error;
mod report;

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::Parser;

pub use config::{
    ClassifyArgs, Command, ConstantsArgs, ConvergeArgs, DcovArgs, DefinitionArg, DemoArgs, DiagArgs, Format, MethodArg,
    ModeArg, QuadArgs, RunConfig, SampleArgs, TestArgs,
};
pub use error::CliError;

/// Text to print and the exit code to return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

/// Runs a parsed configuration. Standard input is read up front, and only
/// when the command actually uses it.
pub fn run(config: &RunConfig, input: &mut dyn Read, output: &mut dyn Write, errors: &mut dyn Write) -> i32 {
    let mut stdin = Vec::new();
    if commands::reads_stdin(&config.command) {
        if let Err(e) = input.read_to_end(&mut stdin) {
            let _ = writeln!(errors, "error: standard input: {e}");
            return 1;
        }
    }
    let threads = config.threads.filter(|&t| t > 0);
    let result = dcov::par::with_threads(threads, || commands::execute(&config.command, &stdin));
    match result {
        Ok(out) => {
            if let Err(e) = output.write_all(out.text.as_bytes()) {
                let _ = writeln!(errors, "error: writing output: {e}");
                return 1;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(errors, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_cli<I, T>(args: I, input: &mut dyn Read, output: &mut dyn Write, errors: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config, input, output, errors),
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = output.write_all(text.as_bytes());
                0
            } else {
                let _ = errors.write_all(text.as_bytes());
                2
            }
        }
    }
}
