//! Command-line driver: synthetic data generation, batch explanation and
//! metric evaluation on UCR-format files.

pub mod args;
pub mod classifier_spec;
pub mod error;
pub mod evaluate;
pub mod explain;
pub mod files;
pub mod gen_data;
pub mod records;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
pub use error::CliError;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct GlobalOpts {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let global = GlobalOpts {
        config: cli.config,
        seed: cli.seed,
        jobs: cli.jobs,
        output: cli.output,
    };
    let outcome = match &cli.command {
        Command::GenData(a) => gen_data::run(&global, a),
        Command::Explain(a) => explain::run(&global, a),
        Command::Evaluate(a) => evaluate::run(&global, a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
