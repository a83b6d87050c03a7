//! Library side of the `pordkit` binary: argument parsing, run configs and
//! the command implementations.

pub mod commands;
pub mod config;

use std::io::Write;

pub use commands::{run_task, Outcome};
pub use config::{load, Cli, Command, Format, Globals, RunConfig, Task};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pordkit_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad input, 1 for a tool fault.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(pordkit_core::Error::Internal(_)) | CliError::Internal(_) => 1,
            _ => 2,
        }
    }
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Task(task) => run_task(&cli.globals, task),
        Command::Run { file } => {
            let cfg: RunConfig = load(file)?;
            run_task(&cfg.globals, &cfg.task)
        }
    }
}

/// Writes the report in the requested format to `--out` or stdout.
pub fn emit(cli: &Cli, outcome: &Outcome) -> std::io::Result<()> {
    let text = match cli.output.format {
        Format::Json => &outcome.json,
        Format::Table => &outcome.table,
    };
    match &cli.output.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
