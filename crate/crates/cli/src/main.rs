mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

/// Exit statuses.
pub const EXIT_PARAMS: u8 = 2;
pub const EXIT_UNDELIVERED: u8 = 3;
pub const EXIT_ORACLE_FAIL: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sneak_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn code(&self) -> &'static str {
        use sneak_core::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Parse { .. } => "parse",
                E::Infeasible { .. } => "infeasible",
                E::EnumerationBudget { .. } => "enumeration_budget",
                E::DirectNeighbour(_) => "direct_neighbour",
                _ => "invalid_params",
            },
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "csv",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Verify(a) => commands::verify(a),
        Command::Scaling(a) => commands::scaling(a),
    };
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            let diag = json!({
                "error": e.code(),
                "message": e.to_string(),
                "exit_code": EXIT_PARAMS,
            });
            eprintln!("{diag}");
            ExitCode::from(EXIT_PARAMS)
        }
    }
}
