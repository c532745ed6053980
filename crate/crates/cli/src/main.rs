mod args;
mod commands;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Invocation};

/// Error as reported on stderr: one JSON line, exit code 2 for bad input and
/// 3 for solver failures.
#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    pub fn domain(msg: impl Into<String>) -> Self {
        Self { kind: "domain", message: msg.into(), code: 2 }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self { kind: "io", message: e.to_string(), code: 2 }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self { kind: "usage", message: msg.into(), code: 2 }
    }

    fn line(&self) -> String {
        serde_json::json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl From<narrow_escape::Error> for CliError {
    fn from(e: narrow_escape::Error) -> Self {
        use narrow_escape::Error as E;
        let (kind, code) = match &e {
            E::Io(_) => ("io", 2),
            e if e.is_domain() => ("domain", 2),
            E::IllPosed(_) => ("ill-posed", 3),
            _ => ("solver", 3),
        };
        Self { kind, message: e.to_string(), code }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cmd = match cli.command {
        Invocation::Run(cmd) => *cmd,
        Invocation::Replay { file } => output::read_config(&file)?,
    };
    commands::resolve(&mut cmd)?;
    let records = commands::run(&cmd)?;
    output::emit(&cmd, &records, cli.output.as_deref(), cli.format, cli.append)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", CliError::usage(first.trim_start_matches("error: ")).line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.code)
        }
    }
}
