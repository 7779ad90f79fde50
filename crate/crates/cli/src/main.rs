mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use commbound::{par, Error};

use args::Cli;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INAPPLICABLE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Dimension { .. } | Error::Parse { .. } | Error::Io(_) => EXIT_USAGE,
        Error::Resource { .. } => EXIT_RESOURCE,
        Error::Precondition(_) | Error::Convergence { .. } | Error::Lp(_) => EXIT_INAPPLICABLE,
    }
}

fn configure(cli: &Cli) -> Result<(), String> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var("COMMBOUND_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("COMMBOUND_THREADS=`{v}` is not a thread count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err("thread count must be positive".into());
        }
        par::configure_threads(t);
    }
    if cli.sequential {
        par::set_parallel(false);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure(&cli) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = output::render(&cli, outcome.result);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(if outcome.ok { EXIT_OK } else { EXIT_INAPPLICABLE })
}
