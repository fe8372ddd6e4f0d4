mod args;
mod commands;
mod pretty;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::{Body, CliError};

const EXIT_DOMAIN: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let pretty = cli.pretty;
    match commands::run(cli.command) {
        Ok(out) => {
            match out.body {
                Body::Json(v) if pretty => print!("{}", pretty::render(&v)),
                Body::Json(v) => println!("{v}"),
                Body::Lines(lines) => {
                    for l in lines {
                        println!("{l}");
                    }
                }
            }
            if out.verified { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Core(e)) => {
            let rec = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            if pretty { print!("{}", pretty::render(&rec)) } else { println!("{rec}") }
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
