//! `annulus`: evaluate, tabulate and verify the characteristic `T(τ, r; f)`.
//!
//! Exit statuses: 0 success, 1 input error, 2 numerical non-convergence,
//! 3 verification failure.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use annulus_core::Error;
use clap::Parser;

use crate::args::{Cli, Command, RunConfig};
use crate::output::{error_json, sink, write_json, Exit};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Input as u8 } else { Exit::Ok as u8 });
        }
    };
    let (Command::Eval(a) | Command::Surface(a) | Command::Verify(a)) = &cli.command;
    ExitCode::from(run(&cli.command, a) as u8)
}

fn run(command: &Command, a: &args::CommonArgs) -> Exit {
    let mut out = match sink(a.out.as_deref()) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return Exit::Input;
        }
    };
    let result = RunConfig::from_args(a).and_then(|cfg| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        pool.install(|| match command {
            Command::Eval(_) => commands::eval(&cfg, &mut out),
            Command::Surface(_) => commands::surface(&cfg, &mut out),
            Command::Verify(_) => commands::verify(&cfg, &mut out),
        })
    });
    let status = match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            let _ = write_json(&mut out, &error_json(&e));
            Exit::of(&e)
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: cannot write output: {e}");
        return status.worst(Exit::Input);
    }
    status
}
