use std::process::ExitCode;

use clap::Parser;
use optsample::commands::{self, Cli};
use optsample::parallel::thread_pool;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = thread_pool(cli.threads).and_then(|pool| pool.install(|| commands::run(cli.command)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
