use std::process::ExitCode;

use clap::Parser;

use chunkstyle_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match chunkstyle_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
