//! Command-line front end: PNG I/O, typed guide loading and the `blit`,
//! `animate` and `bench` subcommands.

pub mod args;
pub mod commands;
pub mod error;
pub mod guides;
pub mod png_io;

use args::{Cli, Command};
use error::CliResult;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Blit(a) => commands::blit(a),
        Command::Animate(a) => commands::animate_cmd(a),
        Command::Bench(a) => commands::bench(a),
    }
}
