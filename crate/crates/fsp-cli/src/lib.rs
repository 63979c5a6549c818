//! Command implementations behind the `fsp` binary.
//!
//! Each subcommand lives in [`commands`] as a `run` function taking its
//! parsed argument struct, so tests can drive the same code paths the
//! binary does. Exit-code policy lives in `main`: malformed inputs exit 2,
//! geometric failures exit 3.

pub mod args;
pub mod commands;
pub mod svg;

use args::{Cli, Command};

pub fn run(cli: &Cli) -> fsp_core::Result<()> {
    match &cli.command {
        Command::Remap(a) => commands::remap::run(a),
        Command::Reconstruct(a) => commands::reconstruct::run(a),
        Command::Stats(a) => commands::stats::run(a),
        Command::Synth(a) => commands::synth::run(a),
    }
}
