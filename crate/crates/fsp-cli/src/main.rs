use clap::Parser;

/// Exit codes: 0 success, 2 unusable input (files, formats, parameters),
/// 3 geometric failure on valid input. Argument parse errors also exit 2
/// via clap.
fn main() {
    let cli = fsp_cli::args::Cli::parse();
    if let Err(err) = fsp_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(if err.is_input_error() { 2 } else { 3 });
    }
}
