use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = arma_fpe::cli::Cli::parse();
    ExitCode::from(arma_fpe::cli::run(cli))
}
