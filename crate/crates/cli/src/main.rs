//! `discos`: command-line front end for filtered Fourier-cosine inversion.
//!
//! Every command writes CSV with a `#` header naming the version, the
//! arguments (minus `--output`) and the resolved parameters. Exit status:
//! 0 on success, 2 on invalid input, 3 on numeric or domain failure, 4 when
//! `bounds` finds violations.

mod args;
mod commands;
mod error;
mod output;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("DISCOS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("DISCOS_THREADS = `{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("DISCOS_THREADS: {e}")))
}

fn run(cli: &Cli, argv: &[String]) -> CliResult<()> {
    init_threads()?;
    match &cli.command {
        Command::Cdf(a) => commands::cdf(a, argv),
        Command::Pmf(a) => commands::pmf(a, argv),
        Command::Moment(a) => commands::moment(a, argv),
        Command::Cdf2d(a) => commands::cdf2d(a, argv),
        Command::Bounds(a) => commands::bounds(a, argv),
        Command::Trace(a) => commands::trace(a, argv),
        Command::Hawkes(a) => commands::hawkes(a, argv),
        Command::Gpb(a) => commands::gpb(a, argv),
        Command::Oracle(a) => commands::oracle(a, argv),
        Command::Convergence(a) => commands::convergence(a, argv),
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Err(e) = run(&cli, &argv) {
        eprintln!("discos: {e}");
        std::process::exit(e.exit_code());
    }
}
