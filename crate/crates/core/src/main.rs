use clap::Parser;
use fmchow::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
