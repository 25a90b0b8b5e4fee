use clap::Parser;
use trapchain::commands::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
