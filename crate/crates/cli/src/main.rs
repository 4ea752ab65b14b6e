use clap::Parser;
use euqoe_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
