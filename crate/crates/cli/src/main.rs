use clap::Parser;

fn main() {
    std::process::exit(zb_cli::run(zb_cli::Cli::parse()));
}
