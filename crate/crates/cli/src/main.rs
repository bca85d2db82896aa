use clap::Parser;
use pcd_cli::{exit, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
    std::process::exit(exit::SUCCESS);
}
