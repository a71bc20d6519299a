use clap::Parser;
use qenergy::config::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = qenergy::run(cli) {
        eprintln!("qenergy: {e}");
        std::process::exit(e.exit_code());
    }
}
