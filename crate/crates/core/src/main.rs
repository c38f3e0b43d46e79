use clap::Parser;

use beatty_census::cli::{run, Cli};

fn main() {
    let cli = Cli::parse(); // clap exits with status 2 on usage errors
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
