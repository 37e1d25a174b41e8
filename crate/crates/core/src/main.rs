use clap::Parser;

use iaa_core::cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        let message = e.to_string().replace('\n', " ");
        eprintln!("error: {message}");
        std::process::exit(2);
    }
}
