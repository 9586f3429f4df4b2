use std::process::ExitCode;

use clap::Parser;
use qutritlab::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let out = cli::run(&args);
    let text = out.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code() as u8)
}
