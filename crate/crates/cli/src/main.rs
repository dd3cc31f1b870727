use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lindley_interf::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match lindley_interf::run(&cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("lindley-interf: {e}");
            e.exit_code()
        }
    }
}
