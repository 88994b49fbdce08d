use clap::error::ErrorKind;
use clap::Parser;

use cgent::cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    match execute(&cli) {
        Ok(output) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &output.body) {
                    eprintln!("cgent: cannot write {}: {e}", path.display());
                    std::process::exit(1);
                }
            } else {
                print!("{}", output.body);
            }
            std::process::exit(output.exit_code);
        }
        Err(e) => {
            eprintln!("cgent: {e}");
            std::process::exit(1);
        }
    }
}
