use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fde_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(emission) => {
            if cli.command.common().out.is_none() {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(emission.body.as_bytes());
            }
            for note in &emission.notes {
                eprintln!("{note}");
            }
            ExitCode::from(emission.exit as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            if let CliError::Core(hahn_fde::Error::Divergence { history }) = &err {
                eprintln!("residual history: {history:?}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
