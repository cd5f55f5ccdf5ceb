use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use polyaccess_cli::{artifact_path, error_json, exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // Help and version requests.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", e.render().to_string().trim()));
            return ExitCode::from(2);
        }
    };
    let artifacts = match run(&cli) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    match &cli.command.common().out {
        Some(out) => {
            for a in &artifacts {
                let path = artifact_path(out, a.suffix);
                if let Err(e) = std::fs::write(&path, &a.body) {
                    eprintln!("{}", error_json("io", &format!("cannot write {}: {e}", path.display())));
                    return ExitCode::from(2);
                }
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in &artifacts {
                if stdout.write_all(a.body.as_bytes()).is_err() {
                    return ExitCode::from(2);
                }
            }
        }
    }
    ExitCode::SUCCESS
}
