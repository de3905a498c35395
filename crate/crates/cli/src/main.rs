mod args;
mod commands;
mod output;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Format};
use commands::{CliError, Outcome};
use output::{render, split, RunConfig};

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Constants(a) => commands::constants(a, g),
        Command::Identities(a) => commands::identities(a),
        Command::Diagonals(a) => commands::diagonals(a, g),
        Command::Complexity(a) => commands::complexity(a, g),
        Command::Converge(a) => commands::converge(a, g),
        Command::Saddles(a) => commands::saddles(a, g),
        Command::Omega(a) => commands::omega(a),
        Command::Words(a) => commands::words(a),
        Command::Calibrate(a) => commands::calibrate(a, g),
        Command::Rerun(_) => Err(CliError::Usage("rerun cannot be nested".into())),
    }
}

fn write_out(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Re-executes the recorded command and compares the data sections.
fn rerun(cli: &Cli, file: &std::path::Path) -> Result<u8, CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::Failed(format!("{}: {e}", file.display())))?;
    let (config, format, old) = split(&text).map_err(CliError::Failed)?;
    if matches!(config.cli.command, Command::Rerun(_)) {
        return Err(CliError::Usage("file records a rerun".into()));
    }
    let mut recorded = config.cli.clone();
    if let Some(t) = cli.global.threads {
        recorded.global.threads = Some(t);
    }
    install_pool(recorded.global.threads)?;
    let outcome = execute(&recorded)?;
    let fresh = render(&RunConfig::new(&recorded), &outcome.report, format).map_err(CliError::Failed)?;
    let (_, _, new) = split(&fresh).map_err(CliError::Failed)?;
    let same = old == new;
    let summary = serde_json::json!({
        "file": file.display().to_string(),
        "format": if format == Format::Csv { "csv" } else { "json" },
        "identical": same,
        "recorded_version": config.version,
    });
    write_out(cli, &(serde_json::to_string_pretty(&summary).expect("json") + "\n"))?;
    if same {
        Ok(0)
    } else {
        let first = old.lines().zip(new.lines()).position(|(a, b)| a != b);
        eprintln!("data differs from {} (first differing line: {first:?})", file.display());
        Ok(2)
    }
}

fn install_pool(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Only the first call can succeed; later calls keep the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Command::Rerun(a) = &cli.command {
        return rerun(&cli, &a.file);
    }
    install_pool(cli.global.threads)?;
    let outcome = execute(&cli)?;
    let text = render(&RunConfig::new(&cli), &outcome.report, cli.global.format()).map_err(CliError::Failed)?;
    write_out(&cli, &text)?;
    match outcome.verdict {
        Ok(()) => Ok(0),
        Err(msg) => {
            eprintln!("{msg}");
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
