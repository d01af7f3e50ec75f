use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use susyqm_cli::{execute, Format, RunConfig};

/// Partner spectra, supercharges, entanglement and Jaynes-Cummings reports.
#[derive(Debug, Parser)]
#[command(name = "susyqm", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format, overriding `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = RunConfig::load(&args.config).and_then(|cfg| execute(&cfg, args.out.as_deref(), args.format));
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            for v in &summary.violations {
                eprintln!("violation: {v}");
            }
            ExitCode::from(summary.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
