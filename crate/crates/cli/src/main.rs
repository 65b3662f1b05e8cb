use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dob_lab_cli::{run_file, CliError, Kind};

#[derive(Debug, Parser)]
#[command(name = "dob-lab", version, about = "Disturbance-observer design, analysis and simulation")]
struct Args {
    /// What to run.
    kind: Kind,
    /// Figure id for reproduce-figure (fig3, fig7, fig8, fig9, fig10); may also be given in the file.
    figure: Option<String>,
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the written artifacts.
    #[arg(long, default_value = "dob-lab-out")]
    out: PathBuf,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DOB_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("DOB_LAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = init_threads().and_then(|()| run_file(args.kind, &args.config, &args.out, args.figure.as_deref()));
    match result {
        Ok(outcome) => {
            // a closed pipe (e.g. `| head`) is not a failure of the run
            let mut stdout = std::io::stdout().lock();
            for line in &outcome.lines {
                let _ = writeln!(stdout, "{line}");
            }
            for f in &outcome.out.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dob-lab {}: {e}", args.kind);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
