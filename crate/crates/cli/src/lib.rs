//! Batch front end for the dob-lab toolkit: scenario files in, CSV, SVG and
//! text reports out.

pub mod commands;
pub mod error;
mod figures;
pub mod output;
pub mod scenario;
pub mod svg;

use std::fs;
use std::path::Path;

pub use commands::Outcome;
pub use error::CliError;
pub use scenario::{Kind, Scenario};

use output::OutDir;

/// Reads a scenario file and runs it, writing artifacts under `out_dir`.
/// `figure` overrides (or supplies) the `figure` key of a reproduce-figure file.
pub fn run_file(kind: Kind, config: &Path, out_dir: &Path, figure: Option<&str>) -> Result<Outcome, CliError> {
    let mut text = fs::read_to_string(config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
    if let Some(fig) = figure {
        if kind != Kind::ReproduceFigure {
            return Err(CliError::Config(format!("a figure id only applies to reproduce-figure, not {kind}")));
        }
        let given = dob_lab::config::ConfigMap::parse(&text).ok().and_then(|m| m.get("figure").map(String::from));
        match given {
            Some(g) if g != fig => {
                return Err(CliError::Config(format!("figure '{fig}' on the command line but '{g}' in the file")))
            }
            Some(_) => {}
            None => text.push_str(&format!("\nfigure = {fig}\n")),
        }
    }
    let scenario = Scenario::parse(kind, &text)?;
    commands::run(&scenario, OutDir::new(out_dir))
}
