use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dob_lab::stability::{RootLocus, StabilityMap};
use dob_lab::FrequencyPoint;

use crate::error::CliError;

/// Output directory that records what was written, in order.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl OutDir {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(io(&path))?;
        self.files.push(path);
        Ok(())
    }
}

pub fn bode_csv(points: &[FrequencyPoint]) -> String {
    let mut out = String::from("omega,mag_db,phase_deg\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.omega, p.magnitude_db, p.phase_deg);
    }
    out
}

/// One row per (branch, gain), branches in order.
pub fn locus_csv(locus: &RootLocus) -> String {
    let mut out = String::from("gain,branch,re,im\n");
    for (b, branch) in locus.branches.iter().enumerate() {
        for (k, z) in branch.gains.iter().zip(&branch.points) {
            let _ = writeln!(out, "{k},{b},{},{}", z.re, z.im);
        }
    }
    out
}

pub fn map_csv(map: &StabilityMap) -> String {
    let mut out = String::from("param,value,stable\n");
    for (v, s) in map.grid.iter().zip(&map.stable) {
        let _ = writeln!(out, "{},{v},{}", map.parameter, u8::from(*s));
    }
    out
}
