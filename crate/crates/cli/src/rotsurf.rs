//! Constant-curvature rotational profiles written as CSV plus a JSON sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use spacelike::rotational::{profile_to_patch, shoot, RotDiagnostics, ShootOptions, Start};

use crate::CliError;

/// Path of the diagnostics file written next to `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Shoot a profile and measure its interpolation error over the full range.
pub fn profile_diagnostics(start: Start, k: f64, opts: &ShootOptions) -> Result<(spacelike::rotational::RotProfile, RotDiagnostics), CliError> {
    let profile = shoot(start, k, opts)?;
    let patch = profile_to_patch(&profile)?;
    let diag = profile.diagnostics(patch.k_error_max);
    Ok((profile, diag))
}

/// Write `out` (CSV) and `out.json` (diagnostics).
pub fn run_rotsurf(start: Start, k: f64, opts: &ShootOptions, out: &Path) -> Result<RotDiagnostics, CliError> {
    let (profile, diag) = profile_diagnostics(start, k, opts)?;
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut w = BufWriter::new(file);
    profile.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(out, e))?;
    let side = sidecar_path(out);
    let mut json = serde_json::to_string_pretty(&diag).expect("diagnostics serialize");
    json.push('\n');
    std::fs::write(&side, json).map_err(|e| CliError::io(&side, e))?;
    Ok(diag)
}
