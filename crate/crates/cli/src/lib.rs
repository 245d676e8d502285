//! Batch front-end for the `spacelike` toolkit: identity suites, field
//! tables, curvature scans and rotational profiles.
//!
//! Every command exits with 0 when all checks pass, 1 when an identity or
//! bound fails, and 2 on usage, spec or domain errors.

use std::path::PathBuf;

use thiserror::Error;

use spacelike::error::GeomError;
use spacelike::rotational::RotationalError;
use spacelike::specfile::SpecError;

pub mod fields;
pub mod rotsurf;
pub mod suite;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Rotational(#[from] RotationalError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Read and parse a surface spec file.
pub fn load_spec(path: &std::path::Path) -> Result<spacelike::specfile::SurfaceSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(spacelike::specfile::SurfaceSpec::parse(&text)?)
}
