use thiserror::Error;

use crate::expr::EvalError;
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({}, {}) lies outside the {chart} chart", point[0], point[1])]
    OutsideChart { chart: &'static str, point: [f64; 2] },
    #[error("point ({}, {}) lies outside the patch domain", point[0], point[1])]
    OutsideDomain { point: [f64; 2] },
    #[error("surface is not spacelike at ({}, {}): det g = {det:e}, trace g = {trace:e}", point[0], point[1])]
    NotSpacelike { point: [f64; 2], det: f64, trace: f64 },
    #[error("differential has rank < 2 at ({}, {})", point[0], point[1])]
    NotImmersed { point: [f64; 2] },
    #[error("metric is degenerate (det = {0:e})")]
    DegenerateMetric(f64),
    #[error("c·|∇h|² = {0:e} exceeds the conditioning limit")]
    Conditioning(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inconsistent deformation context: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl GeomError {
    /// Attach a chart point to errors that were raised without one.
    pub fn at(self, point: [f64; 2]) -> GeomError {
        match self {
            GeomError::NotSpacelike { det, trace, .. } => GeomError::NotSpacelike { point, det, trace },
            GeomError::NotImmersed { .. } => GeomError::NotImmersed { point },
            other => other,
        }
    }
}
