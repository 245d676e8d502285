use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Closed chart rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Rect, GeomError> {
        let ok = [u0, u1, v0, v1].iter().all(|x| x.is_finite()) && u0 <= u1 && v0 <= v1;
        if !ok {
            return Err(GeomError::InvalidParameter(format!(
                "domain [{u0}, {u1}] × [{v0}, {v1}] is not a rectangle"
            )));
        }
        Ok(Rect { u0, u1, v0, v1 })
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let su = 1e-12 * (1.0 + self.u0.abs().max(self.u1.abs()));
        let sv = 1e-12 * (1.0 + self.v0.abs().max(self.v1.abs()));
        p[0] >= self.u0 - su && p[0] <= self.u1 + su && p[1] >= self.v0 - sv && p[1] <= self.v1 + sv
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1)]
    }
}

/// Tensor grid with inclusive endpoints. Refining `n → 2n − 1` along an axis
/// yields a superset of the original points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(nu: usize, nv: usize) -> Self {
        GridSpec { nu, nv }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn refined(&self) -> GridSpec {
        GridSpec { nu: 2 * self.nu.max(1) - 1, nv: 2 * self.nv.max(1) - 1 }
    }

    fn coord(n: usize, k: usize, a: f64, b: f64) -> f64 {
        if n <= 1 {
            0.5 * (a + b)
        } else if k == n - 1 {
            b
        } else {
            a + (b - a) * (k as f64) / ((n - 1) as f64)
        }
    }

    /// Point `index` in row-major order: `u` index outer, `v` index inner.
    pub fn point(&self, rect: &Rect, index: usize) -> [f64; 2] {
        let (iu, iv) = (index / self.nv, index % self.nv);
        [Self::coord(self.nu, iu, rect.u0, rect.u1), Self::coord(self.nv, iv, rect.v0, rect.v1)]
    }

    pub fn points(&self, rect: &Rect) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.point(rect, k)).collect()
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    /// `"20x30"` or `"20"` (square).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size '{t}': {e}"));
        let (nu, nv) = match s.split_once(['x', 'X']) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if nu == 0 || nv == 0 {
            return Err("grid sizes must be positive".into());
        }
        Ok(GridSpec { nu, nv })
    }
}

/// Evaluate `f` at every grid point in parallel. Results are in grid order,
/// and the first error by grid index is returned, so the outcome does not
/// depend on scheduling.
pub fn map_grid<T, F>(rect: &Rect, grid: &GridSpec, f: F) -> Result<Vec<T>, GeomError>
where
    T: Send,
    F: Fn([f64; 2]) -> Result<T, GeomError> + Sync,
{
    let results: Vec<Result<T, GeomError>> = (0..grid.len()).into_par_iter().map(|k| f(grid.point(rect, k))).collect();
    results.into_iter().collect()
}

/// Extremes and mean of a scalar field over a grid. Ties resolve to the
/// lowest grid index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub min: f64,
    pub argmin: [f64; 2],
    pub max: f64,
    pub argmax: [f64; 2],
    pub mean: f64,
}

impl FieldSummary {
    /// `None` for an empty grid or if any value is NaN.
    pub fn new(rect: &Rect, grid: &GridSpec, values: &[f64]) -> Option<FieldSummary> {
        if values.is_empty() || values.iter().any(|x| x.is_nan()) {
            return None;
        }
        let (mut imin, mut imax) = (0, 0);
        for (k, &x) in values.iter().enumerate() {
            if x < values[imin] {
                imin = k;
            }
            if x > values[imax] {
                imax = k;
            }
        }
        Some(FieldSummary {
            min: values[imin],
            argmin: grid.point(rect, imin),
            max: values[imax],
            argmax: grid.point(rect, imax),
            mean: values.iter().sum::<f64>() / values.len() as f64,
        })
    }
}
