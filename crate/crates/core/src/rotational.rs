//! Rotationally symmetric graphs `t = h(r)` over the geodesic-polar chart
//! with prescribed constant Gaussian curvature.
//!
//! The profile ODE is never written out: at each step `h″` is found by
//! root-finding against the generic curvature kernel of the surface module,
//! and `(h, h′)` are advanced with an embedded Dormand–Prince 4(5) pair.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ambient::HyperbolicChart;
use crate::error::GeomError;
use crate::grid::Rect;
use crate::jet::{Axis, Jet3};
use crate::surface::{curvature_of_immersion, CoordinateMap, SurfacePatch};
use crate::tensor::Vec3;

/// Accuracy of the `h″` root in curvature units.
pub const ROOT_TOL: f64 = 1e-10;

/// `|h″|` beyond which constant-curvature continuation is declared broken.
pub const H2_LIMIT: f64 = 1e8;

/// Radius where axis starts leave the chart singularity.
pub const AXIS_START_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RotationalError {
    #[error("no constant-curvature continuation at r = {r}: {reason}")]
    NoRoot { r: f64, reason: String },
    #[error("inadmissible start: {0}")]
    Inadmissible(String),
    #[error("profile has {0} samples in range, at least 4 are needed")]
    TooFewSamples(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Gaussian curvature of `t = h(r)` at radius `r` from the local data
/// `(h, h′, h″)`, evaluated by the generic induced-metric kernel.
pub fn curvature_given_h2(r: f64, h: f64, h1: f64, h2: f64) -> Result<f64, GeomError> {
    if !(r > 0.0) {
        return Err(GeomError::OutsideChart { chart: HyperbolicChart::GeodesicPolar.name(), point: [r, 0.0] });
    }
    if !(h1 * h1 < 1.0) {
        return Err(GeomError::NotSpacelike { point: [r, 0.0], det: 1.0 - h1 * h1, trace: f64::NAN });
    }
    let mut t = [0.0; 10];
    t[0] = h;
    t[1] = h1;
    t[3] = 0.5 * h2;
    let pos = [Jet3::var(Axis::U, r), Jet3::var(Axis::V, 0.0), Jet3::from_coeffs(t)];
    curvature_of_immersion(HyperbolicChart::GeodesicPolar, &pos)
}

/// The `h″` for which the curvature at `(r, h, h′)` equals `k_target`.
pub fn solve_h2(r: f64, h: f64, h1: f64, k_target: f64) -> Result<f64, RotationalError> {
    let k = |x: f64| curvature_given_h2(r, h, h1, x);
    let k0 = k(0.0)?;
    let k1 = k(1.0)?;
    let slope = k1 - k0;
    if slope.abs() <= 1e-13 * (1.0 + k0.abs()) {
        // curvature does not depend on h″ here (h′ = 0)
        if (k0 - k_target).abs() <= ROOT_TOL {
            return Ok(0.0);
        }
        return Err(RotationalError::NoRoot {
            r,
            reason: format!("curvature is {k0} independently of h'' (h' = {h1})"),
        });
    }
    let mut x0 = 0.0;
    let mut f0 = k0 - k_target;
    let mut x1 = 1.0;
    let mut f1 = k1 - k_target;
    for _ in 0..8 {
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2.abs() > H2_LIMIT {
            return Err(RotationalError::NoRoot { r, reason: format!("|h''| exceeds {H2_LIMIT:e} (h' = {h1})") });
        }
        let f2 = k(x2)? - k_target;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        let tol = ROOT_TOL * (1.0 + (slope * x1).abs());
        if f1.abs() <= tol {
            // the root must be bracketed by a monotone change of sign
            let d = 1e-6 * (1.0 + x1.abs());
            let lo = k(x1 - d)? - k_target;
            let hi = k(x1 + d)? - k_target;
            if lo.signum() * hi.signum() > 0.0 || (hi - lo).signum() != slope.signum() {
                return Err(RotationalError::NoRoot { r, reason: format!("curvature is not monotone in h'' near {x1}") });
            }
            return Ok(x1);
        }
    }
    Err(RotationalError::NoRoot { r, reason: format!("root iteration did not converge (residual {f1:e})") })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Start {
    /// Smooth axis `h ≈ a r²/2`.
    Axis { a: f64 },
    /// Interior start with `h(r0) = h0`, `h′(r0) = v0`.
    Annulus { r0: f64, h0: f64, v0: f64 },
}

impl Start {
    /// The axis start of a smooth surface with curvature `k`, if one exists.
    pub fn axis_for(k: f64) -> Result<Start, RotationalError> {
        // at a smooth axis Θ = −1 and A = −a·Id, so K = −1 − det A = −1 − a²
        if k > -1.0 {
            return Err(RotationalError::Inadmissible(format!(
                "a smooth axis point needs det A = a^2 = -(K + 1), but -(K + 1) = {} < 0 for K = {k}",
                -(k + 1.0)
            )));
        }
        Ok(Start::Axis { a: (-(k + 1.0)).sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOptions {
    pub r_max: f64,
    /// Inner end for annulus starts.
    pub r_min: f64,
    pub max_step: f64,
    pub atol: f64,
    pub min_step: f64,
    /// Allowed `|K − K_target|` of the interpolated profile at step midpoints.
    pub interp_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { r_max: 5.0, r_min: 1e-3, max_step: 0.02, atol: 1e-10, min_step: 1e-9, interp_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Reached the requested radius.
    RangeEnd,
    /// `|h′| → 1`.
    Lightlike,
    /// No admissible `h″`.
    NoRoot,
    /// Steps shrank below the minimum without progress.
    StepUnderflow,
}

impl EndReason {
    pub fn is_breakdown(self) -> bool {
        self != EndReason::RangeEnd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunEnd {
    pub radius: f64,
    pub reason: EndReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotProfile {
    pub k_target: f64,
    pub start: Start,
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    pub d2h: Vec<f64>,
    /// Curvature at each sample through the generic kernel.
    pub k_check: Vec<f64>,
    pub outer: RunEnd,
    /// `None` for axis starts.
    pub inner: Option<RunEnd>,
    /// `∫ √(1 − h′²) dr` over the computed range.
    pub radial_length: f64,
}

/// Summary written next to a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotDiagnostics {
    pub k_target: f64,
    pub start: Start,
    pub samples: usize,
    pub r_first: f64,
    pub r_last: f64,
    pub breakdown_radius: Option<f64>,
    pub outer_end: EndReason,
    pub breakdown_radius_inner: Option<f64>,
    pub inner_end: Option<EndReason>,
    pub radial_length: f64,
    #[serde(rename = "K_error_max")]
    pub k_error_max: f64,
}

impl RotProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn breakdown_radius(&self) -> Option<f64> {
        self.outer.reason.is_breakdown().then_some(self.outer.radius)
    }

    pub fn breakdown_radius_inner(&self) -> Option<f64> {
        self.inner.filter(|e| e.reason.is_breakdown()).map(|e| e.radius)
    }

    pub fn diagnostics(&self, k_error_max: f64) -> RotDiagnostics {
        RotDiagnostics {
            k_target: self.k_target,
            start: self.start,
            samples: self.len(),
            r_first: self.r.first().copied().unwrap_or(f64::NAN),
            r_last: self.r.last().copied().unwrap_or(f64::NAN),
            breakdown_radius: self.breakdown_radius(),
            outer_end: self.outer.reason,
            breakdown_radius_inner: self.breakdown_radius_inner(),
            inner_end: self.inner.map(|e| e.reason),
            radial_length: self.radial_length,
            k_error_max,
        }
    }

    /// CSV with columns `r,h,dh,K_check`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,h,dh,K_check")?;
        for i in 0..self.len() {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", self.r[i], self.h[i], self.dh[i], self.k_check[i])?;
        }
        Ok(())
    }
}

/// State `(h, h′, radial length)`.
type State = [f64; 3];

fn rhs(r: f64, y: &State, k: f64) -> Result<State, RotationalError> {
    if !(y[1] * y[1] < 1.0) {
        return Err(RotationalError::Geom(GeomError::NotSpacelike { point: [r, 0.0], det: 1.0 - y[1] * y[1], trace: f64::NAN }));
    }
    let h2 = solve_h2(r, y[0], y[1], k)?;
    Ok([y[1], h2, (1.0 - y[1] * y[1]).sqrt()])
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One trial step; returns the 5th-order solution and the error estimate on
/// `(h, h′)`.
fn dp_step(r: f64, y: &State, step: f64, k: f64, k1: &State) -> Result<(State, f64), RotationalError> {
    let mut ks = [[0.0; 3]; 7];
    ks[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in ks.iter().enumerate().take(s) {
            for c in 0..3 {
                ys[c] += step * A[s][j] * kj[c];
            }
        }
        ks[s] = rhs(r + C[s] * step, &ys, k)?;
    }
    let mut y5 = *y;
    let mut err: f64 = 0.0;
    for c in 0..3 {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * ks[s][c];
            d4 += B4[s] * ks[s][c];
        }
        y5[c] += step * d5;
        if c < 2 {
            err = err.max((step * (d5 - d4)).abs());
        }
    }
    Ok((y5, err))
}

struct Branch {
    r: Vec<f64>,
    y: Vec<State>,
    d2h: Vec<f64>,
    end: RunEnd,
}

/// Integrate from `(r0, y0)` toward `r_end` (either direction).
fn integrate(r0: f64, y0: State, r_end: f64, k: f64, opts: &ShootOptions) -> Result<Branch, RotationalError> {
    let dir = if r_end >= r0 { 1.0 } else { -1.0 };
    let f0 = rhs(r0, &y0, k)?;
    let mut out = Branch { r: vec![r0], y: vec![y0], d2h: vec![f0[1]], end: RunEnd { radius: r_end, reason: EndReason::RangeEnd } };
    let (mut r, mut y, mut f) = (r0, y0, f0);
    let mut step = opts.max_step.min(0.01);
    let mut last_failure = EndReason::StepUnderflow;
    loop {
        let remaining = (r_end - r) * dir;
        if remaining <= 1e-14 * (1.0 + r_end.abs()) {
            return Ok(out);
        }
        step = step.min(opts.max_step).min(remaining);
        if step < opts.min_step {
            out.end = RunEnd { radius: r, reason: last_failure };
            return Ok(out);
        }
        let trial = dp_step(r, &y, dir * step, k, &f);
        let (y_new, err) = match trial {
            Ok(t) => t,
            Err(RotationalError::NoRoot { .. }) => {
                last_failure = EndReason::NoRoot;
                step *= 0.5;
                continue;
            }
            Err(RotationalError::Geom(GeomError::NotSpacelike { .. })) => {
                last_failure = EndReason::Lightlike;
                step *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        // reject steps that leave the spacelike region or jump over h′ = 0
        if !(y_new[1] * y_new[1] < 1.0) {
            last_failure = EndReason::Lightlike;
            step *= 0.5;
            continue;
        }
        if y_new[1] * y[1] < 0.0 {
            last_failure = EndReason::NoRoot;
            step *= 0.5;
            continue;
        }
        let ratio = err / opts.atol;
        if ratio > 1.0 {
            step *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5);
            continue;
        }
        let r_new = r + dir * step;
        let f_new = match rhs(r_new, &y_new, k) {
            Ok(f) => f,
            Err(RotationalError::NoRoot { .. }) => {
                last_failure = EndReason::NoRoot;
                step *= 0.5;
                continue;
            }
            Err(RotationalError::Geom(GeomError::NotSpacelike { .. })) => {
                last_failure = EndReason::Lightlike;
                step *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        // the patch interpolates between samples, so the midpoint must keep K
        let rm = r + 0.5 * dir * step;
        let [hm, h1m, h2m, _] = quintic_hermite((r, [y[0], y[1], f[1]]), (r_new, [y_new[0], y_new[1], f_new[1]]), rm);
        let mid_ok = matches!(curvature_given_h2(rm, hm, h1m, h2m), Ok(km) if (km - k).abs() <= opts.interp_tol);
        if !mid_ok {
            step *= 0.5;
            continue;
        }
        r = r_new;
        y = y_new;
        f = f_new;
        out.r.push(r);
        out.y.push(y);
        out.d2h.push(f[1]);
        let grow = if ratio > 0.0 { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) } else { 5.0 };
        step *= grow;
    }
}

/// Integrate a constant-curvature profile from `start`.
pub fn shoot(start: Start, k_target: f64, opts: &ShootOptions) -> Result<RotProfile, RotationalError> {
    if !k_target.is_finite() {
        return Err(RotationalError::InvalidParameter(format!("curvature {k_target}")));
    }
    if !(opts.max_step > 0.0 && opts.atol > 0.0 && opts.min_step > 0.0 && opts.r_min > 0.0 && opts.interp_tol > 0.0) {
        return Err(RotationalError::InvalidParameter("step options must be positive".into()));
    }
    let (outer, inner, length0) = match start {
        Start::Axis { a } => {
            let expected = Start::axis_for(k_target)?;
            let Start::Axis { a: a_k } = expected else { unreachable!() };
            if (a.abs() - a_k).abs() > 1e-9 * (1.0 + a_k) {
                return Err(RotationalError::Inadmissible(format!(
                    "axis curvature a = {a} does not match sqrt(-(K + 1)) = {a_k}"
                )));
            }
            let re = AXIS_START_RADIUS;
            if opts.r_max <= re {
                return Err(RotationalError::InvalidParameter(format!("r_max must exceed {re}")));
            }
            let y0 = [0.5 * a * re * re, a * re, 0.0];
            (integrate(re, y0, opts.r_max, k_target, opts)?, None, re)
        }
        Start::Annulus { r0, h0, v0 } => {
            if !(r0 > 0.0) || !(v0 * v0 < 1.0) || !h0.is_finite() {
                return Err(RotationalError::Inadmissible(format!(
                    "annulus start needs r0 > 0 and |v0| < 1, got r0 = {r0}, v0 = {v0}"
                )));
            }
            if !(opts.r_min < r0 && r0 < opts.r_max) {
                return Err(RotationalError::InvalidParameter(format!(
                    "start radius {r0} outside ({}, {})",
                    opts.r_min, opts.r_max
                )));
            }
            let y0 = [h0, v0, 0.0];
            let out = integrate(r0, y0, opts.r_max, k_target, opts)?;
            let inn = integrate(r0, y0, opts.r_min, k_target, opts)?;
            (out, Some(inn), 0.0)
        }
    };

    let mut r = Vec::new();
    let mut ys = Vec::new();
    let mut d2h = Vec::new();
    let mut radial_length = length0 + outer.y.last().map_or(0.0, |y| y[2]);
    if let Some(inn) = &inner {
        radial_length += inn.y.last().map_or(0.0, |y| y[2].abs());
        for i in (1..inn.r.len()).rev() {
            r.push(inn.r[i]);
            ys.push(inn.y[i]);
            d2h.push(inn.d2h[i]);
        }
    }
    r.extend_from_slice(&outer.r);
    ys.extend_from_slice(&outer.y);
    d2h.extend_from_slice(&outer.d2h);
    let k_check = r
        .iter()
        .zip(&ys)
        .zip(&d2h)
        .map(|((&ri, y), &h2)| curvature_given_h2(ri, y[0], y[1], h2))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RotProfile {
        k_target,
        start,
        h: ys.iter().map(|y| y[0]).collect(),
        dh: ys.iter().map(|y| y[1]).collect(),
        r,
        d2h,
        k_check,
        outer: outer.end,
        inner: inner.map(|b| b.end),
        radial_length,
    })
}

/// Piecewise quintic Hermite interpolant of `h` through `(h, h′, h″)` at the
/// samples.
#[derive(Debug, Clone)]
pub struct ProfileInterpolant {
    r: Vec<f64>,
    h: Vec<f64>,
    dh: Vec<f64>,
    d2h: Vec<f64>,
}

impl ProfileInterpolant {
    fn new(p: &RotProfile, lo: usize, hi: usize) -> Self {
        ProfileInterpolant {
            r: p.r[lo..=hi].to_vec(),
            h: p.h[lo..=hi].to_vec(),
            dh: p.dh[lo..=hi].to_vec(),
            d2h: p.d2h[lo..=hi].to_vec(),
        }
    }

    /// `[h, h′, h″, h‴]` at `x`, clamped to the sampled interval.
    pub fn eval(&self, x: f64) -> [f64; 4] {
        let n = self.r.len();
        let i = self.r.partition_point(|&ri| ri <= x).clamp(1, n - 1) - 1;
        quintic_hermite(
            (self.r[i], [self.h[i], self.dh[i], self.d2h[i]]),
            (self.r[i + 1], [self.h[i + 1], self.dh[i + 1], self.d2h[i + 1]]),
            x,
        )
    }
}

/// `[h, h′, h″, h‴]` at `x` of the quintic matching `(h, h′, h″)` at both
/// ends of a segment. The ends may be given in either order.
fn quintic_hermite(a: (f64, [f64; 3]), b: (f64, [f64; 3]), x: f64) -> [f64; 4] {
    let d = b.0 - a.0;
    let t = (x - a.0) / d;
    let c0 = a.1[0];
    let c1 = d * a.1[1];
    let c2 = 0.5 * d * d * a.1[2];
    let p = b.1[0] - c0 - c1 - c2;
    let q = d * b.1[1] - c1 - 2.0 * c2;
    let w = d * d * b.1[2] - 2.0 * c2;
    let c3 = 10.0 * p - 4.0 * q + 0.5 * w;
    let c4 = -15.0 * p + 7.0 * q - w;
    let c5 = 6.0 * p - 3.0 * q + 0.5 * w;
    let p0 = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
    let p1 = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
    let p2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
    let p3 = 6.0 * c3 + t * (24.0 * c4 + t * 60.0 * c5);
    [p0, p1 / d, p2 / (d * d), p3 / (d * d * d)]
}

#[derive(Debug, Clone)]
struct RotationalCoords {
    interp: ProfileInterpolant,
}

impl CoordinateMap for RotationalCoords {
    fn eval(&self, p: [f64; 2]) -> Result<Vec3<Jet3>, GeomError> {
        let r = Jet3::var(Axis::U, p[0]);
        Ok([r, Jet3::var(Axis::V, p[1]), r.lift(self.interp.eval(p[0]))])
    }
}

/// A polar-chart patch built from a profile, with the measured curvature
/// error of the interpolated surface.
#[derive(Debug, Clone)]
pub struct RotationalPatch {
    pub patch: SurfacePatch,
    pub interpolant: ProfileInterpolant,
    /// `max |K − K_target|` at the samples and interval midpoints in range.
    pub k_error_max: f64,
}

/// Patch over the full sampled range and `θ ∈ [0, 1]`.
pub fn profile_to_patch(profile: &RotProfile) -> Result<RotationalPatch, RotationalError> {
    let lo = profile.r.first().copied().unwrap_or(f64::NAN);
    let hi = profile.r.last().copied().unwrap_or(f64::NAN);
    profile_to_patch_on(profile, lo, hi, 0.0, 1.0)
}

/// Patch over `[r0, r1] × [theta0, theta1]`; `[r0, r1]` must lie inside the
/// sampled range.
pub fn profile_to_patch_on(
    profile: &RotProfile,
    r0: f64,
    r1: f64,
    theta0: f64,
    theta1: f64,
) -> Result<RotationalPatch, RotationalError> {
    let n = profile.len();
    if n < 4 {
        return Err(RotationalError::TooFewSamples(n));
    }
    if !(r0 < r1 && r0 >= profile.r[0] && r1 <= profile.r[n - 1]) {
        return Err(RotationalError::InvalidParameter(format!(
            "radial range [{r0}, {r1}] is not inside the sampled range [{}, {}]",
            profile.r[0],
            profile.r[n - 1]
        )));
    }
    // samples covering [r0, r1]
    let lo = profile.r.partition_point(|&x| x <= r0).saturating_sub(1);
    let hi = profile.r.partition_point(|&x| x < r1).min(n - 1);
    if hi - lo + 1 < 4 {
        return Err(RotationalError::TooFewSamples(hi - lo + 1));
    }
    let interp = ProfileInterpolant::new(profile, lo, hi);
    let domain = Rect::new(r0, r1, theta0, theta1)?;
    let patch = SurfacePatch::new(
        HyperbolicChart::GeodesicPolar,
        domain,
        Arc::new(RotationalCoords { interp: interp.clone() }),
    );
    let theta = 0.5 * (theta0 + theta1);
    let mut k_error_max: f64 = 0.0;
    let mut probe = |x: f64| -> Result<(), RotationalError> {
        if x >= r0 && x <= r1 {
            let k = patch.frame_at([x, theta])?.k_int;
            k_error_max = k_error_max.max((k - profile.k_target).abs());
        }
        Ok(())
    };
    for i in lo..=hi {
        probe(profile.r[i])?;
        if i < hi {
            probe(0.5 * (profile.r[i] + profile.r[i + 1]))?;
        }
    }
    Ok(RotationalPatch { patch, interpolant: interp, k_error_max })
}

/// Outcome of the incompleteness test for one start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub breakdown_radius: Option<f64>,
    pub breakdown_radius_inner: Option<f64>,
    pub radial_length: f64,
    /// Radial length with `r_max` doubled.
    pub radial_length_extended: f64,
    /// Outward breakdown, or a radial length that does not grow when the
    /// radial span is extended.
    pub incomplete: bool,
}

pub fn incompleteness_witness(start: Start, k_target: f64, opts: &ShootOptions) -> Result<Witness, RotationalError> {
    let base = shoot(start, k_target, opts)?;
    let wide = shoot(start, k_target, &ShootOptions { r_max: 2.0 * opts.r_max, ..*opts })?;
    let l0 = base.radial_length;
    let l1 = wide.radial_length;
    let converged = (l1 - l0).abs() <= 1e-6 * l0.max(1.0);
    Ok(Witness {
        breakdown_radius: base.breakdown_radius(),
        breakdown_radius_inner: base.breakdown_radius_inner(),
        radial_length: l0,
        radial_length_extended: l1,
        incomplete: base.breakdown_radius().is_some() || converged,
    })
}
