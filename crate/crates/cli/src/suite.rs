//! The identity suite behind `verify`: evaluate every structure identity on
//! a grid and collect per-identity residual statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use spacelike::ambient::HyperbolicChart;
use spacelike::codazzi::pair_codazzi_vector;
use spacelike::codazzi::PairJets;
use spacelike::deform::{Consistency, DeformationContext, DeformationMode, DeformedPoint, CONSTANT_K_TOL};
use spacelike::error::GeomError;
use spacelike::grid::{map_grid, GridSpec, Rect};
use spacelike::specfile::{BuiltSurface, SurfaceSpec};
use spacelike::surface::{
    codazzi_residual_frame, gauss_formula_max, height_identities_frame, normal_residual, projection_comparison_frame,
    weingarten_residual, PointFrame,
};
use spacelike::tensor::{bilinear2, values2};

use crate::CliError;

/// Default tolerance for surfaces given by expressions.
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Default tolerance for ODE-backed surfaces.
pub const ODE_TOL: f64 = 1e-5;
/// Tolerance for `Θ ≤ −1`.
pub const THETA_TOL: f64 = 1e-12;

/// Identity ids and descriptions, in report order.
pub const IDENTITIES: [(&str, &str); 16] = [
    ("normal", "unit timelike normal: g(N,N) = -1, g(N,f_i) = 0"),
    ("theta", "angle function bound: Theta <= -1"),
    ("eq1", "Gauss formula: D_X Y = nabla_X Y - g(AX,Y) N"),
    ("eq2", "Weingarten formula: D_X N tangent, alpha = g(A.,.) symmetric"),
    ("eq4", "Gauss equation: K = -Theta^2 - det A"),
    ("eq6", "Codazzi equation in H2 x R1"),
    ("eq7", "|grad h|^2 = Theta^2 - 1"),
    ("eq9", "Hess h = Theta alpha"),
    ("proj", "projection is distance-increasing: Pi* g_H - g >= 0"),
    ("eq13", "deformed metric: det g~ / det g = 1 + c|grad h|^2, g~ >= g"),
    ("grad_tilde", "deformed gradient: g~(grad~ h, X) = dh(X)"),
    ("eq14", "deformed shape operator: alpha = g~(A~., .) and its determinant"),
    ("eq15", "deformed connection: formula vs Christoffel symbols of g~"),
    ("lemma3", "curvature of g~: lemma formula vs direct computation"),
    ("eq17", "det Hess h = Theta^2 det A = -(1 + |grad h|^2)(K + 1 + |grad h|^2)"),
    ("eq18", "closed form of K~ vs lemma formula"),
];

/// Pair-level identities, evaluated only in constant-curvature mode.
pub const CLAIM_IDENTITIES: [(&str, &str); 5] = [
    ("claim_codazzi", "(g~, alpha) satisfies the Codazzi equation of a space form"),
    ("claim_kpair", "K(g~, alpha) = -(K + 1)"),
    ("lambda", "c lambda_1 lambda_2 / (1 + c|grad h|^2) = -1"),
    ("eq19", "K~ <= K - 1"),
    ("ktilde_range", "K - 1 <= K~ < -(K + 1), so |K~| >= K + 1"),
];

/// How the deformation constant is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeArg {
    FreeC(f64),
    ConstantK(f64),
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub mode: ModeArg,
    pub tolerances: BTreeMap<String, f64>,
    /// Allowed `|K − K_asserted|` in constant-curvature mode.
    pub constant_k_tol: f64,
}

impl SuiteConfig {
    pub fn new(grid: GridSpec, mode: ModeArg) -> Self {
        SuiteConfig { grid, mode, tolerances: BTreeMap::new(), constant_k_tol: CONSTANT_K_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub id: String,
    pub description: String,
    pub max: f64,
    pub mean: f64,
    pub argmax: [f64; 2],
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tool: String,
    pub version: String,
    pub fingerprint: String,
    pub chart: HyperbolicChart,
    pub domain: Rect,
    pub grid: GridSpec,
    pub mode: DeformationMode,
    pub c: f64,
    pub ode_backed: bool,
    /// Interpolation error of an ODE-backed surface.
    pub k_error_max: Option<f64>,
    pub consistency: Option<Consistency>,
    pub identities: Vec<IdentityEntry>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn entry(&self, id: &str) -> Option<&IdentityEntry> {
        self.identities.iter().find(|e| e.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityEntry> {
        self.identities.iter().filter(|e| !e.pass)
    }
}

/// Build the deformation context for a surface.
pub fn context(built: &BuiltSurface, grid: &GridSpec, mode: ModeArg, k_tol: f64) -> Result<DeformationContext, CliError> {
    let ctx = match mode {
        ModeArg::FreeC(c) => DeformationContext::free_c(built.patch.clone(), c)?,
        ModeArg::ConstantK(k) => DeformationContext::constant_k(built.patch.clone(), k, grid, k_tol)?,
    };
    Ok(ctx)
}

/// All pointwise residuals of the base identities, in `IDENTITIES` order.
pub fn frame_residuals(frame: &PointFrame, deformed: &DeformedPoint) -> Result<Vec<f64>, GeomError> {
    let (r7, r9) = height_identities_frame(frame);
    let k_scale = frame.k_int.abs().max(frame.k_ext.abs()).max(1.0);
    let d = deformed.residuals()?;
    Ok(vec![
        normal_residual(frame),
        (frame.theta + 1.0).max(0.0),
        gauss_formula_max(frame),
        weingarten_residual(frame),
        (frame.k_ext - frame.k_int).abs() / k_scale,
        codazzi_residual_frame(frame),
        r7,
        r9,
        (-projection_comparison_frame(frame)).max(0.0),
        d.metric,
        d.gradient,
        d.shape,
        d.connection,
        d.ktilde_lemma,
        d.hessian_det,
        d.ktilde_closed,
    ])
}

/// Pair-level residuals in `CLAIM_IDENTITIES` order.
pub fn claim_residuals(deformed: &DeformedPoint, k: f64) -> Result<Vec<f64>, GeomError> {
    let jets = PairJets { a: deformed.g_tilde, b: deformed.frame.alpha };
    let w = pair_codazzi_vector(&jets)?;
    let codazzi = bilinear2(&values2(&jets.a), &w, &w).max(0.0).sqrt();
    let b = deformed.pair_bound(k);
    // K̃ rises from K − 1 at s = 0 towards −(K + 1) as s grows
    let range = ((k - 1.0) - b.ktilde).max(b.ktilde + k + 1.0).max(0.0);
    Ok(vec![codazzi, b.k_pair_residual, b.lambda_identity_residual, b.ktilde_bound_residual, range])
}

fn summarize(
    id: &str,
    description: &str,
    column: impl Iterator<Item = f64>,
    rect: &Rect,
    grid: &GridSpec,
    tolerance: f64,
) -> IdentityEntry {
    let mut max = f64::NEG_INFINITY;
    let mut imax = 0;
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut finite = true;
    for (i, x) in column.enumerate() {
        if !x.is_finite() {
            if finite {
                imax = i;
            }
            finite = false;
        } else if finite && x > max {
            max = x;
            imax = i;
        }
        sum += x;
        n += 1;
    }
    // keep the report representable in JSON
    let (max, mean) = if finite { (max, sum / n.max(1) as f64) } else { (f64::MAX, f64::MAX) };
    IdentityEntry {
        id: id.to_string(),
        description: description.to_string(),
        max,
        mean,
        argmax: grid.point(rect, imax),
        tolerance,
        pass: finite && max <= tolerance,
    }
}

/// Run every identity on the spec's surface.
pub fn run_suite(spec: &SurfaceSpec, cfg: &SuiteConfig) -> Result<ResidualReport, CliError> {
    let mut ids: Vec<(&str, &str)> = IDENTITIES.to_vec();
    ids.extend(CLAIM_IDENTITIES);
    for key in cfg.tolerances.keys() {
        if key != "constant_k" && !ids.iter().any(|(id, _)| id == key) {
            return Err(CliError::Usage(format!("unknown identity '{key}' in tolerance override")));
        }
    }
    let built = spec.build()?;
    let ctx = context(&built, &cfg.grid, cfg.mode, cfg.constant_k_tol)?;
    let default_tol = if built.is_ode_backed() { ODE_TOL } else { ANALYTIC_TOL };
    let tol = |id: &str| {
        cfg.tolerances.get(id).copied().unwrap_or(if id == "theta" { THETA_TOL } else { default_tol })
    };
    let rect = built.patch.domain;
    let claim_k = ctx.asserted_k().filter(|_| ctx.is_consistent());
    let rows = map_grid(&rect, &cfg.grid, |p| {
        let d = ctx.at(p)?;
        let mut row = frame_residuals(&d.frame, &d)?;
        if let Some(k) = claim_k {
            row.extend(claim_residuals(&d, k)?);
        }
        Ok(row)
    })?;

    let mut notes = Vec::new();
    let mut identities: Vec<IdentityEntry> = IDENTITIES
        .iter()
        .enumerate()
        .map(|(j, (id, desc))| summarize(id, desc, rows.iter().map(|r| r[j]), &rect, &cfg.grid, tol(id)))
        .collect();
    if let Some(cons) = ctx.consistency {
        let t = cfg.tolerances.get("constant_k").copied().unwrap_or(cons.tolerance);
        identities.push(IdentityEntry {
            id: "constant_k".into(),
            description: "surface curvature equals the asserted constant".into(),
            max: cons.max_error,
            mean: cons.max_error,
            argmax: cons.point,
            tolerance: t,
            pass: cons.max_error <= t,
        });
        if claim_k.is_some() {
            let base = IDENTITIES.len();
            for (j, (id, desc)) in CLAIM_IDENTITIES.iter().enumerate() {
                identities.push(summarize(id, desc, rows.iter().map(|r| r[base + j]), &rect, &cfg.grid, tol(id)));
            }
        } else {
            notes.push("asserted constant curvature does not match the surface; pair-level checks skipped".into());
        }
    }
    if built.is_ode_backed() {
        notes.push("surface interpolated from a constant-curvature ODE profile".into());
    }
    let pass = identities.iter().all(|e| e.pass);
    Ok(ResidualReport {
        tool: "h2r1".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        fingerprint: spec.fingerprint.clone(),
        chart: spec.chart,
        domain: rect,
        grid: cfg.grid,
        mode: ctx.mode,
        c: ctx.c,
        ode_backed: built.is_ode_backed(),
        k_error_max: built.k_error_max,
        consistency: ctx.consistency,
        identities,
        notes,
        pass,
    })
}
