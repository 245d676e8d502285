//! Plain-text surface descriptions.
//!
//! One `key = value` per line; `#` starts a comment. Keys:
//!
//! ```text
//! chart  = disk | polar
//! domain = u0 u1 v0 v1
//! graph  = <expr in u, v>                  # t = h(u, v) over the chart
//! x = <expr>   y = <expr>     t = <expr>   # disk chart, all three
//! r = <expr>   theta = <expr> t = <expr>   # polar chart, all three
//! rotational = <K> axis                    # constant-curvature profile
//! rotational = <K> annulus <r0> <h0> <v0>
//! r_max = <value>  max_step = <value>      # optional, rotational only
//! ```
//!
//! A rotational surface lives in the polar chart with `domain` giving the
//! radial and angular ranges.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ambient::HyperbolicChart;
use crate::expr::{parse, Expr, ParseError};
use crate::grid::Rect;
use crate::rotational::{profile_to_patch_on, shoot, RotProfile, RotationalError, ShootOptions, Start};
use crate::surface::SurfacePatch;

const VARS: &[&str] = &["u", "v"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: in '{key}': {source}")]
    Expression { line: usize, key: String, source: ParseError },
    #[error("{0}")]
    Incomplete(String),
    #[error(transparent)]
    Rotational(#[from] RotationalError),
}

#[derive(Debug, Clone)]
pub enum SurfaceSource {
    Graph(Expr),
    Coords([Expr; 3]),
    Rotational { k: f64, start: Start, options: ShootOptions },
}

#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub chart: HyperbolicChart,
    pub domain: Rect,
    pub source: SurfaceSource,
    /// SHA-256 of the file text, hex.
    pub fingerprint: String,
}

/// A surface ready for evaluation.
#[derive(Debug, Clone)]
pub struct BuiltSurface {
    pub patch: SurfacePatch,
    /// Present for ODE-backed surfaces.
    pub profile: Option<RotProfile>,
    /// Curvature error of the interpolated profile on the domain.
    pub k_error_max: Option<f64>,
}

impl BuiltSurface {
    pub fn is_ode_backed(&self) -> bool {
        self.profile.is_some()
    }
}

pub fn fingerprint(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn syntax(line: usize, message: impl fmt::Display) -> SpecError {
    SpecError::Syntax { line, message: message.to_string() }
}

fn number(line: usize, tok: &str) -> Result<f64, SpecError> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| syntax(line, format!("expected a number, found '{tok}'")))
}

impl SurfaceSpec {
    pub fn parse(text: &str) -> Result<SurfaceSpec, SpecError> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| syntax(line, "expected 'key = value'"))?;
            let key = key.trim().to_ascii_lowercase();
            const KEYS: [&str; 12] =
                ["chart", "domain", "graph", "x", "y", "r", "theta", "t", "rotational", "r_max", "max_step", "name"];
            if !KEYS.contains(&key.as_str()) {
                return Err(syntax(line, format!("unknown key '{key}'")));
            }
            if entries.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                return Err(syntax(line, format!("duplicate key '{key}'")));
            }
        }

        let take = |k: &str| entries.get(k).cloned();
        let chart = match take("chart") {
            None => None,
            Some((line, v)) => Some(match v.as_str() {
                "disk" => HyperbolicChart::PoincareDisk,
                "polar" => HyperbolicChart::GeodesicPolar,
                other => return Err(syntax(line, format!("unknown chart '{other}' (expected disk or polar)"))),
            }),
        };
        let (dline, dval) = take("domain").ok_or_else(|| SpecError::Incomplete("missing 'domain'".into()))?;
        let nums = dval.split_whitespace().map(|t| number(dline, t)).collect::<Result<Vec<_>, _>>()?;
        if nums.len() != 4 {
            return Err(syntax(dline, format!("domain needs 4 numbers, found {}", nums.len())));
        }
        let domain = Rect::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| syntax(dline, e))?;

        let expr = |key: &str| -> Result<Option<Expr>, SpecError> {
            match take(key) {
                None => Ok(None),
                Some((line, v)) => parse(&v, VARS)
                    .map(Some)
                    .map_err(|source| SpecError::Expression { line, key: key.to_string(), source }),
            }
        };

        let sources = ["graph", "x", "r", "rotational"].iter().filter(|k| entries.contains_key(**k)).count();
        let source_count = sources + usize::from(entries.contains_key("y") || entries.contains_key("theta"));
        let rotational_opts = ["r_max", "max_step"].iter().any(|k| entries.contains_key(*k));

        let (chart, source) = if let Some((line, v)) = take("rotational") {
            if sources > 1 || entries.contains_key("t") {
                return Err(syntax(line, "'rotational' cannot be combined with coordinate expressions"));
            }
            if chart == Some(HyperbolicChart::PoincareDisk) {
                return Err(syntax(line, "rotational surfaces use the polar chart"));
            }
            let toks: Vec<&str> = v.split_whitespace().collect();
            let k = number(line, toks.first().copied().unwrap_or(""))?;
            let start = match (toks.get(1).copied(), toks.len()) {
                (Some("axis"), 2) => Start::axis_for(k)?,
                (Some("annulus"), 5) => Start::Annulus {
                    r0: number(line, toks[2])?,
                    h0: number(line, toks[3])?,
                    v0: number(line, toks[4])?,
                },
                _ => return Err(syntax(line, "expected '<K> axis' or '<K> annulus <r0> <h0> <v0>'")),
            };
            let mut options = ShootOptions::default();
            if let Some((l, v)) = take("r_max") {
                options.r_max = number(l, &v)?;
            } else {
                options.r_max = options.r_max.max(domain.u1 + 1.0);
            }
            if let Some((l, v)) = take("max_step") {
                options.max_step = number(l, &v)?;
            }
            (HyperbolicChart::GeodesicPolar, SurfaceSource::Rotational { k, start, options })
        } else {
            if rotational_opts {
                return Err(SpecError::Incomplete("'r_max' and 'max_step' need 'rotational'".into()));
            }
            let chart = chart.ok_or_else(|| SpecError::Incomplete("missing 'chart'".into()))?;
            if let Some(h) = expr("graph")? {
                if source_count > 1 || entries.contains_key("t") {
                    return Err(SpecError::Incomplete("'graph' cannot be combined with coordinate expressions".into()));
                }
                (chart, SurfaceSource::Graph(h))
            } else {
                let (a, b) = match chart {
                    HyperbolicChart::PoincareDisk => ("x", "y"),
                    HyperbolicChart::GeodesicPolar => ("r", "theta"),
                };
                for wrong in [["r", "theta"], ["x", "y"]].iter().flatten() {
                    if *wrong != a && *wrong != b && entries.contains_key(*wrong) {
                        let line = entries[*wrong].0;
                        return Err(syntax(line, format!("key '{wrong}' does not belong to the {} chart", chart.name())));
                    }
                }
                let need = |k: &str| {
                    expr(k)?.ok_or_else(|| SpecError::Incomplete(format!("missing '{k}' (or use 'graph')")))
                };
                (chart, SurfaceSource::Coords([need(a)?, need(b)?, need("t")?]))
            }
        };
        Ok(SurfaceSpec { chart, domain, source, fingerprint: fingerprint(text) })
    }

    pub fn build(&self) -> Result<BuiltSurface, SpecError> {
        match &self.source {
            SurfaceSource::Graph(h) => Ok(BuiltSurface {
                patch: SurfacePatch::graph(self.chart, self.domain, h.clone()),
                profile: None,
                k_error_max: None,
            }),
            SurfaceSource::Coords(exprs) => Ok(BuiltSurface {
                patch: SurfacePatch::from_exprs(self.chart, self.domain, exprs.clone()),
                profile: None,
                k_error_max: None,
            }),
            SurfaceSource::Rotational { k, start, options } => {
                let profile = shoot(*start, *k, options)?;
                let d = self.domain;
                let rp = profile_to_patch_on(&profile, d.u0, d.u1, d.v0, d.v1)?;
                Ok(BuiltSurface { patch: rp.patch, profile: Some(profile), k_error_max: Some(rp.k_error_max) })
            }
        }
    }
}
