//! Per-point field tables (`report`) and extreme-value scans (`scan`).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use spacelike::codazzi::{form_is_degenerate, pair_codazzi_residual, pair_extrinsic_curvature};
use spacelike::deform::DeformationMode;
use spacelike::grid::{map_grid, FieldSummary, GridSpec};
use spacelike::specfile::SurfaceSpec;
use spacelike::surface::intrinsic_curvature;

use crate::suite::{context, ModeArg};
use crate::CliError;

pub const COLUMNS: [&str; 8] = ["u", "v", "Theta", "K", "normgradh2", "detA", "Ktilde16", "Ktilde18"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTable {
    pub fingerprint: String,
    pub grid: GridSpec,
    pub mode: DeformationMode,
    pub c: f64,
    pub columns: Vec<String>,
    /// Row-major over the grid, `u` outer.
    pub rows: Vec<[f64; 8]>,
}

impl FieldTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{x:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("field table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn field_table(spec: &SurfaceSpec, grid: &GridSpec, mode: ModeArg, k_tol: f64) -> Result<FieldTable, CliError> {
    let built = spec.build()?;
    let ctx = context(&built, grid, mode, k_tol)?;
    let rows = map_grid(&built.patch.domain, grid, |p| {
        let d = ctx.at(p)?;
        let f = &d.frame;
        Ok([p[0], p[1], f.theta, f.k_int, f.norm_grad_h2(), f.det_shape(), d.ktilde_lemma(), d.ktilde_closed_form()])
    })?;
    Ok(FieldTable {
        fingerprint: spec.fingerprint.clone(),
        grid: *grid,
        mode: ctx.mode,
        c: ctx.c,
        columns: COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Gaussian curvature of the deformed metric.
    Ktilde,
    /// `det α / det g̃`.
    Kpair,
    /// Codazzi residual of `(g̃, α)`.
    PairCodazzi,
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ktilde" => Ok(Quantity::Ktilde),
            "kpair" => Ok(Quantity::Kpair),
            "pair_codazzi" => Ok(Quantity::PairCodazzi),
            other => Err(format!("unknown quantity '{other}' (expected ktilde, kpair or pair_codazzi)")),
        }
    }
}

/// A reference bound and whether the scanned field respects it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLine {
    pub statement: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub quantity: Quantity,
    pub fingerprint: String,
    pub grid: GridSpec,
    pub mode: DeformationMode,
    pub c: f64,
    pub inf: f64,
    pub argmin: [f64; 2],
    pub sup: f64,
    pub argmax: [f64; 2],
    pub mean: f64,
    pub inf_abs: f64,
    pub argmin_abs: [f64; 2],
    pub bounds: Vec<BoundLine>,
    /// Points where `α` is degenerate and `K(g̃, α)` is reported as 0.
    pub degenerate_points: Option<usize>,
}

/// Slack allowed when comparing scanned values with reference bounds.
pub const BOUND_SLACK: f64 = 1e-6;

pub fn scan(spec: &SurfaceSpec, quantity: Quantity, grid: &GridSpec, mode: ModeArg, k_tol: f64) -> Result<ScanSummary, CliError> {
    let built = spec.build()?;
    let ctx = context(&built, grid, mode, k_tol)?;
    let rect = built.patch.domain;
    let pair = ctx.pair_field();
    let values = map_grid(&rect, grid, |p| match quantity {
        Quantity::Ktilde => intrinsic_curvature(&ctx.at(p)?.g_tilde),
        Quantity::Kpair => pair_extrinsic_curvature(&pair, p),
        Quantity::PairCodazzi => pair_codazzi_residual(&pair, p),
    })?;
    let summary = FieldSummary::new(&rect, grid, &values)
        .ok_or_else(|| CliError::Usage("scan produced no finite values".into()))?;
    let abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    let abs_summary = FieldSummary::new(&rect, grid, &abs).expect("finite values");

    let mut bounds = Vec::new();
    let k = ctx.asserted_k();
    if let Some(c) = ctx.consistency {
        bounds.push(BoundLine {
            statement: format!("|K - K_asserted| <= {:e} on the grid", c.tolerance),
            value: c.max_error,
            holds: c.holds(),
        });
    }
    match (quantity, k) {
        (Quantity::Ktilde, Some(k)) => {
            bounds.push(BoundLine {
                statement: "sup K~ <= K - 1".into(),
                value: k - 1.0,
                holds: summary.max <= k - 1.0 + BOUND_SLACK,
            });
            bounds.push(BoundLine {
                statement: "inf K~ >= K - 1".into(),
                value: k - 1.0,
                holds: summary.min >= k - 1.0 - BOUND_SLACK,
            });
            bounds.push(BoundLine {
                statement: "sup K~ < -(K + 1)".into(),
                value: -(k + 1.0),
                holds: summary.max < -(k + 1.0),
            });
        }
        (Quantity::Kpair, Some(k)) => bounds.push(BoundLine {
            statement: "K(g~, alpha) = -(K + 1)".into(),
            value: -(k + 1.0),
            holds: (summary.max + k + 1.0).abs() <= BOUND_SLACK && (summary.min + k + 1.0).abs() <= BOUND_SLACK,
        }),
        (Quantity::PairCodazzi, Some(_)) => bounds.push(BoundLine {
            statement: "(g~, alpha) is a Codazzi pair".into(),
            value: 0.0,
            holds: summary.max <= BOUND_SLACK,
        }),
        _ => {}
    }
    let degenerate_points = if quantity == Quantity::Kpair {
        let flags = map_grid(&rect, grid, |p| form_is_degenerate(&pair, p))?;
        Some(flags.iter().filter(|&&f| f).count())
    } else {
        None
    };
    Ok(ScanSummary {
        quantity,
        fingerprint: spec.fingerprint.clone(),
        grid: *grid,
        mode: ctx.mode,
        c: ctx.c,
        inf: summary.min,
        argmin: summary.argmin,
        sup: summary.max,
        argmax: summary.argmax,
        mean: summary.mean,
        inf_abs: abs_summary.min,
        argmin_abs: abs_summary.argmin,
        bounds,
        degenerate_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
        assert_eq!("pair_codazzi".parse::<Quantity>().unwrap(), Quantity::PairCodazzi);
        assert!("Ktilde".parse::<Quantity>().is_err());
    }

    #[test]
    fn csv_keeps_every_bit() {
        let spec = SurfaceSpec::parse("chart = disk\ndomain = -0.2 0.2 -0.1 0.1\ngraph = 0.1*u*v + 0.2*v\n").unwrap();
        let table = field_table(&spec, &GridSpec::new(3, 2), ModeArg::FreeC(1.3), 1e-5).unwrap();
        let csv = table.to_csv();
        let rows: Vec<Vec<f64>> =
            csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 6);
        for (row, orig) in rows.iter().zip(&table.rows) {
            assert_eq!(row.as_slice(), orig.as_slice());
        }
        assert_eq!(table.rows[1][..2], [-0.2, 0.1]);
    }
}
