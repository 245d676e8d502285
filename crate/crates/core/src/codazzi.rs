//! Codazzi pairs `(A, B)`: a Riemannian metric `A` and a quadratic form `B`
//! on a surface, with their extrinsic curvature, shape endomorphism and
//! Codazzi residual.

use std::fmt;
use std::sync::Arc;

use crate::error::GeomError;
use crate::grid::{map_grid, GridSpec, Rect};
use crate::jet::Jet3;
use crate::surface::{intrinsic_curvature, metric_christoffel, SurfacePatch};
use crate::tensor::{bilinear2, det2, max_abs2, values2, Mat2};

/// `|B_01 − B_10|` allowed before a form is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// `|det B|` below this (relative to `|B|²`) marks a degenerate form, where
/// the extrinsic curvature is reported as 0.
pub const DEGENERATE_FORM_TOL: f64 = 1e-14;

/// Jets of both forms at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct PairJets {
    pub a: Mat2<Jet3>,
    pub b: Mat2<Jet3>,
}

type PairFn = dyn Fn([f64; 2]) -> Result<PairJets, GeomError> + Send + Sync;

/// A pair of form fields over a chart rectangle, given by an evaluation
/// closure. `A` must be valid to order 2 for curvature and order 1 for the
/// Codazzi residual; `B` to order 1.
#[derive(Clone)]
pub struct CodazziPairField {
    pub domain: Rect,
    eval: Arc<PairFn>,
}

impl fmt::Debug for CodazziPairField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodazziPairField").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl CodazziPairField {
    pub fn new<F>(domain: Rect, eval: F) -> Self
    where
        F: Fn([f64; 2]) -> Result<PairJets, GeomError> + Send + Sync + 'static,
    {
        CodazziPairField { domain, eval: Arc::new(eval) }
    }

    /// The induced pair `(g, α)` of a spacelike surface.
    pub fn induced(patch: SurfacePatch) -> Self {
        let domain = patch.domain;
        Self::new(domain, move |p| {
            let f = patch.frame_at(p)?;
            Ok(PairJets { a: f.g, b: f.alpha })
        })
    }

    /// Evaluate and validate both forms at `p`.
    pub fn at(&self, p: [f64; 2]) -> Result<PairJets, GeomError> {
        if !self.domain.contains(p) {
            return Err(GeomError::OutsideDomain { point: p });
        }
        let jets = (self.eval)(p)?;
        let a = values2(&jets.a);
        let det = det2(&a);
        let trace = a[0][0] + a[1][1];
        if !(trace > 0.0) || !(det > 1e-14 * trace * trace) {
            return Err(GeomError::DegenerateMetric(det));
        }
        let b = values2(&jets.b);
        if (b[0][1] - b[1][0]).abs() > SYMMETRY_TOL * max_abs2(&b).max(1.0) {
            return Err(GeomError::InvalidParameter(format!(
                "quadratic form is not symmetric at ({}, {}): B_uv = {:e}, B_vu = {:e}",
                p[0], p[1], b[0][1], b[1][0]
            )));
        }
        Ok(jets)
    }
}

/// `K(A, B) = det B / det A`.
pub fn pair_extrinsic_curvature(pair: &CodazziPairField, p: [f64; 2]) -> Result<f64, GeomError> {
    let jets = pair.at(p)?;
    Ok(det2(&values2(&jets.b)) / det2(&values2(&jets.a)))
}

/// Whether `B` is degenerate at `p` (so `K(A, B)` is 0 there).
pub fn form_is_degenerate(pair: &CodazziPairField, p: [f64; 2]) -> Result<bool, GeomError> {
    let b = values2(&pair.at(p)?.b);
    let scale = max_abs2(&b);
    Ok(det2(&b).abs() <= DEGENERATE_FORM_TOL * scale * scale)
}

/// `S = A⁻¹B` as jets, `s[k][i] = S^k_i` with `S e_i = S^k_i e_k`.
fn shape_jets(jets: &PairJets) -> Mat2<Jet3> {
    let ainv = crate::tensor::inv2(&jets.a);
    std::array::from_fn(|k| std::array::from_fn(|i| ainv[k][0] * jets.b[0][i] + ainv[k][1] * jets.b[1][i]))
}

/// The endomorphism `S` with `B(X, Y) = A(SX, Y)`, together with its
/// `A`-self-adjointness residual `|A S − (A S)ᵀ|`.
pub fn shape_endomorphism(pair: &CodazziPairField, p: [f64; 2]) -> Result<(Mat2<f64>, f64), GeomError> {
    let jets = pair.at(p)?;
    let s = values2(&shape_jets(&jets));
    let a = values2(&jets.a);
    let as_ = crate::tensor::matmul2(&a, &s);
    Ok((s, (as_[0][1] - as_[1][0]).abs()))
}

/// `(∇^A_{e_u} S) e_v − (∇^A_{e_v} S) e_u` in chart components.
pub fn pair_codazzi_vector(jets: &PairJets) -> Result<[f64; 2], GeomError> {
    let (_, gam) = metric_christoffel(&jets.a)?;
    let s = shape_jets(jets);
    let nabla_s = |i: usize, k: usize, j: usize| -> f64 {
        let mut acc = s[k][j].d(i).value();
        for l in 0..2 {
            acc += gam[k][i][l].value() * s[l][j].value() - s[k][l].value() * gam[l][i][j].value();
        }
        acc
    };
    Ok(std::array::from_fn(|k| nabla_s(0, k, 1) - nabla_s(1, k, 0)))
}

/// `A`-norm of the Codazzi expression for the coordinate fields.
pub fn pair_codazzi_residual(pair: &CodazziPairField, p: [f64; 2]) -> Result<f64, GeomError> {
    let jets = pair.at(p)?;
    let w = pair_codazzi_vector(&jets)?;
    Ok(bilinear2(&values2(&jets.a), &w, &w).max(0.0).sqrt())
}

/// Gaussian curvature of a metric field at `p`.
pub fn metric_gauss_curvature<F>(metric: F, p: [f64; 2]) -> Result<f64, GeomError>
where
    F: Fn([f64; 2]) -> Result<Mat2<Jet3>, GeomError>,
{
    intrinsic_curvature(&metric(p)?)
}

/// Location and value of the smallest `|K_A|` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureScan {
    pub inf_abs: f64,
    pub point: [f64; 2],
    pub index: usize,
}

/// `min |K_A|` over a grid by enumeration. Ties go to the lowest grid index,
/// so a refined grid containing the original points never reports a larger
/// value.
pub fn inf_abs_curvature_scan<F>(metric: F, rect: &Rect, grid: &GridSpec) -> Result<CurvatureScan, GeomError>
where
    F: Fn([f64; 2]) -> Result<Mat2<Jet3>, GeomError> + Sync,
{
    if grid.is_empty() {
        return Err(GeomError::InvalidParameter("empty grid".into()));
    }
    let values = map_grid(rect, grid, |p| Ok(intrinsic_curvature(&metric(p)?)?.abs()))?;
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    Ok(CurvatureScan { inf_abs: values[best], point: grid.point(rect, best), index: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::HyperbolicChart;
    use crate::jet::Axis;

    fn unit() -> Rect {
        Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap()
    }

    fn disk_metric(p: [f64; 2]) -> Result<Mat2<Jet3>, GeomError> {
        HyperbolicChart::PoincareDisk.hyperbolic_metric_jet(p)
    }

    fn scaled_pair(scale: f64) -> CodazziPairField {
        CodazziPairField::new(unit(), move |p| {
            let a = disk_metric(p)?;
            let b = a.map(|r| r.map(|x| x * scale));
            Ok(PairJets { a, b })
        })
    }

    #[test]
    fn proportional_pairs() {
        let p = [0.1, -0.2];
        assert!((pair_extrinsic_curvature(&scaled_pair(1.0), p).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(pair_extrinsic_curvature(&scaled_pair(0.0), p).unwrap(), 0.0);
        assert!(form_is_degenerate(&scaled_pair(0.0), p).unwrap());
        let (s, sa) = shape_endomorphism(&scaled_pair(2.0), p).unwrap();
        assert!((s[0][0] - 2.0).abs() < 1e-14 && (s[1][1] - 2.0).abs() < 1e-14);
        assert!(s[0][1].abs() < 1e-14 && s[1][0].abs() < 1e-14 && sa < 1e-14);
        let k = pair_extrinsic_curvature(&scaled_pair(2.0), p).unwrap();
        assert!((det2(&s) - k).abs() < 1e-10);
        // umbilic pairs are Codazzi: S = λ Id is parallel
        assert!(pair_codazzi_residual(&scaled_pair(2.0), p).unwrap() < 1e-12);
        assert_eq!(pair_codazzi_residual(&scaled_pair(0.0), p).unwrap(), 0.0);
    }

    #[test]
    fn constant_coefficient_pair_is_codazzi() {
        let pair = CodazziPairField::new(unit(), |_| {
            Ok(PairJets {
                a: [[Jet3::cst(2.0), Jet3::cst(0.3)], [Jet3::cst(0.3), Jet3::cst(1.0)]],
                b: [[Jet3::cst(-1.0), Jet3::cst(0.5)], [Jet3::cst(0.5), Jet3::cst(4.0)]],
            })
        });
        assert_eq!(pair_codazzi_residual(&pair, [0.2, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn non_codazzi_pair_detected() {
        // B = diag(u, 0) over the flat metric: (∇_v S)e_u = 0, (∇_u S)e_v = 0,
        // but B = diag(v, 0) gives (∇_v S) e_u = e_u
        let pair = CodazziPairField::new(unit(), |p| {
            let one = Jet3::cst(1.0);
            Ok(PairJets {
                a: [[one, Jet3::ZERO], [Jet3::ZERO, one]],
                b: [[Jet3::var(Axis::V, p[1]), Jet3::ZERO], [Jet3::ZERO, Jet3::ZERO]],
            })
        });
        assert!((pair_codazzi_residual(&pair, [0.1, 0.1]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_forms() {
        let asym = CodazziPairField::new(unit(), |_| {
            let one = Jet3::cst(1.0);
            Ok(PairJets { a: [[one, Jet3::ZERO], [Jet3::ZERO, one]], b: [[one, one], [Jet3::ZERO, one]] })
        });
        assert!(matches!(asym.at([0.0, 0.0]), Err(GeomError::InvalidParameter(_))));
        let degenerate = CodazziPairField::new(unit(), |_| {
            let one = Jet3::cst(1.0);
            Ok(PairJets { a: [[one, one], [one, one]], b: [[one, Jet3::ZERO], [Jet3::ZERO, one]] })
        });
        assert!(matches!(pair_extrinsic_curvature(&degenerate, [0.0, 0.0]), Err(GeomError::DegenerateMetric(_))));
        assert!(matches!(scaled_pair(1.0).at([0.9, 0.0]), Err(GeomError::OutsideDomain { .. })));
    }

    #[test]
    fn residual_is_antisymmetric_in_coordinates() {
        // swapping u and v must flip the sign of the Codazzi vector exactly
        let pair_jets = |p: [f64; 2], swap: bool| {
            let (u, v) = if swap {
                (Jet3::var(Axis::V, p[0]), Jet3::var(Axis::U, p[1]))
            } else {
                (Jet3::var(Axis::U, p[0]), Jet3::var(Axis::V, p[1]))
            };
            let a00 = (u * u + 1.0).exp();
            let a11 = v * v + 2.0;
            let a01 = u * v * 0.1;
            let b00 = u * v;
            let b11 = u.sin();
            let b01 = v * 0.3;
            let (a, b) = if swap {
                ([[a11, a01], [a01, a00]], [[b11, b01], [b01, b00]])
            } else {
                ([[a00, a01], [a01, a11]], [[b00, b01], [b01, b11]])
            };
            PairJets { a, b }
        };
        let w = pair_codazzi_vector(&pair_jets([0.2, 0.3], false)).unwrap();
        let ws = pair_codazzi_vector(&pair_jets([0.2, 0.3], true)).unwrap();
        assert!(w[0].abs() > 1e-3);
        assert!((w[0] + ws[1]).abs() < 1e-14 && (w[1] + ws[0]).abs() < 1e-14, "{w:?} {ws:?}");
    }

    #[test]
    fn scans() {
        let g = GridSpec::new(5, 5);
        let hyp = inf_abs_curvature_scan(disk_metric, &unit(), &g).unwrap();
        assert!((hyp.inf_abs - 1.0).abs() < 1e-10);
        let flat = inf_abs_curvature_scan(
            |_| Ok([[Jet3::cst(1.0), Jet3::ZERO], [Jet3::ZERO, Jet3::cst(1.0)]]),
            &unit(),
            &g,
        )
        .unwrap();
        assert_eq!((flat.inf_abs, flat.index, flat.point), (0.0, 0, [-0.5, -0.5]));
        assert!((metric_gauss_curvature(disk_metric, [0.3, 0.1]).unwrap() + 1.0).abs() < 1e-10);
    }
}
