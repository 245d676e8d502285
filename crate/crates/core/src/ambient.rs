//! The hyperbolic plane in two charts and the Lorentzian product
//! `H² × R₁` with metric `g_H − dt²`.
//!
//! Curvature follows the convention `R(X,Y)Z = ∇_[X,Y] Z − [∇_X, ∇_Y] Z`,
//! under which the hyperbolic factor has sectional curvature −1 and
//! `K(X,Y) = g(R(X,Y)X, Y) / (g(X,X) g(Y,Y) − g(X,Y)²)`.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::jet::{Axis, Jet3};
use crate::scalar::{Grad2, Scalar};
use crate::tensor::{christoffel, inv2, Christoffel, Mat2, Vec2, Vec3};

/// Unit timelike field `∂t` in ambient coordinates `(a, b, t)`.
pub const DT: Vec3<f64> = [0.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicChart {
    /// `(x, y)` with `x² + y² < 1`, `g_H = λ² (dx² + dy²)`, `λ = 2 / (1 − x² − y²)`.
    PoincareDisk,
    /// `(r, θ)` with `r > 0`, `g_H = dr² + sinh²(r) dθ²`.
    GeodesicPolar,
}

impl HyperbolicChart {
    pub fn name(self) -> &'static str {
        match self {
            HyperbolicChart::PoincareDisk => "disk",
            HyperbolicChart::GeodesicPolar => "polar",
        }
    }

    pub fn contains(self, p: [f64; 2]) -> bool {
        match self {
            HyperbolicChart::PoincareDisk => p[0] * p[0] + p[1] * p[1] < 1.0,
            HyperbolicChart::GeodesicPolar => p[0] > 0.0 && p[1].is_finite(),
        }
    }

    pub fn check(self, p: [f64; 2]) -> Result<(), GeomError> {
        if p[0].is_finite() && p[1].is_finite() && self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::OutsideChart { chart: self.name(), point: p })
        }
    }

    /// Closed-form metric components at chart coordinates `(a, b)`, with no
    /// domain check.
    pub fn metric_components<S: Scalar>(self, a: S, b: S) -> Mat2<S> {
        let zero = S::cst(0.0);
        match self {
            HyperbolicChart::PoincareDisk => {
                let lambda = S::cst(2.0) / (S::cst(1.0) - a * a - b * b);
                let l2 = lambda * lambda;
                [[l2, zero], [zero, l2]]
            }
            HyperbolicChart::GeodesicPolar => {
                let s = a.sinh();
                [[S::cst(1.0), zero], [zero, s * s]]
            }
        }
    }

    pub fn hyperbolic_metric(self, p: [f64; 2]) -> Result<Mat2<f64>, GeomError> {
        self.check(p)?;
        Ok(self.metric_components(p[0], p[1]))
    }

    /// Metric components as jets in the chart coordinates seeded at `p`.
    pub fn hyperbolic_metric_jet(self, p: [f64; 2]) -> Result<Mat2<Jet3>, GeomError> {
        self.check(p)?;
        Ok(self.metric_components(Jet3::var(Axis::U, p[0]), Jet3::var(Axis::V, p[1])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub base: [f64; 2],
    pub t: f64,
}

impl AmbientPoint {
    pub fn new(base: [f64; 2], t: f64) -> Self {
        AmbientPoint { base, t }
    }
}

pub fn ambient_metric_matrix(chart: HyperbolicChart, p: &AmbientPoint) -> Result<[[f64; 3]; 3], GeomError> {
    let h = chart.hyperbolic_metric(p.base)?;
    Ok([[h[0][0], h[0][1], 0.0], [h[1][0], h[1][1], 0.0], [0.0, 0.0, -1.0]])
}

/// `g_H(X_H, Y_H) − X_t Y_t`.
pub fn ambient_metric(chart: HyperbolicChart, p: &AmbientPoint, x: &Vec3<f64>, y: &Vec3<f64>) -> Result<f64, GeomError> {
    let g = ambient_metric_matrix(chart, p)?;
    Ok(crate::tensor::bilinear3(&g, x, y))
}

/// Number of positive and negative eigenvalues of the ambient metric.
pub fn signature(chart: HyperbolicChart, p: &AmbientPoint) -> Result<(usize, usize), GeomError> {
    let g = ambient_metric_matrix(chart, p)?;
    let m = Matrix3::from_fn(|i, j| g[i][j]);
    let eig = SymmetricEigen::new(m).eigenvalues;
    let pos = eig.iter().filter(|&&e| e > 0.0).count();
    let neg = eig.iter().filter(|&&e| e < 0.0).count();
    Ok((pos, neg))
}

/// Ambient metric and connection pulled back along a surface germ: every
/// field is a jet in the surface chart `(u, v)`.
#[derive(Debug, Clone)]
pub struct AmbientAlong {
    pub chart: HyperbolicChart,
    pub position: Vec3<Jet3>,
    pub metric: [[Jet3; 3]; 3],
    pub metric_inv: [[Jet3; 3]; 3],
    pub christoffel: Christoffel<Jet3, 3>,
}

impl AmbientAlong {
    pub fn new(chart: HyperbolicChart, position: Vec3<Jet3>) -> Result<Self, GeomError> {
        chart.check([position[0].value(), position[1].value()])?;
        let m = chart.metric_components(Grad2::seed_a(position[0]), Grad2::seed_b(position[1]));
        let z = Jet3::ZERO;
        let metric = [
            [m[0][0].val, m[0][1].val, z],
            [m[1][0].val, m[1][1].val, z],
            [z, z, Jet3::cst(-1.0)],
        ];
        let hinv = inv2(&[[m[0][0].val, m[0][1].val], [m[1][0].val, m[1][1].val]]);
        let metric_inv = [
            [hinv[0][0], hinv[0][1], z],
            [hinv[1][0], hinv[1][1], z],
            [z, z, Jet3::cst(-1.0)],
        ];
        let mut dg = [[[z; 3]; 3]; 3];
        for i in 0..2 {
            for j in 0..2 {
                dg[0][i][j] = m[i][j].da;
                dg[1][i][j] = m[i][j].db;
            }
        }
        let christoffel = christoffel(&metric_inv, &dg);
        Ok(AmbientAlong { chart, position, metric, metric_inv, christoffel })
    }

    /// Coordinate tangent `f_axis`.
    pub fn tangent(&self, axis: usize) -> Vec3<Jet3> {
        [self.position[0].d(axis), self.position[1].d(axis), self.position[2].d(axis)]
    }

    pub fn inner(&self, x: &Vec3<Jet3>, y: &Vec3<Jet3>) -> Jet3 {
        crate::tensor::bilinear3(&self.metric, x, y)
    }

    /// `Γ̄(X, Y)` for ambient vectors along the surface.
    pub fn gamma(&self, x: &Vec3<Jet3>, y: &Vec3<Jet3>) -> Vec3<Jet3> {
        std::array::from_fn(|a| {
            let mut acc = Jet3::ZERO;
            for b in 0..3 {
                for c in 0..3 {
                    acc += self.christoffel[a][b][c] * x[b] * y[c];
                }
            }
            acc
        })
    }

    /// `∇̄_X Y` for a surface direction `X = X^i f_i` and an ambient field
    /// `Y` along the surface. One derivative order is consumed.
    pub fn covariant_derivative(&self, x: &Vec2<Jet3>, y: &Vec3<Jet3>) -> Vec3<Jet3> {
        let mut out = [Jet3::ZERO; 3];
        for i in 0..2 {
            let fi = self.tangent(i);
            let g = self.gamma(&fi, y);
            for a in 0..3 {
                out[a] += x[i] * (y[a].d(i) + g[a]);
            }
        }
        out
    }
}

/// Value of `∇̄_X Y` along a surface germ.
pub fn ambient_connection(along: &AmbientAlong, x: &Vec2<Jet3>, y: &Vec3<Jet3>) -> Vec3<f64> {
    let d = along.covariant_derivative(x, y);
    [d[0].value(), d[1].value(), d[2].value()]
}

/// Ambient Christoffel symbols at a point as jets in the horizontal ambient
/// coordinates (valid to order 1).
fn christoffel_at(chart: HyperbolicChart, p: &AmbientPoint) -> Result<Christoffel<Jet3, 3>, GeomError> {
    let h = chart.hyperbolic_metric_jet(p.base)?;
    let z = Jet3::ZERO;
    let hinv = inv2(&h);
    let metric_inv = [
        [hinv[0][0], hinv[0][1], z],
        [hinv[1][0], hinv[1][1], z],
        [z, z, Jet3::cst(-1.0)],
    ];
    let mut dg = [[[z; 3]; 3]; 3];
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                dg[l][i][j] = h[i][j].d(l);
            }
        }
    }
    Ok(christoffel(&metric_inv, &dg))
}

/// Christoffel symbols `Γ̄^a_bc` of the product metric at a point.
pub fn ambient_christoffel(chart: HyperbolicChart, p: &AmbientPoint) -> Result<Christoffel<f64, 3>, GeomError> {
    let g = christoffel_at(chart, p)?;
    Ok(std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| g[a][b][c].value()))))
}

/// `R̄(X,Y)Z = ∇̄_[X,Y] Z − [∇̄_X, ∇̄_Y] Z` for vectors extended as
/// constant-coefficient coordinate fields.
pub fn ambient_curvature(
    chart: HyperbolicChart,
    p: &AmbientPoint,
    x: &Vec3<f64>,
    y: &Vec3<f64>,
    z: &Vec3<f64>,
) -> Result<Vec3<f64>, GeomError> {
    let gam = christoffel_at(chart, p)?;
    let val = |a: usize, b: usize, c: usize| gam[a][b][c].value();
    // ∂_l Γ^a_bc; the metric does not depend on t
    let dgam = |l: usize, a: usize, b: usize, c: usize| if l < 2 { gam[a][b][c].d(l).value() } else { 0.0 };
    // (∇_X ∇_Y Z)^a for constant-coefficient fields
    let second = |x: &Vec3<f64>, y: &Vec3<f64>| -> Vec3<f64> {
        let mut gyz = [0.0; 3];
        for (e, slot) in gyz.iter_mut().enumerate() {
            for c in 0..3 {
                for d in 0..3 {
                    *slot += val(e, c, d) * y[c] * z[d];
                }
            }
        }
        std::array::from_fn(|a| {
            let mut acc = 0.0;
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        acc += x[b] * dgam(b, a, c, d) * y[c] * z[d];
                    }
                }
                for e in 0..3 {
                    acc += val(a, b, e) * x[b] * gyz[e];
                }
            }
            acc
        })
    };
    let xy = second(x, y);
    let yx = second(y, x);
    Ok(std::array::from_fn(|a| -(xy[a] - yx[a])))
}

/// Sectional curvature of the plane spanned by `x`, `y`.
pub fn sectional_curvature(chart: HyperbolicChart, p: &AmbientPoint, x: &Vec3<f64>, y: &Vec3<f64>) -> Result<f64, GeomError> {
    let g = ambient_metric_matrix(chart, p)?;
    let r = ambient_curvature(chart, p, x, y, x)?;
    let q = crate::tensor::bilinear3(&g, x, x) * crate::tensor::bilinear3(&g, y, y)
        - crate::tensor::bilinear3(&g, x, y).powi(2);
    if q.abs() < 1e-300 {
        return Err(GeomError::DegenerateMetric(q));
    }
    Ok(crate::tensor::bilinear3(&g, &r, y) / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::bilinear3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_disk_point(rng: &mut ChaCha8Rng) -> AmbientPoint {
        let r = 0.9 * rng.gen::<f64>().sqrt();
        let a = rng.gen::<f64>() * std::f64::consts::TAU;
        AmbientPoint::new([r * a.cos(), r * a.sin()], rng.gen_range(-3.0..3.0))
    }

    fn rand_vec(rng: &mut ChaCha8Rng) -> Vec3<f64> {
        std::array::from_fn(|_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn closed_form_components() {
        let g = HyperbolicChart::PoincareDisk.hyperbolic_metric([0.0, 0.0]).unwrap();
        assert_eq!(g, [[4.0, 0.0], [0.0, 4.0]]);
        let g = HyperbolicChart::GeodesicPolar.hyperbolic_metric([1.0, 0.3]).unwrap();
        assert_eq!(g, [[1.0, 0.0], [0.0, 1f64.sinh().powi(2)]]);
        assert!(HyperbolicChart::PoincareDisk.hyperbolic_metric([0.8, 0.7]).is_err());
        assert!(HyperbolicChart::GeodesicPolar.hyperbolic_metric([0.0, 0.3]).is_err());
    }

    #[test]
    fn product_metric_values() {
        let chart = HyperbolicChart::PoincareDisk;
        let p = AmbientPoint::new([0.0, 0.0], 1.0);
        assert_eq!(ambient_metric(chart, &p, &DT, &DT).unwrap(), -1.0);
        assert_eq!(ambient_metric(chart, &p, &[0.3, -0.2, 0.0], &DT).unwrap(), 0.0);
        assert_eq!(ambient_metric(chart, &p, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), 4.0);
    }

    #[test]
    fn lorentzian_signature_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = rand_disk_point(&mut rng);
            assert_eq!(signature(HyperbolicChart::PoincareDisk, &p).unwrap(), (2, 1));
            let q = AmbientPoint::new([rng.gen_range(0.05..4.0), rng.gen_range(-3.0..3.0)], 0.0);
            assert_eq!(signature(HyperbolicChart::GeodesicPolar, &q).unwrap(), (2, 1));
        }
    }

    #[test]
    fn disk_christoffels_match_closed_form() {
        // conformal metric λ² δ: Γ^k_ij = δ_ki ∂_j ln λ + δ_kj ∂_i ln λ − δ_ij ∂_k ln λ,
        // ∂_x ln λ = 2x / (1 − x² − y²)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = rand_disk_point(&mut rng);
            let [x, y] = p.base;
            let w = 1.0 - x * x - y * y;
            let dl = [2.0 * x / w, 2.0 * y / w];
            let gam = ambient_christoffel(HyperbolicChart::PoincareDisk, &p).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let want = d(k, i) * dl[j] + d(k, j) * dl[i] - d(i, j) * dl[k];
                        assert!((gam[k][i][j] - want).abs() < 1e-12 * (1.0 + want.abs()));
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(gam[2][a][b], 0.0);
                    assert_eq!(gam[a][2][b], 0.0);
                }
            }
        }
    }

    #[test]
    fn horizontal_planes_have_curvature_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = rand_disk_point(&mut rng);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0];
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0];
            let k = sectional_curvature(HyperbolicChart::PoincareDisk, &p, &x, &y).unwrap();
            assert!((k + 1.0).abs() < 1e-10, "{k}");
            let q = AmbientPoint::new([rng.gen_range(0.2..3.0), rng.gen_range(-3.0..3.0)], 0.0);
            let k = sectional_curvature(HyperbolicChart::GeodesicPolar, &q, &x, &y).unwrap();
            assert!((k + 1.0).abs() < 1e-10, "{k}");
        }
    }

    #[test]
    fn curvature_matches_space_form_tensor() {
        // horizontal block has constant curvature -1: R(X,Y)Z = g(Y,Z)X − g(X,Z)Y
        // in this sign convention; anything involving ∂t vanishes.
        let chart = HyperbolicChart::PoincareDisk;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = rand_disk_point(&mut rng);
            let g = ambient_metric_matrix(chart, &p).unwrap();
            let (x, y, z) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
            let hor = |v: &Vec3<f64>| [v[0], v[1], 0.0];
            let (xh, yh, zh) = (hor(&x), hor(&y), hor(&z));
            let r = ambient_curvature(chart, &p, &x, &y, &z).unwrap();
            let gyz = bilinear3(&g, &yh, &zh);
            let gxz = bilinear3(&g, &xh, &zh);
            for a in 0..3 {
                let want = gyz * xh[a] - gxz * yh[a];
                assert!((r[a] - want).abs() < 1e-9 * (1.0 + want.abs()), "{a}: {} vs {want}", r[a]);
            }
            let rt = ambient_curvature(chart, &p, &xh, &DT, &zh).unwrap();
            assert!(rt.iter().all(|c| c.abs() < 1e-12));
            let ryx = ambient_curvature(chart, &p, &y, &x, &z).unwrap();
            for a in 0..3 {
                assert_eq!(ryx[a], -r[a]);
            }
        }
    }

    fn random_germ(rng: &mut ChaCha8Rng) -> Vec3<Jet3> {
        let p = rand_disk_point(rng);
        let mut out = [Jet3::ZERO; 3];
        let base = [p.base[0], p.base[1], p.t];
        for a in 0..3 {
            let mut c = [0.0; 10];
            c[0] = base[a];
            for k in 1..10 {
                c[k] = rng.gen_range(-0.2..0.2);
            }
            out[a] = Jet3::from_coeffs(c);
        }
        out
    }

    fn random_field(rng: &mut ChaCha8Rng) -> Vec3<Jet3> {
        std::array::from_fn(|_| Jet3::from_coeffs(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))))
    }

    #[test]
    fn dt_is_parallel() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let along = AmbientAlong::new(HyperbolicChart::PoincareDisk, random_germ(&mut rng)).unwrap();
            let dt = [Jet3::ZERO, Jet3::ZERO, Jet3::cst(1.0)];
            let x = [Jet3::cst(rng.gen_range(-1.0..1.0)), Jet3::cst(rng.gen_range(-1.0..1.0))];
            let d = ambient_connection(&along, &x, &dt);
            assert!(d.iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn connection_is_metric_compatible_and_torsion_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let along = AmbientAlong::new(HyperbolicChart::PoincareDisk, random_germ(&mut rng)).unwrap();
            let (y, z) = (random_field(&mut rng), random_field(&mut rng));
            for i in 0..2 {
                let mut x = [Jet3::ZERO; 2];
                x[i] = Jet3::cst(1.0);
                let lhs = along.inner(&y, &z).d(i).value();
                let dy = along.covariant_derivative(&x, &y);
                let dz = along.covariant_derivative(&x, &z);
                let rhs = along.inner(&dy, &z).value() + along.inner(&y, &dz).value();
                assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
            }
            let (fu, fv) = (along.tangent(0), along.tangent(1));
            let eu = [Jet3::cst(1.0), Jet3::ZERO];
            let ev = [Jet3::ZERO, Jet3::cst(1.0)];
            let a = ambient_connection(&along, &eu, &fv);
            let b = ambient_connection(&along, &ev, &fu);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-10 * (1.0 + a[k].abs()));
            }
        }
    }
}
