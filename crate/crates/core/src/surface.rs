//! Pointwise geometry of a spacelike surface `f: Σ → H² × R₁` and the
//! residuals of its structure equations.
//!
//! Everything is computed from the order-3 jets of the three coordinate
//! functions at a chart point. Tangents and the induced metric are valid to
//! order 2, the Levi-Civita symbols, shape operator and second fundamental
//! form to order 1, and curvature and covariant derivatives of `A` are plain
//! values.

use std::fmt;
use std::sync::Arc;

use crate::ambient::{AmbientAlong, HyperbolicChart};
use crate::error::GeomError;
use crate::expr::Expr;
use crate::grid::Rect;
use crate::jet::{Axis, Jet3};
use crate::tensor::{
    christoffel, det2, inv2, jet_partials2, max_abs2, relative_eigenvalues, sub2, values2, Christoffel, Mat2, Vec2,
    Vec3,
};

/// Rejection threshold for `det g` relative to `(trace g)²`.
pub const SPACELIKE_EPS: f64 = 1e-12;

/// Coordinate functions `(a(u,v), b(u,v), t(u,v))` of an immersion, where
/// `(a, b)` are hyperbolic chart coordinates.
pub trait CoordinateMap: Send + Sync + fmt::Debug {
    fn eval(&self, p: [f64; 2]) -> Result<Vec3<Jet3>, GeomError>;
}

/// Coordinates given by three expressions in `(u, v)`.
#[derive(Debug, Clone)]
pub struct ExprCoords {
    pub exprs: [Expr; 3],
}

impl CoordinateMap for ExprCoords {
    fn eval(&self, p: [f64; 2]) -> Result<Vec3<Jet3>, GeomError> {
        Ok([self.exprs[0].eval_jet(p)?, self.exprs[1].eval_jet(p)?, self.exprs[2].eval_jet(p)?])
    }
}

/// Graph `t = h(u, v)` over the chart, `(a, b) = (u, v)`.
#[derive(Debug, Clone)]
pub struct GraphCoords {
    pub height: Expr,
}

impl CoordinateMap for GraphCoords {
    fn eval(&self, p: [f64; 2]) -> Result<Vec3<Jet3>, GeomError> {
        Ok([Jet3::var(Axis::U, p[0]), Jet3::var(Axis::V, p[1]), self.height.eval_jet(p)?])
    }
}

#[derive(Debug, Clone)]
pub struct SurfacePatch {
    pub chart: HyperbolicChart,
    pub domain: Rect,
    pub coords: Arc<dyn CoordinateMap>,
}

impl SurfacePatch {
    pub fn new(chart: HyperbolicChart, domain: Rect, coords: Arc<dyn CoordinateMap>) -> Self {
        SurfacePatch { chart, domain, coords }
    }

    pub fn from_exprs(chart: HyperbolicChart, domain: Rect, exprs: [Expr; 3]) -> Self {
        Self::new(chart, domain, Arc::new(ExprCoords { exprs }))
    }

    pub fn graph(chart: HyperbolicChart, domain: Rect, height: Expr) -> Self {
        Self::new(chart, domain, Arc::new(GraphCoords { height }))
    }

    /// The slice `t ≡ t0`.
    pub fn slice(chart: HyperbolicChart, domain: Rect, t0: f64) -> Self {
        Self::graph(chart, domain, Expr::constant(t0))
    }

    pub fn position(&self, p: [f64; 2]) -> Result<Vec3<Jet3>, GeomError> {
        if !self.domain.contains(p) {
            return Err(GeomError::OutsideDomain { point: p });
        }
        self.coords.eval(p)
    }

    pub fn frame_at(&self, p: [f64; 2]) -> Result<PointFrame, GeomError> {
        let pos = self.position(p)?;
        frame_from_position(self.chart, pos, p)
    }
}

/// All pointwise geometry at one chart point.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub point: [f64; 2],
    pub ambient: AmbientAlong,
    pub tangents: [Vec3<Jet3>; 2],
    pub g: Mat2<Jet3>,
    pub ginv: Mat2<Jet3>,
    pub christoffel: Christoffel<Jet3, 2>,
    /// Future-pointing unit normal, ambient components.
    pub normal: Vec3<Jet3>,
    /// `Θ = g(N, ∂t) ≤ −1`.
    pub theta: f64,
    /// Shape operator, `shape[k][i] = A^k_i` with `A e_i = A^k_i e_k`.
    pub shape: Mat2<Jet3>,
    /// Second fundamental form `α_ij = g(A e_i, e_j)`, symmetrized.
    pub alpha: Mat2<Jet3>,
    /// `|α_01 − α_10|` before symmetrization, relative to `max(1, |α|)`.
    pub alpha_asymmetry: f64,
    /// `∂_i h`.
    pub dh: Vec2<Jet3>,
    /// `∇h`, contravariant.
    pub grad_h: Vec2<f64>,
    /// Covariant Hessian `∇²h`.
    pub hess_h: Mat2<f64>,
    /// `−Θ² − det A`.
    pub k_ext: f64,
    /// Gaussian curvature of the induced metric.
    pub k_int: f64,
}

fn cross(a: &Vec3<Jet3>, b: &Vec3<Jet3>) -> Vec3<Jet3> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn euclid_norm(a: &[f64; 3]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn vals3(a: &Vec3<Jet3>) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

fn check_spacelike(g: &Mat2<f64>) -> Result<(), GeomError> {
    let det = det2(g);
    let trace = g[0][0] + g[1][1];
    if !(trace > 0.0) || !(det > SPACELIKE_EPS * trace * trace) {
        return Err(GeomError::NotSpacelike { point: [f64::NAN; 2], det, trace });
    }
    Ok(())
}

/// Induced metric `g_ij = ḡ(f_i, f_j)` as jets (valid to order 2).
pub fn induced_metric(chart: HyperbolicChart, pos: &Vec3<Jet3>) -> Result<Mat2<Jet3>, GeomError> {
    chart.check([pos[0].value(), pos[1].value()])?;
    let h = chart.metric_components(pos[0], pos[1]);
    let f = [
        [pos[0].du(), pos[1].du(), pos[2].du()],
        [pos[0].dv(), pos[1].dv(), pos[2].dv()],
    ];
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = -(f[i][2] * f[j][2]);
            for a in 0..2 {
                for b in 0..2 {
                    acc += h[a][b] * f[i][a] * f[j][b];
                }
            }
            acc
        })
    }))
}

/// Gaussian curvature of the immersion at the germ `pos`, from the induced
/// metric alone.
pub fn curvature_of_immersion(chart: HyperbolicChart, pos: &Vec3<Jet3>) -> Result<f64, GeomError> {
    let g = induced_metric(chart, pos)?;
    check_spacelike(&values2(&g))?;
    intrinsic_curvature(&g)
}

/// Levi-Civita symbols of a 2-dimensional metric field given as jets.
pub fn metric_christoffel(g: &Mat2<Jet3>) -> Result<(Mat2<Jet3>, Christoffel<Jet3, 2>), GeomError> {
    let det = det2(g).value();
    let scale = g[0][0].value().abs() + g[1][1].value().abs();
    if !(det.abs() > 1e-300) || !(det.abs() > 1e-14 * scale * scale) {
        return Err(GeomError::DegenerateMetric(det));
    }
    let ginv = inv2(g);
    let dg = [jet_partials2(g, 0), jet_partials2(g, 1)];
    Ok((ginv, christoffel(&ginv, &dg)))
}

/// `A(R(e_u,e_v)e_u, e_v)` for `R(X,Y)Z = ∇_[X,Y] Z − [∇_X, ∇_Y] Z` from
/// Christoffel jets valid to order 1.
fn curvature_form(g: &Mat2<f64>, gam: &Christoffel<Jet3, 2>) -> f64 {
    // ∇_j ∇_i e_1 for coordinate fields, component m:
    // ∂_j Γ^m_i1 + Γ^k_i1 Γ^m_jk
    let nested = |j: usize, i: usize, m: usize| -> f64 {
        let mut acc = gam[m][i][0].d(j).value();
        for k in 0..2 {
            acc += gam[k][i][0].value() * gam[m][j][k].value();
        }
        acc
    };
    // R(e1,e2)e1 = −(∇_1∇_2 e1 − ∇_2∇_1 e1)
    let r: [f64; 2] = std::array::from_fn(|m| -(nested(0, 1, m) - nested(1, 0, m)));
    r[0] * g[0][1] + r[1] * g[1][1]
}

/// Gaussian curvature of a 2-dimensional metric field from its jets
/// (valid to order 2), through the curvature tensor.
pub fn intrinsic_curvature(g: &Mat2<Jet3>) -> Result<f64, GeomError> {
    let (_, gam) = metric_christoffel(g)?;
    let gv = values2(g);
    let q = det2(&gv);
    Ok(curvature_form(&gv, &gam) / q)
}

/// Assemble the frame at the germ `pos` (order-3 jets of the coordinates).
pub fn frame_from_position(chart: HyperbolicChart, pos: Vec3<Jet3>, point: [f64; 2]) -> Result<PointFrame, GeomError> {
    let ambient = AmbientAlong::new(chart, pos)?;
    let tangents = [ambient.tangent(0), ambient.tangent(1)];

    let n_low = cross(&tangents[0], &tangents[1]);
    let (fu, fv) = (vals3(&tangents[0]), vals3(&tangents[1]));
    if euclid_norm(&vals3(&n_low)) <= 1e-12 * euclid_norm(&fu) * euclid_norm(&fv) {
        return Err(GeomError::NotImmersed { point });
    }

    let g: Mat2<Jet3> = std::array::from_fn(|i| std::array::from_fn(|j| ambient.inner(&tangents[i], &tangents[j])));
    check_spacelike(&values2(&g)).map_err(|e| e.at(point))?;
    let (ginv, gam) = metric_christoffel(&g)?;

    // normal: raise the covector orthogonal to both tangents, then normalize
    let mut normal: Vec3<Jet3> = std::array::from_fn(|a| {
        let mut acc = Jet3::ZERO;
        for b in 0..3 {
            acc += ambient.metric_inv[a][b] * n_low[b];
        }
        acc
    });
    let nn = ambient.inner(&normal, &normal);
    if !(nn.value() < 0.0) {
        let gv = values2(&g);
        return Err(GeomError::NotSpacelike { point, det: det2(&gv), trace: gv[0][0] + gv[1][1] });
    }
    let scale = (-nn).sqrt()?.recip()?;
    // Θ = ḡ(N, ∂t) = −N^t must be negative
    let sign = if normal[2].value() < 0.0 { -1.0 } else { 1.0 };
    for c in normal.iter_mut() {
        *c = *c * scale * sign;
    }
    let theta = -normal[2].value();

    // Weingarten: A e_i = −∇̄_{e_i} N
    let weingarten: [Vec3<Jet3>; 2] = std::array::from_fn(|i| {
        let mut e = [Jet3::ZERO; 2];
        e[i] = Jet3::cst(1.0);
        ambient.covariant_derivative(&e, &normal)
    });
    // raw[i][j] = −ḡ(∇̄_i N, f_j)
    let raw: Mat2<Jet3> = std::array::from_fn(|i| std::array::from_fn(|j| -ambient.inner(&weingarten[i], &tangents[j])));
    let shape: Mat2<Jet3> = std::array::from_fn(|k| {
        std::array::from_fn(|i| ginv[k][0] * raw[i][0] + ginv[k][1] * raw[i][1])
    });
    // α = g·A, (gA)_ji = g_jk A^k_i = α(e_i, e_j)
    let ga: Mat2<Jet3> = std::array::from_fn(|j| std::array::from_fn(|i| g[j][0] * shape[0][i] + g[j][1] * shape[1][i]));
    let alpha: Mat2<Jet3> =
        std::array::from_fn(|i| std::array::from_fn(|j| (ga[i][j] + ga[j][i]) * 0.5));
    let asym = (ga[0][1].value() - ga[1][0].value()).abs();
    let alpha_asymmetry = asym / max_abs2(&values2(&alpha)).max(1.0);

    let h = pos[2];
    let dh = [h.du(), h.dv()];
    let ginv_v = values2(&ginv);
    let dhv = [dh[0].value(), dh[1].value()];
    let grad_h = [
        ginv_v[0][0] * dhv[0] + ginv_v[0][1] * dhv[1],
        ginv_v[1][0] * dhv[0] + ginv_v[1][1] * dhv[1],
    ];
    let hess_h: Mat2<f64> = std::array::from_fn(|i| {
        std::array::from_fn(|j| dh[j].d(i).value() - gam[0][i][j].value() * dhv[0] - gam[1][i][j].value() * dhv[1])
    });

    let shape_v = values2(&shape);
    let k_ext = -theta * theta - det2(&shape_v);
    let gv = values2(&g);
    let k_int = curvature_form(&gv, &gam) / det2(&gv);

    Ok(PointFrame {
        point,
        ambient,
        tangents,
        g,
        ginv,
        christoffel: gam,
        normal,
        theta,
        shape,
        alpha,
        alpha_asymmetry,
        dh,
        grad_h,
        hess_h,
        k_ext,
        k_int,
    })
}

impl PointFrame {
    pub fn g_values(&self) -> Mat2<f64> {
        values2(&self.g)
    }

    pub fn ginv_values(&self) -> Mat2<f64> {
        values2(&self.ginv)
    }

    pub fn shape_values(&self) -> Mat2<f64> {
        values2(&self.shape)
    }

    pub fn alpha_values(&self) -> Mat2<f64> {
        values2(&self.alpha)
    }

    pub fn normal_values(&self) -> [f64; 3] {
        vals3(&self.normal)
    }

    pub fn dh_values(&self) -> Vec2<f64> {
        [self.dh[0].value(), self.dh[1].value()]
    }

    /// `‖∇h‖²`.
    pub fn norm_grad_h2(&self) -> f64 {
        let d = self.dh_values();
        d[0] * self.grad_h[0] + d[1] * self.grad_h[1]
    }

    pub fn det_shape(&self) -> f64 {
        det2(&self.shape_values())
    }

    /// Hyperbolic angle between `N` and `∂t`, `cosh θ = −Θ`.
    pub fn hyperbolic_angle(&self) -> f64 {
        (-self.theta).max(1.0).acosh()
    }

    /// The same frame with `A` and `α` scaled by `factor`. Used to check that
    /// the residual suite detects wrong extrinsic geometry.
    pub fn with_scaled_shape(&self, factor: f64) -> PointFrame {
        let mut out = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                out.shape[i][j] = out.shape[i][j] * factor;
                out.alpha[i][j] = out.alpha[i][j] * factor;
            }
        }
        out.k_ext = -out.theta * out.theta - out.det_shape();
        out
    }

    fn g_norm(&self, x: &Vec2<f64>) -> f64 {
        crate::tensor::bilinear2(&self.g_values(), x, x).max(0.0).sqrt()
    }
}

/// `∇̄_X Y − ∇_X Y + g(AX, Y) N` in ambient components, for tangent fields
/// given by their chart components as jets.
pub fn gauss_formula_residual(frame: &PointFrame, x: &Vec2<Jet3>, y: &Vec2<Jet3>) -> Vec3<f64> {
    let amb = &frame.ambient;
    let pushed_y: Vec3<Jet3> =
        std::array::from_fn(|a| y[0] * frame.tangents[0][a] + y[1] * frame.tangents[1][a]);
    let lhs = amb.covariant_derivative(x, &pushed_y);
    let xv = [x[0].value(), x[1].value()];
    let yv = [y[0].value(), y[1].value()];
    let nabla: [f64; 2] = std::array::from_fn(|k| {
        let mut acc = 0.0;
        for i in 0..2 {
            acc += xv[i] * y[k].d(i).value();
            for j in 0..2 {
                acc += xv[i] * frame.christoffel[k][i][j].value() * yv[j];
            }
        }
        acc
    });
    let alpha_xy = crate::tensor::bilinear2(&frame.alpha_values(), &xv, &yv);
    let nv = frame.normal_values();
    std::array::from_fn(|a| {
        lhs[a].value() - nabla[0] * frame.tangents[0][a].value() - nabla[1] * frame.tangents[1][a].value()
            + alpha_xy * nv[a]
    })
}

/// Largest relative Gauss-formula residual over the coordinate pairs.
pub fn gauss_formula_max(frame: &PointFrame) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut x = [Jet3::ZERO; 2];
            let mut y = [Jet3::ZERO; 2];
            x[i] = Jet3::cst(1.0);
            y[j] = Jet3::cst(1.0);
            let r = gauss_formula_residual(frame, &x, &y);
            // scale by the Euclidean size of the second-derivative term
            let second = vals3(&frame.tangents[j].map(|c| c.d(i)));
            let scale = 1.0 + euclid_norm(&second) + frame.alpha_values()[i][j].abs() * euclid_norm(&frame.normal_values());
            worst = worst.max(euclid_norm(&r) / scale);
        }
    }
    worst
}

/// Weingarten consistency: `∇̄_X N` is tangent and `α` is symmetric.
pub fn weingarten_residual(frame: &PointFrame) -> f64 {
    let mut worst = frame.alpha_asymmetry;
    for i in 0..2 {
        let mut e = [Jet3::ZERO; 2];
        e[i] = Jet3::cst(1.0);
        let w = frame.ambient.covariant_derivative(&e, &frame.normal);
        let normal_part = frame.ambient.inner(&w, &frame.normal).value();
        let size = euclid_norm(&vals3(&w)).max(1.0);
        worst = worst.max(normal_part.abs() / size);
    }
    worst
}

/// Unit-normal conditions `|ḡ(N,N) + 1|` and `|ḡ(N, f_i)|` (relative).
pub fn normal_residual(frame: &PointFrame) -> f64 {
    let amb = &frame.ambient;
    let mut worst = (amb.inner(&frame.normal, &frame.normal).value() + 1.0).abs();
    for f in &frame.tangents {
        let size = euclid_norm(&vals3(f)) * euclid_norm(&frame.normal_values());
        worst = worst.max(amb.inner(&frame.normal, f).value().abs() / size.max(1.0));
    }
    worst
}

/// The two sides of the Codazzi equation for `(X, Y) = (e_u, e_v)`:
/// `(∇_X A)Y − (∇_Y A)X` and `Θ (dh(X) Y − dh(Y) X)`, chart components.
pub fn codazzi_terms(frame: &PointFrame) -> (Vec2<f64>, Vec2<f64>) {
    let gam = &frame.christoffel;
    let a = &frame.shape;
    // (∇_i A)^k_j
    let nabla_a = |i: usize, k: usize, j: usize| -> f64 {
        let mut acc = a[k][j].d(i).value();
        for l in 0..2 {
            acc += gam[k][i][l].value() * a[l][j].value() - a[k][l].value() * gam[l][i][j].value();
        }
        acc
    };
    let lhs: Vec2<f64> = std::array::from_fn(|k| nabla_a(0, k, 1) - nabla_a(1, k, 0));
    let dh = frame.dh_values();
    // Θ (dh(e_u) e_v − dh(e_v) e_u)
    let rhs = [-frame.theta * dh[1], frame.theta * dh[0]];
    (lhs, rhs)
}

/// Relative residual of the Codazzi equation in `H² × R₁`.
pub fn codazzi_residual_frame(frame: &PointFrame) -> f64 {
    let (l, r) = codazzi_terms(frame);
    let diff = [l[0] - r[0], l[1] - r[1]];
    frame.g_norm(&diff) / frame.g_norm(&l).max(frame.g_norm(&r)).max(1.0)
}

pub fn codazzi_residual(patch: &SurfacePatch, p: [f64; 2]) -> Result<f64, GeomError> {
    Ok(codazzi_residual_frame(&patch.frame_at(p)?))
}

/// `(|‖∇h‖² − Θ² + 1|, max |∇²h − Θ α|)`, each relative to the size of its
/// terms.
pub fn height_identities_frame(frame: &PointFrame) -> (f64, f64) {
    let s = frame.norm_grad_h2();
    let t2 = frame.theta * frame.theta;
    let r7 = (s - t2 + 1.0).abs() / t2.max(1.0);
    let alpha = frame.alpha_values();
    let theta_alpha: Mat2<f64> = std::array::from_fn(|i| std::array::from_fn(|j| frame.theta * alpha[i][j]));
    let diff = sub2(&frame.hess_h, &theta_alpha);
    let scale = max_abs2(&frame.hess_h).max(max_abs2(&theta_alpha)).max(1.0);
    (r7, max_abs2(&diff) / scale)
}

pub fn height_identities(patch: &SurfacePatch, p: [f64; 2]) -> Result<(f64, f64), GeomError> {
    Ok(height_identities_frame(&patch.frame_at(p)?))
}

/// Pullback of `g_H` by the projection `Π = π_H ∘ f`.
pub fn projected_metric(frame: &PointFrame) -> Mat2<f64> {
    let m = &frame.ambient.metric;
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    acc += m[a][b].value() * frame.tangents[i][a].value() * frame.tangents[j][b].value();
                }
            }
            acc
        })
    })
}

/// Smallest eigenvalue of `Π*g_H − g` relative to `g`.
pub fn projection_comparison_frame(frame: &PointFrame) -> f64 {
    let diff = sub2(&projected_metric(frame), &frame.g_values());
    relative_eigenvalues(&diff, &frame.g_values())[0]
}

pub fn projection_comparison(patch: &SurfacePatch, p: [f64; 2]) -> Result<f64, GeomError> {
    Ok(projection_comparison_frame(&patch.frame_at(p)?))
}
