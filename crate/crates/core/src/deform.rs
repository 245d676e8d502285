//! The deformed metric `g̃ = g + c·dh²` of a spacelike surface and the
//! quantities built on it: gradient, shape operator, connection and Gaussian
//! curvature of `g̃`, each given by a closed formula and cross-checked
//! against a direct computation on `g̃`.

use serde::{Deserialize, Serialize};

use crate::codazzi::{CodazziPairField, PairJets};
use crate::error::GeomError;
use crate::grid::{map_grid, GridSpec};
use crate::jet::Jet3;
use crate::surface::{intrinsic_curvature, metric_christoffel, PointFrame, SurfacePatch};
use crate::tensor::{
    bilinear2, det2, max_abs2, relative_eigenvalues, sub2, values2, Christoffel, Mat2, Vec2,
};

/// Largest `c·‖∇h‖²` accepted before the `1/(1 + c‖∇h‖²)` factors are
/// considered ill-conditioned.
pub const CONDITIONING_LIMIT: f64 = 1e12;

/// Default tolerance for `max |K − K_asserted|` in constant-curvature mode.
pub const CONSTANT_K_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DeformationMode {
    /// Any `c > 0`; only the pointwise identities are meaningful.
    FreeC,
    /// `c = 1/(K + 1)` for an asserted constant curvature `K ∈ (−1, 0]`.
    ConstantK { k: f64 },
}

/// Result of checking the asserted constant curvature on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub max_error: f64,
    pub point: [f64; 2],
    pub tolerance: f64,
}

impl Consistency {
    pub fn holds(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct DeformationContext {
    pub patch: SurfacePatch,
    pub c: f64,
    pub mode: DeformationMode,
    pub consistency: Option<Consistency>,
}

impl DeformationContext {
    pub fn free_c(patch: SurfacePatch, c: f64) -> Result<Self, GeomError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(GeomError::InvalidParameter(format!("deformation constant must be positive, got {c}")));
        }
        Ok(DeformationContext { patch, c, mode: DeformationMode::FreeC, consistency: None })
    }

    /// Constant-curvature mode. The surface curvature is compared with `k` on
    /// `grid`; a mismatch beyond `tolerance` is recorded, not raised, and
    /// disables the pair-level checks.
    pub fn constant_k(patch: SurfacePatch, k: f64, grid: &GridSpec, tolerance: f64) -> Result<Self, GeomError> {
        if !(k > -1.0 && k <= 0.0) {
            return Err(GeomError::InvalidParameter(format!("constant curvature must lie in (-1, 0], got {k}")));
        }
        let errors = map_grid(&patch.domain, grid, |p| Ok((patch.frame_at(p)?.k_int - k).abs()))?;
        let mut worst = 0;
        for (i, e) in errors.iter().enumerate() {
            if e > &errors[worst] || e.is_nan() {
                worst = i;
            }
        }
        let consistency = Consistency {
            max_error: errors.get(worst).copied().unwrap_or(0.0),
            point: grid.point(&patch.domain, worst),
            tolerance,
        };
        Ok(DeformationContext {
            patch,
            c: 1.0 / (k + 1.0),
            mode: DeformationMode::ConstantK { k },
            consistency: Some(consistency),
        })
    }

    pub fn asserted_k(&self) -> Option<f64> {
        match self.mode {
            DeformationMode::ConstantK { k } => Some(k),
            DeformationMode::FreeC => None,
        }
    }

    /// True only in constant-curvature mode with a passing consistency check.
    pub fn is_consistent(&self) -> bool {
        self.consistency.is_some_and(|c| c.holds())
    }

    pub fn at(&self, p: [f64; 2]) -> Result<DeformedPoint, GeomError> {
        DeformedPoint::new(self.patch.frame_at(p)?, self.c)
    }

    /// `g̃` as a metric field.
    pub fn deformed_metric_field(&self) -> impl Fn([f64; 2]) -> Result<Mat2<Jet3>, GeomError> + Sync + '_ {
        move |p| Ok(self.at(p)?.g_tilde)
    }

    /// The pair `(g̃, α)`.
    pub fn pair_field(&self) -> CodazziPairField {
        let patch = self.patch.clone();
        let c = self.c;
        CodazziPairField::new(patch.domain, move |p| {
            let d = DeformedPoint::new(patch.frame_at(p)?, c)?;
            Ok(PairJets { a: d.g_tilde, b: d.frame.alpha })
        })
    }

    pub fn pair_curvature_and_bound(&self, p: [f64; 2]) -> Result<PairBound, GeomError> {
        let k = self.asserted_k().ok_or_else(|| {
            GeomError::Inconsistent("pair checks need constant-curvature mode".into())
        })?;
        if let Some(c) = self.consistency.filter(|c| !c.holds()) {
            return Err(GeomError::Inconsistent(format!(
                "surface curvature deviates from K = {k} by {:e} at ({}, {})",
                c.max_error, c.point[0], c.point[1]
            )));
        }
        Ok(self.at(p)?.pair_bound(k))
    }
}

/// `K̃` as a function of `s = ‖∇h‖²` for a surface of constant curvature `k`.
pub fn ktilde_of_s(k: f64, c: f64, s: f64) -> f64 {
    let q = 1.0 + c * s;
    ((1.0 - c) * k - c * (1.0 + s) * (1.0 + s)) / (q * q)
}

/// Pair-level quantities in constant-curvature mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    /// `det α / det g̃`.
    pub k_pair: f64,
    /// `|K_pair + (K + 1)|`.
    pub k_pair_residual: f64,
    /// `|λ₁λ₂·c/(1 + c‖∇h‖²) + 1|` with `λᵢ` the principal curvatures.
    pub lambda_identity_residual: f64,
    /// Closed-form `K̃` at the point.
    pub ktilde: f64,
    /// `max(0, K̃ − (K − 1))`.
    pub ktilde_bound_residual: f64,
}

/// Pointwise residuals of the deformation identities, each relative to the
/// size of the compared terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformResiduals {
    /// `det g̃ / det g = 1 + c‖∇h‖²` and `g̃ − g ≥ 0`.
    pub metric: f64,
    /// `g̃(∇̃h, e_i) = dh(e_i)`.
    pub gradient: f64,
    /// `α = g̃(Ã·, ·)` and `det Ã = −(K + Θ²)/(1 + c‖∇h‖²)`.
    pub shape: f64,
    /// Formula connection against Christoffel symbols of `g̃`, and its
    /// compatibility with `g̃`.
    pub connection: f64,
    /// `det ∇²h = Θ² det A = −(1 + ‖∇h‖²)(K + 1 + ‖∇h‖²)`.
    pub hessian_det: f64,
    /// Lemma formula for `K̃` against the curvature of `g̃`.
    pub ktilde_lemma: f64,
    /// Closed form for `K̃` against the lemma formula.
    pub ktilde_closed: f64,
}

/// The deformation evaluated at one point.
#[derive(Debug, Clone)]
pub struct DeformedPoint {
    pub frame: PointFrame,
    pub c: f64,
    /// `‖∇h‖²`.
    pub s: f64,
    pub g_tilde: Mat2<Jet3>,
}

impl DeformedPoint {
    pub fn new(frame: PointFrame, c: f64) -> Result<Self, GeomError> {
        let s = frame.norm_grad_h2();
        if c * s > CONDITIONING_LIMIT {
            return Err(GeomError::Conditioning(c * s));
        }
        let dh = frame.dh;
        let g_tilde = std::array::from_fn(|i| std::array::from_fn(|j| frame.g[i][j] + dh[i] * dh[j] * c));
        Ok(DeformedPoint { frame, c, s, g_tilde })
    }

    fn factor(&self) -> f64 {
        self.c / (1.0 + self.c * self.s)
    }

    pub fn g_tilde_values(&self) -> Mat2<f64> {
        values2(&self.g_tilde)
    }

    /// `∇̃h = ∇h / (1 + c‖∇h‖²)`.
    pub fn deformed_gradient(&self) -> Vec2<f64> {
        let q = 1.0 + self.c * self.s;
        self.frame.grad_h.map(|x| x / q)
    }

    /// `Ã`, `shape[k][i] = Ã^k_i`.
    pub fn deformed_shape_operator(&self) -> Mat2<f64> {
        let a = self.frame.shape_values();
        let alpha = self.frame.alpha_values();
        let gh = self.frame.grad_h;
        let f = self.factor();
        std::array::from_fn(|k| {
            std::array::from_fn(|i| a[k][i] - f * (alpha[i][0] * gh[0] + alpha[i][1] * gh[1]) * gh[k])
        })
    }

    /// Connection of `g̃` from the closed formula,
    /// `Γ̃^k_ij = Γ^k_ij + c/(1 + c‖∇h‖²)·∇²h_ij·∇h^k`.
    pub fn christoffel_formula(&self) -> Christoffel<f64, 2> {
        let f = self.factor();
        let gam = &self.frame.christoffel;
        let hess = &self.frame.hess_h;
        let gh = self.frame.grad_h;
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| gam[k][i][j].value() + f * hess[i][j] * gh[k])))
    }

    /// Christoffel symbols of `g̃` computed from its jets.
    pub fn christoffel_direct(&self) -> Result<Christoffel<f64, 2>, GeomError> {
        let (_, gam) = metric_christoffel(&self.g_tilde)?;
        Ok(gam.map(|m| m.map(|r| r.map(|x| x.value()))))
    }

    /// `∇̃_{e_i} e_j` from the closed formula.
    pub fn deformed_connection(&self, i: usize, j: usize) -> Vec2<f64> {
        let gam = self.christoffel_formula();
        [gam[0][i][j], gam[1][i][j]]
    }

    /// `det ∇²h` as the determinant of the endomorphism `g⁻¹·∇²h`.
    pub fn hessian_det(&self) -> f64 {
        det2(&self.frame.hess_h) / det2(&self.frame.g_values())
    }

    /// Pointwise Gaussian curvature used in the formulas.
    pub fn k(&self) -> f64 {
        self.frame.k_int
    }

    /// `K̃ = (K(1 + c‖∇h‖²) + c·det ∇²h)/(1 + c‖∇h‖²)²`.
    pub fn ktilde_lemma(&self) -> f64 {
        let q = 1.0 + self.c * self.s;
        (self.k() * q + self.c * self.hessian_det()) / (q * q)
    }

    /// `K̃ = ((1 − c)K − c(1 + ‖∇h‖²)²)/(1 + c‖∇h‖²)²`.
    pub fn ktilde_closed_form(&self) -> f64 {
        ktilde_of_s(self.k(), self.c, self.s)
    }

    /// Gaussian curvature of `g̃` from its jets.
    pub fn ktilde_direct(&self) -> Result<f64, GeomError> {
        intrinsic_curvature(&self.g_tilde)
    }

    pub fn metric_residual(&self) -> f64 {
        let g = self.frame.g_values();
        let gt = self.g_tilde_values();
        let q = 1.0 + self.c * self.s;
        let ratio = (det2(&gt) / det2(&g) - q).abs() / q;
        let low = relative_eigenvalues(&sub2(&gt, &g), &g)[0];
        ratio.max(-low)
    }

    pub fn gradient_residual(&self) -> f64 {
        let gt = self.g_tilde_values();
        let grad = self.deformed_gradient();
        let dh = self.frame.dh_values();
        let scale = dh[0].abs().max(dh[1].abs()).max(1.0);
        (0..2)
            .map(|i| (gt[i][0] * grad[0] + gt[i][1] * grad[1] - dh[i]).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// Defining relation of `Ã` and the determinant chain through the Gauss
    /// equation. The chain detects a shape operator that is inconsistent
    /// with the intrinsic curvature.
    pub fn shape_residual(&self) -> f64 {
        let at = self.deformed_shape_operator();
        let gt = self.g_tilde_values();
        let alpha = self.frame.alpha_values();
        // g̃(Ã e_i, e_j) = Ã^k_i g̃_kj
        let rel: Mat2<f64> =
            std::array::from_fn(|i| std::array::from_fn(|j| at[0][i] * gt[0][j] + at[1][i] * gt[1][j]));
        let defining = max_abs2(&sub2(&rel, &alpha)) / max_abs2(&alpha).max(1.0);
        let det_at = det2(&at);
        let theta2 = self.frame.theta * self.frame.theta;
        let chain_rhs = -(self.k() + theta2) / (1.0 + self.c * self.s);
        let chain = (det_at - chain_rhs).abs() / det_at.abs().max(chain_rhs.abs()).max(1.0);
        let det_alpha = det2(&alpha);
        let product = det_at * det2(&gt);
        let pair = (product - det_alpha).abs() / det_alpha.abs().max(product.abs()).max(1.0);
        defining.max(chain).max(pair)
    }

    pub fn connection_residual(&self) -> Result<f64, GeomError> {
        let formula = self.christoffel_formula();
        let direct = self.christoffel_direct()?;
        let mut scale: f64 = 1.0;
        let mut diff: f64 = 0.0;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    scale = scale.max(formula[k][i][j].abs()).max(direct[k][i][j].abs());
                    diff = diff.max((formula[k][i][j] - direct[k][i][j]).abs());
                }
            }
        }
        // ∂_k g̃_ij = g̃(∇̃_k e_i, e_j) + g̃(e_i, ∇̃_k e_j)
        let gt = self.g_tilde_values();
        let mut compat: f64 = 0.0;
        let mut dscale: f64 = 1.0;
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let d = self.g_tilde[i][j].d(k).value();
                    let mut rhs = 0.0;
                    for l in 0..2 {
                        rhs += formula[l][k][i] * gt[l][j] + formula[l][k][j] * gt[i][l];
                    }
                    dscale = dscale.max(d.abs());
                    compat = compat.max((d - rhs).abs());
                }
            }
        }
        Ok((diff / scale).max(compat / dscale))
    }

    pub fn hessian_det_residual(&self) -> f64 {
        let s = self.s;
        let lhs = self.hessian_det();
        let mid = self.frame.theta * self.frame.theta * self.frame.det_shape();
        let rhs = -(1.0 + s) * (self.k() + 1.0 + s);
        ((lhs - mid).abs().max((mid - rhs).abs())) / (1.0 + s * s)
    }

    pub fn ktilde_lemma_residual(&self) -> Result<f64, GeomError> {
        let lemma = self.ktilde_lemma();
        let direct = self.ktilde_direct()?;
        Ok((lemma - direct).abs() / lemma.abs().max(direct.abs()).max(1.0))
    }

    pub fn ktilde_closed_residual(&self) -> f64 {
        let lemma = self.ktilde_lemma();
        let closed = self.ktilde_closed_form();
        (lemma - closed).abs() / lemma.abs().max(closed.abs()).max(1.0)
    }

    pub fn residuals(&self) -> Result<DeformResiduals, GeomError> {
        Ok(DeformResiduals {
            metric: self.metric_residual(),
            gradient: self.gradient_residual(),
            shape: self.shape_residual(),
            connection: self.connection_residual()?,
            hessian_det: self.hessian_det_residual(),
            ktilde_lemma: self.ktilde_lemma_residual()?,
            ktilde_closed: self.ktilde_closed_residual(),
        })
    }

    /// Pair checks against an asserted constant curvature `k`.
    pub fn pair_bound(&self, k: f64) -> PairBound {
        let alpha = self.frame.alpha_values();
        let k_pair = det2(&alpha) / det2(&self.g_tilde_values());
        let lambda = relative_eigenvalues(&alpha, &self.frame.g_values());
        let lambda_identity_residual = (lambda[0] * lambda[1] * self.factor() + 1.0).abs();
        let ktilde = self.ktilde_closed_form();
        PairBound {
            k_pair,
            k_pair_residual: (k_pair + k + 1.0).abs(),
            lambda_identity_residual,
            ktilde,
            ktilde_bound_residual: (ktilde - (k - 1.0)).max(0.0),
        }
    }

    /// `g̃`-length squared of a chart vector, for length comparisons.
    pub fn deformed_norm2(&self, x: &Vec2<f64>) -> f64 {
        bilinear2(&self.g_tilde_values(), x, x)
    }
}
