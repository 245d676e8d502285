//! Fixed-size matrix helpers and the Levi-Civita kernel shared by the
//! ambient space, induced metrics and abstract metric fields.

use crate::jet::Jet3;
use crate::scalar::Scalar;

pub type Mat2<S> = [[S; 2]; 2];
pub type Vec2<S> = [S; 2];
pub type Vec3<S> = [S; 3];

/// `gamma[k][i][j] = Γ^k_ij`.
pub type Christoffel<S, const N: usize> = [[[S; N]; N]; N];

pub fn det2<S: Scalar>(m: &Mat2<S>) -> S {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace2<S: Scalar>(m: &Mat2<S>) -> S {
    m[0][0] + m[1][1]
}

/// Inverse without a degeneracy check; callers guard `det`.
pub fn inv2<S: Scalar>(m: &Mat2<S>) -> Mat2<S> {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn matmul2<S: Scalar>(a: &Mat2<S>, b: &Mat2<S>) -> Mat2<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn matvec2<S: Scalar>(a: &Mat2<S>, x: &Vec2<S>) -> Vec2<S> {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

pub fn transpose2<S: Scalar>(a: &Mat2<S>) -> Mat2<S> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// `x^T m y`.
pub fn bilinear2<S: Scalar>(m: &Mat2<S>, x: &Vec2<S>, y: &Vec2<S>) -> S {
    let mut acc = S::cst(0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc = acc + m[i][j] * x[i] * y[j];
        }
    }
    acc
}

pub fn bilinear3<S: Scalar>(m: &[[S; 3]; 3], x: &Vec3<S>, y: &Vec3<S>) -> S {
    let mut acc = S::cst(0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc = acc + m[i][j] * x[i] * y[j];
        }
    }
    acc
}

pub fn values2(m: &Mat2<Jet3>) -> Mat2<f64> {
    [[m[0][0].value(), m[0][1].value()], [m[1][0].value(), m[1][1].value()]]
}

pub fn jet_partials2(m: &Mat2<Jet3>, axis: usize) -> Mat2<Jet3> {
    [[m[0][0].d(axis), m[0][1].d(axis)], [m[1][0].d(axis), m[1][1].d(axis)]]
}

pub fn max_abs2(m: &Mat2<f64>) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()))
}

pub fn sub2(a: &Mat2<f64>, b: &Mat2<f64>) -> Mat2<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

/// Eigenvalues of the symmetric pencil `(m, g)`, i.e. of `g^{-1} m`, sorted
/// ascending. These are basis-independent for symmetric `m` and SPD `g`.
pub fn relative_eigenvalues(m: &Mat2<f64>, g: &Mat2<f64>) -> [f64; 2] {
    let gi = inv2(g);
    let p = matmul2(&gi, m);
    let tr = trace2(&p);
    let det = det2(&p);
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    [tr / 2.0 - disc, tr / 2.0 + disc]
}

/// Eigenvalues of a real symmetric 2×2 matrix, ascending.
pub fn sym_eigenvalues(m: &Mat2<f64>) -> [f64; 2] {
    let a = m[0][0];
    let d = m[1][1];
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mid - rad, mid + rad]
}

/// Levi-Civita symbols `Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`
/// from the inverse metric and the coordinate partials
/// `dg[l][i][j] = ∂_l g_ij`.
pub fn christoffel<S: Scalar, const N: usize>(
    ginv: &[[S; N]; N],
    dg: &[[[S; N]; N]; N],
) -> Christoffel<S, N> {
    // first kind: gamma_l,ij
    let first: [[[S; N]; N]; N] = std::array::from_fn(|l| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]) * S::cst(0.5))
        })
    });
    std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = S::cst(0.0);
                for l in 0..N {
                    acc = acc + ginv[k][l] * first[l][i][j];
                }
                acc
            })
        })
    })
}
