//! Closed-form eigen-decomposition of symmetric 3x3 matrices.
//!
//! The trigonometric solution of the characteristic cubic locates the
//! best-separated eigenvalue; its eigenvector comes from cross products of
//! rows of `A - λI`. The other pair is the closed-form solution of the 2x2
//! block in the orthogonal plane, which stays accurate when the pair is
//! (nearly) degenerate. Each eigenvector is sign-normalized so that its first
//! nonzero component is positive.

use crate::tensor::{QTensor, Sym3};

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigensystem {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl Eigensystem {
    /// `Σ λ_i v_i ⊗ v_i`.
    pub fn reconstruct(&self) -> Sym3 {
        let mut m = Sym3::ZERO;
        for (l, v) in self.values.iter().zip(&self.vectors) {
            let o = Sym3::outer(*v);
            m.xx += l * o.xx;
            m.yy += l * o.yy;
            m.zz += l * o.zz;
            m.xy += l * o.xy;
            m.xz += l * o.xz;
            m.yz += l * o.yz;
        }
        m
    }
}

pub fn eigensystem(q: &QTensor) -> Eigensystem {
    eigensystem_sym(&q.to_matrix())
}

pub fn eigensystem_sym(a: &Sym3) -> Eigensystem {
    let est = trig_eigenvalues(a);
    // the eigenvalue farthest from the other two is numerically well conditioned
    let top_isolated = est[0] - est[1] >= est[1] - est[2];
    let w = isolated_vector(a, if top_isolated { est[0] } else { est[2] });
    let lw = dot(w, a.mul_vec(w));

    // remaining pair: symmetric 2x2 block in the plane orthogonal to w
    let (u, v) = complement(w);
    let au = a.mul_vec(u);
    let av = a.mul_vec(v);
    let (m00, m01, m11) = (dot(u, au), dot(u, av), dot(v, av));
    let mean = 0.5 * (m00 + m11);
    let half = 0.5 * (m00 - m11);
    let r = half.hypot(m01);
    let theta = 0.5 * m01.atan2(half);
    let (c, s) = (theta.cos(), theta.sin());
    let hi = [c * u[0] + s * v[0], c * u[1] + s * v[1], c * u[2] + s * v[2]];
    let lo = [-s * u[0] + c * v[0], -s * u[1] + c * v[1], -s * u[2] + c * v[2]];

    let mut pairs = [(lw, w), (mean + r, hi), (mean - r, lo)];
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    Eigensystem {
        values: pairs.map(|p| p.0),
        vectors: pairs.map(|p| sign_normalize(p.1)),
    }
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub fn eigenvalues_sym(a: &Sym3) -> [f64; 3] {
    eigensystem_sym(a).values
}

/// Trigonometric solution of the characteristic cubic, sorted descending.
///
/// Accurate for well-separated eigenvalues; a near-double pair is only
/// resolved to about `sqrt(eps)`.
fn trig_eigenvalues(a: &Sym3) -> [f64; 3] {
    let mean = a.trace() / 3.0;
    let mut b = *a;
    b.xx -= mean;
    b.yy -= mean;
    b.zz -= mean;
    let p = (b.frobenius_sq() / 6.0).sqrt();
    if p == 0.0 {
        return [mean; 3];
    }
    let inv = 1.0 / p;
    let scaled = Sym3 {
        xx: b.xx * inv,
        yy: b.yy * inv,
        zz: b.zz * inv,
        xy: b.xy * inv,
        xz: b.xz * inv,
        yz: b.yz * inv,
    };
    let half_det = (0.5 * scaled.det()).clamp(-1.0, 1.0);
    let phi = half_det.acos() / 3.0;
    let two_pi_3 = 2.0 * std::f64::consts::FRAC_PI_3;
    let l0 = mean + 2.0 * p * phi.cos();
    let l2 = mean + 2.0 * p * (phi + two_pi_3).cos();
    let l1 = 3.0 * mean - l0 - l2;
    [l0, l1, l2]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    scale(a, 1.0 / n)
}

/// First component with magnitude above the noise floor made positive.
pub(crate) fn sign_normalize(v: [f64; 3]) -> [f64; 3] {
    for &c in &v {
        if c.abs() > 1e-12 {
            return if c < 0.0 { scale(v, -1.0) } else { v };
        }
    }
    v
}

/// Two unit vectors completing `w` to an orthonormal frame.
fn complement(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let u = if w[0].abs() > w[1].abs() {
        normalize([-w[2], 0.0, w[0]])
    } else {
        normalize([0.0, w[2], -w[1]])
    };
    (u, cross(w, u))
}

/// Eigenvector of a simple eigenvalue from the rows of `A - λI`.
fn isolated_vector(a: &Sym3, lambda: f64) -> [f64; 3] {
    let rows = a.to_rows();
    let r: [[f64; 3]; 3] = std::array::from_fn(|i| {
        let mut row = rows[i];
        row[i] -= lambda;
        row
    });
    let c = [cross(r[0], r[1]), cross(r[0], r[2]), cross(r[1], r[2])];
    let (best, norm2) = c
        .iter()
        .map(|v| (*v, dot(*v, *v)))
        .fold(([1.0, 0.0, 0.0], 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if norm2 > 0.0 {
        scale(best, 1.0 / norm2.sqrt())
    } else {
        // A = λI
        [1.0, 0.0, 0.0]
    }
}
