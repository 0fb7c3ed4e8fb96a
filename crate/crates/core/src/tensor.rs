//! Algebra on the five-dimensional space of symmetric traceless 3x3 matrices.
//!
//! A [`QTensor`] stores coordinates in the orthonormal basis
//!
//! ```text
//! E1 = diag(1, -1, 0) / sqrt(2)      E3 = (exy + eyx) / sqrt(2)
//! E2 = diag(1, 1, -2) / sqrt(6)      E4 = (exz + ezx) / sqrt(2)
//!                                    E5 = (eyz + ezy) / sqrt(2)
//! ```
//!
//! so that the Frobenius norm of the matrix is the Euclidean norm of the
//! coordinates. The reduced-units potential `h`, its intrinsic gradient and
//! the physical to reduced parameter map live here as well.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
fn sqrt6() -> f64 {
    6f64.sqrt()
}

/// Coefficient of `tr(Q^3)` in the reduced potential, `2 sqrt(2) / sqrt(3)`.
#[inline]
fn cubic_coeff() -> f64 {
    2.0 * SQRT2 / 3f64.sqrt()
}

/// Norm tolerance for unit direction vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// A symmetric 3x3 matrix stored as its upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Sym3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3 {
        xx: 0.0,
        yy: 0.0,
        zz: 0.0,
        xy: 0.0,
        xz: 0.0,
        yz: 0.0,
    };

    pub fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Sym3 {
            xx: m[0][0],
            yy: m[1][1],
            zz: m[2][2],
            xy: 0.5 * (m[0][1] + m[1][0]),
            xz: 0.5 * (m[0][2] + m[2][0]),
            yz: 0.5 * (m[1][2] + m[2][1]),
        }
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    /// `n ⊗ n`.
    pub fn outer(n: [f64; 3]) -> Self {
        Sym3 {
            xx: n[0] * n[0],
            yy: n[1] * n[1],
            zz: n[2] * n[2],
            xy: n[0] * n[1],
            xz: n[0] * n[2],
            yz: n[1] * n[2],
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz)
    }

    pub fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    /// The matrix square, which is again symmetric.
    pub fn square(&self) -> Self {
        let Sym3 {
            xx,
            yy,
            zz,
            xy,
            xz,
            yz,
        } = *self;
        Sym3 {
            xx: xx * xx + xy * xy + xz * xz,
            yy: xy * xy + yy * yy + yz * yz,
            zz: xz * xz + yz * yz + zz * zz,
            xy: xx * xy + xy * yy + xz * yz,
            xz: xx * xz + xy * yz + xz * zz,
            yz: xy * xz + yy * yz + yz * zz,
        }
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        [
            self.xx * v[0] + self.xy * v[1] + self.xz * v[2],
            self.xy * v[0] + self.yy * v[1] + self.yz * v[2],
            self.xz * v[0] + self.yz * v[1] + self.zz * v[2],
        ]
    }

    /// `R A R^T` for a (not necessarily orthogonal) 3x3 matrix `R`.
    pub fn conjugate(&self, r: &[[f64; 3]; 3]) -> Self {
        let a = self.to_rows();
        let mut ra = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                ra[i][j] = (0..3).map(|k| r[i][k] * a[k][j]).sum();
            }
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| ra[i][k] * r[j][k]).sum();
            }
        }
        Sym3::from_rows(out)
    }

    pub fn max_abs_diff(&self, other: &Sym3) -> f64 {
        [
            self.xx - other.xx,
            self.yy - other.yy,
            self.zz - other.zz,
            self.xy - other.xy,
            self.xz - other.xz,
            self.yz - other.yz,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// A point of the space of symmetric traceless 3x3 matrices, in basis coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct QTensor(pub [f64; 5]);

impl QTensor {
    pub const ZERO: QTensor = QTensor([0.0; 5]);

    pub fn new(a: [f64; 5]) -> Self {
        QTensor(a)
    }

    /// The `i`-th basis matrix `E_{i+1}`.
    pub fn basis(i: usize) -> Self {
        let mut a = [0.0; 5];
        a[i] = 1.0;
        QTensor(a)
    }

    /// Projects a symmetric matrix onto the space; the trace part is discarded.
    pub fn from_matrix(m: &Sym3) -> Self {
        QTensor([
            (m.xx - m.yy) * INV_SQRT2,
            (m.xx + m.yy - 2.0 * m.zz) / sqrt6(),
            SQRT2 * m.xy,
            SQRT2 * m.xz,
            SQRT2 * m.yz,
        ])
    }

    pub fn to_matrix(&self) -> Sym3 {
        let [a1, a2, a3, a4, a5] = self.0;
        let d = a2 / sqrt6();
        Sym3 {
            xx: a1 * INV_SQRT2 + d,
            yy: -a1 * INV_SQRT2 + d,
            zz: -2.0 * d,
            xy: a3 * INV_SQRT2,
            xz: a4 * INV_SQRT2,
            yz: a5 * INV_SQRT2,
        }
    }

    /// `s (n ⊗ n - I/3)`; `n` must be a unit vector.
    pub fn from_director(n: [f64; 3], s: f64) -> Result<Self> {
        let norm = norm3(n);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Input(format!(
                "director {n:?} is not a unit vector (|n| = {norm})"
            )));
        }
        Ok(Self::from_director_unchecked(n, s))
    }

    /// Like [`QTensor::from_director`] without the unit-length check.
    pub(crate) fn from_director_unchecked(n: [f64; 3], s: f64) -> Self {
        // the projection drops the -I/3 part
        QTensor::from_matrix(&Sym3::outer(n)) * s
    }

    /// The point `sqrt(3/2) (n ⊗ n - I/3)` of the reduced vacuum manifold.
    pub fn vacuum(n: [f64; 3]) -> Result<Self> {
        Self::from_director(n, 1.5f64.sqrt())
    }

    pub fn dot(&self, other: &QTensor) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `tr(Q^3)`, equal to `3 det Q` for traceless `Q`.
    pub fn trace_cube(&self) -> f64 {
        3.0 * self.to_matrix().det()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    /// Applies `Q -> R Q R^T`.
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> Self {
        QTensor::from_matrix(&self.to_matrix().conjugate(r))
    }
}

impl Add for QTensor {
    type Output = QTensor;
    fn add(mut self, rhs: QTensor) -> QTensor {
        self += rhs;
        self
    }
}

impl AddAssign for QTensor {
    fn add_assign(&mut self, rhs: QTensor) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for QTensor {
    type Output = QTensor;
    fn sub(mut self, rhs: QTensor) -> QTensor {
        self -= rhs;
        self
    }
}

impl SubAssign for QTensor {
    fn sub_assign(&mut self, rhs: QTensor) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl Mul<f64> for QTensor {
    type Output = QTensor;
    fn mul(self, rhs: f64) -> QTensor {
        QTensor(self.0.map(|a| a * rhs))
    }
}

impl Neg for QTensor {
    type Output = QTensor;
    fn neg(self) -> QTensor {
        self * -1.0
    }
}

impl Index<usize> for QTensor {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for QTensor {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Physical material constants of the bulk and elastic energies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
    pub l: f64,
    pub t: f64,
    pub t_star: f64,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("b", self.b),
            ("c", self.c),
            ("L", self.l),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.t.is_finite() || !self.t_star.is_finite() {
            return Err(Error::Input("temperatures must be finite".into()));
        }
        Ok(())
    }
}

/// Nondimensional parameters of the rescaled energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    /// Reduced temperature.
    pub t: f64,
    /// Reduced elastic constant.
    pub l_tilde: f64,
    /// Weight of the `h` potential, `lambda_of_t(t)`.
    pub lambda: f64,
    /// Factor mapping physical tensors to reduced ones.
    pub qscale: f64,
}

impl ReducedParams {
    /// Builds reduced parameters directly from `t` and `L̃`. `qscale` is left at 1.
    pub fn from_reduced(t: f64, l_tilde: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("reduced temperature must be > 0, got {t}")));
        }
        if !(l_tilde > 0.0 && l_tilde.is_finite()) {
            return Err(Error::Input(format!("Ltilde must be > 0, got {l_tilde}")));
        }
        Ok(ReducedParams {
            t,
            l_tilde,
            lambda: lambda_of_t(t)?,
            qscale: 1.0,
        })
    }
}

/// The positive order parameter of the bulk minimizers.
pub fn s_star(p: &MaterialParams) -> Result<f64> {
    let disc = p.b * p.b - 24.0 * p.alpha * (p.t - p.t_star) * p.c;
    if !(disc >= 0.0) {
        return Err(Error::Domain(format!(
            "negative discriminant {disc}: temperature above admissible range"
        )));
    }
    Ok((p.b + disc.sqrt()) / (4.0 * p.c))
}

/// Bulk free-energy density in physical units.
pub fn bulk_f(p: &MaterialParams, q: &QTensor) -> f64 {
    let n2 = q.norm_sq();
    0.5 * p.alpha * (p.t - p.t_star) * n2 - p.b / 3.0 * q.trace_cube() + 0.25 * p.c * n2 * n2
}

/// `(sqrt(24 t + 1) + 1) / 12`.
pub fn lambda_of_t(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("lambda(t) needs t >= 0, got {t}")));
    }
    Ok(((24.0 * t + 1.0).sqrt() + 1.0) / 12.0)
}

/// Maps physical constants to reduced ones. Requires `T < T*`.
pub fn reduce(p: &MaterialParams) -> Result<ReducedParams> {
    p.validate()?;
    if p.t >= p.t_star {
        return Err(Error::Domain(format!(
            "T = {} must lie below T* = {}",
            p.t, p.t_star
        )));
    }
    let t = -p.alpha * (p.t - p.t_star) * p.c / (p.b * p.b);
    Ok(ReducedParams {
        t,
        l_tilde: 3.0 * p.c * p.l / (p.b * p.b),
        lambda: lambda_of_t(t)?,
        qscale: 1.5f64.sqrt() / s_star(p)?,
    })
}

/// The nonnegative reduced potential `h`, vanishing exactly on the reduced vacuum manifold.
pub fn reduced_h(q: &QTensor) -> f64 {
    let n2 = q.norm_sq();
    // cancellation near the vacuum manifold can leave a negative rounding residue
    (1.0 / 6.0 - cubic_coeff() * q.trace_cube() + 0.5 * n2 * n2).max(0.0)
}

/// Gradient of [`reduced_h`] taken within the traceless subspace.
pub fn grad_reduced_h(q: &QTensor) -> QTensor {
    // Projecting 3 Q^2 onto the basis removes its trace, i.e. subtracts |Q|^2 I.
    let sq = QTensor::from_matrix(&q.to_matrix().square());
    sq * (-3.0 * cubic_coeff()) + *q * (2.0 * q.norm_sq())
}
