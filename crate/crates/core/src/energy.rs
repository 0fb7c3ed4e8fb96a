//! Discrete reduced free energy and its exact gradient.
//!
//! The elastic term sums squared forward differences over grid links, each
//! link weighted by the trapezoid weights of its two transverse coordinates.
//! Potentials use nodal trapezoid quadrature. Both are multiplied by the
//! cell volume, so for interior nodes the gradient is the 7-point Laplacian
//! stencil plus the pointwise potential derivative, times `h^3`.
//!
//! Reductions are done per z-slab and combined in slab order, which makes
//! totals bit-identical for any number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Grid, QField};
use crate::tensor::{grad_reduced_h, reduced_h, QTensor, ReducedParams};

/// Which bulk potential accompanies the elastic term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialMode {
    /// `t/2 (|Q|^2 - 1)^2 + λ(t) h(Q)` with `t` and `λ` from the reduced parameters.
    Full,
    /// `κ/2 (|Q|^2 - 1)^2` only.
    GinzburgLandau { kappa: f64 },
}

impl PotentialMode {
    pub fn validate(&self, rp: &ReducedParams) -> Result<()> {
        match *self {
            PotentialMode::Full if !(rp.t > 0.0) => {
                Err(Error::Domain(format!("full mode needs t > 0, got {}", rp.t)))
            }
            PotentialMode::GinzburgLandau { kappa } if !(kappa > 0.0 && kappa.is_finite()) => {
                Err(Error::Input(format!("kappa must be positive, got {kappa}")))
            }
            _ => Ok(()),
        }
    }

    /// `(coefficient of (|Q|^2-1)^2 / 2, coefficient of h)`.
    #[inline]
    fn coefficients(&self, rp: &ReducedParams) -> (f64, f64) {
        match *self {
            PotentialMode::Full => (rp.t, rp.lambda),
            PotentialMode::GinzburgLandau { kappa } => (kappa, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub elastic: f64,
    pub gl: f64,
    pub hterm: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn from_parts(elastic: f64, gl: f64, hterm: f64) -> Self {
        EnergyBreakdown {
            elastic,
            gl,
            hterm,
            total: elastic + gl + hterm,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.elastic.is_finite() && self.gl.is_finite() && self.hterm.is_finite()
    }
}

#[inline]
fn dist_sq(a: &QTensor, b: &QTensor) -> f64 {
    let mut s = 0.0;
    for c in 0..5 {
        let d = a.0[c] - b.0[c];
        s += d * d;
    }
    s
}

/// Unscaled partial sums `[Σ w_link |ΔQ|^2, Σ w (|Q|^2-1)^2, Σ w h]` for slab `k`.
fn slab_sums(field: &QField, k: usize, with_h: bool) -> [f64; 3] {
    let g = field.grid;
    let n = g.n();
    let v = &field.values;
    let wk = g.axis_weight(k);
    let (mut el, mut gl, mut hm) = (0.0, 0.0, 0.0);
    for j in 0..n {
        let wj = g.axis_weight(j);
        let row = n * (j + n * k);
        for i in 0..n {
            let idx = row + i;
            let q = &v[idx];
            let wi = g.axis_weight(i);
            let w = wi * wj * wk;
            let n2 = q.norm_sq();
            gl += w * (n2 - 1.0) * (n2 - 1.0);
            if with_h {
                hm += w * reduced_h(q);
            }
            if i + 1 < n {
                el += wj * wk * dist_sq(q, &v[idx + 1]);
            }
            if j + 1 < n {
                el += wi * wk * dist_sq(q, &v[idx + n]);
            }
            if k + 1 < n {
                el += wi * wj * dist_sq(q, &v[idx + n * n]);
            }
        }
    }
    [el, gl, hm]
}

fn reduce_slabs(field: &QField, with_h: bool) -> [f64; 3] {
    let n = field.grid.n();
    let partials: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|k| slab_sums(field, k, with_h))
        .collect();
    partials.iter().fold([0.0; 3], |acc, p| {
        [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
    })
}

/// Discrete energy of `field`, split into elastic and potential parts.
pub fn energy(field: &QField, rp: &ReducedParams, mode: PotentialMode) -> EnergyBreakdown {
    let h = field.grid.spacing();
    let vol = h * h * h;
    let (coef, lambda) = mode.coefficients(rp);
    let [el, gl, hm] = reduce_slabs(field, lambda != 0.0);
    EnergyBreakdown::from_parts(
        0.5 * rp.l_tilde * h * el,
        0.5 * coef * vol * gl,
        lambda * vol * hm,
    )
}

/// Trapezoid quadrature of the reduced potential `h` over the grid.
pub fn h_mass(field: &QField) -> f64 {
    field.grid.cell_volume() * reduce_slabs(field, true)[2]
}

/// Derivative of the potential density with respect to `q`.
#[inline]
fn potential_grad(q: &QTensor, coef: f64, lambda: f64) -> QTensor {
    let n2 = q.norm_sq();
    let mut g = *q * (2.0 * coef * (n2 - 1.0));
    if lambda != 0.0 {
        g += grad_reduced_h(q) * lambda;
    }
    g
}

/// Exact derivative at a node touching the faces, using the general link weights.
fn face_node_gradient(field: &QField, node: [usize; 3], coef: f64, lambda: f64, l_tilde: f64) -> QTensor {
    let g = field.grid;
    let n = g.n();
    let h = g.spacing();
    let q = field.get(node);
    let mut out = potential_grad(&q, coef, lambda) * (h * h * h * g.node_weight(node));
    for axis in 0..3 {
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        let w_link = g.axis_weight(node[a]) * g.axis_weight(node[b]);
        for step in [-1isize, 1] {
            let c = node[axis] as isize + step;
            if c < 0 || c >= n as isize {
                continue;
            }
            let mut nb = node;
            nb[axis] = c as usize;
            out += (q - field.get(nb)) * (l_tilde * h * w_link);
        }
    }
    out
}

/// Gradient of [`energy`] with respect to every non-boundary node's coordinates.
///
/// Entries at masked boundary nodes are zero. The returned field carries the
/// input's boundary mask.
pub fn gradient(field: &QField, rp: &ReducedParams, mode: PotentialMode) -> QField {
    let mut out = QField {
        grid: field.grid,
        values: vec![QTensor::ZERO; field.values.len()],
        boundary_mask: field.boundary_mask.clone(),
    };
    gradient_into(field, rp, mode, &mut out.values);
    out
}

/// Writes the gradient into `out`, which must have one entry per node.
pub fn gradient_into(field: &QField, rp: &ReducedParams, mode: PotentialMode, out: &mut [QTensor]) {
    let g: Grid = field.grid;
    let n = g.n();
    let h = g.spacing();
    let vol = h * h * h;
    let (coef, lambda) = mode.coefficients(rp);
    let el = rp.l_tilde * h;
    let v = &field.values;
    let mask = &field.boundary_mask;
    let nn = n * n;

    out.par_chunks_mut(nn).enumerate().for_each(|(k, slab)| {
        for j in 0..n {
            for i in 0..n {
                let local = i + n * j;
                let idx = local + nn * k;
                if mask[idx] {
                    slab[local] = QTensor::ZERO;
                    continue;
                }
                let node = [i, j, k];
                if g.is_boundary(node) {
                    slab[local] = face_node_gradient(field, node, coef, lambda, rp.l_tilde);
                    continue;
                }
                let q = &v[idx];
                let mut lap = [0.0; 5];
                let nbrs = [
                    &v[idx - 1],
                    &v[idx + 1],
                    &v[idx - n],
                    &v[idx + n],
                    &v[idx - nn],
                    &v[idx + nn],
                ];
                for c in 0..5 {
                    let mut s = 6.0 * q.0[c];
                    for nb in &nbrs {
                        s -= nb.0[c];
                    }
                    lap[c] = s;
                }
                let p = potential_grad(q, coef, lambda);
                slab[local] = QTensor(std::array::from_fn(|c| el * lap[c] + vol * p.0[c]));
            }
        }
    });
}

/// Root mean square of the gradient entries over non-boundary nodes.
pub fn residual_norm(g: &QField) -> f64 {
    let (sum, count) = g
        .values
        .iter()
        .zip(&g.boundary_mask)
        .filter(|(_, &b)| !b)
        .fold((0.0, 0usize), |(s, c), (q, _)| (s + q.norm_sq(), c + 1));
    if count == 0 {
        return 0.0;
    }
    (sum / (5 * count) as f64).sqrt()
}
