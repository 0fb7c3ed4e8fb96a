//! Melting and biaxial-escape diagnostics: biaxiality, order-parameter minima,
//! classification of minimizers and blow-up resampling around a defect.

use std::fmt;

use crate::eigen::eigensystem;
use crate::error::{Error, Result};
use crate::field::{DirectorField, Grid, NodeIndex, QField};
use crate::tensor::QTensor;

pub use crate::energy::h_mass;

/// Below this norm a tensor is treated as zero: `β = 0` and the director is flagged.
pub const ZERO_NORM: f64 = 1e-8;

/// `1 - 6 tr(Q^3)^2 / |Q|^6`, with `β(0) := 0`.
pub fn biaxiality(q: &QTensor) -> f64 {
    let n2 = q.norm_sq();
    if n2.sqrt() <= ZERO_NORM {
        return 0.0;
    }
    let tr3 = q.trace_cube();
    (1.0 - 6.0 * tr3 * tr3 / (n2 * n2 * n2)).max(0.0)
}

/// Nodewise biaxiality and sign-normalized leading eigenvector.
pub fn beta_field(field: &QField) -> DirectorField {
    let len = field.values.len();
    let mut directors = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    let mut degenerate = Vec::with_capacity(len);
    for q in &field.values {
        if q.norm() <= ZERO_NORM {
            directors.push([0.0, 0.0, 1.0]);
            beta.push(0.0);
            degenerate.push(true);
        } else {
            directors.push(eigensystem(q).vectors[0]);
            beta.push(biaxiality(q));
            degenerate.push(false);
        }
    }
    DirectorField {
        grid: field.grid,
        directors,
        beta,
        degenerate,
    }
}

/// Minimum of `|Q|` over non-boundary nodes and the first node attaining it.
pub fn min_norm(field: &QField) -> (f64, NodeIndex) {
    let mut best = (f64::INFINITY, [0, 0, 0]);
    for (idx, q) in field.values.iter().enumerate() {
        if field.boundary_mask[idx] {
            continue;
        }
        let v = q.norm();
        if v < best.0 {
            best = (v, field.grid.node(idx));
        }
    }
    best
}

/// Maximum of `β` over non-boundary nodes and the first node attaining it.
pub fn max_beta(field: &QField) -> (f64, NodeIndex) {
    let mut best = (f64::NEG_INFINITY, [0, 0, 0]);
    for (idx, q) in field.values.iter().enumerate() {
        if field.boundary_mask[idx] {
            continue;
        }
        let b = biaxiality(q);
        if b > best.0 {
            best = (b, field.grid.node(idx));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Melting,
    BiaxialEscape,
    SmoothUniaxial,
    Ambiguous,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Melting => "melting",
            Classification::BiaxialEscape => "biaxial_escape",
            Classification::SmoothUniaxial => "smooth_uniaxial",
            Classification::Ambiguous => "ambiguous",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub melt: f64,
    pub escape: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            melt: 0.05,
            escape: 0.95,
        }
    }
}

/// Below this `max β` a non-vanishing field counts as uniaxial.
pub const UNIAXIAL_BETA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscapeReport {
    pub min_norm: f64,
    pub min_norm_location: NodeIndex,
    pub max_beta: f64,
    pub max_beta_location: NodeIndex,
    pub classification: Classification,
    pub thresholds: Thresholds,
}

pub fn classify(field: &QField, thresholds: Thresholds) -> Result<EscapeReport> {
    let Thresholds { melt, escape } = thresholds;
    if !(melt > 0.0 && melt < 1.0 && escape > 0.0 && escape < 1.0) {
        return Err(Error::Input(format!(
            "thresholds must lie in (0, 1), got melt {melt}, escape {escape}"
        )));
    }
    let (min_norm, min_norm_location) = min_norm(field);
    let (max_beta, max_beta_location) = max_beta(field);
    let classification = if min_norm < melt {
        Classification::Melting
    } else if max_beta >= escape {
        Classification::BiaxialEscape
    } else if max_beta < UNIAXIAL_BETA {
        Classification::SmoothUniaxial
    } else {
        Classification::Ambiguous
    };
    Ok(EscapeReport {
        min_norm,
        min_norm_location,
        max_beta,
        max_beta_location,
        classification,
        thresholds,
    })
}

/// Trilinear interpolation of `field` at physical point `x`; `None` outside the cube.
pub fn interpolate(field: &QField, x: [f64; 3]) -> Option<QTensor> {
    let g = field.grid;
    let h = g.spacing();
    let last = g.n() - 1;
    let slack = 1e-9 * h;
    let mut base = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let s = (x[a] + g.half_width()) / h;
        if !(s >= -slack && s <= last as f64 + slack) {
            return None;
        }
        let s = s.clamp(0.0, last as f64);
        let i = (s.floor() as usize).min(last - 1);
        base[a] = i;
        frac[a] = s - i as f64;
    }
    let mut acc = QTensor::ZERO;
    for dz in 0..2 {
        for dy in 0..2 {
            for dx in 0..2 {
                let w = (if dx == 1 { frac[0] } else { 1.0 - frac[0] })
                    * (if dy == 1 { frac[1] } else { 1.0 - frac[1] })
                    * (if dz == 1 { frac[2] } else { 1.0 - frac[2] });
                if w != 0.0 {
                    acc += field.get([base[0] + dx, base[1] + dy, base[2] + dz]) * w;
                }
            }
        }
    }
    Some(acc)
}

/// Resamples `Q(center + x / sqrt(t))` on the nodes `x` of `out_grid`.
pub fn blow_up_extract(field: &QField, center: [f64; 3], t: f64, out_grid: Grid) -> Result<QField> {
    if !(t > 0.0) {
        return Err(Error::Input(format!("blow-up factor needs t > 0, got {t}")));
    }
    let inv = 1.0 / t.sqrt();
    let mut values = Vec::with_capacity(out_grid.len());
    for idx in 0..out_grid.len() {
        let y = out_grid.coord(out_grid.node(idx));
        let x = [
            center[0] + y[0] * inv,
            center[1] + y[1] * inv,
            center[2] + y[2] * inv,
        ];
        let q = interpolate(field, x).ok_or_else(|| {
            Error::Domain(format!("blow-up window leaves the domain at {x:?}"))
        })?;
        values.push(q);
    }
    Ok(QField {
        grid: out_grid,
        values,
        boundary_mask: vec![false; out_grid.len()],
    })
}
