//! Uniform-grid tensor fields on the cube `[-w, w]^3`, Dirichlet boundary data
//! and initial guesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{norm3, QTensor, UNIT_TOL};

/// Grid coordinates `(i, j, k)` of a node, `i` running along x.
pub type NodeIndex = [usize; 3];

/// A uniform grid with `n` points per axis over `[-half_width, half_width]^3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
}

impl Grid {
    /// `n` must be odd and at least 9 so that the origin is a node.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 9 || n % 2 == 0 {
            return Err(Error::Input(format!(
                "grid size must be odd and >= 9, got {n}"
            )));
        }
        Self::with_any_size(n, half_width)
    }

    /// Like [`Grid::new`] but only requires `n >= 2`; used for analysis grids.
    pub fn with_any_size(n: usize, half_width: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("grid needs at least 2 points, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Input(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        Ok(Grid { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, [i, j, k]: NodeIndex) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn node(&self, idx: usize) -> NodeIndex {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    pub fn coord(&self, [i, j, k]: NodeIndex) -> [f64; 3] {
        let h = self.spacing();
        let w = self.half_width;
        [i as f64 * h - w, j as f64 * h - w, k as f64 * h - w]
    }

    pub fn is_boundary(&self, [i, j, k]: NodeIndex) -> bool {
        let last = self.n - 1;
        [i, j, k].iter().any(|&c| c == 0 || c == last)
    }

    /// Number of nodes not on a face.
    pub fn interior_count(&self) -> usize {
        (self.n - 2).pow(3)
    }

    /// Distance, in nodes, to the nearest face.
    pub fn boundary_distance(&self, node: NodeIndex) -> usize {
        let last = self.n - 1;
        node.iter().map(|&c| c.min(last - c)).min().unwrap_or(0)
    }

    /// Trapezoid weight of index `i` along one axis.
    #[inline]
    pub fn axis_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5
        } else {
            1.0
        }
    }

    /// Product trapezoid weight: 1/2 on faces, 1/4 on edges, 1/8 on corners.
    pub fn node_weight(&self, [i, j, k]: NodeIndex) -> f64 {
        self.axis_weight(i) * self.axis_weight(j) * self.axis_weight(k)
    }

    pub fn center(&self) -> NodeIndex {
        let c = self.n / 2;
        [c, c, c]
    }
}

/// A tensor per grid node with a frozen boundary mask.
#[derive(Clone, Debug, PartialEq)]
pub struct QField {
    pub grid: Grid,
    pub values: Vec<QTensor>,
    pub boundary_mask: Vec<bool>,
}

impl QField {
    /// All-zero field with the six cube faces marked as boundary.
    pub fn zeros(grid: Grid) -> Self {
        let boundary_mask = (0..grid.len()).map(|i| grid.is_boundary(grid.node(i))).collect();
        QField {
            grid,
            values: vec![QTensor::ZERO; grid.len()],
            boundary_mask,
        }
    }

    /// Field with the same value everywhere, faces marked as boundary.
    pub fn constant(grid: Grid, q: QTensor) -> Self {
        let mut f = Self::zeros(grid);
        f.values.fill(q);
        f
    }

    /// Field from a closure of position; nothing is marked as boundary.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> QTensor) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coord(grid.node(i)))).collect();
        QField {
            grid,
            values,
            boundary_mask: vec![false; grid.len()],
        }
    }

    pub fn get(&self, node: NodeIndex) -> QTensor {
        self.values[self.grid.index(node)]
    }

    pub fn set(&mut self, node: NodeIndex, q: QTensor) {
        let idx = self.grid.index(node);
        self.values[idx] = q;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(QTensor::is_finite)
    }

    /// Sets the interior (non-boundary) nodes from a closure of position.
    pub fn fill_interior(&mut self, mut f: impl FnMut([f64; 3]) -> QTensor) {
        for idx in 0..self.values.len() {
            if !self.boundary_mask[idx] {
                self.values[idx] = f(self.grid.coord(self.grid.node(idx)));
            }
        }
    }

    /// `true` when every boundary node holds bit-identical values in both fields.
    pub fn same_boundary(&self, other: &QField) -> bool {
        self.grid == other.grid
            && self.boundary_mask == other.boundary_mask
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.boundary_mask)
                .filter(|(_, &b)| b)
                .all(|((a, b), _)| a.0.map(f64::to_bits) == b.0.map(f64::to_bits))
    }

    /// Multiplies every node value, boundary included.
    pub fn scaled(&self, s: f64) -> QField {
        let mut out = self.clone();
        for q in &mut out.values {
            *q = *q * s;
        }
        out
    }
}

/// Per-node unit eigenvector and biaxiality.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectorField {
    pub grid: Grid,
    pub directors: Vec<[f64; 3]>,
    pub beta: Vec<f64>,
    /// Set where `|Q|` is too small for the director to mean anything.
    pub degenerate: Vec<bool>,
}

fn check_unit(n: [f64; 3]) -> Result<()> {
    let norm = norm3(n);
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Input(format!("director {n:?} is not a unit vector")));
    }
    Ok(())
}

/// Boundary data `sqrt(3/2)(n ⊗ n - I/3)` for a director map `n(x)` on the faces; interior zero.
///
/// The closure receives boundary positions and must return unit vectors.
pub fn director_boundary(grid: Grid, mut director: impl FnMut([f64; 3]) -> [f64; 3]) -> Result<QField> {
    let mut field = QField::zeros(grid);
    for idx in 0..grid.len() {
        if field.boundary_mask[idx] {
            let n = director(grid.coord(grid.node(idx)));
            field.values[idx] = QTensor::vacuum(n)?;
        }
    }
    Ok(field)
}

/// Radial director `x / |x|`; undefined at the origin.
pub fn radial_director(x: [f64; 3]) -> [f64; 3] {
    let r = norm3(x);
    [x[0] / r, x[1] / r, x[2] / r]
}

/// Degree-one hedgehog boundary data `n_b(x) = x / |x|`.
pub fn hedgehog_boundary(grid: Grid) -> QField {
    director_boundary(grid, radial_director).expect("x/|x| is a unit vector away from the origin")
}

/// Uniform boundary data `sqrt(3/2)(n0 ⊗ n0 - I/3)`; interior zero.
pub fn constant_boundary(grid: Grid, n0: [f64; 3]) -> Result<QField> {
    check_unit(n0)?;
    director_boundary(grid, |_| n0)
}

/// Uniaxial radial field `rho(|x|) sqrt(3/2)(x̂ ⊗ x̂ - I/3)` with `rho(r) = min(r / core_radius, 1)`.
pub fn init_radial_ansatz(field: &QField, core_radius: f64) -> Result<QField> {
    if !(core_radius > 0.0 && core_radius <= field.grid.half_width()) {
        return Err(Error::Input(format!(
            "core radius {core_radius} outside (0, {}]",
            field.grid.half_width()
        )));
    }
    let mut out = field.clone();
    out.fill_interior(|x| {
        let r = norm3(x);
        if r == 0.0 {
            return QTensor::ZERO;
        }
        let rho = (r / core_radius).min(1.0);
        QTensor::from_director_unchecked(radial_director(x), rho * 1.5f64.sqrt())
    });
    Ok(out)
}

/// Interior set to the vacuum tensor of `n0`; boundary untouched.
pub fn init_constant(field: &QField, n0: [f64; 3]) -> Result<QField> {
    check_unit(n0)?;
    let q = QTensor::vacuum(n0)?;
    let mut out = field.clone();
    out.fill_interior(|_| q);
    Ok(out)
}

/// Adds a seeded perturbation of norm at most `amplitude` to every interior node.
///
/// Draws five uniforms in `[-1, 1)` per interior node, in node order, from a
/// ChaCha8 stream keyed by `seed`, so results are platform independent.
pub fn perturb(field: &QField, seed: u64, amplitude: f64) -> Result<QField> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::Input(format!("amplitude {amplitude} outside [0, 1]")));
    }
    let mut out = field.clone();
    if amplitude == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = amplitude / 5f64.sqrt();
    for (q, &b) in out.values.iter_mut().zip(&field.boundary_mask) {
        if b {
            continue;
        }
        let d: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        *q += QTensor(d) * s;
    }
    Ok(out)
}

/// Radial ansatz plus a seeded perturbation.
pub fn init_random(field: &QField, core_radius: f64, seed: u64, amplitude: f64) -> Result<QField> {
    perturb(&init_radial_ansatz(field, core_radius)?, seed, amplitude)
}

/// Signed solid angle of the spherical triangle `(a, b, c)`.
fn solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let cross = [
        b[1] * c[2] - b[2] * c[1],
        b[2] * c[0] - b[0] * c[2],
        b[0] * c[1] - b[1] * c[0],
    ];
    let triple = a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2];
    let d = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let denom = 1.0 + d(a, b) + d(b, c) + d(c, a);
    2.0 * triple.atan2(denom)
}

/// Topological degree of a unit-vector map restricted to the cube faces.
///
/// Each face square is split into two triangles oriented by the outward
/// normal; the signed solid angles of their images on the sphere are summed
/// and divided by `4 pi`.
pub fn boundary_degree(grid: Grid, mut director: impl FnMut(NodeIndex) -> [f64; 3]) -> f64 {
    let last = grid.n() - 1;
    let mut total = 0.0;
    for axis in 0..3 {
        for (face, sign) in [(0usize, -1.0f64), (last, 1.0)] {
            // (ua, va, axis) is right-handed, so counterclockwise in (ua, va) faces +axis
            let (ua, va) = ((axis + 1) % 3, (axis + 2) % 3);
            for a in 0..last {
                for b in 0..last {
                    let at = |da: usize, db: usize| {
                        let mut node = [0usize; 3];
                        node[axis] = face;
                        node[ua] = a + da;
                        node[va] = b + db;
                        node
                    };
                    let quad = [at(0, 0), at(1, 0), at(1, 1), at(0, 1)].map(&mut director);
                    total += sign * solid_angle(quad[0], quad[1], quad[2]);
                    total += sign * solid_angle(quad[0], quad[2], quad[3]);
                }
            }
        }
    }
    total / (4.0 * std::f64::consts::PI)
}

/// Degree of the boundary trace of `field`, using top eigenvectors as directors.
///
/// Eigenvectors are only defined up to sign, so they are first lifted to a
/// continuous vector field by a breadth-first walk over the face nodes,
/// flipping each new node to agree with the neighbor it was reached from.
/// Reversing the lift reverses the sign, so the magnitude is returned.
pub fn field_boundary_degree(field: &QField) -> f64 {
    let g = field.grid;
    let n = g.n() as isize;
    let mut lifted: Vec<Option<[f64; 3]>> = vec![None; g.len()];
    let start = 0;
    lifted[start] = Some(crate::eigen::eigensystem(&field.values[start]).vectors[0]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(idx) = queue.pop_front() {
        let here = lifted[idx].expect("queued nodes are lifted");
        let node = g.node(idx);
        for axis in 0..3 {
            for step in [-1isize, 1] {
                let c = node[axis] as isize + step;
                if c < 0 || c >= n {
                    continue;
                }
                let mut nb = node;
                nb[axis] = c as usize;
                let nidx = g.index(nb);
                if !g.is_boundary(nb) || lifted[nidx].is_some() {
                    continue;
                }
                let v = crate::eigen::eigensystem(&field.values[nidx]).vectors[0];
                let aligned = if v[0] * here[0] + v[1] * here[1] + v[2] * here[2] < 0.0 {
                    [-v[0], -v[1], -v[2]]
                } else {
                    v
                };
                lifted[nidx] = Some(aligned);
                queue.push_back(nidx);
            }
        }
    }
    boundary_degree(g, |node| lifted[g.index(node)].unwrap_or([0.0, 0.0, 1.0])).abs()
}
