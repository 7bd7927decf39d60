//! Uniform origin-centred grids in one or two dimensions and nonnegative
//! functions sampled on them.
//!
//! A [`GridFn`] stands for the Catmull–Rom cubic interpolant of its node
//! values (tensor-product in 2-D), extended by zero outside the grid. All
//! integrals and moments are integrals of that model, which keeps them
//! consistent with the quadratures in [`crate::convolution`]. Order-based
//! operations (sup-convolution, level sets) use [`GridFn::eval_linear`]
//! instead, since the cubic model overshoots at jumps.

use serde::{Deserialize, Serialize};

use crate::error::check_range;
use crate::{Error, Result, SymMatrix};

/// Four-point Gauss–Legendre rule mapped to `[0, 1]`.
pub(crate) const GL4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_9),
    (0.330_009_478_207_571_9, 0.326_072_577_431_273_1),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_1),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_9),
];

/// Pairs whose smaller value is below `LOG_CONCAVITY_FLOOR * max` are not
/// tested: their logarithms are dominated by quadrature noise.
pub const LOG_CONCAVITY_FLOOR: f64 = 1e-8;
/// Allowed violation of `ln f(mid) >= (ln f(x) + ln f(y)) / 2`.
pub const LOG_CONCAVITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    spacing: f64,
    half_nodes: usize,
}

impl Grid {
    /// Grid with nodes `k * spacing` for `|k| <= half_extent / spacing`
    /// along each axis; the ratio must be an integer.
    pub fn new(dim: usize, spacing: f64, half_extent: f64) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::GridMismatch(format!("grids are 1-D or 2-D, got dimension {dim}")));
        }
        check_range("spacing", spacing, spacing > 0.0, "> 0")?;
        check_range("half_extent", half_extent, half_extent > 0.0, "> 0")?;
        let ratio = half_extent / spacing;
        let half_nodes = ratio.round();
        if (ratio - half_nodes).abs() > 1e-9 * ratio.max(1.0) || half_nodes < 2.0 {
            return Err(Error::GridMismatch(format!(
                "half extent {half_extent} must be a multiple (>= 2) of the spacing {spacing}"
            )));
        }
        Ok(Grid { dim, spacing, half_nodes: half_nodes as usize })
    }

    /// `X = 8`, `h = 1/64`: 1025 nodes.
    pub fn default_1d() -> Self {
        Grid { dim: 1, spacing: 1.0 / 64.0, half_nodes: 512 }
    }

    /// `X = 6`, `h = 1/16`: 193 × 193 nodes.
    pub fn default_2d() -> Self {
        Grid { dim: 2, spacing: 1.0 / 16.0, half_nodes: 96 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_extent(&self) -> f64 {
        self.half_nodes as f64 * self.spacing
    }

    pub fn half_nodes(&self) -> usize {
        self.half_nodes
    }

    /// Nodes per axis.
    pub fn axis_len(&self) -> usize {
        2 * self.half_nodes + 1
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axis_coord(&self, j: usize) -> f64 {
        (j as f64 - self.half_nodes as f64) * self.spacing
    }

    /// Per-axis indices of a flat node index (row-major, first axis slowest).
    pub fn node_indices(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.axis_len(), idx % self.axis_len()]
        }
    }

    /// Coordinates of a node; the second entry is 0 in 1-D.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.node_indices(idx);
        if self.dim == 1 {
            [self.axis_coord(i), 0.0]
        } else {
            [self.axis_coord(i), self.axis_coord(j)]
        }
    }

    /// Number of nodes between `idx` and the nearest edge of the grid.
    fn edge_distance(&self, idx: usize) -> usize {
        let last = self.axis_len() - 1;
        let [i, j] = self.node_indices(idx);
        let d = i.min(last - i);
        if self.dim == 1 {
            d
        } else {
            d.min(j.min(last - j))
        }
    }

    /// Volume element `h^dim` of the trapezoid rule.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        let same = self.dim == other.dim
            && self.half_nodes == other.half_nodes
            && (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing;
        if same {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// The reference measure of an integral or moment.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Lebesgue,
    /// Centred Gaussian probability measure with this covariance.
    Gaussian(SymMatrix),
}

impl Weight {
    pub fn standard(dim: usize) -> Self {
        Weight::Gaussian(SymMatrix::identity(dim))
    }
}

/// A [`Weight`] prepared for evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    dim: usize,
    gauss: Option<GaussParams>,
}

#[derive(Clone, Debug)]
struct GaussParams {
    precision: [f64; 3],
    norm: f64,
    sd: [f64; 2],
}

/// Multiples of the marginal standard deviation beyond which a Gaussian
/// factor is treated as zero (mass below 3e-19).
pub(crate) const GAUSS_CUT: f64 = 9.0;

impl Kernel {
    pub(crate) fn new(weight: &Weight, dim: usize) -> Result<Self> {
        let gauss = match weight {
            Weight::Lebesgue => None,
            Weight::Gaussian(sigma) => Some(gauss_params(sigma, dim)?),
        };
        Ok(Kernel { dim, gauss })
    }

    #[inline]
    pub(crate) fn density(&self, x: &[f64; 2]) -> f64 {
        match &self.gauss {
            None => 1.0,
            Some(g) => {
                let [p00, p01, p11] = g.precision;
                let q = if self.dim == 1 {
                    p00 * x[0] * x[0]
                } else {
                    p00 * x[0] * x[0] + 2.0 * p01 * x[0] * x[1] + p11 * x[1] * x[1]
                };
                g.norm * (-0.5 * q).exp()
            }
        }
    }

    /// Half-width along `axis` outside which the weight is negligible.
    pub(crate) fn cut(&self, axis: usize) -> f64 {
        self.gauss.as_ref().map_or(f64::INFINITY, |g| GAUSS_CUT * g.sd[axis])
    }

    pub(crate) fn sd(&self, axis: usize) -> Option<f64> {
        self.gauss.as_ref().map(|g| g.sd[axis])
    }
}

fn gauss_params(sigma: &SymMatrix, dim: usize) -> Result<GaussParams> {
    if sigma.dim() != dim {
        return Err(Error::Dim { expected: dim, found: sigma.dim() });
    }
    if !sigma.is_finite() || sigma.min_eigenvalue()? <= 0.0 {
        return Err(Error::InvalidMatrix("Gaussian covariance must be positive definite".into()));
    }
    let det = sigma.determinant()?;
    let inv = sigma.inverse()?;
    let tau = std::f64::consts::TAU;
    let norm = 1.0 / (tau.powi(dim as i32) * det).sqrt();
    Ok(if dim == 1 {
        GaussParams { precision: [inv.get(0, 0), 0.0, 0.0], norm, sd: [sigma.get(0, 0).sqrt(), 0.0] }
    } else {
        GaussParams {
            precision: [inv.get(0, 0), inv.get(0, 1), inv.get(1, 1)],
            norm,
            sd: [sigma.get(0, 0).sqrt(), sigma.get(1, 1).sqrt()],
        }
    })
}

/// Catmull–Rom weights of the nodes `k-1, k, k+1, k+2` at offset `t` in
/// the cell `[k, k+1]`.
#[inline]
pub(crate) fn cr_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Cell index and cubic weights for coordinate `x` on an axis; `None` when the
/// zero-extended model vanishes there.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil {
    pub(crate) base: isize,
    pub(crate) w: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFnDoc", into = "GridFnDoc")]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridFnDoc {
    dim: usize,
    spacing: f64,
    half_extent: f64,
    values: Vec<f64>,
}

impl TryFrom<GridFnDoc> for GridFn {
    type Error = Error;

    fn try_from(doc: GridFnDoc) -> Result<Self> {
        GridFn::from_values(Grid::new(doc.dim, doc.spacing, doc.half_extent)?, doc.values)
    }
}

impl From<GridFn> for GridFnDoc {
    fn from(f: GridFn) -> Self {
        GridFnDoc {
            dim: f.grid.dim,
            spacing: f.grid.spacing,
            half_extent: f.grid.half_extent(),
            values: f.values,
        }
    }
}

/// Integral, barycenter and covariance of `f * weight`, normalized by the
/// integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
}

impl GridFn {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Range { name: "grid value", value: *v, expected: "finite and >= 0" });
        }
        Ok(GridFn { grid, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..grid.dim])).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFn { grid, values: vec![0.0; grid.len()] }
    }

    /// `g_A(x) = exp(-<Ax, x>/2)` for positive semidefinite `A`.
    pub fn gaussian(grid: Grid, a: &SymMatrix) -> Result<Self> {
        if a.dim() != grid.dim {
            return Err(Error::Dim { expected: grid.dim, found: a.dim() });
        }
        Self::from_fn(grid, |x| (-0.5 * a.quad_form(x)).exp())
    }

    /// Indicator of the box `[lo, hi]`: each node carries the fraction of
    /// its dual cell `x + [-h/2, h/2]^d` covered by the box, so a boundary
    /// through a node gives 1/2 there.
    pub fn indicator_box(grid: Grid, lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != grid.dim || hi.len() != grid.dim {
            return Err(Error::Dim { expected: grid.dim, found: lo.len().min(hi.len()) });
        }
        let h = grid.spacing;
        let frac = |x: f64, a: f64, b: f64| {
            let l = (x - 0.5 * h).max(a);
            let r = (x + 0.5 * h).min(b);
            ((r - l) / h).clamp(0.0, 1.0)
        };
        Self::from_fn(grid, |x| (0..x.len()).map(|k| frac(x[k], lo[k], hi[k])).product())
    }

    /// Approximate dual-cell coverage of an arbitrary set, using the
    /// midpoints of a `subsamples^d` subdivision of each dual cell.
    pub fn indicator_of(grid: Grid, subsamples: usize, contains: impl Fn(&[f64]) -> bool) -> Result<Self> {
        let s = subsamples.max(1);
        let h = grid.spacing;
        let offs: Vec<f64> = (0..s).map(|i| ((i as f64 + 0.5) / s as f64 - 0.5) * h).collect();
        let total = s.pow(grid.dim as u32) as f64;
        Self::from_fn(grid, |x| {
            let mut hits = 0usize;
            if x.len() == 1 {
                hits = offs.iter().filter(|o| contains(&[x[0] + **o])).count();
            } else {
                for o0 in &offs {
                    hits += offs.iter().filter(|o1| contains(&[x[0] + o0, x[1] + **o1])).count();
                }
            }
            hits as f64 / total
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Same grid, values `f(node, value)`.
    pub fn map(&self, f: impl Fn([f64; 2], f64) -> f64) -> Result<Self> {
        let values = self.values.iter().enumerate().map(|(i, v)| f(self.grid.point(i), *v)).collect();
        Self::from_values(self.grid, values)
    }

    /// The 1-D function `y -> f(y, y)` on the diagonal nodes of a 2-D grid.
    pub fn diagonal(&self) -> Result<Self> {
        if self.grid.dim != 2 {
            return Err(Error::Dim { expected: 2, found: self.grid.dim });
        }
        let n = self.grid.axis_len();
        let line = Grid { dim: 1, ..self.grid };
        Self::from_values(line, (0..n).map(|j| self.values[j * n + j]).collect())
    }

    /// Zero-extended node value in 1-D.
    #[inline]
    pub(crate) fn node1(&self, j: isize) -> f64 {
        if j < 0 || j >= self.values.len() as isize {
            0.0
        } else {
            self.values[j as usize]
        }
    }

    #[inline]
    pub(crate) fn node2(&self, i: isize, j: isize) -> f64 {
        let n = self.grid.axis_len() as isize;
        if i < 0 || j < 0 || i >= n || j >= n {
            0.0
        } else {
            self.values[(i * n + j) as usize]
        }
    }

    /// Cubic stencil for axis coordinate `x`.
    #[inline]
    pub(crate) fn stencil(&self, x: f64) -> Option<Stencil> {
        let s = x / self.grid.spacing + self.grid.half_nodes as f64;
        let last = 2 * self.grid.half_nodes as isize;
        if !(s > -2.0 && s < (last + 2) as f64) {
            return None;
        }
        let k = s.floor();
        Some(Stencil { base: k as isize - 1, w: cr_weights(s - k) })
    }

    #[inline]
    pub(crate) fn eval_stencil1(&self, st: &Stencil) -> f64 {
        let b = st.base;
        if b >= 0 && b + 3 < self.values.len() as isize {
            let v = &self.values[b as usize..b as usize + 4];
            st.w[0] * v[0] + st.w[1] * v[1] + st.w[2] * v[2] + st.w[3] * v[3]
        } else {
            (0..4).map(|k| st.w[k] * self.node1(b + k as isize)).sum()
        }
    }

    #[inline]
    pub(crate) fn eval_stencil2(&self, s0: &Stencil, s1: &Stencil) -> f64 {
        let n = self.grid.axis_len() as isize;
        let inside = s0.base >= 0 && s1.base >= 0 && s0.base + 3 < n && s1.base + 3 < n;
        let mut acc = 0.0;
        for a in 0..4 {
            let ia = s0.base + a as isize;
            let row = if inside {
                let r = &self.values[(ia * n + s1.base) as usize..(ia * n + s1.base + 4) as usize];
                s1.w[0] * r[0] + s1.w[1] * r[1] + s1.w[2] * r[2] + s1.w[3] * r[3]
            } else {
                (0..4).map(|b| s1.w[b] * self.node2(ia, s1.base + b as isize)).sum()
            };
            acc += s0.w[a] * row;
        }
        acc
    }

    /// Value of the cubic model at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.grid.dim {
            1 => self.stencil(x[0]).map_or(0.0, |s| self.eval_stencil1(&s)),
            _ => match (self.stencil(x[0]), self.stencil(x[1])) {
                (Some(a), Some(b)) => self.eval_stencil2(&a, &b),
                _ => 0.0,
            },
        }
    }

    /// Piecewise-(bi)linear interpolation of the nodes, zero beyond one cell
    /// past the edge. Preserves bounds and order.
    pub fn eval_linear(&self, x: &[f64]) -> f64 {
        let h = self.grid.spacing;
        let m = self.grid.half_nodes as f64;
        let locate = |x: f64| {
            let s = x / h + m;
            let k = s.floor();
            (k as isize, s - k)
        };
        match self.grid.dim {
            1 => {
                let (k, t) = locate(x[0]);
                (1.0 - t) * self.node1(k) + t * self.node1(k + 1)
            }
            _ => {
                let (i, s) = locate(x[0]);
                let (j, t) = locate(x[1]);
                (1.0 - s) * ((1.0 - t) * self.node2(i, j) + t * self.node2(i, j + 1))
                    + s * ((1.0 - t) * self.node2(i + 1, j) + t * self.node2(i + 1, j + 1))
            }
        }
    }

    /// Node index range `[first, last]` per axis outside which every value
    /// is below `rel * max`; `None` for the zero function.
    pub(crate) fn active_range(&self, rel: f64) -> Option<[(usize, usize); 2]> {
        let cut = rel * self.max_value();
        let n = self.grid.axis_len();
        let mut r = [(usize::MAX, 0usize); 2];
        let mut any = false;
        for (idx, v) in self.values.iter().enumerate() {
            if *v > cut {
                any = true;
                let [i, j] = self.grid.node_indices(idx);
                r[0] = (r[0].0.min(i), r[0].1.max(i));
                r[1] = (r[1].0.min(j), r[1].1.max(j));
            }
        }
        if self.grid.dim == 1 {
            r[1] = (0, n - 1);
        }
        any.then_some(r)
    }

    /// Axis interval `[lo, hi]` outside which the cubic model (after
    /// dropping values below `rel * max`) vanishes.
    pub(crate) fn support(&self, rel: f64) -> Option<[(f64, f64); 2]> {
        let h = self.grid.spacing;
        self.active_range(rel).map(|r| {
            r.map(|(a, b)| (self.grid.axis_coord(a) - 2.0 * h, self.grid.axis_coord(b) + 2.0 * h))
        })
    }

    /// Mass and first two moments of `model * weight`, by four-point
    /// Gauss–Legendre on every grid cell of the model's support.
    pub fn moments(&self, weight: &Weight) -> Result<Moments> {
        let kernel = Kernel::new(weight, self.grid.dim)?;
        let d = self.grid.dim;
        let h = self.grid.spacing;
        let (mut m0, mut m1, mut m2) = (0.0, [0.0; 2], [0.0; 3]);
        let Some(range) = self.active_range(0.0) else {
            return Ok(Moments { mass: 0.0, mean: vec![0.0; d], cov: SymMatrix::zeros(d) });
        };
        let wts: Vec<[f64; 4]> = GL4.iter().map(|(t, _)| cr_weights(*t)).collect();
        let cells = |(a, b): (usize, usize)| (a as isize - 2)..=(b as isize + 1);
        let x_of = |k: isize, t: f64| (k as f64 + t - self.grid.half_nodes as f64) * h;
        let mut add = |x: [f64; 2], w: f64| {
            m0 += w;
            m1[0] += w * x[0];
            m1[1] += w * x[1];
            m2[0] += w * x[0] * x[0];
            m2[1] += w * x[0] * x[1];
            m2[2] += w * x[1] * x[1];
        };
        if d == 1 {
            for k in cells(range[0]) {
                for (g, (t, gw)) in GL4.iter().enumerate() {
                    let st = Stencil { base: k - 1, w: wts[g] };
                    let x = [x_of(k, *t), 0.0];
                    add(x, gw * h * self.eval_stencil1(&st) * kernel.density(&x));
                }
            }
        } else {
            for k0 in cells(range[0]) {
                for k1 in cells(range[1]) {
                    for (g0, (t0, w0)) in GL4.iter().enumerate() {
                        let s0 = Stencil { base: k0 - 1, w: wts[g0] };
                        for (g1, (t1, w1)) in GL4.iter().enumerate() {
                            let s1 = Stencil { base: k1 - 1, w: wts[g1] };
                            let x = [x_of(k0, *t0), x_of(k1, *t1)];
                            add(x, w0 * w1 * h * h * self.eval_stencil2(&s0, &s1) * kernel.density(&x));
                        }
                    }
                }
            }
        }
        if m0 == 0.0 {
            return Ok(Moments { mass: 0.0, mean: vec![0.0; d], cov: SymMatrix::zeros(d) });
        }
        let mean = [m1[0] / m0, m1[1] / m0];
        let c00 = m2[0] / m0 - mean[0] * mean[0];
        let cov = if d == 1 {
            SymMatrix::scalar(c00)
        } else {
            let c01 = m2[1] / m0 - mean[0] * mean[1];
            let c11 = m2[2] / m0 - mean[1] * mean[1];
            SymMatrix::new(2, vec![c00, c01, c01, c11])?
        };
        Ok(Moments { mass: m0, mean: mean[..d].to_vec(), cov })
    }

    /// `∫ model * weight`.
    pub fn integral(&self, weight: &Weight) -> Result<f64> {
        Ok(self.moments(weight)?.mass)
    }

    /// Fraction of the trapezoid mass of `|f| * weight` sitting on the three
    /// outermost node rings.
    pub(crate) fn boundary_fraction(&self, kernel: &Kernel) -> f64 {
        let (mut edge, mut total) = (0.0, 0.0);
        for (idx, v) in self.values.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let m = v.abs() * kernel.density(&self.grid.point(idx));
            total += m;
            if self.grid.edge_distance(idx) <= 2 {
                edge += m;
            }
        }
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }

    /// Largest violation of the discrete midpoint inequality
    /// `ln f(mid) >= (ln f(x) + ln f(y)) / 2` over node pairs whose midpoint is
    /// a node. 1-D checks every pair; 2-D checks pairs up to four nodes
    /// away along eight lattice directions. Infinite if a positive pair
    /// has a zero midpoint.
    pub fn log_concavity_defect(&self) -> f64 {
        let floor = LOG_CONCAVITY_FLOOR * self.max_value();
        let lg: Vec<f64> = self.values.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect();
        let ok = |v: f64| v >= floor && v > 0.0;
        let mut worst: f64 = f64::NEG_INFINITY;
        let mut test = |a: usize, mid: usize, b: usize| {
            if ok(self.values[a]) && ok(self.values[b]) {
                worst = worst.max(0.5 * (lg[a] + lg[b]) - lg[mid]);
            }
        };
        let n = self.grid.axis_len();
        if self.grid.dim == 1 {
            for a in 0..n {
                for b in (a + 2..n).step_by(2) {
                    test(a, (a + b) / 2, b);
                }
            }
        } else {
            const DIRS: [(isize, isize); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)];
            let ni = n as isize;
            for i in 0..ni {
                for j in 0..ni {
                    for (di, dj) in DIRS {
                        for s in 1..=4 {
                            let (ai, aj, bi, bj) = (i - s * di, j - s * dj, i + s * di, j + s * dj);
                            if ai < 0 || aj < 0 || bi >= ni || bj >= ni || aj >= ni || bj < 0 {
                                continue;
                            }
                            test((ai * ni + aj) as usize, (i * ni + j) as usize, (bi * ni + bj) as usize);
                        }
                    }
                }
            }
        }
        worst.max(0.0)
    }

    pub fn is_log_concave(&self) -> bool {
        self.log_concavity_defect() <= LOG_CONCAVITY_TOL
    }
}
