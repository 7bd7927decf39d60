//! The functional layer over grid functions: `max₀`, the sup-convolution
//! `□`, super-level-set distribution functions and the four functions
//! reduction.
//!
//! Integrals here are dual-cell quadratures: node `i` carries the exact
//! measure of its cell `x_i + [-h/2, h/2]^d` (a product of normal interval
//! masses for diagonal covariances). Level-set measures use the same cells,
//! so for grid functions the tail formula `∫f dμ = ∫₀^∞ μ{f ≥ t} dt` is an
//! identity and every discrepancy comes from the threshold quadrature.

use serde::{Deserialize, Serialize};

use crate::geometry::InequalityParams;
use crate::grid::{Grid, GridFn, Kernel, Weight};
use crate::saturation::Sign;
use crate::special::interval_mass;
use crate::{Error, Exec, Result};

/// Thresholds per distribution function.
pub const THRESHOLDS: usize = 64;
/// Lowest threshold relative to the largest function value.
pub const THRESHOLD_FLOOR: f64 = 1e-6;
/// Relative slack in the pointwise lattice hypothesis.
pub const HYPOTHESIS_REL: f64 = 1e-12;
/// Relative slack in the integrated conclusion.
pub const CONCLUSION_REL: f64 = 1e-6;

/// Thresholds at which 2-D super level sets are tested for digital
/// convexity, as fractions of the maximum.
const CONVEXITY_LEVELS: usize = 8;

/// A grid function together with the outcome of the discrete
/// quasi-concavity test. Invalid functions stay usable for exploration but
/// are refused by the checks that need the hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiConcaveFn {
    f: GridFn,
    valid: bool,
}

impl QuasiConcaveFn {
    pub fn new(f: GridFn) -> Self {
        let valid = is_quasi_concave(&f);
        Self { f, valid }
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn function(&self) -> &GridFn {
        &self.f
    }

    fn require_valid(&self, name: &str) -> Result<&GridFn> {
        if self.valid {
            Ok(&self.f)
        } else {
            Err(Error::Precondition(format!("{name} failed the quasi-concavity test")))
        }
    }
}

/// A line of values is unimodal iff no value sits strictly below both a
/// value before it and a value after it.
fn unimodal(vals: impl Iterator<Item = f64>, tol: f64) -> bool {
    let v: Vec<f64> = vals.collect();
    let mut suffix = vec![0.0f64; v.len() + 1];
    for i in (0..v.len()).rev() {
        suffix[i] = suffix[i + 1].max(v[i]);
    }
    let mut prefix: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        if *x < prefix.min(suffix[i + 1]) - tol {
            return false;
        }
        prefix = prefix.max(*x);
    }
    true
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull of lattice points, counter-clockwise, collinear
/// points dropped.
fn lattice_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn in_hull(hull: &[(i64, i64)], p: (i64, i64)) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(a, b, p) == 0 && (p.0 - a.0) * (p.0 - b.0) <= 0 && (p.1 - a.1) * (p.1 - b.1) <= 0
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0),
    }
}

/// Discrete quasi-concavity: every grid line meets each super level set in
/// an interval, and in 2-D the level sets at eight thresholds contain every
/// node of their lattice convex hull.
pub fn is_quasi_concave(f: &GridFn) -> bool {
    let n = f.grid().axis_len();
    let v = f.values();
    let max = f.max_value();
    let tol = 1e-12 * max;
    if f.dim() == 1 {
        return unimodal(v.iter().copied(), tol);
    }
    let rows = (0..n).all(|i| unimodal((0..n).map(|j| v[i * n + j]), tol));
    let cols = (0..n).all(|j| unimodal((0..n).map(|i| v[i * n + j]), tol));
    if !(rows && cols) || max == 0.0 {
        return rows && cols;
    }
    (1..=CONVEXITY_LEVELS).all(|k| {
        let t = max * k as f64 / (CONVEXITY_LEVELS + 1) as f64;
        let inside = |i: usize, j: usize| v[i * n + j] >= t - tol;
        let pts: Vec<(i64, i64)> =
            (0..n * n).filter(|idx| inside(idx / n, idx % n)).map(|idx| ((idx / n) as i64, (idx % n) as i64)).collect();
        let (i0, i1) = (pts.iter().map(|p| p.0).min().unwrap_or(0), pts.iter().map(|p| p.0).max().unwrap_or(-1));
        let (j0, j1) = (pts.iter().map(|p| p.1).min().unwrap_or(0), pts.iter().map(|p| p.1).max().unwrap_or(-1));
        let hull = lattice_hull(pts);
        (i0..=i1).all(|i| (j0..=j1).all(|j| inside(i as usize, j as usize) || !in_hull(&hull, (i, j))))
    })
}

/// Measure of every node's dual cell under `weight`.
pub fn cell_masses(grid: &Grid, weight: &Weight) -> Result<Vec<f64>> {
    let h = grid.spacing();
    let vol = grid.cell_volume();
    match weight {
        Weight::Lebesgue => Ok(vec![vol; grid.len()]),
        Weight::Gaussian(sigma) => {
            let kernel = Kernel::new(weight, grid.dim())?;
            let diagonal = grid.dim() == 1 || sigma.get(0, 1) == 0.0;
            let sd: Vec<f64> = (0..grid.dim()).map(|k| sigma.get(k, k).sqrt()).collect();
            Ok((0..grid.len())
                .map(|i| {
                    let p = grid.point(i);
                    if diagonal {
                        (0..grid.dim()).map(|k| interval_mass((p[k] - 0.5 * h) / sd[k], (p[k] + 0.5 * h) / sd[k])).product()
                    } else {
                        kernel.density(&p) * vol
                    }
                })
                .collect())
        }
    }
}

/// `Σ f_i μ(cell_i)`.
pub fn grid_integral(f: &GridFn, weight: &Weight) -> Result<f64> {
    let m = cell_masses(f.grid(), weight)?;
    Ok(f.values().iter().zip(&m).map(|(v, w)| v * w).sum())
}

/// `u_c = u(· / c)` on the same grid, by linear interpolation.
pub fn dilate(f: &GridFn, c: f64) -> Result<GridFn> {
    if !(c.is_finite() && c != 0.0) {
        return Err(Error::Range { name: "scale", value: c, expected: "finite and nonzero" });
    }
    if c == 1.0 {
        return Ok(f.clone());
    }
    f.map(|p, _| f.eval_linear(&[p[0] / c, p[1] / c][..f.dim()]))
}

/// `max₀(p, q)`: the larger value where both are positive, else 0.
pub fn max0(f: &GridFn, g: &GridFn) -> Result<GridFn> {
    f.grid().ensure_same(g.grid())?;
    let values = f.values().iter().zip(g.values()).map(|(p, q)| if *p > 0.0 && *q > 0.0 { p.max(*q) } else { 0.0 }).collect();
    GridFn::from_values(*f.grid(), values)
}

/// Largest coordinate magnitude of a positive node per axis, or `None` when
/// a positive node sits on the outer ring (the function is then taken to
/// continue past the grid).
fn compact_extent(f: &GridFn) -> Option<[f64; 2]> {
    let g = f.grid();
    let last = g.axis_len() - 1;
    let mut ext = [0.0f64; 2];
    for (i, v) in f.values().iter().enumerate() {
        if *v > 0.0 {
            let idx = g.node_indices(i);
            if idx[..g.dim()].iter().any(|k| *k == 0 || *k == last) {
                return None;
            }
            let p = g.point(i);
            ext[0] = ext[0].max(p[0].abs());
            ext[1] = ext[1].max(p[1].abs());
        }
    }
    Some(ext)
}

/// `(f_a □ g_b)(z) = max_x min(f(x/a), g((z−x)/b))` with `x` ranging over
/// the grid nodes.
pub fn sup_convolve(f: &GridFn, g: &GridFn, a: f64, b: f64) -> Result<GridFn> {
    sup_convolve_with(f, g, a, b, Exec::default())
}

pub fn sup_convolve_with(f: &GridFn, g: &GridFn, a: f64, b: f64, exec: Exec) -> Result<GridFn> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let fa = dilate(f, a)?;
    if !(b.is_finite() && b != 0.0) {
        return Err(Error::Range { name: "scale", value: b, expected: "finite and nonzero" });
    }
    if let (Some(ef), Some(eg)) = (compact_extent(f), compact_extent(g)) {
        let needed = (0..grid.dim()).map(|k| a.abs() * ef[k] + b.abs() * eg[k]).fold(0.0, f64::max);
        if needed > grid.half_extent() + 1e-9 {
            return Err(Error::Extent { needed, available: grid.half_extent() });
        }
    }
    // Scan decompositions in decreasing order of f_a: once f_a(x) drops to
    // the running best no later x can improve on it.
    let mut cand: Vec<(f64, usize)> =
        fa.values().iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, v)| (*v, i)).collect();
    cand.sort_unstable_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
    let d = grid.dim();
    let values = exec.map(grid.len(), |iz| {
        let z = grid.point(iz);
        let mut best: f64 = 0.0;
        for (v, ix) in &cand {
            if *v <= best {
                break;
            }
            let x = grid.point(*ix);
            let y = [(z[0] - x[0]) / b, (z[1] - x[1]) / b];
            best = best.max(v.min(g.eval_linear(&y[..d])));
        }
        best
    });
    GridFn::from_values(grid, values)
}

/// Distribution functions `a(t), b(s), c(p), d(q)` sampled on one shared
/// increasing grid of positive thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourTuple {
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl FourTuple {
    pub fn new(t: Vec<f64>, a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n == 0 || [&a, &b, &c, &d].iter().any(|v| v.len() != n) {
            return Err(Error::GridMismatch("four-tuple columns must share one nonempty threshold grid".into()));
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("thresholds must be positive and increasing".into()));
        }
        if let Some(v) = [&a, &b, &c, &d].iter().flat_map(|v| v.iter()).find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Range { name: "four-tuple value", value: *v, expected: "finite and >= 0" });
        }
        Ok(Self { t, a, b, c, d })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["t", "a", "b", "c", "d"]).map_err(io)?;
        for i in 0..self.t.len() {
            w.write_record([self.t[i], self.a[i], self.b[i], self.c[i], self.d[i]].map(|x| x.to_string())).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Trapezoid weights of the threshold grid.
    pub fn weights(&self) -> Vec<f64> {
        let t = &self.t;
        let n = t.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { t[i] - t[i - 1] } else { 0.0 };
                let right = if i + 1 < n { t[i + 1] - t[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }
}

/// `THRESHOLDS` log-spaced values from `THRESHOLD_FLOOR * max` to `max`.
pub fn log_thresholds(max: f64) -> Vec<f64> {
    let (lo, hi) = ((THRESHOLD_FLOOR * max).ln(), max.ln());
    let mut t: Vec<f64> = (0..THRESHOLDS).map(|i| (lo + (hi - lo) * i as f64 / (THRESHOLDS - 1) as f64).exp()).collect();
    // Pin the top so {f >= t} at the last threshold is the argmax set.
    t[THRESHOLDS - 1] = max;
    t
}

/// The four measures `μ₁, …, μ₄` of the reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureAssignment(pub [Weight; 4]);

impl MeasureAssignment {
    pub fn gaussian(dim: usize) -> Self {
        let w = Weight::standard(dim);
        Self([w.clone(), w.clone(), w.clone(), w])
    }

    pub fn lebesgue() -> Self {
        Self([Weight::Lebesgue, Weight::Lebesgue, Weight::Lebesgue, Weight::Lebesgue])
    }
}

fn distribution(f: &GridFn, masses: &[f64], t: &[f64]) -> Vec<f64> {
    t.iter().map(|t| f.values().iter().zip(masses).filter(|(v, _)| **v >= *t).map(|(_, m)| m).sum()).collect()
}

/// The two composite functions `max₀(f_α, h_β)` and `f_a □ h_{±b}`.
fn composites(f: &GridFn, h: &GridFn, p: &InequalityParams, exec: Exec) -> Result<(GridFn, GridFn)> {
    let inter = max0(&dilate(f, p.alpha)?, &dilate(h, p.beta)?)?;
    let sum = sup_convolve_with(f, h, p.a, p.sigma.value() * p.b, exec)?;
    Ok((inter, sum))
}

/// Builds `a(t) = μ₁{f ≥ t}`, `b(s) = μ₂{h ≥ s}`,
/// `c(p) = μ₃{max₀(f_α, h_β) ≥ p}` and `d(q) = μ₄{f_a □ h_{±b} ≥ q}` on
/// [`log_thresholds`] of the larger input maximum.
pub fn level_sets_to_fourtuple(
    f: &QuasiConcaveFn,
    h: &QuasiConcaveFn,
    params: &InequalityParams,
    measures: &MeasureAssignment,
) -> Result<FourTuple> {
    let (fg, hg) = (f.require_valid("f")?, h.require_valid("h")?);
    fg.grid().ensure_same(hg.grid())?;
    let p = InequalityParams::new(params.alpha, params.beta, params.a, params.b, params.sigma)?;
    let (inter, sum) = composites(fg, hg, &p, Exec::default())?;
    let top = fg.max_value().max(hg.max_value());
    if !(top > 0.0) {
        return Err(Error::Precondition("both functions vanish".into()));
    }
    let t = log_thresholds(top);
    let grid = fg.grid();
    let m: Vec<Vec<f64>> = measures.0.iter().map(|w| cell_masses(grid, w)).collect::<Result<_>>()?;
    FourTuple::new(
        t.clone(),
        distribution(fg, &m[0], &t),
        distribution(hg, &m[1], &t),
        distribution(&inter, &m[2], &t),
        distribution(&sum, &m[3], &t),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourFunctionsCheck {
    pub hypothesis_ok: bool,
    /// Largest `a(t)b(s) / (c(t∨s)d(t∧s))` over grid pairs (infinite if some
    /// right side vanishes under a positive left side).
    pub worst_ratio: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Tests `a(t)b(s) ≤ c(t∨s)d(t∧s)` on every pair of grid thresholds and
/// compares `∫a∫b` with `∫c∫d` by the trapezoid rule.
///
/// The hypothesis implies the conclusion exactly: trapezoid weights are
/// positive and on a chain `{t∨s, t∧s} = {t, s}`, so the weighted
/// Ahlswede–Daykin inequality applies.
pub fn four_functions_check(tuple: &FourTuple) -> FourFunctionsCheck {
    let n = tuple.t.len();
    let mut worst: f64 = 0.0;
    let mut hypothesis_ok = true;
    for i in 0..n {
        for j in 0..n {
            let left = tuple.a[i] * tuple.b[j];
            if left == 0.0 {
                continue;
            }
            let right = tuple.c[i.max(j)] * tuple.d[i.min(j)];
            worst = worst.max(if right > 0.0 { left / right } else { f64::INFINITY });
            if left > right * (1.0 + HYPOTHESIS_REL) {
                hypothesis_ok = false;
            }
        }
    }
    let w = tuple.weights();
    let int = |v: &[f64]| v.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>();
    let lhs = int(&tuple.a) * int(&tuple.b);
    let rhs = int(&tuple.c) * int(&tuple.d);
    FourFunctionsCheck { hypothesis_ok, worst_ratio: worst, lhs, rhs, holds: lhs <= rhs * (1.0 + CONCLUSION_REL) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub holds: bool,
    /// Parameters proven and every tested super level set centred, so a
    /// failure would contradict a theorem rather than an open case.
    pub guaranteed: bool,
}

/// Whether the super level sets of `f` at the shared thresholds have their
/// `weight`-barycenters at the origin, up to rounding.
pub fn level_sets_centered(f: &GridFn, weight: &Weight) -> Result<bool> {
    let m = cell_masses(f.grid(), weight)?;
    let top = f.max_value();
    if top == 0.0 {
        return Ok(true);
    }
    let g = f.grid();
    let scale = g.half_extent();
    Ok(log_thresholds(top).iter().all(|t| {
        let mut acc = [0.0; 3];
        for (i, (v, w)) in f.values().iter().zip(&m).enumerate() {
            if *v >= *t {
                let p = g.point(i);
                acc[0] += w;
                acc[1] += w * p[0];
                acc[2] += w * p[1];
            }
        }
        acc[0] == 0.0 || (acc[1].abs().max(acc[2].abs()) / acc[0]) <= 1e-9 * scale
    }))
}

fn functional_check(
    f: &QuasiConcaveFn,
    h: &QuasiConcaveFn,
    p: &InequalityParams,
    weight: &Weight,
    proven: bool,
    exec: Exec,
) -> Result<FunctionalCheck> {
    let (fg, hg) = (f.require_valid("f")?, h.require_valid("h")?);
    fg.grid().ensure_same(hg.grid())?;
    let (inter, sum) = composites(fg, hg, p, exec)?;
    let m = cell_masses(fg.grid(), weight)?;
    let int = |u: &GridFn| u.values().iter().zip(&m).map(|(v, w)| v * w).sum::<f64>();
    let lhs = int(fg) * int(hg);
    let rhs = int(&inter) * int(&sum);
    let centred = level_sets_centered(fg, weight)? && level_sets_centered(hg, weight)?;
    Ok(FunctionalCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
        holds: lhs <= rhs * (1.0 + CONCLUSION_REL),
        guaranteed: proven && centred,
    })
}

/// `∫f dγ ∫h dγ ≤ ∫max₀(f_α, h_β) dγ ∫ f_a □ h_{±b} dγ` by dual-cell
/// quadrature. Parameters outside the proven ranges are still evaluated,
/// with `guaranteed = false`.
pub fn check_functional_gcrsi(f: &QuasiConcaveFn, h: &QuasiConcaveFn, params: &InequalityParams) -> Result<FunctionalCheck> {
    let p = InequalityParams::new(params.alpha, params.beta, params.a, params.b, params.sigma)?;
    functional_check(f, h, &p, &Weight::standard(f.function().dim()), p.is_proven(), Exec::default())
}

/// The Lebesgue form `∫f ∫h ≤ ∫max₀(f, h) ∫ f □ h(±·)`, proven for both
/// signs. Both functions must vanish before the grid edge.
pub fn check_functional_lebesgue(f: &QuasiConcaveFn, h: &QuasiConcaveFn, sign: Sign) -> Result<FunctionalCheck> {
    for u in [f.function(), h.function()] {
        if compact_extent(u).is_none() {
            return Err(Error::Extent { needed: f64::INFINITY, available: u.grid().half_extent() });
        }
    }
    let p = InequalityParams::new(1.0, 1.0, 1.0, 1.0, sign)?;
    functional_check(f, h, &p, &Weight::Lebesgue, true, Exec::default())
}
