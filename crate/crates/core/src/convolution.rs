//! Self-convolution doubling, Gaussian mollification and covariance
//! diagnostics on [`GridFn`]s.
//!
//! Inner integrals are taken over the cubic model of the input. In 1-D each
//! integration range is split at every point where an argument crosses a
//! grid node, so the integrand is a polynomial times a smooth weight on each
//! piece and four-point Gauss–Legendre is essentially exact. The 2-D version
//! uses the same splitting per axis with one midpoint per piece to keep the
//! tensor-product cost manageable.

use serde::Serialize;
use std::f64::consts::SQRT_2;

use crate::grid::{Grid, GridFn, Kernel, Stencil, Weight, GL4};
use crate::special::upper_tail;
use crate::{Error, Exec, Result, SymMatrix};

/// Largest tolerated fraction of weighted mass on the outer node rings.
pub const LEAK_TOL: f64 = 1e-8;

/// Node values below this fraction of the maximum are dropped when
/// computing supports for the inner integrals; their products are far
/// below double precision relative to the result.
const SUPPORT_REL: f64 = 1e-17;

/// Barycenter coordinates within this many marginal standard deviations of
/// 0 count as centred.
const CENTERING_TOL: f64 = 1e-6;

const MIDPOINT: [(f64, f64); 1] = [(0.5, 1.0)];

fn rule(dim: usize) -> &'static [(f64, f64)] {
    if dim == 1 {
        &GL4
    } else {
        &MIDPOINT
    }
}

/// Quadrature nodes on `[a, b]`: split at `breaks`, then into pieces no
/// wider than `cap`, with `rule` on each piece.
fn piecewise(a: f64, b: f64, breaks: &mut Vec<f64>, cap: f64, rule: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    out.clear();
    if !(b > a) {
        return;
    }
    breaks.retain(|x| *x > a && *x < b);
    breaks.push(a);
    breaks.push(b);
    breaks.sort_unstable_by(f64::total_cmp);
    let tiny = 1e-13 * (b - a).max(1.0);
    for w in breaks.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r - l <= tiny {
            continue;
        }
        let parts = if cap.is_finite() { ((r - l) / cap).ceil().max(1.0) as usize } else { 1 };
        let len = (r - l) / parts as f64;
        for p in 0..parts {
            let start = l + p as f64 * len;
            for (t, wt) in rule {
                out.push((start + t * len, wt * len));
            }
        }
    }
}

/// Appends `offset + slope * k * h` for every integer `k` that lands in
/// `(a, b)`.
fn progression(offset: f64, slope: f64, h: f64, a: f64, b: f64, out: &mut Vec<f64>) {
    let (p, q) = ((a - offset) / slope / h, (b - offset) / slope / h);
    let (lo, hi) = (p.min(q).ceil() as i64, p.max(q).floor() as i64);
    out.extend((lo..=hi).map(|k| offset + slope * k as f64 * h));
}

/// Quadrature along one axis of `x ↦ f((c + x)/√2) f((c - x)/√2) w(x)`
/// for the output coordinate `c`, with the two stencils precomputed.
struct AxisPoint {
    x: f64,
    w: f64,
    u: Stencil,
    v: Stencil,
}

fn doubling_axis(f: &GridFn, c: f64, support: (f64, f64), cut: f64, cap: f64, work: &mut Vec<f64>) -> Vec<AxisPoint> {
    let (lo, hi) = support;
    let a = (SQRT_2 * lo - c).max(c - SQRT_2 * hi).max(-cut);
    let b = (SQRT_2 * hi - c).min(c - SQRT_2 * lo).min(cut);
    let h = f.grid().spacing();
    work.clear();
    progression(-c, SQRT_2, h, a, b, work);
    progression(c, -SQRT_2, h, a, b, work);
    let mut nodes = Vec::new();
    piecewise(a, b, work, cap, rule(f.dim()), &mut nodes);
    nodes
        .into_iter()
        .filter_map(|(x, w)| {
            let u = f.stencil((c + x) / SQRT_2)?;
            let v = f.stencil((c - x) / SQRT_2)?;
            Some(AxisPoint { x, w, u, v })
        })
        .collect()
}

fn check_leak(f: &GridFn, kernel: &Kernel) -> Result<()> {
    let fraction = f.boundary_fraction(kernel);
    if fraction > LEAK_TOL {
        Err(Error::MassLeak { fraction })
    } else {
        Ok(())
    }
}

fn clamp_nonnegative(grid: Grid, values: Vec<f64>) -> Result<GridFn> {
    // Cubic ringing next to jumps can leave tiny negative values in the tails.
    GridFn::from_values(grid, values.into_iter().map(|v| v.max(0.0)).collect())
}

/// One doubling step with the standard-form Gaussian weight:
/// `f1(x̄) = ∫ f((x̄+x)/√2) f((x̄−x)/√2) dγ_Σ(x)`.
pub fn self_convolve_step(f: &GridFn, sigma: &SymMatrix) -> Result<GridFn> {
    self_convolve_step_with(f, &Weight::Gaussian(sigma.clone()), Exec::default())
}

/// The doubling step against an arbitrary [`Weight`]. With
/// [`Weight::Lebesgue`] and a probability density `f`, the output is the
/// density of `(X + Y)/√2` for independent `X, Y ~ f`.
pub fn self_convolve_step_with(f: &GridFn, weight: &Weight, exec: Exec) -> Result<GridFn> {
    let grid = *f.grid();
    let kernel = Kernel::new(weight, grid.dim())?;
    check_leak(f, &kernel)?;
    let Some(support) = f.support(SUPPORT_REL) else {
        return Ok(GridFn::zeros(grid));
    };
    let cap = |axis: usize| kernel.sd(axis).map_or(f64::INFINITY, |s| 0.25 * s);
    let values = exec.map(grid.len(), |idx| {
        let p = grid.point(idx);
        let mut work = Vec::new();
        let ax0 = doubling_axis(f, p[0], support[0], kernel.cut(0), cap(0), &mut work);
        if grid.dim() == 1 {
            ax0.iter()
                .map(|q| q.w * f.eval_stencil1(&q.u) * f.eval_stencil1(&q.v) * kernel.density(&[q.x, 0.0]))
                .sum::<f64>()
        } else {
            let ax1 = doubling_axis(f, p[1], support[1], kernel.cut(1), cap(1), &mut work);
            let mut acc = 0.0;
            for q0 in &ax0 {
                for q1 in &ax1 {
                    let fu = f.eval_stencil2(&q0.u, &q1.u);
                    if fu == 0.0 {
                        continue;
                    }
                    let fv = f.eval_stencil2(&q0.v, &q1.v);
                    acc += q0.w * q1.w * fu * fv * kernel.density(&[q0.x, q1.x]);
                }
            }
            acc
        }
    });
    let out = clamp_nonnegative(grid, values)?;
    check_leak(&out, &kernel)?;
    Ok(out)
}

/// The probability density `f γ_Σ / ∫ f γ_Σ` on the same grid, normalized
/// so its model integrates to exactly 1.
pub fn normalized_density(f: &GridFn, sigma: &SymMatrix) -> Result<GridFn> {
    let kernel = Kernel::new(&Weight::Gaussian(sigma.clone()), f.dim())?;
    let grid = *f.grid();
    let raw: Vec<f64> = f.values().iter().enumerate().map(|(i, v)| v * kernel.density(&grid.point(i))).collect();
    let z = raw.iter().sum::<f64>() * grid.cell_volume();
    if !(z > 0.0) {
        return Err(Error::Precondition("f has zero Gaussian integral".into()));
    }
    GridFn::from_values(grid, raw.into_iter().map(|v| v / z).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingRecord {
    pub iteration: usize,
    pub integral: f64,
    pub barycenter: Vec<f64>,
    pub covariance: SymMatrix,
    /// Largest node-wise gap to the centred Gaussian density with the
    /// record's covariance.
    pub sup_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingDiagnostics {
    /// Record 0 describes the normalized input, record `k` the `k`-th iterate.
    pub records: Vec<DoublingRecord>,
    pub density: GridFn,
}

impl DoublingDiagnostics {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    /// Largest relative Frobenius change of the covariance between
    /// consecutive records.
    pub fn max_cov_drift(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| {
                let d = w[1].covariance.try_sub(&w[0].covariance).map_or(f64::INFINITY, |m| m.frobenius());
                d / w[0].covariance.frobenius()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_integral_error(&self) -> f64 {
        self.records.iter().map(|r| (r.integral - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn final_sup_distance(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.sup_distance)
    }

    /// CSV with columns `iteration, integral, bary, cov, supdist`; 2-D
    /// records expand `bary` and `cov` into their entries.
    pub fn to_csv(&self) -> Result<String> {
        let dim = self.density.dim();
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = if dim == 1 {
            vec!["iteration", "integral", "bary", "cov", "supdist"]
        } else {
            vec!["iteration", "integral", "bary_0", "bary_1", "cov_00", "cov_01", "cov_11", "supdist"]
        };
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(&header).map_err(io)?;
        for r in &self.records {
            let mut row = vec![r.iteration.to_string(), r.integral.to_string()];
            row.extend(r.barycenter.iter().map(f64::to_string));
            if dim == 1 {
                row.push(r.covariance.get(0, 0).to_string());
            } else {
                row.extend([(0, 0), (0, 1), (1, 1)].map(|(i, j)| r.covariance.get(i, j).to_string()));
            }
            row.push(r.sup_distance.to_string());
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn record(iteration: usize, density: &GridFn) -> Result<DoublingRecord> {
    let m = density.moments(&Weight::Lebesgue)?;
    let matched = Kernel::new(&Weight::Gaussian(m.cov.clone()), density.dim())?;
    let grid = density.grid();
    let sup_distance = density
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (v - matched.density(&grid.point(i))).abs())
        .fold(0.0, f64::max);
    Ok(DoublingRecord { iteration, integral: m.mass, barycenter: m.mean, covariance: m.cov, sup_distance })
}

/// Runs `n` Lebesgue doubling steps on the normalized density of `f`
/// against `γ_Σ`, recording integral, barycenter, covariance and distance to
/// the matched Gaussian after every step.
///
/// `f` must pass the discrete log-concavity test and have its `γ_Σ`
/// barycenter at the origin.
pub fn doubling_iterate(f: &GridFn, sigma: &SymMatrix, n: usize, exec: Exec) -> Result<DoublingDiagnostics> {
    if n == 0 {
        return Err(Error::Range { name: "iterations", value: 0.0, expected: ">= 1" });
    }
    if !f.is_log_concave() {
        return Err(Error::Precondition(format!(
            "input fails the midpoint log-concavity test (defect {:.3e})",
            f.log_concavity_defect()
        )));
    }
    let mut density = normalized_density(f, sigma)?;
    let first = record(0, &density)?;
    for (k, b) in first.barycenter.iter().enumerate() {
        let sd = first.covariance.get(k, k).sqrt();
        if b.abs() > CENTERING_TOL * sd {
            return Err(Error::Centering { coordinate: k, sigmas: b / sd });
        }
    }
    let mut records = vec![first];
    for it in 1..=n {
        density = self_convolve_step_with(&density, &Weight::Lebesgue, exec)?;
        records.push(record(it, &density)?);
    }
    Ok(DoublingDiagnostics { records, density })
}

/// `h ∗ γ_Σt`, evaluated at every node.
pub fn mollify(h: &GridFn, sigma_t: &SymMatrix) -> Result<GridFn> {
    mollify_with(h, sigma_t, Exec::default())
}

/// Mollification with an explicit execution policy. Fails with
/// [`Error::MassLeak`] when more than [`LEAK_TOL`] of the kernel's mass
/// would fall outside a grid-sized box.
pub fn mollify_with(h: &GridFn, sigma_t: &SymMatrix, exec: Exec) -> Result<GridFn> {
    let grid = *h.grid();
    let kernel = Kernel::new(&Weight::Gaussian(sigma_t.clone()), grid.dim())?;
    let fraction: f64 =
        (0..grid.dim()).map(|k| 2.0 * upper_tail(grid.half_extent() / kernel.sd(k).unwrap_or(0.0))).sum();
    if fraction > LEAK_TOL {
        return Err(Error::MassLeak { fraction });
    }
    let Some(support) = h.support(0.0) else {
        return Ok(GridFn::zeros(grid));
    };
    let spacing = grid.spacing();
    let axis = |y: f64, k: usize, work: &mut Vec<f64>| -> Vec<(f64, f64, Stencil)> {
        let (lo, hi) = support[k];
        let cut = kernel.cut(k);
        let (a, b) = ((y - hi).max(-cut), (y - lo).min(cut));
        work.clear();
        progression(y, -1.0, spacing, a, b, work);
        let mut nodes = Vec::new();
        let cap = 0.25 * kernel.sd(k).unwrap_or(f64::INFINITY);
        piecewise(a, b, work, cap, rule(grid.dim()), &mut nodes);
        nodes.into_iter().filter_map(|(x, w)| Some((x, w, h.stencil(y - x)?))).collect()
    };
    let values = exec.map(grid.len(), |idx| {
        let p = grid.point(idx);
        let mut work = Vec::new();
        let ax0 = axis(p[0], 0, &mut work);
        if grid.dim() == 1 {
            ax0.iter().map(|(x, w, s)| w * h.eval_stencil1(s) * kernel.density(&[*x, 0.0])).sum::<f64>()
        } else {
            let ax1 = axis(p[1], 1, &mut work);
            let mut acc = 0.0;
            for (x0, w0, s0) in &ax0 {
                for (x1, w1, s1) in &ax1 {
                    acc += w0 * w1 * h.eval_stencil2(s0, s1) * kernel.density(&[*x0, *x1]);
                }
            }
            acc
        }
    });
    clamp_nonnegative(grid, values)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovBound {
    pub cov: SymMatrix,
    /// Smallest eigenvalue of `Σ − cov`.
    pub gap_min_eig: f64,
}

/// Covariance of the probability density `f γ_Σ / ∫ f γ_Σ` and its gap to
/// `Σ`. For log-concave `f` the gap is nonnegative, and zero exactly for
/// constant `f`.
pub fn check_cov_bound(f: &GridFn, sigma: &SymMatrix) -> Result<CovBound> {
    let m = f.moments(&Weight::Gaussian(sigma.clone()))?;
    if !(m.mass > 0.0) {
        return Err(Error::Precondition("f has zero Gaussian integral".into()));
    }
    let gap_min_eig = sigma.try_sub(&m.cov)?.min_eigenvalue()?;
    Ok(CovBound { cov: m.cov, gap_min_eig })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_rule_integrates_polynomials() {
        let mut breaks = vec![0.3, -2.0, 0.7, 0.3, 5.0];
        let mut nodes = Vec::new();
        piecewise(0.0, 1.0, &mut breaks, 0.2, &GL4, &mut nodes);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 0.125).abs() < 1e-15);
        let mut none = Vec::new();
        piecewise(1.0, 1.0, &mut Vec::new(), 1.0, &GL4, &mut none);
        assert!(none.is_empty());
    }

    #[test]
    fn progression_bounds_are_open() {
        let mut out = Vec::new();
        progression(0.0, -1.0, 0.5, -1.0, 1.0, &mut out);
        out.sort_by(f64::total_cmp);
        assert_eq!(out, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn mollifier_must_fit_the_grid() {
        let g = Grid::new(1, 0.25, 2.0).unwrap();
        let f = GridFn::constant(g, 1.0).unwrap();
        assert!(matches!(mollify(&f, &SymMatrix::scalar(1.0)), Err(Error::MassLeak { .. })));
    }

    #[test]
    fn zero_iterations_rejected() {
        let f = GridFn::constant(Grid::new(1, 0.25, 8.0).unwrap(), 1.0).unwrap();
        assert!(doubling_iterate(&f, &SymMatrix::scalar(1.0), 0, Exec::Sequential).is_err());
    }
}
