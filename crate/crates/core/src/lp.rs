//! Dense two-phase simplex with Bland's rule for
//! `min cᵀx  s.t.  A x = b, x ≥ 0`.
//!
//! Sized for the membership problems of the geometry module (a few dozen
//! variables, a handful of rows), where termination guarantees matter more
//! than speed.

const PIVOT_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    active: usize,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Runs the simplex method on `cost`; `false` signals unboundedness.
    fn optimise(&mut self, cost: &[f64]) -> bool {
        loop {
            // Bland: lowest-index column with negative reduced cost.
            let entering = (0..self.active).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced: f64 = cost[j]
                    - self.rows.iter().zip(&self.basis).map(|(row, &bi)| cost[bi] * row[j]).sum::<f64>();
                reduced < -PIVOT_EPS
            });
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] > PIVOT_EPS {
                    let t = row[self.rhs] / row[col];
                    leave = match leave {
                        None => Some((i, t)),
                        Some((li, lt)) => {
                            if t < lt - 1e-14 || (t <= lt + 1e-14 && self.basis[i] < self.basis[li]) {
                                Some((i, t))
                            } else {
                                Some((li, lt))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.rows.iter().zip(&self.basis).map(|(row, &bi)| cost[bi] * row[self.rhs]).sum()
    }
}

/// Phase 1. Returns the tableau over the original columns when feasible.
fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Option<Tableau> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, (ai, &bi)) in a.iter().zip(b).enumerate() {
        assert_eq!(ai.len(), n, "ragged constraint matrix");
        let s = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width];
        for (j, v) in ai.iter().enumerate() {
            row[j] = s * v;
        }
        row[n + i] = 1.0;
        row[width - 1] = s * bi;
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), active: n + m, rhs: width - 1 };
    let mut cost = vec![0.0; n + m];
    for c in cost.iter_mut().skip(n) {
        *c = 1.0;
    }
    t.optimise(&cost);
    let scale = 1.0 + b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if t.objective(&cost) > FEAS_EPS * scale {
        return None;
    }
    // Drive remaining artificial variables out of the basis; rows where
    // that is impossible are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.basis.contains(&j) && t.rows[r][j].abs() > PIVOT_EPS) {
                t.pivot(r, col);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    t.active = n;
    Some(t)
}

pub fn solve(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    assert_eq!(a.len(), b.len(), "one right-hand side per row");
    let n = c.len();
    let Some(mut t) = phase_one(a, b) else { return LpOutcome::Infeasible };
    let mut cost = c.to_vec();
    cost.resize(t.rows.first().map_or(n, |r| r.len() - 1), 0.0);
    if !t.optimise(&cost) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (row, &bi) in t.rows.iter().zip(&t.basis) {
        if bi < n {
            x[bi] = row[t.rhs];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

/// Whether `{x ≥ 0 : A x = b}` is nonempty.
pub fn feasible(a: &[Vec<f64>], b: &[f64]) -> bool {
    phase_one(a, b).is_some()
}

/// Whether `x` lies in the convex hull of `points`.
pub fn in_hull(points: &[Vec<f64>], x: &[f64]) -> bool {
    let d = x.len();
    let mut a: Vec<Vec<f64>> = (0..d).map(|k| points.iter().map(|p| p[k]).collect()).collect();
    a.push(vec![1.0; points.len()]);
    let mut b = x.to_vec();
    b.push(1.0);
    feasible(&a, &b)
}

/// Whether `x ∈ conv(P) + conv(Q)`.
pub fn in_hull_sum(p: &[Vec<f64>], q: &[Vec<f64>], x: &[f64]) -> bool {
    let d = x.len();
    let (np, nq) = (p.len(), q.len());
    let mut a: Vec<Vec<f64>> = (0..d)
        .map(|k| p.iter().map(|v| v[k]).chain(q.iter().map(|w| w[k])).collect())
        .collect();
    let mut ones_p = vec![1.0; np];
    ones_p.resize(np + nq, 0.0);
    let mut ones_q = vec![0.0; np];
    ones_q.resize(np + nq, 1.0);
    a.push(ones_p);
    a.push(ones_q);
    let mut b = x.to_vec();
    b.extend([1.0, 1.0]);
    feasible(&a, &b)
}
