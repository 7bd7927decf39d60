//! Dense symmetric matrices and the determinant inequalities built on them.
//!
//! Dimensions here are tiny (certificates are at most a few dozen rows), so
//! the kernels favour robustness: a cyclic Jacobi eigensolver and an LDLᵀ
//! factorization with diagonal pivoting that falls back to the eigenvalue
//! product when a pivot collapses.

mod dense;
mod lemmas;

pub use dense::Dense;
pub use lemmas::{
    check_conjugation_det, check_det_stability, check_gci_gaussian, check_gci_shifted,
    check_interpolation, check_ratio_monotone, Comparison, DetStability, HOLDS_TOL,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative off-diagonal mass at which the Jacobi sweep stops.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Pivot magnitude under which the LDLᵀ route hands over to the eigenvalues.
const PIVOT_FLOOR: f64 = 1e-14;

/// Real symmetric matrix in row-major storage. Construction symmetrizes, so
/// `get(i, j) == get(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
}

/// Eigenvalues in ascending order with matching unit eigenvectors
/// (`vectors[k]` belongs to `values[k]`).
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymMatrix {
    /// Builds from row-major entries, replacing each off-diagonal pair by its mean.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Dim { expected: dim * dim, found: data.len() });
        }
        let mut m = Self { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = 0.5 * (m.data[i * dim + j] + m.data[j * dim + i]);
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::Dim { expected: dim, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = s;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    /// 1×1 matrix.
    pub fn scalar(v: f64) -> Self {
        Self { dim: 1, data: vec![v] }
    }

    /// `G Gᵀ` for a (dim × k) row-major factor.
    pub fn gram(dim: usize, k: usize, g: &[f64]) -> Self {
        assert_eq!(g.len(), dim * k);
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                let s: f64 = (0..k).map(|l| g[i * k + l] * g[j * k + l]).sum();
                m.data[i * dim + j] = s;
                m.data[j * dim + i] = s;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::Dim { expected: self.dim, found: other.dim })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip(other, |a, b| a + s * b))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += s;
        }
        m
    }

    /// `T · self · Tᵀ` for a square transform `T` of matching size.
    pub fn congruence(&self, t: &Dense) -> Result<Self> {
        if t.cols() != self.dim {
            return Err(Error::Dim { expected: self.dim, found: t.cols() });
        }
        let out = t.matmul(&Dense::from_sym(self))?.matmul(&t.transpose())?;
        out.into_sym()
    }

    /// `D · self · D` for symmetric `D`.
    pub fn sandwich(&self, d: &SymMatrix) -> Result<Self> {
        self.same_dim(d)?;
        self.congruence(&Dense::from_sym(d))
    }

    /// Quadratic form `⟨self·x, x⟩`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            s += x[i] * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        s
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Principal sub-block `[r0, r0 + n)`.
    pub fn principal(&self, r0: usize, n: usize) -> SymMatrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(r0 + i, r0 + j));
            }
        }
        SymMatrix { dim: n, data }
    }

    /// Rectangular sub-block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Dense {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(self.get(r0 + i, c0 + j));
            }
        }
        Dense::new(rows, cols, data).expect("block shape")
    }

    /// Assembles `[[b1, b2], [b2ᵀ, b4]]`.
    pub fn from_blocks(b1: &SymMatrix, b2: &Dense, b4: &SymMatrix) -> Result<Self> {
        let (n, m) = (b1.dim, b4.dim);
        if b2.rows() != n || b2.cols() != m {
            return Err(Error::Dim { expected: n * m, found: b2.rows() * b2.cols() });
        }
        let d = n + m;
        let mut data = vec![0.0; d * d];
        for i in 0..n {
            for j in 0..n {
                data[i * d + j] = b1.get(i, j);
            }
            for j in 0..m {
                data[i * d + n + j] = b2.get(i, j);
                data[(n + j) * d + i] = b2.get(i, j);
            }
        }
        for i in 0..m {
            for j in 0..m {
                data[(n + i) * d + n + j] = b4.get(i, j);
            }
        }
        Ok(SymMatrix { dim: d, data })
    }

    /// Cyclic Jacobi eigen-decomposition.
    pub fn eigen(&self) -> Result<Eigen> {
        if !self.is_finite() {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let n = self.dim;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let fro = self.frobenius();
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_TOL * fro {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        Ok(Eigen {
            values: order.iter().map(|&i| a[i * n + i]).collect(),
            vectors: order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect(),
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Largest absolute eigenvalue.
    pub fn opnorm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }

    /// Default PSD tolerance `1e-9 · (1 + ‖M‖_op)`.
    pub fn default_tolerance(&self) -> Result<f64> {
        Ok(1e-9 * (1.0 + self.opnorm()?))
    }

    /// Applies `f` to the spectrum: `V f(Λ) Vᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = self.eigen()?;
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        for (lam, vec) in e.values.iter().zip(&e.vectors) {
            let fl = f(*lam);
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] += fl * vec[i] * vec[j];
                }
            }
        }
        SymMatrix::new(n, data)
    }

    /// Square root of a PSD matrix (negative rounding noise clamped to 0).
    pub fn sqrt_psd(&self) -> Result<Self> {
        self.spectral_map(|l| l.max(0.0).sqrt())
    }

    /// `M^{-1/2}` of a positive definite matrix.
    pub fn inv_sqrt(&self) -> Result<Self> {
        if self.min_eigenvalue()? <= 0.0 {
            return Err(Error::Precondition("inverse square root needs a positive definite matrix".into()));
        }
        self.spectral_map(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> Result<Self> {
        let ev = self.eigenvalues()?;
        if ev.iter().any(|l| l.abs() < PIVOT_FLOOR) {
            return Err(Error::InvalidMatrix("singular matrix".into()));
        }
        self.spectral_map(|l| 1.0 / l)
    }

    /// Determinant via LDLᵀ with diagonal pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_finite() {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        match ldl_determinant(self) {
            Some(d) => Ok(d),
            None => Ok(self.eigenvalues()?.iter().product()),
        }
    }

    /// `log det` of a positive definite matrix.
    pub fn log_det(&self) -> Result<f64> {
        let d = self.determinant()?;
        if d <= 0.0 {
            return Err(Error::Precondition("log det needs a positive definite matrix".into()));
        }
        Ok(d.ln())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

/// Returns `None` when a pivot falls under the floor.
fn ldl_determinant(m: &SymMatrix) -> Option<f64> {
    let n = m.dim;
    let mut a = m.data.clone();
    let scale = a.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + i].abs().total_cmp(&a[j * n + j].abs()))?;
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            for r in 0..n {
                a.swap(r * n + k, r * n + p);
            }
        }
        let d = a[k * n + k];
        if d.abs() < PIVOT_FLOOR * scale {
            return None;
        }
        det *= d;
        for i in (k + 1)..n {
            let l = a[i * n + k] / d;
            for j in (k + 1)..=i {
                a[i * n + j] -= l * a[j * n + k];
                a[j * n + i] = a[i * n + j];
            }
        }
        for i in (k + 1)..n {
            a[i * n + k] = 0.0;
            a[k * n + i] = 0.0;
        }
    }
    Some(det)
}

/// PSD test by smallest Jacobi eigenvalue.
pub fn psd_check(m: &SymMatrix, tol: f64) -> Result<PsdVerdict> {
    if !(tol >= 0.0) {
        return Err(Error::Range { name: "tol", value: tol, expected: ">= 0" });
    }
    let min_eigenvalue = m.min_eigenvalue()?;
    Ok(PsdVerdict { is_psd: min_eigenvalue >= -tol, min_eigenvalue, tolerance_used: tol })
}

/// [`psd_check`] at the relative default tolerance.
pub fn psd_check_default(m: &SymMatrix) -> Result<PsdVerdict> {
    let tol = m.default_tolerance()?;
    psd_check(m, tol)
}

/// `det(I + M)`.
pub fn det_id_plus(m: &SymMatrix) -> Result<f64> {
    m.shift(1.0).determinant()
}
