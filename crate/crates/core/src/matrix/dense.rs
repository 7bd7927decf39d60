use super::SymMatrix;
use crate::error::{Error, Result};

/// General rectangular matrix, used for off-diagonal blocks and transforms.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dim { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Dense::from_sym(&SymMatrix::identity(n))
    }

    pub fn from_sym(m: &SymMatrix) -> Self {
        Self { rows: m.dim(), cols: m.dim(), data: m.entries().to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn matmul(&self, other: &Dense) -> Result<Dense> {
        if self.cols != other.rows {
            return Err(Error::Dim { expected: self.cols, found: other.rows });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Dense { rows: self.rows, cols: other.cols, data })
    }

    pub fn opnorm(&self) -> Result<f64> {
        // ‖F‖_op = sqrt(λ_max(Fᵀ F)).
        let g = self.transpose().matmul(self)?.into_sym()?;
        Ok(g.opnorm()?.sqrt())
    }

    /// Converts a square matrix, symmetrizing rounding noise.
    pub fn into_sym(self) -> Result<SymMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dim { expected: self.rows, found: self.cols });
        }
        SymMatrix::new(self.rows, self.data)
    }
}
