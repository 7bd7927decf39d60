//! Determinant inequalities for PSD matrices. Each check returns raw sides
//! alongside its verdict so callers can re-judge at another tolerance.

use super::{det_id_plus, psd_check_default, SymMatrix};
use crate::error::{check_range, Error, Result};
use serde::{Deserialize, Serialize};

/// One-sided relative slack applied to every `holds` verdict.
pub const HOLDS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Comparison {
    /// `lhs ≤ rhs`, up to relative slack.
    pub fn at_most(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + HOLDS_TOL * rhs.abs() }
    }

    /// `lhs ≥ rhs`, up to relative slack.
    pub fn at_least(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs >= rhs - HOLDS_TOL * rhs.abs() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetStability {
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

fn same_dims(ms: &[&SymMatrix]) -> Result<()> {
    let d = ms[0].dim();
    for m in &ms[1..] {
        if m.dim() != d {
            return Err(Error::Dim { expected: d, found: m.dim() });
        }
    }
    Ok(())
}

fn require_psd(m: &SymMatrix, what: &str) -> Result<()> {
    if psd_check_default(m)?.is_psd {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} is not positive semidefinite")))
    }
}

/// `det(I+A)/det(I+B)` against `(1 + ‖A−B‖)^n` in both directions.
pub fn check_det_stability(a: &SymMatrix, b: &SymMatrix) -> Result<DetStability> {
    same_dims(&[a, b])?;
    let ratio = det_id_plus(a)? / det_id_plus(b)?;
    let bound = (1.0 + a.try_sub(b)?.opnorm()?).powi(a.dim() as i32);
    let holds = ratio <= bound * (1.0 + HOLDS_TOL) && ratio * bound >= 1.0 - HOLDS_TOL;
    Ok(DetStability { ratio, bound, holds })
}

/// `det(I+A+B) ≤ det(I+A)·det(I+B)`.
pub fn check_gci_gaussian(a: &SymMatrix, b: &SymMatrix) -> Result<Comparison> {
    same_dims(&[a, b])?;
    let lhs = det_id_plus(&a.try_add(b)?)?;
    let rhs = det_id_plus(a)? * det_id_plus(b)?;
    Ok(Comparison::at_most(lhs, rhs))
}

/// `det(C)·det(C+A+B) ≤ det(C+A)·det(C+B)`.
pub fn check_gci_shifted(a: &SymMatrix, b: &SymMatrix, c: &SymMatrix) -> Result<Comparison> {
    same_dims(&[a, b, c])?;
    let lhs = c.determinant()? * c.try_add(a)?.try_add(b)?.determinant()?;
    let rhs = c.try_add(a)?.determinant()? * c.try_add(b)?.determinant()?;
    Ok(Comparison::at_most(lhs, rhs))
}

/// `det(I+DZD) ≥ det(I+Z)` for `D ⪰ I`.
pub fn check_conjugation_det(d: &SymMatrix, z: &SymMatrix) -> Result<Comparison> {
    same_dims(&[d, z])?;
    require_psd(&d.shift(-1.0), "D - I")?;
    let lhs = det_id_plus(&z.sandwich(d)?)?;
    let rhs = det_id_plus(z)?;
    Ok(Comparison::at_least(lhs, rhs))
}

/// `det(I+t1·A)·det(I+t2·B) ≥ det(I+t2·C)·det(I+t1·(A+B−C))` for `A, B ⪰ C`
/// and `0 ≤ t1 ≤ t2`.
pub fn check_ratio_monotone(
    a: &SymMatrix,
    b: &SymMatrix,
    c: &SymMatrix,
    t1: f64,
    t2: f64,
) -> Result<Comparison> {
    same_dims(&[a, b, c])?;
    check_range("t1", t1, t1 >= 0.0, ">= 0")?;
    check_range("t2", t2, t2 >= t1, ">= t1")?;
    require_psd(&a.try_sub(c)?, "A - C")?;
    require_psd(&b.try_sub(c)?, "B - C")?;
    let lhs = det_id_plus(&a.scale(t1))? * det_id_plus(&b.scale(t2))?;
    let mixed = a.try_add(b)?.try_sub(c)?.scale(t1);
    let rhs = det_id_plus(&c.scale(t2))? * det_id_plus(&mixed)?;
    Ok(Comparison::at_least(lhs, rhs))
}

/// `det(I+αC)·det(I+(1−α)C+Z) ≥ det(I+C)·det(I+αZ)`.
pub fn check_interpolation(c: &SymMatrix, z: &SymMatrix, alpha: f64) -> Result<Comparison> {
    same_dims(&[c, z])?;
    check_range("alpha", alpha, (0.0..=1.0).contains(&alpha), "in [0, 1]")?;
    let beta = 1.0 - alpha;
    let lhs = det_id_plus(&c.scale(alpha))? * det_id_plus(&c.scale(beta).try_add(z)?)?;
    let rhs = det_id_plus(c)? * det_id_plus(&z.scale(alpha))?;
    Ok(Comparison::at_least(lhs, rhs))
}
