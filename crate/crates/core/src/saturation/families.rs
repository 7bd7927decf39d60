//! Explicit one-dimensional certificates whose ratio exceeds 1.

use super::{CertificateSet, CrsDatum, Sign};
use crate::error::{check_range, Result};
use crate::matrix::SymMatrix;
use serde::{Deserialize, Serialize};

/// `φ(r) = a²(b²−1)r² + (1 − 2a²b² − (a²+b²))r + (a²−1)b²`.
pub fn conjugate_phi(a: f64, b: f64, r: f64) -> f64 {
    let (a2, b2) = (a * a, b * b);
    a2 * (b2 - 1.0) * r * r + (1.0 - 2.0 * a2 * b2 - (a2 + b2)) * r + (a2 - 1.0) * b2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugateFamily {
    pub b: f64,
    pub r_a: f64,
    pub phi_at_ra: f64,
    pub s_star: f64,
    pub fr_sq_lower: f64,
    pub cert: CertificateSet,
}

/// Family for `σ = +1`, `a + b = 1`, `α = 1/b`, `β = 1/a`.
pub fn counterexample_conjugate(a: f64) -> Result<ConjugateFamily> {
    check_range("a", a, a > 0.0 && a < 1.0, "in (0, 1)")?;
    let b = 1.0 - a;
    let r = (1.0 - a) * (1.0 - a + a * a) / (a * a * (2.0 - a));
    let phi = conjugate_phi(a, b, r);
    // φ(r_a) ≥ 0 in exact arithmetic; rounding near a = 1/2 can flip its sign.
    let s = (phi.max(0.0) * (r + 1.0)) / (8.0 * r * r);
    let fr_sq_lower =
        1.0 + 4.0 * r * r * s * s / ((b * b + s * r) * (a * a + s) * (r + 1.0) * (r + 1.0));

    let datum = CrsDatum::gcmpi(1, a, b, Sign::Plus)?;
    let w = s / (r + 1.0);
    let bm = SymMatrix::from_rows(&[vec![w * r * r, -w * r], vec![-w * r, w]])?;
    let cert = CertificateSet {
        a1: SymMatrix::scalar(s * r / (b * b)),
        a2: SymMatrix::scalar(s / (a * a)),
        b: bm,
        c: SymMatrix::scalar(s * r / ((r + 1.0) * a * a * b * b)),
        datum,
    };
    Ok(ConjugateFamily { b, r_a: r, phi_at_ra: phi, s_star: s, fr_sq_lower, cert })
}

/// `(1 + z² + cz) / (1 + z² + 2z)`, the ratio of the difference family at
/// scale `z`.
pub fn difference_ratio(c: f64, z: f64) -> f64 {
    (1.0 + z * z + c * z) / (1.0 + z * z + 2.0 * z)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DifferenceFamily {
    pub c_value: f64,
    pub z_star: f64,
    pub fr_sq_lower: f64,
    pub cert: CertificateSet,
}

/// Family for `σ = −1`, `α = 1/b`, `β = 1/a`.
pub fn counterexample_difference(a: f64, b: f64) -> Result<DifferenceFamily> {
    check_range("a", a, a > 0.0, "> 0")?;
    check_range("b", b, b > 0.0, "> 0")?;
    let sum = a * a + b * b;
    let c_value = sum + 1.0 / sum;
    let z = 1.0;
    let (a2, b2) = (a * a, b * b);
    let k = z / sum;
    let bm = SymMatrix::from_rows(&[vec![k * b2 * b2, k * a2 * b2], vec![k * a2 * b2, k * a2 * a2]])?;
    let cert = CertificateSet {
        a1: SymMatrix::scalar(z),
        a2: SymMatrix::scalar(z),
        b: bm,
        c: SymMatrix::scalar(k),
        datum: CrsDatum::gcmpi(1, a, b, Sign::Minus)?,
    };
    Ok(DifferenceFamily { c_value, z_star: z, fr_sq_lower: difference_ratio(c_value, z), cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saturation::verify_gcmpi_certificate;

    #[test]
    fn half_is_degenerate() {
        let f = counterexample_conjugate(0.5).unwrap();
        assert!((f.r_a - 1.0).abs() < 1e-15);
        assert!(f.phi_at_ra.abs() < 1e-15 && f.s_star.abs() < 1e-15);
        assert!((f.fr_sq_lower - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_matches_closed_form() {
        let f = counterexample_conjugate(0.25).unwrap();
        assert!((f.r_a - 39.0 / 7.0).abs() < 1e-13);
        assert!((f.phi_at_ra - 9.0 / 28.0).abs() < 1e-14);
        assert!((f.fr_sq_lower - 1.004_803_631_756_756_8).abs() < 1e-12);
        let r = verify_gcmpi_certificate(&f.cert).unwrap();
        assert!(r.lmi_ok && !r.guaranteed);
        assert!((r.ratio - f.fr_sq_lower).abs() < 1e-9);
    }

    #[test]
    fn difference_examples() {
        let f = counterexample_difference(0.5f64.sqrt(), 0.5f64.sqrt()).unwrap();
        assert!((f.c_value - 2.0).abs() < 1e-14 && (f.fr_sq_lower - 1.0).abs() < 1e-14);
        for (a, b) in [(0.5, 0.5), (1.0, 1.0)] {
            let f = counterexample_difference(a, b).unwrap();
            assert!((f.c_value - 2.5).abs() < 1e-14 && (f.fr_sq_lower - 1.125).abs() < 1e-14);
            let r = verify_gcmpi_certificate(&f.cert).unwrap();
            assert!(r.lmi_ok && (r.ratio - f.fr_sq_lower).abs() < 1e-12);
        }
        assert!(counterexample_difference(0.0, 1.0).is_err());
    }
}
