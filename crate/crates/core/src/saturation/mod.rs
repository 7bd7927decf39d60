//! Gaussian saturation for the two-body Brascamp–Lieb datum
//! `L1(x) = (αx1, βx2)`, `L2(x) = a·x1 + σ·b·x2`.
//!
//! A certificate `(A1, A2, B, C)` is feasible when
//!
//! ```text
//! diag(A1, A2) ⪰ [[α²B1, αβB2], [αβB2ᵀ, β²B4]] + [[a²C, σab·C], [σab·C, b²C]]
//! ```
//!
//! and its determinant ratio `det(I+B̄)det(I+C) / (det(I+A1)det(I+A2))`,
//! with `B̄ = B1 + B2 + B2ᵀ + B4`, is a lower bound on the squared
//! saturation constant.

mod families;
mod region;
mod search;

pub use families::{
    conjugate_phi, counterexample_conjugate, counterexample_difference, difference_ratio,
    ConjugateFamily, DifferenceFamily,
};
pub use region::{
    classify_region, find_tail_violation, tail_necessity_margin, Region, RegionRule, RegionVerdict,
    TailMargin,
};
pub use search::{complete_a_blocks, estimate_fr_gaussian, estimate_fr_gaussian_with, FrEstimate, SearchOptions};

use crate::error::{Error, Result};
use crate::matrix::{det_id_plus, psd_check_default, Dense, SymMatrix, HOLDS_TOL};
use serde::{Deserialize, Serialize};

/// Relative tolerance when matching α, β against their presets.
const PRESET_TOL: f64 = 1e-12;

/// Sign of the cross term after normalisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;
    fn try_from(v: i8) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sigma must be +1 or -1, got {v}"))),
        }
    }
}

/// Datum in normalised form: positive magnitudes and a single sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrsDatum {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub sigma: Sign,
}

impl CrsDatum {
    /// Accepts signed parameters and folds every sign into `sigma`, so the
    /// stored datum has `σ = sigma · sgn(αβab)` and positive magnitudes.
    pub fn new(n: usize, alpha: f64, beta: f64, a: f64, b: f64, sigma: Sign) -> Result<Self> {
        if n == 0 {
            return Err(Error::Range { name: "n", value: 0.0, expected: ">= 1" });
        }
        for (name, v) in [("alpha", alpha), ("beta", beta), ("a", a), ("b", b)] {
            if !(v.is_finite() && v != 0.0) {
                return Err(Error::Range { name, value: v, expected: "finite and nonzero" });
            }
        }
        let sigma = sigma.times(Sign::of(alpha * beta * a * b));
        Ok(Self { n, alpha: alpha.abs(), beta: beta.abs(), a: a.abs(), b: b.abs(), sigma })
    }

    /// `α = β = 1`.
    pub fn gcrsi(n: usize, a: f64, b: f64, sigma: Sign) -> Result<Self> {
        Self::new(n, 1.0, 1.0, a, b, sigma)
    }

    /// `α = 1/b`, `β = 1/a`.
    pub fn gcmpi(n: usize, a: f64, b: f64, sigma: Sign) -> Result<Self> {
        Self::new(n, 1.0 / b, 1.0 / a, a, b, sigma)
    }

    /// `α = max(1/b, 1)`, `β = max(1/a, 1)`.
    pub fn unified(n: usize, a: f64, b: f64, sigma: Sign) -> Result<Self> {
        Self::new(n, (1.0 / b.abs()).max(1.0), (1.0 / a.abs()).max(1.0), a, b, sigma)
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= PRESET_TOL * y.abs()
    }

    pub fn is_gcrsi(&self) -> bool {
        Self::close(self.alpha, 1.0) && Self::close(self.beta, 1.0)
    }

    pub fn is_gcmpi(&self) -> bool {
        Self::close(self.alpha, 1.0 / self.b) && Self::close(self.beta, 1.0 / self.a)
    }

    /// Whether a proved theorem forces every feasible certificate of this
    /// datum to have ratio at most 1.
    pub fn saturation_guaranteed(&self) -> bool {
        let (a, b) = (self.a, self.b);
        let gcrsi = self.is_gcrsi() && a >= 1.0 && b >= 1.0 && (a + self.sigma.value() * b).abs() >= 1.0;
        let (lo, hi) = (a.min(b), a.max(b));
        let gcmpi = self.is_gcmpi()
            && self.sigma == Sign::Plus
            && hi <= 1.0
            && 3.0 * lo * lo + hi * hi >= 1.0;
        gcrsi || gcmpi
    }

    /// Right-hand side of the LMI for given `B` and `C`, as `(P1, F, P2)`
    /// with the full matrix `[[P1, F], [Fᵀ, P2]]`.
    pub fn constraint_blocks(&self, b: &SymMatrix, c: &SymMatrix) -> Result<(SymMatrix, Dense, SymMatrix)> {
        let n = self.n;
        if b.dim() != 2 * n {
            return Err(Error::Dim { expected: 2 * n, found: b.dim() });
        }
        if c.dim() != n {
            return Err(Error::Dim { expected: n, found: c.dim() });
        }
        let (al, be, a, bb, s) = (self.alpha, self.beta, self.a, self.b, self.sigma.value());
        let p1 = b.principal(0, n).scale(al * al).axpy(a * a, c)?;
        let p2 = b.principal(n, n).scale(be * be).axpy(bb * bb, c)?;
        let b2 = b.block(0, n, n, n);
        let f: Vec<f64> = (0..n * n)
            .map(|k| al * be * b2.entries()[k] + s * a * bb * c.entries()[k])
            .collect();
        Ok((p1, Dense::new(n, n, f)?, p2))
    }
}

/// Candidate Gaussian certificate for a datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CertificateDoc", try_from = "CertificateDoc")]
pub struct CertificateSet {
    pub a1: SymMatrix,
    pub a2: SymMatrix,
    pub b: SymMatrix,
    pub c: SymMatrix,
    pub datum: CrsDatum,
}

/// Flat JSON layout of a certificate.
#[derive(Serialize, Deserialize)]
struct CertificateDoc {
    n: usize,
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    sigma: Sign,
    #[serde(rename = "A1")]
    a1: SymMatrix,
    #[serde(rename = "A2")]
    a2: SymMatrix,
    #[serde(rename = "B")]
    bm: SymMatrix,
    #[serde(rename = "C")]
    c: SymMatrix,
}

impl From<CertificateSet> for CertificateDoc {
    fn from(c: CertificateSet) -> Self {
        let d = c.datum;
        CertificateDoc {
            n: d.n,
            alpha: d.alpha,
            beta: d.beta,
            a: d.a,
            b: d.b,
            sigma: d.sigma,
            a1: c.a1,
            a2: c.a2,
            bm: c.b,
            c: c.c,
        }
    }
}

impl TryFrom<CertificateDoc> for CertificateSet {
    type Error = Error;
    fn try_from(d: CertificateDoc) -> Result<Self> {
        let datum = CrsDatum::new(d.n, d.alpha, d.beta, d.a, d.b, d.sigma)?;
        CertificateSet::new(d.a1, d.a2, d.bm, d.c, datum)
    }
}

impl CertificateSet {
    /// Checks shapes and that every block is PSD at the default tolerance.
    pub fn new(a1: SymMatrix, a2: SymMatrix, b: SymMatrix, c: SymMatrix, datum: CrsDatum) -> Result<Self> {
        let n = datum.n;
        for (m, d) in [(&a1, n), (&a2, n), (&c, n), (&b, 2 * n)] {
            if m.dim() != d {
                return Err(Error::Dim { expected: d, found: m.dim() });
            }
        }
        for (m, name) in [(&a1, "A1"), (&a2, "A2"), (&b, "B"), (&c, "C")] {
            if !psd_check_default(m)?.is_psd {
                return Err(Error::InvalidMatrix(format!("{name} is not positive semidefinite")));
            }
        }
        Ok(Self { a1, a2, b, c, datum })
    }

    /// All-zero certificate, always feasible with ratio 1.
    pub fn zero(datum: CrsDatum) -> Self {
        let n = datum.n;
        Self {
            a1: SymMatrix::zeros(n),
            a2: SymMatrix::zeros(n),
            b: SymMatrix::zeros(2 * n),
            c: SymMatrix::zeros(n),
            datum,
        }
    }

    /// `B̄ = B1 + B2 + B2ᵀ + B4`.
    pub fn b_bar(&self) -> SymMatrix {
        let n = self.datum.n;
        let (b1, b4) = (self.b.principal(0, n), self.b.principal(n, n));
        let b2 = self.b.block(0, n, n, n);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = b1.get(i, j) + b4.get(i, j) + b2.get(i, j) + b2.get(j, i);
            }
        }
        SymMatrix::new(n, data).expect("square block")
    }

    /// `diag(A1, A2)` minus the constraint right-hand side.
    pub fn lmi_matrix(&self) -> Result<SymMatrix> {
        let (p1, f, p2) = self.datum.constraint_blocks(&self.b, &self.c)?;
        let lhs = SymMatrix::from_blocks(&self.a1, &Dense::zeros(self.datum.n, self.datum.n), &self.a2)?;
        lhs.try_sub(&SymMatrix::from_blocks(&p1, &f, &p2)?)
    }

    pub fn ratio(&self) -> Result<f64> {
        let num = det_id_plus(&self.b_bar())? * det_id_plus(&self.c)?;
        let den = det_id_plus(&self.a1)? * det_id_plus(&self.a2)?;
        Ok(num / den)
    }

    /// Copy with `eps·I` added to both A-blocks.
    pub fn inflate(&self, eps: f64) -> Self {
        Self { a1: self.a1.shift(eps), a2: self.a2.shift(eps), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub lmi_ok: bool,
    pub lmi_min_eig: f64,
    pub ratio: f64,
    pub conclusion_holds: bool,
    /// A proved theorem covers this datum, so `lmi_ok` must imply
    /// `conclusion_holds`.
    pub guaranteed: bool,
}

/// Checks the LMI and the determinant conclusion for the certificate's own
/// datum.
pub fn verify_certificate(cert: &CertificateSet) -> Result<SaturationReport> {
    let v = psd_check_default(&cert.lmi_matrix()?)?;
    let ratio = cert.ratio()?;
    Ok(SaturationReport {
        lmi_ok: v.is_psd,
        lmi_min_eig: v.min_eigenvalue,
        ratio,
        conclusion_holds: ratio <= 1.0 + HOLDS_TOL,
        guaranteed: cert.datum.saturation_guaranteed(),
    })
}

/// [`verify_certificate`] for a datum with `α = β = 1`.
pub fn verify_gcrsi_certificate(cert: &CertificateSet) -> Result<SaturationReport> {
    if !cert.datum.is_gcrsi() {
        return Err(Error::Precondition("GCRSI certificates need alpha = beta = 1".into()));
    }
    verify_certificate(cert)
}

/// [`verify_certificate`] for a datum with `α = 1/b`, `β = 1/a`.
pub fn verify_gcmpi_certificate(cert: &CertificateSet) -> Result<SaturationReport> {
    if !cert.datum.is_gcmpi() {
        return Err(Error::Precondition("GCMPI certificates need alpha = 1/b and beta = 1/a".into()));
    }
    verify_certificate(cert)
}
