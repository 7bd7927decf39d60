//! Empirical checks of `γ(K)γ(L) ≤ γ(αK ∩ βL)·γ(aK + σbL)` and of its
//! Lebesgue scaling limit.

use super::monte_carlo::{gaussian_barycenter_with, gaussian_measure_with, lebesgue_volume, MeasureEstimate};
use super::ConvexBody;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::derive_seed;
use crate::saturation::Sign;
use serde::{Deserialize, Serialize};

/// Parameters in normalised form: positive magnitudes and one sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub sigma: Sign,
}

impl InequalityParams {
    /// Folds the signs of all four parameters into `sigma`, as reflecting
    /// `K` or `L` leaves Gaussian measures unchanged.
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64, sigma: Sign) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("a", a), ("b", b)] {
            if !(v.is_finite() && v != 0.0) {
                return Err(Error::Range { name, value: v, expected: "finite and nonzero" });
            }
        }
        let flip = if alpha * beta * a * b < 0.0 { -1.0 } else { 1.0 };
        let sigma = Sign::of(sigma.value() * flip);
        Ok(Self { alpha: alpha.abs(), beta: beta.abs(), a: a.abs(), b: b.abs(), sigma })
    }

    /// `γ(K)γ(L) ≤ γ(K∩L)γ(K+L)`.
    pub fn gcrsi() -> Self {
        Self { alpha: 1.0, beta: 1.0, a: 1.0, b: 1.0, sigma: Sign::Plus }
    }

    /// `γ(K)γ(L) ≤ γ(K∩L)γ(aK + bL)` for signed `a, b`.
    pub fn ab(a: f64, b: f64) -> Result<Self> {
        Self::new(1.0, 1.0, a, b, Sign::Plus)
    }

    /// `γ((1/b)K ∩ (1/a)L)·γ(aK + bL)`.
    pub fn gcmpi(a: f64, b: f64) -> Result<Self> {
        Self::new(1.0 / b, 1.0 / a, a, b, Sign::Plus)
    }

    /// `γ((1/b)K ∩ (1/a)L)·γ(aK − bL)`.
    pub fn milman_pajor(a: f64, b: f64) -> Result<Self> {
        Self::new(1.0 / b, 1.0 / a, a, b, Sign::Minus)
    }

    /// `γ(max(1/b,1)K ∩ max(1/a,1)L)·γ(aK + bL)` for `a, b > 0`.
    pub fn unified(a: f64, b: f64) -> Result<Self> {
        Self::new((1.0 / b).max(1.0), (1.0 / a).max(1.0), a, b, Sign::Plus)
    }

    /// Whether the inequality is a theorem for all centred convex bodies:
    /// the `|a|, |b|, |a ± b| ≥ 1` family with `α = β = 1`, the unified
    /// range `3 min(a², b²) + max(a², b²) ≥ 1`, or Milman–Pajor with
    /// `a² + b² = 1`. Larger `α, β` only enlarge the intersection, so they
    /// are allowed too.
    pub fn is_proven(&self) -> bool {
        const TOL: f64 = 1e-12;
        let Self { alpha, beta, a, b, sigma } = *self;
        let ge = |x: f64, y: f64| x >= y - TOL;
        let family = ge(alpha, 1.0) && ge(beta, 1.0) && ge(a, 1.0) && ge(b, 1.0) && ge((a + sigma.value() * b).abs(), 1.0);
        let (lo, hi) = ((a * a).min(b * b), (a * a).max(b * b));
        let unified = sigma == Sign::Plus
            && ge(alpha, (1.0 / b).max(1.0))
            && ge(beta, (1.0 / a).max(1.0))
            && ge(3.0 * lo + hi, 1.0);
        let mp = sigma == Sign::Minus && (a * a + b * b - 1.0).abs() <= 1e-9 && ge(alpha, 1.0 / b) && ge(beta, 1.0 / a);
        family || unified || mp
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub k: MeasureEstimate,
    pub l: MeasureEstimate,
    pub intersection: MeasureEstimate,
    pub sum: MeasureEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs)` in units of `stderr`.
    pub margin_sigmas: f64,
    /// Delta-method standard error of `rhs − lhs`.
    pub stderr: f64,
    pub measures: MeasureSet,
}

impl GeometricCheck {
    fn from_measures(m: MeasureSet, samples: usize) -> Self {
        let lhs = m.k.mean * m.l.mean;
        let rhs = m.intersection.mean * m.sum.mean;
        // Delta method for products of independent estimates.
        let var_l = (m.l.mean * m.k.stderr).powi(2) + (m.k.mean * m.l.stderr).powi(2);
        let var_r = (m.sum.mean * m.intersection.stderr).powi(2) + (m.intersection.mean * m.sum.stderr).powi(2);
        // A hit rate of exactly 0 or 1 reports zero spread; floor at the
        // resolution of one sample, relative to the larger side.
        let floor = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE) / samples as f64;
        let se = (var_l + var_r).sqrt().max(floor);
        Self { lhs, rhs, margin_sigmas: (rhs - lhs) / se, stderr: se, measures: m }
    }
}

fn require_centered(body: &ConvexBody, samples: usize, seed: u64, exec: Exec) -> Result<()> {
    if body.is_symmetric() {
        return Ok(());
    }
    let bc = gaussian_barycenter_with(body, samples, seed, exec)?;
    for (k, (m, s)) in bc.mean.iter().zip(&bc.stderr).enumerate() {
        let sigmas = if *s > 0.0 { m / s } else if *m == 0.0 { 0.0 } else { f64::INFINITY };
        if sigmas.abs() > 3.0 {
            return Err(Error::Centering { coordinate: k, sigmas });
        }
    }
    Ok(())
}

/// Estimates both sides with independent seeds per measure.
pub fn check_geometric_inequality(
    k: &ConvexBody,
    l: &ConvexBody,
    p: &InequalityParams,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<GeometricCheck> {
    if k.dim() != l.dim() {
        return Err(Error::Dim { expected: k.dim(), found: l.dim() });
    }
    let p = InequalityParams::new(p.alpha, p.beta, p.a, p.b, p.sigma)?;
    let inter = ConvexBody::intersect(vec![
        ConvexBody::scale(p.alpha, k.clone())?,
        ConvexBody::scale(p.beta, l.clone())?,
    ])?;
    let sum = ConvexBody::mink_sum(
        ConvexBody::scale(p.a, k.clone())?,
        ConvexBody::scale(p.sigma.value() * p.b, l.clone())?,
    )?;
    require_centered(k, samples, derive_seed(seed, "barycenter-k"), exec)?;
    require_centered(l, samples, derive_seed(seed, "barycenter-l"), exec)?;
    let g = |body: &ConvexBody, tag: &str| gaussian_measure_with(body, samples, derive_seed(seed, tag), exec);
    let m = MeasureSet { k: g(k, "k")?, l: g(l, "l")?, intersection: g(&inter, "intersection")?, sum: g(&sum, "sum")? };
    Ok(GeometricCheck::from_measures(m, samples))
}

fn hull(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    a.iter().zip(b).map(|(&(l1, h1), &(l2, h2))| (l1.min(l2), h1.max(h2))).collect()
}

/// `|K||L| ≤ |K∩L|·|K ± L|`, all volumes sampled uniformly in one box that
/// contains every body involved.
pub fn check_lebesgue_limit(
    k: &ConvexBody,
    l: &ConvexBody,
    sign: Sign,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<GeometricCheck> {
    if k.dim() != l.dim() {
        return Err(Error::Dim { expected: k.dim(), found: l.dim() });
    }
    let unbounded = || Error::Precondition("Lebesgue check needs bounded bodies".into());
    let (bk, bl) = (k.bounding_box().ok_or_else(unbounded)?, l.bounding_box().ok_or_else(unbounded)?);
    let inter = ConvexBody::intersect(vec![k.clone(), l.clone()])?;
    let sum = ConvexBody::mink_sum(k.clone(), ConvexBody::scale(sign.value(), l.clone())?)?;
    let bs = sum.bounding_box().ok_or_else(unbounded)?;
    let bbox = hull(&hull(&bk, &bl), &bs);
    let v = |body: &ConvexBody, tag: &str| lebesgue_volume(body, &bbox, samples, derive_seed(seed, tag), exec);
    let m = MeasureSet { k: v(k, "k")?, l: v(l, "l")?, intersection: v(&inter, "intersection")?, sum: v(&sum, "sum")? };
    Ok(GeometricCheck::from_measures(m, samples))
}
