//! Constrained search for large determinant ratios.
//!
//! The search runs over `(B, C)` through their lower-triangular factors, and
//! the A-blocks are completed to the cheapest feasible diagonal. Every
//! reported ratio comes from a re-verified certificate, so the result is a
//! certified lower bound on the squared saturation constant.

use super::{verify_certificate, CertificateSet, CrsDatum};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrix::SymMatrix;
use crate::optim::{golden_section, nelder_mead};
use crate::rng::{derive_index, SampleStream};
use serde::{Deserialize, Serialize};

/// Inflation added to both A-blocks before a certificate is reported.
pub const REPORT_INFLATION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Total objective evaluations across all workers. A worker may overrun
    /// its share by at most one simplex step.
    pub budget: usize,
    pub seed: u64,
    pub workers: usize,
    pub exec: Exec,
}

impl SearchOptions {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self { budget, seed, workers: 4, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrEstimate {
    pub best_ratio: f64,
    pub best_cert: CertificateSet,
    pub evaluations: usize,
}

pub fn estimate_fr_gaussian(datum: &CrsDatum, budget: usize, seed: u64) -> Result<FrEstimate> {
    estimate_fr_gaussian_with(datum, &SearchOptions::new(budget, seed))
}

/// Splits the budget over independently seeded workers and keeps the best
/// certified result. Deterministic given `(seed, workers)`.
pub fn estimate_fr_gaussian_with(datum: &CrsDatum, opts: &SearchOptions) -> Result<FrEstimate> {
    if opts.budget == 0 {
        return Err(Error::Range { name: "budget", value: 0.0, expected: ">= 1" });
    }
    let workers = opts.workers.clamp(1, opts.budget);
    let share = |w: usize| opts.budget / workers + usize::from(w < opts.budget % workers);
    let results = opts.exec.map(workers, |w| {
        Worker::new(*datum, derive_index(opts.seed, w as u64)).run(share(w))
    });
    let mut best: Option<FrEstimate> = None;
    for r in results {
        let r = r?;
        best = match best {
            Some(b) if b.best_ratio >= r.best_ratio => Some(FrEstimate { evaluations: b.evaluations + r.evaluations, ..b }),
            Some(b) => Some(FrEstimate { evaluations: b.evaluations + r.evaluations, ..r }),
            None => Some(r),
        };
    }
    Ok(best.expect("at least one worker"))
}

/// Number of free parameters for the two factors.
fn param_count(n: usize) -> usize {
    let m = 2 * n;
    m * (m + 1) / 2 + n * (n + 1) / 2
}

fn lower_gram(dim: usize, p: &[f64]) -> SymMatrix {
    let mut l = vec![0.0; dim * dim];
    let mut k = 0;
    for i in 0..dim {
        for j in 0..=i {
            l[i * dim + j] = p[k];
            k += 1;
        }
    }
    SymMatrix::gram(dim, dim, &l)
}

fn unpack(n: usize, p: &[f64]) -> (SymMatrix, SymMatrix) {
    let m = 2 * n;
    let split = m * (m + 1) / 2;
    (lower_gram(m, &p[..split]), lower_gram(n, &p[split..]))
}

/// Cheapest `(A1, A2)` with `diag(A1, A2) ⪰ [[P1, F], [Fᵀ, P2]]`.
///
/// In one dimension the minimiser of `(u + x1)(v + x2)` under `x1·x2 ≥ f²`
/// is exact. In higher dimension the completion `A1 = P1 + t‖F‖I`,
/// `A2 = P2 + (‖F‖/t)I` is feasible for every `t > 0` and `t` is optimised
/// by golden section on `log t`, where the objective is convex.
pub fn complete_a_blocks(datum: &CrsDatum, b: &SymMatrix, c: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    let (p1, f, p2) = datum.constraint_blocks(b, c)?;
    if datum.n == 1 {
        let (u, v, f) = (1.0 + p1.get(0, 0), 1.0 + p2.get(0, 0), f.get(0, 0).abs());
        let x1 = f * (u / v).sqrt();
        let x2 = f * (v / u).sqrt();
        return Ok((p1.shift(x1), p2.shift(x2)));
    }
    let s = f.opnorm()?;
    if s == 0.0 {
        return Ok((p1, p2));
    }
    let cost = |u: f64| {
        let t = u.exp();
        let d1 = p1.shift(1.0 + t * s).log_det().unwrap_or(f64::INFINITY);
        let d2 = p2.shift(1.0 + s / t).log_det().unwrap_or(f64::INFINITY);
        d1 + d2
    };
    let (u, _) = golden_section(-30.0, 30.0, 90, cost);
    let t = u.exp();
    Ok((p1.shift(t * s), p2.shift(s / t)))
}

/// Ratio of the completed certificate for factor parameters `p`.
fn completed_ratio(datum: &CrsDatum, p: &[f64]) -> Option<(f64, CertificateSet)> {
    let (b, c) = unpack(datum.n, p);
    let (a1, a2) = complete_a_blocks(datum, &b, &c).ok()?;
    let cert = CertificateSet { a1, a2, b, c, datum: *datum };
    let r = cert.ratio().ok()?;
    r.is_finite().then_some((r, cert))
}

struct Worker {
    datum: CrsDatum,
    rng: SampleStream,
    best_ratio: f64,
    best_cert: CertificateSet,
    used: usize,
}

impl Worker {
    fn new(datum: CrsDatum, seed: u64) -> Self {
        Self {
            datum,
            rng: SampleStream::new(seed, 0),
            best_ratio: 1.0,
            best_cert: CertificateSet::zero(datum),
            used: 0,
        }
    }

    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        10f64.powf(lo + (hi - lo) * self.rng.uniform())
    }

    fn random_params(&mut self, sd: f64) -> Vec<f64> {
        (0..param_count(self.datum.n)).map(|_| sd * self.rng.normal()).collect()
    }

    /// Inflates, re-verifies and keeps the candidate if it improves.
    fn offer(&mut self, cert: CertificateSet) {
        let cert = cert.inflate(REPORT_INFLATION);
        if let Ok(rep) = verify_certificate(&cert) {
            if rep.lmi_ok && rep.ratio > self.best_ratio {
                self.best_ratio = rep.ratio;
                self.best_cert = cert;
            }
        }
    }

    fn run(mut self, budget: usize) -> Result<FrEstimate> {
        let k = param_count(self.datum.n);

        // Wishart-style proposals G·Gᵀ, with the matrix scale log-uniform
        // in [1e-2, 1e2].
        let proposals = (budget / 4).max(1);
        let mut seed_params: Option<(f64, Vec<f64>)> = None;
        for _ in 0..proposals {
            let sd = self.log_uniform(-2.0, 2.0).sqrt();
            let p = self.random_params(sd);
            self.used += 1;
            if let Some((r, _)) = completed_ratio(&self.datum, &p) {
                if seed_params.as_ref().is_none_or(|(best, _)| r > *best) {
                    seed_params = Some((r, p));
                }
            }
        }
        if let Some((_, p)) = &seed_params {
            if let Some((_, cert)) = completed_ratio(&self.datum, p) {
                self.offer(cert);
            }
        }

        // Nelder–Mead restarts: first from the best proposal, then from
        // small random factors, where the ratio landscape has its ridges.
        let per_start = 300 * (k + 1);
        let mut first = seed_params.map(|(_, p)| p);
        while self.used < budget {
            let start = match first.take() {
                Some(p) => p,
                None => {
                    let sd = self.log_uniform(-1.5, 0.0);
                    self.random_params(sd)
                }
            };
            let max_evals = per_start.min(budget - self.used);
            let datum = self.datum;
            let res = nelder_mead(&start, 0.1, max_evals, 1e-15, |p| {
                completed_ratio(&datum, p).map_or(f64::INFINITY, |(r, _)| -r)
            });
            self.used += res.evaluations.max(1);
            if let Some((_, cert)) = completed_ratio(&self.datum, &res.x) {
                self.offer(cert);
            }
        }
        Ok(FrEstimate { best_ratio: self.best_ratio, best_cert: self.best_cert, evaluations: self.used })
    }
}
