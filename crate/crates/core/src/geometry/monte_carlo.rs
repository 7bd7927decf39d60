//! Hit-rate estimators over counter-addressed sample chunks.

use super::ConvexBody;
use crate::error::{check_range, Error, Result};
use crate::exec::Exec;
use crate::rng::SampleStream;
use serde::{Deserialize, Serialize};

/// Samples per chunk; chunk `c` always draws from stream `c`.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MeasureEstimate {
    fn from_hits(hits: usize, samples: usize, seed: u64, scale: f64) -> Self {
        let p = hits as f64 / samples as f64;
        Self { mean: scale * p, stderr: scale * (p * (1.0 - p) / samples as f64).sqrt(), samples, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barycenter {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub hits: usize,
}

enum Law<'a> {
    Gaussian,
    Uniform(&'a [(f64, f64)]),
}

/// Runs `visit` on every sample, chunk by chunk, and returns the per-chunk
/// accumulators in chunk order.
fn chunked<T, F>(dim: usize, samples: usize, seed: u64, law: &Law, exec: Exec, visit: F) -> Vec<T>
where
    T: Default + Send,
    F: Fn(&[f64], &mut T) + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    exec.map(chunks, |c| {
        let mut stream = SampleStream::new(seed, c as u64);
        let mut acc = T::default();
        let mut x = vec![0.0; dim];
        let count = CHUNK.min(samples - c * CHUNK);
        for _ in 0..count {
            match law {
                Law::Gaussian => stream.fill_normal(&mut x),
                Law::Uniform(bb) => {
                    for (v, &(lo, hi)) in x.iter_mut().zip(bb.iter()) {
                        *v = lo + (hi - lo) * stream.uniform();
                    }
                }
            }
            visit(&x, &mut acc);
        }
        acc
    })
}

fn count_hits(body: &ConvexBody, samples: usize, seed: u64, law: &Law, exec: Exec) -> usize {
    chunked(body.dim(), samples, seed, law, exec, |x, n: &mut usize| {
        if body.contains(x) {
            *n += 1;
        }
    })
    .into_iter()
    .sum()
}

fn check_samples(samples: usize) -> Result<()> {
    check_range("samples", samples as f64, samples >= 1, ">= 1")
}

pub fn gaussian_measure(body: &ConvexBody, samples: usize, seed: u64) -> Result<MeasureEstimate> {
    gaussian_measure_with(body, samples, seed, Exec::default())
}

/// Standard Gaussian measure by hit rate.
pub fn gaussian_measure_with(body: &ConvexBody, samples: usize, seed: u64, exec: Exec) -> Result<MeasureEstimate> {
    check_samples(samples)?;
    let hits = count_hits(body, samples, seed, &Law::Gaussian, exec);
    Ok(MeasureEstimate::from_hits(hits, samples, seed, 1.0))
}

/// Lebesgue volume by hit rate inside `bbox`, scaled by the box volume.
pub fn lebesgue_volume(
    body: &ConvexBody,
    bbox: &[(f64, f64)],
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<MeasureEstimate> {
    check_samples(samples)?;
    if bbox.len() != body.dim() {
        return Err(Error::Dim { expected: body.dim(), found: bbox.len() });
    }
    let vol: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let hits = count_hits(body, samples, seed, &Law::Uniform(bbox), exec);
    Ok(MeasureEstimate::from_hits(hits, samples, seed, vol))
}

pub fn gaussian_barycenter(body: &ConvexBody, samples: usize, seed: u64) -> Result<Barycenter> {
    gaussian_barycenter_with(body, samples, seed, Exec::default())
}

#[derive(Default)]
struct Moments {
    hits: usize,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

/// Conditional mean of the Gaussian samples that land in the body.
pub fn gaussian_barycenter_with(body: &ConvexBody, samples: usize, seed: u64, exec: Exec) -> Result<Barycenter> {
    check_samples(samples)?;
    let d = body.dim();
    let parts = chunked(d, samples, seed, &Law::Gaussian, exec, |x, m: &mut Moments| {
        if body.contains(x) {
            if m.sum.is_empty() {
                m.sum = vec![0.0; x.len()];
                m.sum_sq = vec![0.0; x.len()];
            }
            m.hits += 1;
            for k in 0..x.len() {
                m.sum[k] += x[k];
                m.sum_sq[k] += x[k] * x[k];
            }
        }
    });
    let mut hits = 0;
    let (mut s, mut s2) = (vec![0.0; d], vec![0.0; d]);
    for p in parts.into_iter().filter(|p| p.hits > 0) {
        hits += p.hits;
        for k in 0..d {
            s[k] += p.sum[k];
            s2[k] += p.sum_sq[k];
        }
    }
    if hits == 0 {
        return Err(Error::NoHits);
    }
    let h = hits as f64;
    let mean: Vec<f64> = s.iter().map(|v| v / h).collect();
    let stderr = (0..d).map(|k| ((s2[k] / h - mean[k] * mean[k]).max(0.0) / h).sqrt()).collect();
    Ok(Barycenter { mean, stderr, hits })
}
