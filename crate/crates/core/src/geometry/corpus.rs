//! Random origin-symmetric polytope pairs and their JSON-lines storage.

use super::ConvexBody;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SampleStream};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyPair {
    pub k: ConvexBody,
    pub l: ConvexBody,
}

/// Hull of `m` normal points and their negations, `dim ≤ m ≤ dim + 3`, each
/// point rescaled by a log-uniform factor in `[0.5, 2]`.
pub fn random_symmetric_polytope(dim: usize, stream: &mut SampleStream) -> Result<ConvexBody> {
    let m = dim + (stream.next_u64() % 4) as usize;
    loop {
        let mut vs = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let r = 2f64.powf(2.0 * stream.uniform() - 1.0);
            let v: Vec<f64> = (0..dim).map(|_| r * stream.normal()).collect();
            vs.push(v.iter().map(|x| -x).collect());
            vs.push(v);
        }
        // A degenerate draw (measure zero) is simply redrawn.
        if let Ok(b) = ConvexBody::polytope(vs) {
            return Ok(b);
        }
    }
}

/// `count` pairs cycling through dimensions 2, 3, 4.
pub fn random_symmetric_pairs(count: usize, seed: u64) -> Result<Vec<BodyPair>> {
    let base = derive_seed(seed, "corpus");
    (0..count)
        .map(|i| {
            let dim = 2 + i % 3;
            let mut s = SampleStream::new(base, i as u64);
            Ok(BodyPair { k: random_symmetric_polytope(dim, &mut s)?, l: random_symmetric_polytope(dim, &mut s)? })
        })
        .collect()
}

pub fn write_corpus(pairs: &[BodyPair], mut out: impl Write) -> Result<()> {
    for p in pairs {
        let line = serde_json::to_string(p).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(())
}

/// Reads one pair per non-empty line.
pub fn read_corpus(input: impl BufRead) -> Result<Vec<BodyPair>> {
    let mut pairs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        pairs.push(serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?);
    }
    Ok(pairs)
}
