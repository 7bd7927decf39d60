//! Vertex-described polytopes with a facet list for fast exact membership.

use crate::error::{Error, Result};
use crate::lp::in_hull;

const FACET_TOL: f64 = 1e-9;

/// Facet `⟨normal, x⟩ ≤ offset` with a unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    /// Present when the hull is full-dimensional.
    facets: Option<Vec<Facet>>,
}

impl VPolytope {
    /// Requires the origin in the hull, and in its interior when the hull is
    /// full-dimensional. Lower-dimensional hulls (segments in the plane)
    /// are kept and answer membership by LP.
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Precondition("polytope needs at least one vertex of positive dimension".into()));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::Dim { expected: dim, found: vertices.iter().map(|v| v.len()).find(|&l| l != dim).unwrap() });
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("non-finite vertex coordinate".into()));
        }
        if !in_hull(&vertices, &vec![0.0; dim]) {
            return Err(Error::Precondition("origin is not in the vertex hull".into()));
        }
        let facets = if affine_rank(&vertices) == dim { Some(facets_of(&vertices, dim)) } else { None };
        if let Some(fs) = &facets {
            if fs.iter().any(|f| f.offset <= FACET_TOL) {
                return Err(Error::Precondition("origin lies on the polytope boundary".into()));
            }
        }
        Ok(Self { dim, vertices, facets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> Option<&[Facet]> {
        self.facets.as_deref()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.facets {
            Some(fs) => fs.iter().all(|f| dot(&f.normal, x) <= f.offset * (1.0 + FACET_TOL) + FACET_TOL),
            None => in_hull(&self.vertices, x),
        }
    }

    /// Minkowski functional `inf{t > 0 : x ∈ tP}` for full-dimensional hulls.
    pub fn gauge(&self, x: &[f64]) -> Option<f64> {
        self.facets
            .as_ref()
            .map(|fs| fs.iter().map(|f| dot(&f.normal, x) / f.offset).fold(0.0, f64::max))
    }

    /// Support function `max_v ⟨u, v⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(u, v)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let vertices = self.vertices.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        let facets = self.facets.as_ref().map(|fs| {
            fs.iter()
                .map(|f| Facet {
                    normal: f.normal.iter().map(|n| n * c.signum()).collect(),
                    offset: f.offset * c.abs(),
                })
                .collect()
        });
        Self { dim: self.dim, vertices, facets }
    }

    /// Whether the vertex set is closed under negation.
    pub fn is_symmetric(&self) -> bool {
        self.vertices.iter().all(|v| {
            self.vertices.iter().any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= 1e-12 * (1.0 + a.abs())))
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-reduces `rows` in place and returns the rank.
fn rank_of(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())) else { break };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(rank, p);
        for i in (rank + 1)..rows.len() {
            let f = rows[i][c] / rows[rank][c];
            for k in c..cols {
                rows[i][k] -= f * rows[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

fn affine_rank(vs: &[Vec<f64>]) -> usize {
    let scale = vs.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    let diffs: Vec<Vec<f64>> = vs[1..].iter().map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect()).collect();
    rank_of(diffs, 1e-10 * (1.0 + scale))
}

/// Determinant by partial-pivot elimination.
fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for i in (c + 1)..n {
            let f = m[i][c] / m[c][c];
            for k in c..n {
                m[i][k] -= f * m[c][k];
            }
        }
    }
    d
}

/// Normal to the hyperplane through `d` points, by cofactor expansion of
/// the `(d−1) × d` difference matrix.
fn hyperplane_normal(points: &[&Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let diffs: Vec<Vec<f64>> =
        points[1..].iter().map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect()).collect();
    (0..d)
        .map(|k| {
            let minor: Vec<Vec<f64>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| *v).collect())
                .collect();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if d == 1 {
                1.0
            } else {
                sign * det(minor)
            }
        })
        .collect()
}

/// Facets by brute force over `d`-subsets of vertices.
fn facets_of(vs: &[Vec<f64>], d: usize) -> Vec<Facet> {
    let scale = vs.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    let mut facets: Vec<Facet> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    let m = vs.len();
    if m < d {
        return facets;
    }
    loop {
        let pts: Vec<&Vec<f64>> = idx.iter().map(|&i| &vs[i]).collect();
        let mut nrm = hyperplane_normal(&pts);
        let len = nrm.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 1e-12 * scale.powi(d as i32 - 1) {
            nrm.iter_mut().for_each(|v| *v /= len);
            let off = dot(&nrm, pts[0]);
            let tol = FACET_TOL * scale;
            let (mut above, mut below) = (false, false);
            for v in vs {
                let s = dot(&nrm, v) - off;
                above |= s > tol;
                below |= s < -tol;
            }
            let oriented = match (above, below) {
                (false, _) => Some(Facet { normal: nrm, offset: off }),
                (true, false) => Some(Facet { normal: nrm.iter().map(|v| -v).collect(), offset: -off }),
                _ => None,
            };
            if let Some(f) = oriented {
                let dup = facets.iter().any(|g| {
                    (g.offset - f.offset).abs() <= tol && g.normal.iter().zip(&f.normal).all(|(a, b)| (a - b).abs() <= 1e-9)
                });
                if !dup {
                    facets.push(f);
                }
            }
        }
        // Next combination in lexicographic order.
        let mut k = d;
        loop {
            if k == 0 {
                return facets;
            }
            k -= 1;
            if idx[k] < m - d + k {
                idx[k] += 1;
                for j in (k + 1)..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> VPolytope {
        VPolytope::new(vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]).unwrap()
    }

    #[test]
    fn square_facets_and_membership() {
        let s = square();
        assert_eq!(s.facets().unwrap().len(), 4);
        assert!(s.contains(&[0.5, 0.5]) && s.contains(&[1.0, 1.0]) && !s.contains(&[1.01, 0.0]));
        assert!((s.gauge(&[0.5, -0.25]).unwrap() - 0.5).abs() < 1e-14);
        assert!((s.support(&[1.0, 1.0]) - 2.0).abs() < 1e-14);
        assert!(s.is_symmetric());
    }

    #[test]
    fn interior_vertices_are_ignored() {
        let mut vs = square().vertices().to_vec();
        vs.push(vec![0.2, 0.1]);
        let p = VPolytope::new(vs).unwrap();
        assert_eq!(p.facets().unwrap().len(), 4);
        assert!(!p.is_symmetric());
    }

    #[test]
    fn cube_in_three_dimensions() {
        let mut vs = Vec::new();
        for m in 0..8 {
            vs.push((0..3).map(|k| if m & (1 << k) != 0 { 1.0 } else { -1.0 }).collect());
        }
        let c = VPolytope::new(vs).unwrap();
        assert_eq!(c.facets().unwrap().len(), 6);
        assert!(c.contains(&[0.9, -0.9, 0.9]) && !c.contains(&[0.0, 0.0, 1.1]));
    }

    #[test]
    fn construction_checks_origin() {
        assert!(VPolytope::new(vec![vec![1.0, 0.0], vec![2.0, 1.0], vec![2.0, -1.0]]).is_err());
        // Origin on an edge.
        assert!(VPolytope::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        // Segment through the origin: lower-dimensional but valid.
        let seg = VPolytope::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert!(seg.facets().is_none() && seg.contains(&[0.3, 0.0]) && !seg.contains(&[0.3, 0.1]));
    }
}
