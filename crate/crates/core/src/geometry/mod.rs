//! Convex bodies as membership-oracle trees, with Monte Carlo measures and
//! empirical checks of the geometric inequalities.

mod corpus;
mod inequality;
mod monte_carlo;
mod polytope;

pub use corpus::{random_symmetric_pairs, random_symmetric_polytope, read_corpus, write_corpus, BodyPair};
pub use inequality::{check_geometric_inequality, check_lebesgue_limit, GeometricCheck, InequalityParams, MeasureSet};
pub use monte_carlo::{
    gaussian_barycenter, gaussian_barycenter_with, gaussian_measure, gaussian_measure_with, lebesgue_volume,
    Barycenter, MeasureEstimate,
};
pub use polytope::{Facet, VPolytope};

use crate::error::{Error, Result};
use crate::lp::in_hull_sum;
use crate::matrix::{psd_check_default, SymMatrix};
use polytope::dot;
use serde::{Deserialize, Serialize};

/// Slack for boundary points in closed-form membership tests.
const MEMBER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    dim: usize,
    node: Node,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Halfspace { normal: Vec<f64>, offset: f64 },
    SymSlab { normal: Vec<f64>, half_width: f64 },
    AxisBox { half_widths: Vec<f64> },
    Ball { radius: f64 },
    Ellipsoid { shape: SymMatrix },
    Polytope(VPolytope),
    Intersect(Vec<ConvexBody>),
    Scale { factor: f64, body: Box<ConvexBody> },
    MinkSum { left: Box<ConvexBody>, right: Box<ConvexBody>, resolved: Box<SumOracle> },
}

/// Membership oracle chosen for a Minkowski sum at construction.
#[derive(Clone, Debug, PartialEq)]
enum SumOracle {
    /// The sum is itself a primitive.
    Closed(ConvexBody),
    /// Two polytopes: exact filters in front of one LP.
    Polytopes { p: VPolytope, q: VPolytope, cuts: Vec<(Vec<f64>, f64)> },
}

/// Summand after absorbing scale factors.
enum Operand {
    AxisBox(Vec<f64>),
    Ball(usize, f64),
    Slab(Vec<f64>, f64),
    Polytope(VPolytope),
}

impl Operand {
    fn of(body: &ConvexBody) -> Option<Operand> {
        match &body.node {
            Node::AxisBox { half_widths } => Some(Operand::AxisBox(half_widths.clone())),
            Node::Ball { radius } => Some(Operand::Ball(body.dim, *radius)),
            Node::SymSlab { normal, half_width } => Some(Operand::Slab(normal.clone(), *half_width)),
            Node::Polytope(p) => Some(Operand::Polytope(p.clone())),
            Node::Scale { factor, body } => Operand::of(body).map(|o| o.scaled(*factor)),
            Node::MinkSum { resolved, .. } => match resolved.as_ref() {
                SumOracle::Closed(b) => Operand::of(b),
                SumOracle::Polytopes { .. } => None,
            },
            _ => None,
        }
    }

    fn scaled(self, c: f64) -> Operand {
        match self {
            Operand::AxisBox(h) => Operand::AxisBox(h.iter().map(|v| v * c.abs()).collect()),
            Operand::Ball(d, r) => Operand::Ball(d, r * c.abs()),
            Operand::Slab(n, w) => Operand::Slab(n, w * c.abs()),
            Operand::Polytope(p) => Operand::Polytope(p.scaled(c)),
        }
    }

    fn into_polytope(self) -> Option<VPolytope> {
        match self {
            Operand::Polytope(p) => Some(p),
            Operand::AxisBox(h) => {
                let d = h.len();
                let vs = (0..1usize << d)
                    .map(|m| (0..d).map(|k| if m & (1 << k) != 0 { h[k] } else { -h[k] }).collect())
                    .collect();
                VPolytope::new(vs).ok()
            }
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Operand::AxisBox(_) => "box",
            Operand::Ball(..) => "ball",
            Operand::Slab(..) => "slab",
            Operand::Polytope(_) => "polytope",
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Range { name, value: v, expected: "finite and > 0" })
    }
}

fn unit(normal: &[f64]) -> Result<Vec<f64>> {
    let len = dot(normal, normal).sqrt();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::Precondition("normal must be a finite nonzero vector".into()));
    }
    Ok(normal.iter().map(|v| v / len).collect())
}

impl ConvexBody {
    /// `{x : ⟨normal, x⟩ ≤ offset}` with `offset > 0`.
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        positive("offset", offset)?;
        Self::halfspace_unchecked(normal, offset)
    }

    /// Halfspace without the interior-origin requirement. Meant for building
    /// off-centre test bodies such as shifted slabs.
    pub fn halfspace_unchecked(normal: Vec<f64>, offset: f64) -> Result<Self> {
        unit(&normal)?;
        if !offset.is_finite() {
            return Err(Error::Range { name: "offset", value: offset, expected: "finite" });
        }
        Ok(Self { dim: normal.len(), node: Node::Halfspace { normal, offset } })
    }

    /// `{x : |⟨n, x⟩| ≤ half_width}` where `n` is `normal` scaled to unit length.
    pub fn sym_slab(normal: Vec<f64>, half_width: f64) -> Result<Self> {
        positive("half_width", half_width)?;
        let normal = unit(&normal)?;
        Ok(Self { dim: normal.len(), node: Node::SymSlab { normal, half_width } })
    }

    pub fn axis_box(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(Error::Precondition("box needs at least one axis".into()));
        }
        for &h in &half_widths {
            positive("half_width", h)?;
        }
        Ok(Self { dim: half_widths.len(), node: Node::AxisBox { half_widths } })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("ball needs dimension >= 1".into()));
        }
        positive("radius", radius)?;
        Ok(Self { dim, node: Node::Ball { radius } })
    }

    /// `{x : xᵀ M x ≤ 1}` for PSD `M`; a singular `M` gives a cylinder.
    pub fn ellipsoid(shape: SymMatrix) -> Result<Self> {
        if !psd_check_default(&shape)?.is_psd {
            return Err(Error::InvalidMatrix("ellipsoid shape must be positive semidefinite".into()));
        }
        Ok(Self { dim: shape.dim(), node: Node::Ellipsoid { shape } })
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let p = VPolytope::new(vertices)?;
        Ok(Self { dim: p.dim(), node: Node::Polytope(p) })
    }

    pub fn intersect(bodies: Vec<ConvexBody>) -> Result<Self> {
        let dim = bodies.first().ok_or_else(|| Error::Precondition("empty intersection".into()))?.dim;
        if let Some(b) = bodies.iter().find(|b| b.dim != dim) {
            return Err(Error::Dim { expected: dim, found: b.dim });
        }
        Ok(Self { dim, node: Node::Intersect(bodies) })
    }

    /// `c·K`; negative `c` reflects.
    pub fn scale(factor: f64, body: ConvexBody) -> Result<Self> {
        if !(factor.is_finite() && factor != 0.0) {
            return Err(Error::Range { name: "factor", value: factor, expected: "finite and nonzero" });
        }
        if factor == 1.0 {
            return Ok(body);
        }
        Ok(Self { dim: body.dim, node: Node::Scale { factor, body: Box::new(body) } })
    }

    /// `K + L`. Supported: box+box, ball+ball, parallel slabs, and any pair
    /// of polytopes or boxes (scaled or not).
    pub fn mink_sum(left: ConvexBody, right: ConvexBody) -> Result<Self> {
        if left.dim != right.dim {
            return Err(Error::Dim { expected: left.dim, found: right.dim });
        }
        let dim = left.dim;
        let unsupported = |why: String| Error::UnsupportedCombination(why);
        let (Some(x), Some(y)) = (Operand::of(&left), Operand::of(&right)) else {
            return Err(unsupported("Minkowski sums take boxes, balls, slabs or polytopes".into()));
        };
        let resolved = match (x, y) {
            (Operand::AxisBox(h), Operand::AxisBox(g)) => {
                SumOracle::Closed(Self::axis_box(h.iter().zip(&g).map(|(a, b)| a + b).collect())?)
            }
            (Operand::Ball(_, r), Operand::Ball(_, s)) => SumOracle::Closed(Self::ball(dim, r + s)?),
            (Operand::Slab(n, w), Operand::Slab(m, v)) => {
                if (dot(&n, &m).abs() - 1.0).abs() > 1e-12 {
                    return Err(unsupported("slab normals must be parallel".into()));
                }
                SumOracle::Closed(Self::sym_slab(n, w + v)?)
            }
            (x, y) => {
                let (kx, ky) = (x.kind(), y.kind());
                match (x.into_polytope(), y.into_polytope()) {
                    (Some(p), Some(q)) => {
                        let cuts = [&p, &q]
                            .iter()
                            .flat_map(|s| s.facets().unwrap_or(&[]).iter())
                            .map(|f| (f.normal.clone(), p.support(&f.normal) + q.support(&f.normal)))
                            .collect();
                        SumOracle::Polytopes { p, q, cuts }
                    }
                    _ => return Err(unsupported(format!("no membership oracle for {kx} + {ky}"))),
                }
            }
        };
        Ok(Self {
            dim,
            node: Node::MinkSum { left: Box::new(left), right: Box::new(right), resolved: Box::new(resolved) },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        match &self.node {
            Node::Halfspace { normal, offset } => dot(normal, x) <= offset + MEMBER_TOL * (1.0 + offset.abs()),
            Node::SymSlab { normal, half_width } => dot(normal, x).abs() <= half_width * (1.0 + MEMBER_TOL),
            Node::AxisBox { half_widths } => x.iter().zip(half_widths).all(|(v, h)| v.abs() <= h * (1.0 + MEMBER_TOL)),
            Node::Ball { radius } => dot(x, x) <= radius * radius * (1.0 + MEMBER_TOL),
            Node::Ellipsoid { shape } => shape.quad_form(x) <= 1.0 + MEMBER_TOL,
            Node::Polytope(p) => p.contains(x),
            Node::Intersect(bs) => bs.iter().all(|b| b.contains(x)),
            Node::Scale { factor, body } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                body.contains(&y)
            }
            Node::MinkSum { resolved, .. } => match resolved.as_ref() {
                SumOracle::Closed(b) => b.contains(x),
                SumOracle::Polytopes { p, q, cuts } => {
                    for (u, h) in cuts {
                        if dot(u, x) > h + 1e-9 * (1.0 + h.abs()) {
                            return false;
                        }
                    }
                    if let (Some(g), Some(k)) = (p.gauge(x), q.gauge(x)) {
                        // x = λx + (1−λ)x with λx ∈ P, (1−λ)x ∈ Q.
                        if g + k >= g * k {
                            return true;
                        }
                    }
                    in_hull_sum(p.vertices(), q.vertices(), x)
                }
            },
        }
    }

    /// Syntactic origin symmetry: every leaf is symmetric.
    pub fn is_symmetric(&self) -> bool {
        match &self.node {
            Node::Halfspace { .. } => false,
            Node::SymSlab { .. } | Node::AxisBox { .. } | Node::Ball { .. } | Node::Ellipsoid { .. } => true,
            Node::Polytope(p) => p.is_symmetric(),
            Node::Intersect(bs) => bs.iter().all(|b| b.is_symmetric()),
            Node::Scale { body, .. } => body.is_symmetric(),
            Node::MinkSum { left, right, .. } => left.is_symmetric() && right.is_symmetric(),
        }
    }

    /// Axis-aligned box containing the body, if one is known.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match &self.node {
            Node::Halfspace { .. } => None,
            Node::SymSlab { normal, half_width } => {
                (self.dim == 1).then(|| vec![(-half_width / normal[0].abs(), half_width / normal[0].abs())])
            }
            Node::AxisBox { half_widths } => Some(half_widths.iter().map(|&h| (-h, h)).collect()),
            Node::Ball { radius } => Some(vec![(-radius, *radius); self.dim]),
            Node::Ellipsoid { shape } => {
                let inv = shape.inverse().ok()?;
                Some((0..self.dim).map(|i| inv.get(i, i).sqrt()).map(|e| (-e, e)).collect())
            }
            Node::Polytope(p) => Some(
                (0..self.dim)
                    .map(|k| {
                        p.vertices().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[k]), hi.max(v[k])))
                    })
                    .collect(),
            ),
            Node::Intersect(bs) => bs.iter().filter_map(|b| b.bounding_box()).reduce(|a, b| {
                a.iter().zip(&b).map(|(&(l1, h1), &(l2, h2))| (l1.max(l2), h1.min(h2))).collect()
            }),
            Node::Scale { factor, body } => body.bounding_box().map(|bb| {
                bb.into_iter()
                    .map(|(lo, hi)| if *factor > 0.0 { (lo * factor, hi * factor) } else { (hi * factor, lo * factor) })
                    .collect()
            }),
            Node::MinkSum { left, right, .. } => {
                let (a, b) = (left.bounding_box()?, right.bounding_box()?);
                Some(a.iter().zip(&b).map(|(&(l1, h1), &(l2, h2))| (l1 + l2, h1 + h2)).collect())
            }
        }
    }
}

/// JSON mirror of the node tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Halfspace { normal: Vec<f64>, offset: f64 },
    SymSlab { normal: Vec<f64>, half_width: f64 },
    Box { half_widths: Vec<f64> },
    Ball { dim: usize, radius: f64 },
    Ellipsoid { shape: SymMatrix },
    VPolytope { vertices: Vec<Vec<f64>> },
    Intersect { bodies: Vec<BodySpec> },
    Scale { factor: f64, body: Box<BodySpec> },
    MinkSum { left: Box<BodySpec>, right: Box<BodySpec> },
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;
    fn try_from(s: BodySpec) -> Result<Self> {
        match s {
            BodySpec::Halfspace { normal, offset } => Self::halfspace(normal, offset),
            BodySpec::SymSlab { normal, half_width } => Self::sym_slab(normal, half_width),
            BodySpec::Box { half_widths } => Self::axis_box(half_widths),
            BodySpec::Ball { dim, radius } => Self::ball(dim, radius),
            BodySpec::Ellipsoid { shape } => Self::ellipsoid(shape),
            BodySpec::VPolytope { vertices } => Self::polytope(vertices),
            BodySpec::Intersect { bodies } => {
                Self::intersect(bodies.into_iter().map(Self::try_from).collect::<Result<_>>()?)
            }
            BodySpec::Scale { factor, body } => Self::scale(factor, Self::try_from(*body)?),
            BodySpec::MinkSum { left, right } => Self::mink_sum(Self::try_from(*left)?, Self::try_from(*right)?),
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(b: ConvexBody) -> Self {
        match b.node {
            Node::Halfspace { normal, offset } => BodySpec::Halfspace { normal, offset },
            Node::SymSlab { normal, half_width } => BodySpec::SymSlab { normal, half_width },
            Node::AxisBox { half_widths } => BodySpec::Box { half_widths },
            Node::Ball { radius } => BodySpec::Ball { dim: b.dim, radius },
            Node::Ellipsoid { shape } => BodySpec::Ellipsoid { shape },
            Node::Polytope(p) => BodySpec::VPolytope { vertices: p.vertices().to_vec() },
            Node::Intersect(bs) => BodySpec::Intersect { bodies: bs.into_iter().map(Into::into).collect() },
            Node::Scale { factor, body } => BodySpec::Scale { factor, body: Box::new((*body).into()) },
            Node::MinkSum { left, right, .. } => {
                BodySpec::MinkSum { left: Box::new((*left).into()), right: Box::new((*right).into()) }
            }
        }
    }
}
