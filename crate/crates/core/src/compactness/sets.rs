use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::hull::{dist, nearest_point};
use crate::prob_space::{FiniteProbSpace, MeasurablePartition};
use crate::rn_module::{glue_points, RandomBall, RandomPoint};
use crate::scalar::{glue_scalars, RandomScalar};

/// Relative shrink applied when projecting onto an open ball, so projected
/// points are members of the open set.
pub(crate) const BALL_SHRINK: f64 = 1e-9;

/// A sigma-stable, L0-convex, a.s. bounded closed set given by a vertex list
/// at every atom: `{ x : x(w) in conv(vertices(w)) for every atom w }`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomwisePolytope {
    space: FiniteProbSpace,
    dim: usize,
    vertices: Vec<Vec<Vec<f64>>>,
}

impl AtomwisePolytope {
    pub fn new(space: &FiniteProbSpace, vertices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if vertices.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: vertices.len(),
            });
        }
        let dim = vertices
            .iter()
            .find_map(|vs| vs.first().map(Vec::len))
            .ok_or(Error::EmptySection(0))?;
        for (atom, vs) in vertices.iter().enumerate() {
            if vs.is_empty() {
                return Err(Error::EmptySection(atom));
            }
            for v in vs {
                if v.len() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite(atom));
                }
            }
        }
        Ok(AtomwisePolytope {
            space: space.clone(),
            dim,
            vertices,
        })
    }

    /// The same vertex list at every atom, i.e. `L0(F, conv(vertices))`.
    pub fn uniform(space: &FiniteProbSpace, vertices: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(space, vec![vertices; space.len()])
    }

    /// `[0, 1]^d` at every atom.
    pub fn unit_cube(space: &FiniteProbSpace, dim: usize) -> Self {
        let verts: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| (0..dim).map(|i| ((mask >> i) & 1) as f64).collect())
            .collect();
        Self::uniform(space, verts).expect("cube vertices are valid")
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self, atom: usize) -> &[Vec<f64>] {
        &self.vertices[atom]
    }

    pub fn all_vertices(&self) -> &[Vec<Vec<f64>>] {
        &self.vertices
    }

    /// Vertex barycenter at every atom.
    pub fn barycenter(&self) -> RandomPoint {
        RandomPoint::from_fn(&self.space, self.dim, |a| centroid(&self.vertices[a]))
    }
}

pub(crate) fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let mut c = vec![0.0; d];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    let n = points.len() as f64;
    c.iter_mut().for_each(|x| *x /= n);
    c
}

/// Finitely representable sigma-stable sets.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    /// `sigma(G0)`: all gluings of a finite generator list.
    FiniteSigmaHull(Vec<RandomPoint>),
    AtomwisePolytope(AtomwisePolytope),
    /// An open random ball.
    EpsilonBall(RandomBall),
}

/// The classical set a [`SetSpec`] reduces to at one atom.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Points(Vec<Vec<f64>>),
    Polytope(Vec<Vec<f64>>),
    Ball { center: Vec<f64>, radius: f64 },
}

impl SetSpec {
    pub fn sigma_hull(generators: Vec<RandomPoint>) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyFamily)?;
        for g in &generators[1..] {
            first.ensure_compatible(g)?;
        }
        Ok(SetSpec::FiniteSigmaHull(generators))
    }

    pub fn space(&self) -> &FiniteProbSpace {
        match self {
            SetSpec::FiniteSigmaHull(g) => g[0].space(),
            SetSpec::AtomwisePolytope(p) => p.space(),
            SetSpec::EpsilonBall(b) => b.center().space(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetSpec::FiniteSigmaHull(g) => g[0].dim(),
            SetSpec::AtomwisePolytope(p) => p.dim(),
            SetSpec::EpsilonBall(b) => b.center().dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SetSpec::FiniteSigmaHull(_) => "sigma_hull",
            SetSpec::AtomwisePolytope(_) => "polytope",
            SetSpec::EpsilonBall(_) => "ball",
        }
    }

    pub fn section(&self, atom: usize) -> Section {
        match self {
            SetSpec::FiniteSigmaHull(g) => Section::Points(g.iter().map(|p| p.at(atom).to_vec()).collect()),
            SetSpec::AtomwisePolytope(p) => Section::Polytope(p.vertices(atom).to_vec()),
            SetSpec::EpsilonBall(b) => Section::Ball {
                center: b.center().at(atom).to_vec(),
                radius: b.radius().at(atom),
            },
        }
    }

    /// The smallest L0-convex sigma-stable set containing this one. Sigma-hulls
    /// become the polytope spanned by their generator values.
    pub fn l0_convex_hull(&self) -> SetSpec {
        match self {
            SetSpec::FiniteSigmaHull(g) => {
                let space = g[0].space();
                let verts = (0..space.len())
                    .map(|a| g.iter().map(|p| p.at(a).to_vec()).collect())
                    .collect();
                SetSpec::AtomwisePolytope(AtomwisePolytope::new(space, verts).expect("generators are valid"))
            }
            other => other.clone(),
        }
    }

    /// Draws a point of the set, independently at each atom.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomPoint {
        let space = self.space();
        let sections: Vec<Section> = (0..space.len()).map(|a| self.section(a)).collect();
        RandomPoint::from_fn(space, self.dim(), |a| sections[a].sample_with(rng))
    }

    /// Per-atom distance from `x` to the section (zero means member).
    pub fn excess(&self, x: &RandomPoint) -> Result<RandomScalar> {
        self.space().ensure_same(x.space())?;
        if x.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let vals = (0..self.space().len())
            .map(|a| self.section(a).distance(x.at(a)))
            .collect();
        RandomScalar::new(self.space(), vals)
    }

    /// The set at one atom, as a set over the one-atom space.
    pub fn restrict_to_atom(&self, atom: usize) -> Result<SetSpec> {
        let single = self.space().atom_space(atom)?;
        Ok(match self {
            SetSpec::FiniteSigmaHull(g) => SetSpec::FiniteSigmaHull(
                g.iter()
                    .map(|p| RandomPoint::new(&single, &[p.at(atom).to_vec()]))
                    .collect::<Result<_>>()?,
            ),
            SetSpec::AtomwisePolytope(p) => SetSpec::AtomwisePolytope(AtomwisePolytope::new(
                &single,
                vec![p.vertices(atom).to_vec()],
            )?),
            SetSpec::EpsilonBall(b) => SetSpec::EpsilonBall(RandomBall::new(
                b.center().restrict_to_atom(atom)?,
                RandomScalar::new(&single, vec![b.radius().at(atom)])?,
            )?),
        })
    }

    /// `sum_k 1_{A_k} G_k` for sets of the same kind (sigma-hulls need equal
    /// generator counts).
    pub fn glue(partition: &MeasurablePartition, pieces: &[SetSpec]) -> Result<SetSpec> {
        if pieces.len() != partition.piece_count() {
            return Err(Error::PieceCountMismatch {
                expected: partition.piece_count(),
                got: pieces.len(),
            });
        }
        let space = partition.space();
        match &pieces[0] {
            SetSpec::FiniteSigmaHull(first) => {
                let mut cols: Vec<Vec<RandomPoint>> = vec![Vec::new(); first.len()];
                for p in pieces {
                    match p {
                        SetSpec::FiniteSigmaHull(g) if g.len() == first.len() => {
                            for (c, x) in cols.iter_mut().zip(g) {
                                c.push(x.clone());
                            }
                        }
                        _ => return Err(Error::Unsupported("gluing sets of different shapes".into())),
                    }
                }
                let gens = cols
                    .iter()
                    .map(|c| glue_points(partition, c))
                    .collect::<Result<Vec<_>>>()?;
                SetSpec::sigma_hull(gens)
            }
            SetSpec::AtomwisePolytope(_) => {
                let mut verts = Vec::with_capacity(space.len());
                for a in 0..space.len() {
                    match &pieces[partition.label(a)] {
                        SetSpec::AtomwisePolytope(p) => {
                            p.space().ensure_same(space)?;
                            verts.push(p.vertices(a).to_vec());
                        }
                        _ => return Err(Error::Unsupported("gluing sets of different shapes".into())),
                    }
                }
                Ok(SetSpec::AtomwisePolytope(AtomwisePolytope::new(space, verts)?))
            }
            SetSpec::EpsilonBall(_) => {
                let mut centers = Vec::new();
                let mut radii = Vec::new();
                for p in pieces {
                    match p {
                        SetSpec::EpsilonBall(b) => {
                            centers.push(b.center().clone());
                            radii.push(b.radius().clone());
                        }
                        _ => return Err(Error::Unsupported("gluing sets of different shapes".into())),
                    }
                }
                Ok(SetSpec::EpsilonBall(RandomBall::new(
                    glue_points(partition, &centers)?,
                    glue_scalars(partition, &radii)?,
                )?))
            }
        }
    }
}

impl Section {
    pub fn dim(&self) -> usize {
        match self {
            Section::Points(p) | Section::Polytope(p) => p[0].len(),
            Section::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Section::Points(p) if p.len() > 1)
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Section::Points(p) | Section::Polytope(p) => {
                let d = p[0].len();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for v in p {
                    for i in 0..d {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
            Section::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// Nearest point of the (closed, for balls slightly shrunk) section.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Section::Points(p) => {
                let mut best = 0;
                let mut bd = f64::INFINITY;
                for (i, v) in p.iter().enumerate() {
                    let d = dist(v, x);
                    if d < bd {
                        bd = d;
                        best = i;
                    }
                }
                p[best].clone()
            }
            Section::Polytope(p) => nearest_point(p, x).point,
            Section::Ball { center, radius } => {
                let r = radius * (1.0 - BALL_SHRINK);
                let d = dist(x, center);
                if d <= r {
                    x.to_vec()
                } else {
                    center
                        .iter()
                        .zip(x)
                        .map(|(c, xi)| c + (xi - c) * (r / d))
                        .collect()
                }
            }
        }
    }

    /// Distance from `x` to the section; for balls, to the closed ball.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Section::Ball { center, radius } => (dist(x, center) - radius).max(0.0),
            _ => dist(&self.project(x), x),
        }
    }

    /// Vertex list when the section is a polytope or a finite point set.
    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        match self {
            Section::Points(p) | Section::Polytope(p) => Some(p),
            Section::Ball { .. } => None,
        }
    }

    /// A representative interior point.
    pub fn center(&self) -> Vec<f64> {
        match self {
            Section::Points(p) | Section::Polytope(p) => centroid(p),
            Section::Ball { center, .. } => center.clone(),
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Section::Points(p) => p[rng.random_range(0..p.len())].clone(),
            Section::Polytope(p) => {
                let u: f64 = rng.random();
                if p.len() == 1 || u < 0.1 {
                    return p[rng.random_range(0..p.len())].clone();
                }
                let weights: Vec<f64> = if u < 0.25 {
                    // a point on a segment between two vertices
                    let i = rng.random_range(0..p.len());
                    let j = rng.random_range(0..p.len());
                    let t: f64 = rng.random();
                    let mut w = vec![0.0; p.len()];
                    w[i] += t;
                    w[j] += 1.0 - t;
                    w
                } else {
                    let raw: Vec<f64> = (0..p.len()).map(|_| Exp1.sample(rng)).collect();
                    let s: f64 = raw.iter().sum();
                    raw.iter().map(|r| r / s).collect()
                };
                let mut x = vec![0.0; p[0].len()];
                for (v, w) in p.iter().zip(&weights) {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += w * vi;
                    }
                }
                x
            }
            Section::Ball { center, radius } => {
                let d = center.len();
                let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                let u: f64 = rng.random();
                let r = radius * (1.0 - BALL_SHRINK) * u.powf(1.0 / d as f64);
                center
                    .iter()
                    .zip(&dir)
                    .map(|(c, di)| c + r * di / n)
                    .collect()
            }
        }
    }

    /// The section with finite point sets replaced by their convex hull.
    pub fn convexified(self) -> Section {
        match self {
            Section::Points(p) => Section::Polytope(p),
            other => other,
        }
    }
}
