//! The random Euclidean module `L0(F, R^d)`: random points, the random norm,
//! gluing, random balls and random distances.

use crate::compactness::AtomwisePolytope;
use crate::error::{Error, Result};
use crate::hull::dist;
use crate::prob_space::{Event, FiniteProbSpace, MeasurablePartition};
use crate::scalar::RandomScalar;

/// A per-atom norm on `R^d`. Implementations must satisfy the norm axioms.
pub trait PointNorm: Sync {
    fn norm(&self, v: &[f64]) -> f64;
}

/// The default per-atom norm.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl PointNorm for Euclidean {
    fn norm(&self, v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Manhattan;

impl PointNorm for Manhattan {
    fn norm(&self, v: &[f64]) -> f64 {
        v.iter().map(|x| x.abs()).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Chebyshev;

impl PointNorm for Chebyshev {
    fn norm(&self, v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// One `d`-vector per atom, stored atom-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPoint {
    space: FiniteProbSpace,
    dim: usize,
    coords: Vec<f64>,
}

impl RandomPoint {
    /// Builds a point from one coordinate vector per atom.
    pub fn new(space: &FiniteProbSpace, per_atom: &[Vec<f64>]) -> Result<Self> {
        if per_atom.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: per_atom.len(),
            });
        }
        let dim = per_atom[0].len();
        if dim == 0 {
            return Err(Error::DimMismatch { expected: 1, got: 0 });
        }
        let mut coords = Vec::with_capacity(dim * per_atom.len());
        for (atom, v) in per_atom.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(atom));
            }
            coords.extend_from_slice(v);
        }
        Ok(RandomPoint {
            space: space.clone(),
            dim,
            coords,
        })
    }

    /// The same vector at every atom.
    pub fn constant(space: &FiniteProbSpace, v: &[f64]) -> Result<Self> {
        Self::new(space, &vec![v.to_vec(); space.len()])
    }

    /// The origin `theta`.
    pub fn zero(space: &FiniteProbSpace, dim: usize) -> Self {
        RandomPoint {
            space: space.clone(),
            dim,
            coords: vec![0.0; dim * space.len()],
        }
    }

    pub(crate) fn from_flat(space: &FiniteProbSpace, dim: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), dim * space.len());
        RandomPoint {
            space: space.clone(),
            dim,
            coords,
        }
    }

    /// Glue of per-atom vectors produced by `f(atom)`.
    pub fn from_fn(space: &FiniteProbSpace, dim: usize, mut f: impl FnMut(usize) -> Vec<f64>) -> Self {
        let mut coords = Vec::with_capacity(dim * space.len());
        for atom in 0..space.len() {
            let v = f(atom);
            assert_eq!(v.len(), dim, "per-atom vector length");
            coords.extend(v);
        }
        Self::from_flat(space, dim, coords)
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, atom: usize) -> &[f64] {
        &self.coords[atom * self.dim..(atom + 1) * self.dim]
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub(crate) fn ensure_compatible(&self, other: &RandomPoint) -> Result<()> {
        self.space.ensure_same(&other.space)?;
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &RandomPoint) -> Result<RandomPoint> {
        self.ensure_compatible(other)?;
        Ok(Self::from_flat(
            &self.space,
            self.dim,
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &RandomPoint) -> Result<RandomPoint> {
        self.ensure_compatible(other)?;
        Ok(Self::from_flat(
            &self.space,
            self.dim,
            self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        ))
    }

    /// The vector at `atom` as a point of the one-atom space.
    pub fn restrict_to_atom(&self, atom: usize) -> Result<RandomPoint> {
        let single = self.space.atom_space(atom)?;
        Ok(Self::from_flat(&single, self.dim, self.at(atom).to_vec()))
    }
}

/// Module multiplication `xi * x`.
pub fn module_scale(xi: &RandomScalar, x: &RandomPoint) -> Result<RandomPoint> {
    xi.space().ensure_same(&x.space)?;
    Ok(RandomPoint::from_fn(&x.space, x.dim, |a| {
        x.at(a).iter().map(|c| xi.at(a) * c).collect()
    }))
}

pub fn random_norm(x: &RandomPoint) -> RandomScalar {
    random_norm_with(x, &Euclidean)
}

pub fn random_norm_with(x: &RandomPoint, norm: &dyn PointNorm) -> RandomScalar {
    RandomScalar::from_vec_unchecked(
        &x.space,
        (0..x.space.len()).map(|a| norm.norm(x.at(a))).collect(),
    )
}

/// `||x - y||` atom-wise under the Euclidean norm.
pub fn random_distance(x: &RandomPoint, y: &RandomPoint) -> Result<RandomScalar> {
    x.ensure_compatible(y)?;
    Ok(RandomScalar::from_vec_unchecked(
        &x.space,
        (0..x.space.len()).map(|a| dist(x.at(a), y.at(a))).collect(),
    ))
}

/// `sum_k 1_{A_k} x_k`.
pub fn glue_points(partition: &MeasurablePartition, pieces: &[RandomPoint]) -> Result<RandomPoint> {
    if pieces.len() != partition.piece_count() {
        return Err(Error::PieceCountMismatch {
            expected: partition.piece_count(),
            got: pieces.len(),
        });
    }
    let dim = pieces[0].dim;
    for p in pieces {
        partition.space().ensure_same(&p.space)?;
        if p.dim != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: p.dim,
            });
        }
    }
    Ok(RandomPoint::from_fn(partition.space(), dim, |a| {
        pieces[partition.label(a)].at(a).to_vec()
    }))
}

/// Distance to a finite generator set together with a partition attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestSelection {
    /// `d(x, G)`, the atom-wise minimum over generators.
    pub distance: RandomScalar,
    /// Pieces `A_k` on which one generator attains the distance.
    pub partition: MeasurablePartition,
    /// Generator index used on each piece.
    pub piece_generator: Vec<usize>,
}

impl NearestSelection {
    /// Generator index chosen at each atom.
    pub fn chosen(&self) -> Vec<usize> {
        self.partition
            .labels()
            .iter()
            .map(|&k| self.piece_generator[k])
            .collect()
    }

    /// The gluing `sum_k 1_{A_k} x_k` of the selected generators.
    pub fn glued(&self, gens: &[RandomPoint]) -> Result<RandomPoint> {
        let pieces: Vec<RandomPoint> = self
            .piece_generator
            .iter()
            .map(|&g| gens[g].clone())
            .collect();
        glue_points(&self.partition, &pieces)
    }
}

/// `d(x, G)` for a finite `G`, which equals the distance to its sigma-hull.
/// Ties go to the lowest generator index.
pub fn distance_to_finite_set(x: &RandomPoint, gens: &[RandomPoint]) -> Result<NearestSelection> {
    if gens.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for g in gens {
        x.ensure_compatible(g)?;
    }
    let n = x.space.len();
    let mut best = vec![f64::INFINITY; n];
    let mut chosen = vec![0usize; n];
    for (k, g) in gens.iter().enumerate() {
        for a in 0..n {
            let d = dist(x.at(a), g.at(a));
            if d < best[a] {
                best[a] = d;
                chosen[a] = k;
            }
        }
    }
    let partition = MeasurablePartition::from_keys(&x.space, &chosen)?;
    let mut piece_generator = vec![0; partition.piece_count()];
    for a in 0..n {
        piece_generator[partition.label(a)] = chosen[a];
    }
    Ok(NearestSelection {
        distance: RandomScalar::from_vec_unchecked(&x.space, best),
        partition,
        piece_generator,
    })
}

/// `D(H)`: atom-wise largest vertex-to-vertex distance of the section.
pub fn random_diameter(polytope: &AtomwisePolytope) -> Result<RandomScalar> {
    let space = polytope.space();
    let mut values = Vec::with_capacity(space.len());
    for a in 0..space.len() {
        let verts = polytope.vertices(a);
        if verts.is_empty() {
            return Err(Error::EmptySection(a));
        }
        let mut d: f64 = 0.0;
        for i in 0..verts.len() {
            for j in (i + 1)..verts.len() {
                d = d.max(dist(&verts[i], &verts[j]));
            }
        }
        values.push(d);
    }
    Ok(RandomScalar::from_vec_unchecked(space, values))
}

/// `B(x, eps) = { y : ||y - x|| < eps on Omega }`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBall {
    center: RandomPoint,
    radius: RandomScalar,
}

impl RandomBall {
    pub fn new(center: RandomPoint, radius: RandomScalar) -> Result<Self> {
        center.space.ensure_same(radius.space())?;
        if !radius.is_strictly_positive() {
            return Err(Error::NonPositiveRadius);
        }
        Ok(RandomBall { center, radius })
    }

    pub fn center(&self) -> &RandomPoint {
        &self.center
    }

    pub fn radius(&self) -> &RandomScalar {
        &self.radius
    }
}

/// Strict membership at every atom.
pub fn ball_contains(ball: &RandomBall, x: &RandomPoint) -> Result<bool> {
    let d = random_distance(x, &ball.center)?;
    Ok(d.values()
        .iter()
        .zip(ball.radius.values())
        .all(|(d, r)| d < r))
}

/// `integral ||x|| / (1 + ||x||) dP`, the quasinorm of convergence in probability.
pub fn el_quasinorm(x: &RandomPoint) -> f64 {
    random_norm(x).map(|n| n / (1.0 + n)).expectation()
}

/// Indicator-scaled copy: keeps `x` on `event`, zero elsewhere.
pub fn restrict_to_event(x: &RandomPoint, event: &Event) -> Result<RandomPoint> {
    module_scale(&RandomScalar::indicator(event), x)
}
