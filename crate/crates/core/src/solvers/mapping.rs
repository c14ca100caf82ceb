//! Sigma-stable mappings as per-atom function families.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compactness::SetSpec;
use crate::error::{Error, Result};
use crate::prob_space::{FiniteProbSpace, MeasurablePartition};
use crate::rn_module::{glue_points, random_distance, RandomPoint};
use crate::scalar::RandomScalar;

/// One section `t_w` of a sigma-stable mapping.
pub type AtomMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A mapping on whole random points, for cross-checking sigma-stability.
pub type WholeMap = Arc<dyn Fn(&RandomPoint) -> RandomPoint + Send + Sync>;

const SELF_MAP_TOL: f64 = 1e-9;
const GLUE_TOL: f64 = 1e-12;

#[derive(Clone)]
pub struct StableMapping {
    domain: SetSpec,
    maps: Vec<AtomMap>,
    whole: Option<WholeMap>,
}

impl fmt::Debug for StableMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StableMapping")
            .field("domain", &self.domain)
            .field("atoms", &self.maps.len())
            .field("whole", &self.whole.is_some())
            .finish()
    }
}

impl StableMapping {
    pub fn new(domain: SetSpec, maps: Vec<AtomMap>) -> Result<Self> {
        if maps.len() != domain.space().len() {
            return Err(Error::AtomCountMismatch {
                expected: domain.space().len(),
                got: maps.len(),
            });
        }
        Ok(StableMapping {
            domain,
            maps,
            whole: None,
        })
    }

    /// The same section at every atom.
    pub fn uniform(domain: SetSpec, map: AtomMap) -> Self {
        let maps = vec![map; domain.space().len()];
        StableMapping {
            domain,
            maps,
            whole: None,
        }
    }

    /// Attaches a whole-space form, which [`StableMapping::check_sigma_stability`]
    /// then tests instead of the sections.
    pub fn with_whole_space(mut self, whole: WholeMap) -> Self {
        self.whole = Some(whole);
        self
    }

    pub fn domain(&self) -> &SetSpec {
        &self.domain
    }

    pub fn space(&self) -> &FiniteProbSpace {
        self.domain.space()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn atom_map(&self, atom: usize) -> &AtomMap {
        &self.maps[atom]
    }

    pub fn maps(&self) -> &[AtomMap] {
        &self.maps
    }

    pub fn eval_at(&self, atom: usize, x: &[f64]) -> Vec<f64> {
        (self.maps[atom])(x)
    }

    /// `T(x)`, evaluated section by section.
    pub fn apply(&self, x: &RandomPoint) -> Result<RandomPoint> {
        self.space().ensure_same(x.space())?;
        let per_atom: Vec<Vec<f64>> = (0..self.maps.len()).map(|a| self.eval_at(a, x.at(a))).collect();
        for (a, v) in per_atom.iter().enumerate() {
            if v.len() != x.dim() {
                return Err(Error::DimMismatch {
                    expected: x.dim(),
                    got: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite(a));
            }
        }
        RandomPoint::new(x.space(), &per_atom)
    }

    /// `|T(x) - x|` atom-wise, evaluated from scratch.
    pub fn residual(&self, x: &RandomPoint) -> Result<RandomScalar> {
        random_distance(&self.apply(x)?, x)
    }

    pub fn restrict_to_atom(&self, atom: usize) -> Result<StableMapping> {
        Ok(StableMapping {
            domain: self.domain.restrict_to_atom(atom)?,
            maps: vec![self.maps[atom].clone()],
            whole: None,
        })
    }

    /// `sum_k 1_{A_k} T_k`.
    pub fn glue(partition: &MeasurablePartition, pieces: &[StableMapping]) -> Result<StableMapping> {
        let domains: Vec<SetSpec> = pieces.iter().map(|p| p.domain.clone()).collect();
        let domain = SetSpec::glue(partition, &domains)?;
        let maps = (0..partition.space().len())
            .map(|a| pieces[partition.label(a)].maps[a].clone())
            .collect();
        StableMapping::new(domain, maps)
    }

    /// Draws points of the domain and checks that `T` maps them into `g`.
    pub fn check_self_map(&self, g: &SetSpec, samples: usize, seed: u64) -> Result<()> {
        check_maps_into(g, g, samples, seed, |x| self.apply(x))
    }

    pub fn check_sigma_stability(&self, trials: usize, seed: u64) -> Result<StabilityReport> {
        match &self.whole {
            Some(w) => check_sigma_stability(&self.domain, |x| Ok(w(x)), trials, seed),
            None => check_sigma_stability(&self.domain, |x| self.apply(x), trials, seed),
        }
    }
}

/// Samples `from` (its vertices first, when it has any) and fails with the
/// worst atom where `f` leaves `into`.
pub(crate) fn check_maps_into(
    from: &SetSpec,
    into: &SetSpec,
    samples: usize,
    seed: u64,
    f: impl Fn(&RandomPoint) -> Result<RandomPoint>,
) -> Result<()> {
    let space = from.space();
    let mut points: Vec<RandomPoint> = Vec::new();
    let vertex_counts: Vec<usize> = (0..space.len())
        .map(|a| from.section(a).vertices().map_or(0, <[_]>::len))
        .collect();
    let max_vertices = vertex_counts.iter().copied().max().unwrap_or(0);
    for k in 0..max_vertices {
        points.push(RandomPoint::from_fn(space, from.dim(), |a| {
            let sec = from.section(a);
            let v = sec.vertices().unwrap_or_default();
            if v.is_empty() {
                sec.center()
            } else {
                v[k.min(v.len() - 1)].clone()
            }
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        points.push(from.sample_point(&mut rng));
    }
    let mut worst: Option<(usize, f64)> = None;
    for x in &points {
        let y = f(x)?;
        let excess = into.excess(&y)?;
        for (a, &e) in excess.values().iter().enumerate() {
            let scale = 1.0 + y.at(a).iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if e > SELF_MAP_TOL * scale && worst.is_none_or(|(_, w)| e > w) {
                worst = Some((a, e));
            }
        }
    }
    match worst {
        Some((atom, excess)) => Err(Error::NotSelfMap { atom, excess }),
        None => Ok(()),
    }
}

/// A partition and atom at which the gluing identity failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityWitness {
    pub labels: Vec<usize>,
    pub atom: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub trials: usize,
    pub failures: usize,
    pub max_gap: f64,
    pub witness: Option<StabilityWitness>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Tests `f(sum_k 1_{A_k} x_k) = sum_k 1_{A_k} f(x_k)` on random partitions
/// and random points of `domain`.
pub fn check_sigma_stability(
    domain: &SetSpec,
    f: impl Fn(&RandomPoint) -> Result<RandomPoint>,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    let space = domain.space();
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StabilityReport {
        trials,
        failures: 0,
        max_gap: 0.0,
        witness: None,
    };
    for _ in 0..trials {
        let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let partition = MeasurablePartition::from_keys(space, &raw)?;
        let pieces: Vec<RandomPoint> = (0..partition.piece_count())
            .map(|_| domain.sample_point(&mut rng))
            .collect();
        let glued = glue_points(&partition, &pieces)?;
        let lhs = f(&glued)?;
        let images = pieces.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let rhs = glue_points(&partition, &images)?;
        let gap = random_distance(&lhs, &rhs)?;
        let mut failed = false;
        for (a, &g) in gap.values().iter().enumerate() {
            report.max_gap = report.max_gap.max(g);
            if g > GLUE_TOL {
                failed = true;
                if report.witness.is_none() {
                    report.witness = Some(StabilityWitness {
                        labels: partition.labels().to_vec(),
                        atom: a,
                        gap: g,
                    });
                }
            }
        }
        if failed {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// Builtin section families.
pub mod builtin {
    use super::AtomMap;
    use std::sync::Arc;

    pub fn identity() -> AtomMap {
        Arc::new(|x: &[f64]| x.to_vec())
    }

    pub fn constant(c: Vec<f64>) -> AtomMap {
        Arc::new(move |_: &[f64]| c.clone())
    }

    /// `x -> A x + b`, `A` given by rows.
    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> AtomMap {
        Arc::new(move |x: &[f64]| {
            matrix
                .iter()
                .zip(&offset)
                .map(|(row, b)| row.iter().zip(x).map(|(m, xi)| m * xi).sum::<f64>() + b)
                .collect()
        })
    }

    /// `x -> c + s R (x - c)` where `R` rotates the first two coordinates by
    /// `angle` and fixes the others.
    pub fn damped_rotation(angle: f64, scale: f64, center: Vec<f64>) -> AtomMap {
        let (sin, cos) = angle.sin_cos();
        Arc::new(move |x: &[f64]| {
            let mut y: Vec<f64> = x.iter().zip(&center).map(|(xi, ci)| xi - ci).collect();
            if y.len() >= 2 {
                let (u, v) = (y[0], y[1]);
                y[0] = cos * u - sin * v;
                y[1] = sin * u + cos * v;
            }
            y.iter().zip(&center).map(|(yi, ci)| ci + scale * yi).collect()
        })
    }

    /// The same polynomial `sum_k c_k t^k` in every coordinate.
    pub fn polynomial(coeffs: Vec<f64>) -> AtomMap {
        Arc::new(move |x: &[f64]| {
            x.iter()
                .map(|&t| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c))
                .collect()
        })
    }
}
