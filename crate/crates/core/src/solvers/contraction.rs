//! Banach iteration for random contractions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mapping::{AtomMap, StableMapping};
use super::report::{FixedPointReport, Stage};
use crate::error::{Error, Result};
use crate::hull::dist;
use crate::rn_module::{random_distance, RandomPoint};
use crate::scalar::RandomScalar;

/// A sigma-stable `S` with random Lipschitz modulus `alpha < 1`.
#[derive(Debug, Clone)]
pub struct ContractionSpec {
    map: StableMapping,
    alpha: RandomScalar,
}

/// Worst observed ratio `|S x - S y| / |x - y|` against the declared modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `|S x - S y| - alpha |x - y|` seen.
    pub worst_excess: f64,
}

impl ContractionSpec {
    pub fn new(map: StableMapping, alpha: RandomScalar) -> Result<Self> {
        map.space().ensure_same(alpha.space())?;
        if alpha.values().iter().any(|&a| !(0.0..1.0).contains(&a)) {
            return Err(Error::BadModulus);
        }
        Ok(ContractionSpec { map, alpha })
    }

    pub fn map(&self) -> &StableMapping {
        &self.map
    }

    pub fn alpha(&self) -> &RandomScalar {
        &self.alpha
    }

    pub fn restrict_to_atom(&self, atom: usize) -> Result<ContractionSpec> {
        Ok(ContractionSpec {
            map: self.map.restrict_to_atom(atom)?,
            alpha: self.alpha.restrict_to_atom(atom)?,
        })
    }

    /// Samples pairs of domain points and tests the Lipschitz bound.
    pub fn check_lipschitz(&self, pairs: usize, seed: u64) -> Result<LipschitzReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dom = self.map.domain();
        let mut report = LipschitzReport {
            pairs,
            violations: 0,
            worst_excess: f64::NEG_INFINITY,
        };
        for _ in 0..pairs {
            let x = dom.sample_point(&mut rng);
            let y = dom.sample_point(&mut rng);
            let lhs = random_distance(&self.map.apply(&x)?, &self.map.apply(&y)?)?;
            let dxy = random_distance(&x, &y)?;
            for a in 0..lhs.values().len() {
                let excess = lhs.at(a) - self.alpha.at(a) * dxy.at(a);
                report.worst_excess = report.worst_excess.max(excess);
                if excess > 1e-12 * (1.0 + dxy.at(a)) {
                    report.violations += 1;
                }
            }
        }
        Ok(report)
    }
}

/// Iterates `x <- S(x) + shift` at one atom until the step is at most
/// `tol (1 - alpha) / alpha`. Returns the last iterate, the step count and
/// whether the stopping rule was met.
pub(crate) fn contract_atom(
    s: &AtomMap,
    alpha: f64,
    shift: &[f64],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize, bool) {
    let step = |x: &[f64]| -> Vec<f64> { s(x).iter().zip(shift).map(|(a, b)| a + b).collect() };
    if alpha == 0.0 {
        return (step(x0), 1, true);
    }
    let threshold = tol * (1.0 - alpha) / alpha;
    let mut x = x0.to_vec();
    for k in 1..=max_iter {
        let next = step(&x);
        let moved = dist(&next, &x);
        x = next;
        if moved <= threshold {
            return (x, k, true);
        }
    }
    (x, max_iter, false)
}

/// Fixed point of `x -> S(x) + shift`, atom by atom. Each atom stops on its
/// own, so the answer at an atom depends only on the data at that atom.
pub fn solve_contraction(
    spec: &ContractionSpec,
    shift: &RandomPoint,
    x0: &RandomPoint,
    tol: &RandomScalar,
    max_iter: usize,
) -> Result<FixedPointReport> {
    let space = spec.map.space();
    space.ensure_same(shift.space())?;
    shift.ensure_compatible(x0)?;
    space.ensure_same(tol.space())?;
    if !tol.is_strictly_positive() {
        return Err(Error::BadEpsilon);
    }
    let n = space.len();
    let mut coords = Vec::with_capacity(n);
    let mut iterations = Vec::with_capacity(n);
    let mut converged = true;
    for a in 0..n {
        let (x, k, ok) = contract_atom(
            spec.map.atom_map(a),
            spec.alpha.at(a),
            shift.at(a),
            x0.at(a),
            tol.at(a),
            max_iter,
        );
        converged &= ok;
        coords.push(x);
        iterations.push(k);
    }
    let point = RandomPoint::new(space, &coords)?;
    let image = spec.map.apply(&point)?.add(shift)?;
    let residual = random_distance(&image, &point)?;
    if !converged {
        return Err(Error::NoConvergence {
            residual: residual.max_value(),
        });
    }
    Ok(FixedPointReport {
        point,
        residual,
        stages: vec![Stage {
            name: "contraction".into(),
            epsilon: Some(tol.clone()),
            iterations,
        }],
        certificate: None,
        oracle_gap: None,
    })
}
