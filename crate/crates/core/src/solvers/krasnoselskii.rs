//! Krasnoselskii splitting: fixed points of `S + T` with `S` a random
//! contraction and `T` a sigma-stable self-map, via `T' = (I - S)^{-1} o T`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::contraction::{contract_atom, ContractionSpec};
use super::mapping::{AtomMap, StableMapping};
use super::report::FixedPointReport;
use super::schauder::{solve_schauder_with, SchauderOptions};
use crate::compactness::SetSpec;
use crate::error::{Error, Result};
use crate::rn_module::random_distance;
use crate::scalar::RandomScalar;
use std::sync::Arc;

const HYPOTHESIS_TOL: f64 = 1e-9;
/// Share of each schedule entry given to the inner contraction solves.
const INNER_SHARE: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
pub struct KrasnoselskiiOptions {
    pub inner_max_iter: usize,
    /// Sampled pairs `(x, y)` for the check `S(x) + T(y) in G`.
    pub hypothesis_samples: usize,
    pub schauder: SchauderOptions,
}

impl Default for KrasnoselskiiOptions {
    fn default() -> Self {
        KrasnoselskiiOptions {
            inner_max_iter: 100_000,
            hypothesis_samples: 64,
            schauder: SchauderOptions::default(),
        }
    }
}

/// The sections of `T'`: at each atom, the fixed point of `x -> S(x) + T(y)`
/// iterated from `T(y)` to accuracy `tol`.
pub fn inverse_composite(s: &ContractionSpec, t: &StableMapping, tol: f64, max_iter: usize) -> Result<StableMapping> {
    s.map().space().ensure_same(t.space())?;
    let maps: Vec<AtomMap> = (0..t.space().len())
        .map(|a| {
            let sa = s.map().atom_map(a).clone();
            let ta = t.atom_map(a).clone();
            let alpha = s.alpha().at(a);
            Arc::new(move |y: &[f64]| {
                let shift = ta(y);
                contract_atom(&sa, alpha, &shift, &shift, tol, max_iter).0
            }) as AtomMap
        })
        .collect();
    StableMapping::new(t.domain().clone(), maps)
}

pub fn solve_krasnoselskii(
    s: &ContractionSpec,
    t: &StableMapping,
    g: &SetSpec,
    schedule: &[RandomScalar],
    tol: f64,
) -> Result<FixedPointReport> {
    solve_krasnoselskii_with(s, t, g, schedule, tol, &KrasnoselskiiOptions::default())
}

/// Accuracy of the inner contraction solves for a schedule: a `1e-3` share
/// of its smallest entry, halved.
pub fn inner_tolerance(schedule: &[RandomScalar]) -> f64 {
    let least = schedule.iter().map(RandomScalar::min_value).fold(f64::INFINITY, f64::min);
    0.5 * INNER_SHARE * least
}

/// A fixed point of `S + T` on `G`. With `z = T'(x)` computed to within
/// `inner_tolerance(schedule)` of the true value `z*`,
/// `|S(x) + T(x) - x| <= (1 + alpha) (|z - x| + |z* - z|)`, so the schedule is
/// scaled atom-wise to `eps (1 - 1e-3) / (1 + alpha)` (left alone where
/// `alpha = 0`, since `T'` is then exact) and every accepted
/// stage has `|S(x) + T(x) - x| < eps`.
pub fn solve_krasnoselskii_with(
    s: &ContractionSpec,
    t: &StableMapping,
    g: &SetSpec,
    schedule: &[RandomScalar],
    tol: f64,
    opts: &KrasnoselskiiOptions,
) -> Result<FixedPointReport> {
    let space = g.space();
    space.ensure_same(s.map().space())?;
    space.ensure_same(t.space())?;
    if !(tol > 0.0) {
        return Err(Error::BadEpsilon);
    }
    check_hypothesis(s, t, g, opts.hypothesis_samples, opts.schauder.seed)?;

    let t_prime = inverse_composite(s, t, inner_tolerance(schedule), opts.inner_max_iter)?;
    let scaled = schedule
        .iter()
        .map(|e| e.zip_with(s.alpha(), scale_eps))
        .collect::<Result<Vec<_>>>()?;
    let inner = solve_schauder_with(&t_prime, g, &scaled, tol, &opts.schauder)?;
    let x = &inner.point;
    let image = s.map().apply(x)?.add(&t.apply(x)?)?;
    let residual = random_distance(&image, x)?;
    Ok(FixedPointReport { residual, ..inner })
}

// A zero modulus means `S` is constant and `T'` is evaluated exactly.
fn scale_eps(eps: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        eps
    } else {
        eps * (1.0 - INNER_SHARE) / (1.0 + alpha)
    }
}

fn check_hypothesis(s: &ContractionSpec, t: &StableMapping, g: &SetSpec, samples: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b72);
    for _ in 0..samples {
        let x = g.sample_point(&mut rng);
        let y = g.sample_point(&mut rng);
        let z = s.map().apply(&x)?.add(&t.apply(&y)?)?;
        let excess = g.excess(&z)?;
        if let Some((a, e)) = excess
            .values()
            .iter()
            .copied()
            .enumerate()
            .find(|&(_, e)| e > HYPOTHESIS_TOL)
        {
            return Err(Error::HypothesisViolation(format!(
                "S(x) + T(y) leaves G by {e:e} at atom {a}"
            )));
        }
    }
    Ok(())
}
