//! Random indices and random subsequences on finite prefixes.

use crate::error::{Error, Result};
use crate::hull::dist;
use crate::prob_space::FiniteProbSpace;
use crate::rn_module::RandomPoint;
use crate::scalar::RandomScalar;

/// One positive integer per atom. Indices are 1-based, as in `x_1, x_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomIndex {
    space: FiniteProbSpace,
    values: Vec<usize>,
}

impl RandomIndex {
    pub fn new(space: &FiniteProbSpace, values: Vec<usize>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if values.contains(&0) {
            return Err(Error::InvalidIndex);
        }
        Ok(RandomIndex {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &FiniteProbSpace, n: usize) -> Result<Self> {
        Self::new(space, vec![n; space.len()])
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn at(&self, atom: usize) -> usize {
        self.values[atom]
    }
}

/// The essential least element of a family: the atom-wise minimum.
pub fn ess_least_index(family: &[RandomIndex]) -> Result<RandomIndex> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    let mut values = first.values.clone();
    for r in rest {
        first.space.ensure_same(&r.space)?;
        for (v, &w) in values.iter_mut().zip(&r.values) {
            *v = (*v).min(w);
        }
    }
    Ok(RandomIndex {
        space: first.space.clone(),
        values,
    })
}

/// `x_n` glued along `n`: at atom `a` it takes the value of `seq[n(a) - 1]`.
pub fn glue_sequence(seq: &[RandomPoint], n: &RandomIndex) -> Result<RandomPoint> {
    let first = seq.first().ok_or(Error::EmptyFamily)?;
    first.space().ensure_same(&n.space)?;
    if let Some(&bad) = n.values.iter().find(|&&v| v > seq.len()) {
        return Err(Error::PrefixExhausted { k: bad, atom: 0 });
    }
    for x in seq {
        first.ensure_compatible(x)?;
    }
    Ok(RandomPoint::from_fn(first.space(), first.dim(), |a| {
        seq[n.values[a] - 1].at(a).to_vec()
    }))
}

/// Random indices `n_1 < n_2 < ...` with `|x_{n_k} - target| < eps_k` at every
/// atom. At each atom the smallest admissible index above the previous one is
/// taken.
pub fn extract_random_subsequence(
    seq: &[RandomPoint],
    target: &RandomPoint,
    rates: &[RandomScalar],
) -> Result<Vec<RandomIndex>> {
    let space = target.space();
    for x in seq {
        target.ensure_compatible(x)?;
    }
    for (k, r) in rates.iter().enumerate() {
        space.ensure_same(r.space())?;
        if !r.is_strictly_positive() {
            return Err(Error::InvalidRates);
        }
        if k > 0 && r.values().iter().zip(rates[k - 1].values()).any(|(a, b)| a > b) {
            return Err(Error::InvalidRates);
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::with_capacity(space.len()); rates.len()];
    for a in 0..space.len() {
        let mut prev = 0usize;
        for (k, r) in rates.iter().enumerate() {
            let eps = r.at(a);
            let l = (prev + 1..=seq.len())
                .find(|&l| dist(seq[l - 1].at(a), target.at(a)) < eps)
                .ok_or(Error::PrefixExhausted { k: k + 1, atom: a })?;
            out[k].push(l);
            prev = l;
        }
    }
    out.into_iter()
        .map(|values| RandomIndex::new(space, values))
        .collect()
}
