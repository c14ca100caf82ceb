//! Random scalars: one finite real per atom, with the atom-wise order.

use crate::error::{Error, Result};
use crate::prob_space::{Event, FiniteProbSpace, MeasurablePartition};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomScalar {
    space: FiniteProbSpace,
    values: Vec<f64>,
}

/// Pointwise relations usable in [`relation_event`] and [`holds_on`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    LessEq,
    Equal,
}

impl Relation {
    fn test(self, a: f64, b: f64) -> bool {
        match self {
            Relation::Less => a < b,
            Relation::LessEq => a <= b,
            Relation::Equal => a == b,
        }
    }
}

impl RandomScalar {
    pub fn new(space: &FiniteProbSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(RandomScalar {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &FiniteProbSpace, value: f64) -> Self {
        assert!(value.is_finite(), "random scalars are finite");
        RandomScalar {
            space: space.clone(),
            values: vec![value; space.len()],
        }
    }

    pub fn zero(space: &FiniteProbSpace) -> Self {
        Self::constant(space, 0.0)
    }

    /// The indicator `1_A`.
    pub fn indicator(event: &Event) -> Self {
        RandomScalar {
            space: event.space().clone(),
            values: event.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub(crate) fn from_vec_unchecked(space: &FiniteProbSpace, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), space.len());
        RandomScalar {
            space: space.clone(),
            values,
        }
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, atom: usize) -> f64 {
        self.values[atom]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        RandomScalar {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &RandomScalar, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(RandomScalar {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &RandomScalar) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RandomScalar) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RandomScalar) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Strictly positive at every atom (membership in the cone of strictly positive scalars).
    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// The value at `atom` as a scalar on the one-atom space.
    pub fn restrict_to_atom(&self, atom: usize) -> Result<Self> {
        let single = self.space.atom_space(atom)?;
        Ok(RandomScalar::from_vec_unchecked(&single, vec![self.values[atom]]))
    }

    /// Expectation under the space's weights.
    pub fn expectation(&self) -> f64 {
        self.values
            .iter()
            .zip(self.space.weights())
            .map(|(v, w)| v * w)
            .sum()
    }
}

/// Takes piece `k`'s values on every atom labeled `k`.
pub fn glue_scalars(partition: &MeasurablePartition, pieces: &[RandomScalar]) -> Result<RandomScalar> {
    if pieces.len() != partition.piece_count() {
        return Err(Error::PieceCountMismatch {
            expected: partition.piece_count(),
            got: pieces.len(),
        });
    }
    for p in pieces {
        partition.space().ensure_same(&p.space)?;
    }
    let values = partition
        .labels()
        .iter()
        .enumerate()
        .map(|(atom, &k)| pieces[k].values[atom])
        .collect();
    Ok(RandomScalar::from_vec_unchecked(partition.space(), values))
}

fn fold_family(family: &[RandomScalar], pick: fn(f64, f64) -> f64) -> Result<RandomScalar> {
    let (first, rest) = family.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, x| acc.zip_with(x, pick))
}

/// Essential supremum of a finite family: the atom-wise maximum.
pub fn ess_sup(family: &[RandomScalar]) -> Result<RandomScalar> {
    fold_family(family, f64::max)
}

/// Essential infimum of a finite family: the atom-wise minimum.
pub fn ess_inf(family: &[RandomScalar]) -> Result<RandomScalar> {
    fold_family(family, f64::min)
}

/// The event `(xi rel eta)`, compared exactly.
pub fn relation_event(xi: &RandomScalar, eta: &RandomScalar, rel: Relation) -> Result<Event> {
    xi.space.ensure_same(&eta.space)?;
    let mask = xi
        .values
        .iter()
        .zip(&eta.values)
        .map(|(&a, &b)| rel.test(a, b))
        .collect();
    Event::from_mask(&xi.space, mask)
}

/// `xi rel eta` on `A`: the relation holds at every atom of `A`.
pub fn holds_on(xi: &RandomScalar, eta: &RandomScalar, rel: Relation, on: &Event) -> Result<bool> {
    xi.space.ensure_same(&eta.space)?;
    xi.space.ensure_same(on.space())?;
    Ok(on
        .atoms()
        .into_iter()
        .all(|a| rel.test(xi.values[a], eta.values[a])))
}
