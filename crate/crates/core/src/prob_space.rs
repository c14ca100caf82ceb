//! The finite base space: atoms with positive mass, events and measurable
//! partitions.
//!
//! Because every atom carries positive probability, "almost surely" and
//! "at every atom" mean the same thing here, so no null-set bookkeeping is
//! needed anywhere in the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug)]
struct SpaceInner {
    ids: Vec<String>,
    weights: Vec<f64>,
}

/// A finite probability space. Cloning is cheap and clones compare equal.
#[derive(Clone)]
pub struct FiniteProbSpace {
    inner: Arc<SpaceInner>,
}

impl fmt::Debug for FiniteProbSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteProbSpace")
            .field("weights", &self.inner.weights)
            .finish()
    }
}

impl PartialEq for FiniteProbSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.weights == other.inner.weights
    }
}

impl FiniteProbSpace {
    /// Builds a space from unnormalized positive weights. Atom ids are
    /// `w0, w1, ...` in input order.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if weight <= 0.0 {
                return Err(Error::DegenerateAtom { index, weight });
            }
        }
        let total: f64 = weights.iter().sum();
        let mut normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
        // Push the rounding residue onto the heaviest atom.
        let drift = 1.0 - normalized.iter().sum::<f64>();
        if drift.abs() > 0.0 {
            let heaviest = (0..normalized.len())
                .max_by(|&a, &b| normalized[a].total_cmp(&normalized[b]))
                .unwrap();
            normalized[heaviest] += drift;
        }
        debug_assert!((normalized.iter().sum::<f64>() - 1.0).abs() <= WEIGHT_SUM_TOL);
        let ids = (0..normalized.len()).map(|i| format!("w{i}")).collect();
        Ok(FiniteProbSpace {
            inner: Arc::new(SpaceInner {
                ids,
                weights: normalized,
            }),
        })
    }

    /// Uniform space on `n` atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(&vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.inner.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.inner.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.inner.weights[atom]
    }

    pub fn atom_ids(&self) -> &[String] {
        &self.inner.ids
    }

    pub(crate) fn ensure_same(&self, other: &FiniteProbSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// The one-atom space carrying all of the mass of `atom`. Used by the
    /// per-atom oracle pipelines.
    pub fn atom_space(&self, atom: usize) -> Result<FiniteProbSpace> {
        if atom >= self.len() {
            return Err(Error::InvalidAtom(atom));
        }
        FiniteProbSpace::new(&[1.0])
    }

    pub fn full_event(&self) -> Event {
        Event {
            space: self.clone(),
            members: vec![true; self.len()],
        }
    }

    pub fn empty_event(&self) -> Event {
        Event {
            space: self.clone(),
            members: vec![false; self.len()],
        }
    }
}

/// A set of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    space: FiniteProbSpace,
    members: Vec<bool>,
}

impl Event {
    pub fn from_atoms(space: &FiniteProbSpace, atoms: &[usize]) -> Result<Self> {
        let mut members = vec![false; space.len()];
        for &a in atoms {
            if a >= space.len() {
                return Err(Error::InvalidAtom(a));
            }
            members[a] = true;
        }
        Ok(Event {
            space: space.clone(),
            members,
        })
    }

    pub fn from_mask(space: &FiniteProbSpace, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: mask.len(),
            });
        }
        Ok(Event {
            space: space.clone(),
            members: mask,
        })
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.get(atom).copied().unwrap_or(false)
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn atoms(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn probability(&self) -> f64 {
        self.atoms().iter().map(|&a| self.space.weight(a)).sum()
    }

    pub fn complement(&self) -> Event {
        Event {
            space: self.space.clone(),
            members: self.members.iter().map(|m| !m).collect(),
        }
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.space.ensure_same(&other.space)?;
        Ok(Event {
            space: self.space.clone(),
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    pub fn intersection(&self, other: &Event) -> Result<Event> {
        self.space.ensure_same(&other.space)?;
        Ok(Event {
            space: self.space.clone(),
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    pub fn is_subset_of(&self, other: &Event) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(a, b)| !*a || *b)
    }
}

/// Essential supremum of a family of events. Every atom has positive mass,
/// so this is exactly the union.
pub fn essential_sup_events(events: &[Event]) -> Result<Event> {
    let (first, rest) = events.split_first().ok_or(Error::EmptyFamily)?;
    rest.iter().try_fold(first.clone(), |acc, e| acc.union(e))
}

/// A labeling of atoms by piece ids `0..piece_count`, each id used at least once.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurablePartition {
    space: FiniteProbSpace,
    labels: Vec<usize>,
    pieces: usize,
}

impl MeasurablePartition {
    /// Validates that labels are contiguous from zero.
    pub fn new(space: &FiniteProbSpace, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: labels.len(),
            });
        }
        let pieces = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; pieces];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("piece id {gap} is unused")));
        }
        Ok(MeasurablePartition {
            space: space.clone(),
            labels,
            pieces,
        })
    }

    /// Relabels arbitrary keys to contiguous ids in order of first appearance.
    pub fn from_keys<K: Eq + std::hash::Hash>(space: &FiniteProbSpace, keys: &[K]) -> Result<Self> {
        if keys.len() != space.len() {
            return Err(Error::AtomCountMismatch {
                expected: space.len(),
                got: keys.len(),
            });
        }
        let mut ids: HashMap<&K, usize> = HashMap::new();
        let labels = keys
            .iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Self::new(space, labels)
    }

    pub fn trivial(space: &FiniteProbSpace) -> Self {
        MeasurablePartition {
            space: space.clone(),
            labels: vec![0; space.len()],
            pieces: 1,
        }
    }

    /// Every atom its own piece.
    pub fn discrete(space: &FiniteProbSpace) -> Self {
        MeasurablePartition {
            space: space.clone(),
            labels: (0..space.len()).collect(),
            pieces: space.len(),
        }
    }

    /// Partition `{A, A^c}` with `A` as piece 0, dropping whichever is empty.
    pub fn from_event(event: &Event) -> Self {
        let keys: Vec<bool> = event.mask().iter().map(|m| !m).collect();
        Self::from_keys(event.space(), &keys).expect("mask matches space")
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, atom: usize) -> usize {
        self.labels[atom]
    }

    pub fn piece_count(&self) -> usize {
        self.pieces
    }

    pub fn piece(&self, k: usize) -> Event {
        Event {
            space: self.space.clone(),
            members: self.labels.iter().map(|&l| l == k).collect(),
        }
    }

    /// True when both partitions have the same pieces, irrespective of ids.
    pub fn same_pieces(&self, other: &MeasurablePartition) -> bool {
        if self.space != other.space || self.pieces != other.pieces {
            return false;
        }
        let mut map = vec![usize::MAX; self.pieces];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            if map[a] == usize::MAX {
                map[a] = b;
            } else if map[a] != b {
                return false;
            }
        }
        true
    }
}

/// Coarsest partition refining both `p` and `q`; ids in order of first appearance.
pub fn common_refinement(
    p: &MeasurablePartition,
    q: &MeasurablePartition,
) -> Result<MeasurablePartition> {
    p.space.ensure_same(&q.space)?;
    let keys: Vec<(usize, usize)> = p.labels.iter().copied().zip(q.labels.iter().copied()).collect();
    MeasurablePartition::from_keys(&p.space, &keys)
}
