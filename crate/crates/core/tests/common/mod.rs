#![allow(dead_code)]

use proptest::prelude::*;
use rnmod::compactness::AtomwisePolytope;
use rnmod::{FiniteProbSpace, MeasurablePartition, RandomPoint, RandomScalar};

pub fn space(max_atoms: usize) -> impl Strategy<Value = FiniteProbSpace> {
    prop::collection::vec(0.05f64..1.0, 1..=max_atoms).prop_map(|w| FiniteProbSpace::new(&w).unwrap())
}

pub fn partition_of(s: &FiniteProbSpace, max_pieces: usize) -> impl Strategy<Value = MeasurablePartition> {
    let s = s.clone();
    prop::collection::vec(0..max_pieces, s.len()).prop_map(move |keys| MeasurablePartition::from_keys(&s, &keys).unwrap())
}

pub fn scalar_on(s: &FiniteProbSpace, lo: f64, hi: f64) -> impl Strategy<Value = RandomScalar> {
    let s = s.clone();
    prop::collection::vec(lo..hi, s.len()).prop_map(move |v| RandomScalar::new(&s, v).unwrap())
}

pub fn point_on(s: &FiniteProbSpace, dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = RandomPoint> {
    let s = s.clone();
    prop::collection::vec(prop::collection::vec(lo..hi, dim), s.len())
        .prop_map(move |v| RandomPoint::new(&s, &v).unwrap())
}

pub fn points_on(s: &FiniteProbSpace, dim: usize, count: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<RandomPoint>> {
    prop::collection::vec(point_on(s, dim, -2.0, 2.0), count)
}

/// Random polytope with `verts` vertices per atom in `[-1, 1]^dim`.
pub fn polytope_on(s: &FiniteProbSpace, dim: usize, verts: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = AtomwisePolytope> {
    let s = s.clone();
    prop::collection::vec(prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), verts), s.len())
        .prop_map(move |v| AtomwisePolytope::new(&s, v).unwrap())
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
