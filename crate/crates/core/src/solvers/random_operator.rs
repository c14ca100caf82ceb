//! Random fixed points of random operators `T(w, .)` on a fixed compact convex set.

use super::brouwer::solve_brouwer_atom;
use super::mapping::{AtomMap, StableMapping};
use super::report::{FixedPointReport, Stage};
use super::schauder::{solve_schauder_with, SchauderOptions};
use crate::compactness::{AtomwisePolytope, SetSpec};
use crate::error::Result;
use crate::hull::dist;
use crate::prob_space::FiniteProbSpace;
use crate::rn_module::RandomPoint;
use crate::scalar::RandomScalar;

/// Iteration cap used for the classical per-atom solve.
pub const DEFAULT_BROUWER_ITER: usize = 10_000;

pub fn solve_random_operator(
    space: &FiniteProbSpace,
    op: Vec<AtomMap>,
    x_vertices: Vec<Vec<f64>>,
    schedule: &[RandomScalar],
    tol: f64,
) -> Result<FixedPointReport> {
    solve_random_operator_with(space, op, x_vertices, schedule, tol, &SchauderOptions::default())
}

/// Lifts `T` to a sigma-stable mapping on the polytope with the same vertices
/// at every atom and solves it with the Schauder scheme. The answer at each
/// atom is then replaced by the classical fixed point of `T(w, .)` whenever
/// that one meets `tol`.
pub fn solve_random_operator_with(
    space: &FiniteProbSpace,
    op: Vec<AtomMap>,
    x_vertices: Vec<Vec<f64>>,
    schedule: &[RandomScalar],
    tol: f64,
    opts: &SchauderOptions,
) -> Result<FixedPointReport> {
    let x = SetSpec::AtomwisePolytope(AtomwisePolytope::uniform(space, x_vertices.clone())?);
    let lifted = StableMapping::new(x.clone(), op)?;
    let rep = solve_schauder_with(&lifted, &x, schedule, tol, opts)?;
    let mut coords = rep.point.to_vecs();
    let mut sharpened = vec![0usize; space.len()];
    for (a, c) in coords.iter_mut().enumerate() {
        let f = lifted.atom_map(a);
        if let Ok(p) = solve_brouwer_atom(&**f, &x_vertices, tol, DEFAULT_BROUWER_ITER) {
            if dist(&f(&p), &p) <= tol {
                *c = p;
                sharpened[a] = 1;
            }
        }
    }
    let point = RandomPoint::new(space, &coords)?;
    let residual = lifted.residual(&point)?;
    let mut stages = rep.stages;
    stages.push(Stage {
        name: "classical".into(),
        epsilon: None,
        iterations: sharpened,
    });
    Ok(FixedPointReport {
        point,
        residual,
        stages,
        certificate: rep.certificate,
        oracle_gap: None,
    })
}
