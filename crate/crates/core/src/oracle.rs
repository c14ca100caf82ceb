//! The per-atom classical oracle.
//!
//! Over a finite base space a sigma-stable problem splits into one classical
//! problem per atom. [`solve_per_atom`] restricts every object to a single
//! atom, runs the same solver on the one-atom space and glues the answers;
//! [`compare_with_oracle`] runs it next to the direct solve.

use crate::compactness::SetSpec;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::prob_space::FiniteProbSpace;
use crate::rn_module::{random_distance, RandomPoint};
use crate::scalar::RandomScalar;
use crate::solvers::{
    solve_contraction, solve_krasnoselskii_with, solve_random_operator_with, solve_schauder_with, AtomMap,
    ContractionSpec, FixedPointReport, KrasnoselskiiOptions, SchauderOptions, Stage, StableMapping,
};

/// A fixed-point problem together with the solver that handles it.
#[derive(Clone)]
pub enum Problem {
    Contraction {
        spec: ContractionSpec,
        shift: RandomPoint,
        x0: RandomPoint,
        tol: RandomScalar,
        max_iter: usize,
    },
    Schauder {
        t: StableMapping,
        g: SetSpec,
        schedule: Vec<RandomScalar>,
        tol: f64,
        opts: SchauderOptions,
    },
    Krasnoselskii {
        s: ContractionSpec,
        t: StableMapping,
        g: SetSpec,
        schedule: Vec<RandomScalar>,
        tol: f64,
        opts: KrasnoselskiiOptions,
    },
    RandomOperator {
        space: FiniteProbSpace,
        op: Vec<AtomMap>,
        vertices: Vec<Vec<f64>>,
        schedule: Vec<RandomScalar>,
        tol: f64,
        opts: SchauderOptions,
    },
}

/// Direct solve against the glued per-atom solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub direct: FixedPointReport,
    pub oracle: FixedPointReport,
    /// Residual bound certified by the direct solve.
    pub bound: RandomScalar,
    /// `|x_direct - x_oracle|` per atom.
    pub point_gap: RandomScalar,
    /// Whether the fixed point is unique, so that points and not only
    /// residuals are comparable.
    pub unique: bool,
}

impl OracleComparison {
    /// Both residuals lie strictly below the direct bound at every atom.
    pub fn residual_bound_matches(&self) -> bool {
        let b = self.bound.values();
        self.direct.residual.values().iter().zip(b).all(|(r, b)| r < b)
            && self.oracle.residual.values().iter().zip(b).all(|(r, b)| r < b)
    }

    pub fn max_point_gap(&self) -> f64 {
        self.point_gap.max_value()
    }

    /// Residual agreement, plus point agreement within `point_tol` when the
    /// fixed point is unique.
    pub fn agrees(&self, point_tol: f64) -> bool {
        self.residual_bound_matches() && (!self.unique || self.max_point_gap() <= point_tol)
    }
}

impl Problem {
    pub fn space(&self) -> &FiniteProbSpace {
        match self {
            Problem::Contraction { spec, .. } => spec.map().space(),
            Problem::Schauder { g, .. } | Problem::Krasnoselskii { g, .. } => g.space(),
            Problem::RandomOperator { space, .. } => space,
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, Problem::Contraction { .. })
    }

    fn exec(&self) -> Execution {
        match self {
            Problem::Contraction { .. } => Execution::default(),
            Problem::Schauder { opts, .. } | Problem::RandomOperator { opts, .. } => opts.exec,
            Problem::Krasnoselskii { opts, .. } => opts.schauder.exec,
        }
    }

    /// Runs the solver on the whole space.
    pub fn solve(&self) -> Result<FixedPointReport> {
        match self {
            Problem::Contraction {
                spec,
                shift,
                x0,
                tol,
                max_iter,
            } => solve_contraction(spec, shift, x0, tol, *max_iter),
            Problem::Schauder {
                t,
                g,
                schedule,
                tol,
                opts,
            } => solve_schauder_with(t, g, schedule, *tol, opts),
            Problem::Krasnoselskii {
                s,
                t,
                g,
                schedule,
                tol,
                opts,
            } => solve_krasnoselskii_with(s, t, g, schedule, *tol, opts),
            Problem::RandomOperator {
                space,
                op,
                vertices,
                schedule,
                tol,
                opts,
            } => solve_random_operator_with(space, op.clone(), vertices.clone(), schedule, *tol, opts),
        }
    }

    /// The same problem on the one-atom space of `atom`.
    pub fn restrict_to_atom(&self, atom: usize) -> Result<Problem> {
        let sched = |s: &[RandomScalar]| s.iter().map(|e| e.restrict_to_atom(atom)).collect::<Result<Vec<_>>>();
        Ok(match self {
            Problem::Contraction {
                spec,
                shift,
                x0,
                tol,
                max_iter,
            } => Problem::Contraction {
                spec: spec.restrict_to_atom(atom)?,
                shift: shift.restrict_to_atom(atom)?,
                x0: x0.restrict_to_atom(atom)?,
                tol: tol.restrict_to_atom(atom)?,
                max_iter: *max_iter,
            },
            Problem::Schauder {
                t,
                g,
                schedule,
                tol,
                opts,
            } => Problem::Schauder {
                t: t.restrict_to_atom(atom)?,
                g: g.restrict_to_atom(atom)?,
                schedule: sched(schedule)?,
                tol: *tol,
                opts: *opts,
            },
            Problem::Krasnoselskii {
                s,
                t,
                g,
                schedule,
                tol,
                opts,
            } => Problem::Krasnoselskii {
                s: s.restrict_to_atom(atom)?,
                t: t.restrict_to_atom(atom)?,
                g: g.restrict_to_atom(atom)?,
                schedule: sched(schedule)?,
                tol: *tol,
                opts: *opts,
            },
            Problem::RandomOperator {
                space,
                op,
                vertices,
                schedule,
                tol,
                opts,
            } => Problem::RandomOperator {
                space: space.atom_space(atom)?,
                op: vec![op.get(atom).ok_or(Error::InvalidAtom(atom))?.clone()],
                vertices: vertices.clone(),
                schedule: sched(schedule)?,
                tol: *tol,
                opts: *opts,
            },
        })
    }

    /// The residual bound a report of this problem certifies: `tol` for
    /// contractions, the accepted schedule entry otherwise.
    pub fn certified_bound(&self, report: &FixedPointReport) -> Result<RandomScalar> {
        let accepted = |schedule: &[RandomScalar]| -> Result<RandomScalar> {
            let k = report.stages.iter().filter(|s| s.name.starts_with("eps_")).count();
            schedule
                .get(k.max(1) - 1)
                .cloned()
                .ok_or_else(|| Error::CertificateViolation("report has no schedule stage".into()))
        };
        match self {
            Problem::Contraction { tol, .. } => Ok(tol.clone()),
            Problem::Schauder { schedule, .. } | Problem::Krasnoselskii { schedule, .. } => accepted(schedule),
            Problem::RandomOperator { schedule, tol, .. } => Ok(accepted(schedule)?.map(|e| e.max(*tol))),
        }
    }
}

/// Solves the problem atom by atom on one-atom spaces and glues the answers.
pub fn solve_per_atom(problem: &Problem) -> Result<FixedPointReport> {
    let space = problem.space().clone();
    let n = space.len();
    let reports = map_indexed(problem.exec(), n, |a| problem.restrict_to_atom(a)?.solve());
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    let coords: Vec<Vec<f64>> = reports.iter().map(|r| r.point.at(0).to_vec()).collect();
    let point = RandomPoint::new(&space, &coords)?;
    let residual = RandomScalar::new(&space, reports.iter().map(|r| r.residual.at(0)).collect())?;
    Ok(FixedPointReport {
        point,
        residual,
        stages: vec![Stage {
            name: "per_atom".into(),
            epsilon: None,
            iterations: reports.iter().map(|r| r.total_iterations()).collect(),
        }],
        certificate: None,
        oracle_gap: None,
    })
}

/// Runs the direct solve and the per-atom oracle and compares them. The
/// direct report comes back with `oracle_gap` filled in.
pub fn compare_with_oracle(problem: &Problem) -> Result<OracleComparison> {
    let mut direct = problem.solve()?;
    let oracle = solve_per_atom(problem)?;
    let point_gap = random_distance(&direct.point, &oracle.point)?;
    direct.oracle_gap = Some(point_gap.clone());
    Ok(OracleComparison {
        bound: problem.certified_bound(&direct)?,
        direct,
        oracle,
        point_gap,
        unique: problem.is_unique(),
    })
}
