//! The `run`, `oracle` and `net` commands.

use std::path::Path;
use std::time::Instant;

use rnmod::compactness::{build_net, verify_net};
use rnmod::rn_module::random_distance;
use rnmod::{solve_per_atom, Problem, RandomScalar};

use crate::report::{NetSection, OracleSection, Pipeline, Report, Solution, Status};
use crate::scenario::{self, Scenario};
use crate::CliError;

pub const DEFAULT_NET_EPS: f64 = 0.1;
pub const DEFAULT_NET_SAMPLES: usize = 10_000;

fn timed(start: Instant, mut report: Report) -> Report {
    report.timing.seconds = start.elapsed().as_secs_f64();
    report
}

fn load(path: &Path, command: &'static str, seed: Option<u64>) -> Result<Scenario, Report> {
    scenario::load(path).map_err(|e| Report::new(command, None, seed.unwrap_or(0)).fail(&e))
}

/// Solves the scenario and checks the residual against its certified bound.
pub fn run(path: &Path, seed: Option<u64>) -> Report {
    let start = Instant::now();
    let sc = match load(path, "run", seed) {
        Ok(sc) => sc,
        Err(r) => return timed(start, r),
    };
    let mut report = Report::new("run", Some(sc.solver.name()), seed.unwrap_or(sc.seed));
    let outcome = sc.problem(seed).and_then(|p| {
        let r = p.solve()?;
        let bound = p.certified_bound(&r)?;
        Ok(Solution::new(&r, &bound))
    });
    report = match outcome {
        Ok(sol) => {
            if !sol.bound_holds {
                report.status = Status::BoundViolated;
            }
            report.solution = Some(sol);
            report
        }
        Err(e) => report.fail(&e),
    };
    timed(start, report)
}

/// Runs the direct solve and the per-atom pipeline side by side.
pub fn oracle(path: &Path, seed: Option<u64>) -> Report {
    let start = Instant::now();
    let sc = match load(path, "oracle", seed) {
        Ok(sc) => sc,
        Err(r) => return timed(start, r),
    };
    let report = Report::new("oracle", Some(sc.solver.name()), seed.unwrap_or(sc.seed));
    let problem = match sc.problem(seed) {
        Ok(p) => p,
        Err(e) => return timed(start, report.fail(&e)),
    };
    timed(start, compare(report, &problem))
}

fn compare(mut report: Report, problem: &Problem) -> Report {
    let direct = problem.solve();
    let per_atom = solve_per_atom(problem);
    let unique = problem.is_unique();
    let mut section = OracleSection {
        direct: Pipeline::of(&direct),
        per_atom: Pipeline::of(&per_atom),
        unique,
        bound: None,
        residual_bound_matches: None,
        point_gap: None,
        point_tol: None,
        agrees: None,
    };
    report.status = match (&direct, &per_atom) {
        (Ok(d), Ok(o)) => {
            let checked = problem
                .certified_bound(d)
                .and_then(|b| Ok((random_distance(&d.point, &o.point)?, b)));
            match checked {
                Ok((gap, bound)) => {
                    let below = |r: &RandomScalar| r.values().iter().zip(bound.values()).all(|(r, b)| r < b);
                    let matches = below(&d.residual) && below(&o.residual);
                    let point_tol = match problem {
                        Problem::Contraction { tol, .. } => Some(10.0 * tol.max_value()),
                        _ => None,
                    };
                    let agrees = matches && point_tol.is_none_or(|t| gap.max_value() <= t);
                    section.bound = Some(bound.values().to_vec());
                    section.residual_bound_matches = Some(matches);
                    section.point_gap = Some(gap.values().to_vec());
                    section.point_tol = point_tol;
                    section.agrees = Some(agrees);
                    if agrees {
                        Status::Ok
                    } else {
                        Status::Disagreement
                    }
                }
                Err(e) => {
                    report.error = Some(e.to_string());
                    Status::of_kernel(&e)
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => {
            report.error = Some(e.to_string());
            Status::of_kernel(e)
        }
    };
    report.oracle = Some(section);
    report
}

/// Builds a net certificate for the scenario's set and samples it.
pub fn net(path: &Path, eps: f64, samples: usize, seed: Option<u64>) -> Report {
    let start = Instant::now();
    let sc = match load(path, "net", seed) {
        Ok(sc) => sc,
        Err(r) => return timed(start, r),
    };
    let seed = seed.unwrap_or(sc.seed);
    let report = Report::new("net", None, seed);
    if !(eps.is_finite() && eps > 0.0) {
        return timed(start, report.fail(&CliError::Invalid(format!("eps must be positive, got {eps}"))));
    }
    let outcome = sc.space().and_then(|s| {
        let g = sc.build_set(&s)?;
        let cert = build_net(&g, &RandomScalar::constant(&s, eps))?;
        let v = verify_net(&g, &cert, samples, seed)?;
        Ok(NetSection::new(g.kind(), &cert, &v))
    });
    let report = match outcome {
        Ok(section) => {
            let mut report = report;
            if !section.verify.passed {
                report.status = Status::BoundViolated;
            }
            report.net = Some(section);
            report
        }
        Err(e) => report.fail(&e),
    };
    timed(start, report)
}
