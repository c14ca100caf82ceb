//! Approximate fixed points through the Schauder projection.
//!
//! At level 0 a random net of the (convexified) set is built and at every
//! atom the finite-rank map `P_{S, eps0} o T` is solved on the hull of the
//! net points `S`. Each further level localizes: a lattice net of the part of
//! the set near the current point, at a smaller radius, and another
//! finite-rank solve seeded from the previous answer. The residual
//! `|T(x) - x|` is re-evaluated before anything is returned.

use super::brouwer::{self, default_seeds, Problem};
use super::mapping::{check_maps_into, StableMapping};
use super::report::{FixedPointReport, Stage};
use crate::compactness::{build_net_with, NetOptions, Section, SetSpec};
use crate::error::{Error, Result};
use crate::geometry::projection_at;
use crate::hull::dist;
use crate::par::{map_indexed, Execution};
use crate::prob_space::FiniteProbSpace;
use crate::rn_module::{el_quasinorm, RandomPoint};
use crate::scalar::RandomScalar;

const MAX_LEVELS: usize = 64;
const MAX_ATTEMPTS: usize = 6;
const DYKSTRA_ITER: usize = 500;
const MEMBER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SchauderOptions {
    /// Search-grid budget of the level-0 net, per atom.
    pub net_budget: usize,
    /// Lattice budget of each refinement level.
    pub level_budget: usize,
    /// Largest ratio between consecutive level radii.
    pub max_zoom: f64,
    pub brouwer_iter: usize,
    pub self_map_samples: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SchauderOptions {
    fn default() -> Self {
        SchauderOptions {
            net_budget: 4096,
            level_budget: 3000,
            max_zoom: 16.0,
            brouwer_iter: 2000,
            self_map_samples: 64,
            seed: 0x5eed,
            exec: Execution::default(),
        }
    }
}

/// `eps_k = 1/k` for `k = 1..=count`.
pub fn harmonic_schedule(space: &FiniteProbSpace, count: usize) -> Vec<RandomScalar> {
    (1..=count)
        .map(|k| RandomScalar::constant(space, 1.0 / k as f64))
        .collect()
}

/// `eps_k = start * ratio^k` for `k = 0..count`.
pub fn geometric_schedule(space: &FiniteProbSpace, start: f64, ratio: f64, count: usize) -> Vec<RandomScalar> {
    (0..count)
        .map(|k| RandomScalar::constant(space, start * ratio.powi(k as i32)))
        .collect()
}

fn grid_count(lo: &[f64], hi: &[f64], spacing: f64) -> f64 {
    lo.iter()
        .zip(hi)
        .map(|(l, h)| ((h - l) / spacing).ceil().max(0.0) + 1.0)
        .product()
}

/// Smallest radius, at least `eps`, whose level-0 search grid fits the budget.
fn coarse_eps(section: &Section, eps: f64, budget: usize) -> f64 {
    let (lo, hi) = section.bounds();
    let mut e = eps;
    while grid_count(&lo, &hi, e / 4.0) > budget as f64 {
        e *= 1.25;
    }
    e
}

/// Nearest point of `section ∩ [lo, hi]`.
fn project_local(section: &Section, lo: &[f64], hi: &[f64], box_inside: bool, z: &[f64]) -> Vec<f64> {
    let clamp = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect()
    };
    if box_inside {
        return clamp(z);
    }
    // Dykstra's alternating projections
    let d = z.len();
    let mut x = z.to_vec();
    let mut p = vec![0.0; d];
    let mut q = vec![0.0; d];
    for _ in 0..DYKSTRA_ITER {
        let xp: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = clamp(&xp);
        p = xp.iter().zip(&y).map(|(a, b)| a - b).collect();
        let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = section.project(&yq);
        q = yq.iter().zip(&next).map(|(a, b)| a - b).collect();
        let moved = dist(&next, &x);
        x = next;
        if moved <= 1e-15 * (1.0 + x.iter().fold(0.0f64, |m, c| m.max(c.abs()))) {
            break;
        }
    }
    x
}

fn box_inside_section(section: &Section, lo: &[f64], hi: &[f64]) -> bool {
    let d = lo.len();
    if d > 12 {
        return false;
    }
    (0..1usize << d).all(|mask| {
        let corner: Vec<f64> = (0..d)
            .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
            .collect();
        section.distance(&corner) <= MEMBER_TOL
    })
}

fn lattice(lo: &[f64], hi: &[f64], h: f64) -> Vec<Vec<f64>> {
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(l, u)| ((u - l) / h).ceil().max(0.0) as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; lo.len()];
    for _ in 0..total {
        out.push(
            idx.iter()
                .zip(lo.iter().zip(hi))
                .map(|(&k, (l, u))| (l + h * k as f64).min(*u))
                .collect(),
        );
        for (i, c) in idx.iter_mut().zip(&counts) {
            *i += 1;
            if *i < *c {
                break;
            }
            *i = 0;
        }
    }
    out
}

struct AtomOutcome {
    point: Vec<f64>,
    level0_iterations: usize,
    refine_iterations: usize,
}

struct AtomJob<'a> {
    atom: usize,
    t: &'a dyn Fn(&[f64]) -> Vec<f64>,
    section: Section,
    target: f64,
    eps0: f64,
    net: Vec<Vec<f64>>,
    opts: &'a SchauderOptions,
}

impl AtomJob<'_> {
    fn violation(&self, what: &str) -> Error {
        Error::CertificateViolation(format!("{what} at atom {}", self.atom))
    }

    fn run(&self) -> Result<AtomOutcome> {
        let t = self.t;
        let section = &self.section;
        let e0 = self.eps0;
        let (lo, hi) = section.bounds();
        let proj = |x: &[f64]| section.project(x);
        let f0 = |y: &[f64]| {
            let w = proj(&t(y));
            projection_at(&self.net, e0, &w).unwrap_or(w)
        };
        let mut tol_b = 1e-3 * e0;
        let mut level0_iterations = 0;
        let mut y;
        let mut res;
        // the finite-rank solve, retried once at a tighter tolerance
        loop {
            let (sol, _) = brouwer::solve_best(&Problem {
                f: &f0,
                retract: &proj,
                lo: lo.clone(),
                hi: hi.clone(),
                seeds: default_seeds(&self.net),
                tol: tol_b,
                max_iter: self.opts.brouwer_iter,
            });
            level0_iterations += sol.iterations;
            y = sol.point;
            let ty = t(&y);
            let p = projection_at(&self.net, e0, &ty)
                .ok_or_else(|| self.violation("T(y) outside the net's enlargement"))?;
            if !(dist(&p, &ty) < e0) {
                return Err(self.violation("|P(T(y)) - T(y)| >= eps"));
            }
            res = dist(&ty, &y);
            if res < e0 {
                break;
            }
            if tol_b < 1e-9 * e0 {
                return Err(Error::NoConvergence { residual: res });
            }
            tol_b *= 1e-3;
        }

        let d = y.len();
        let per_dim = (self.opts.level_budget as f64).powf(1.0 / d as f64).floor();
        let mut cur = e0;
        let mut refine_iterations = 0;
        let mut levels = 0;
        while cur > self.target && res >= self.target && levels < MAX_LEVELS {
            levels += 1;
            let mut center = y.clone();
            let mut r = 2.0 * cur;
            let mut accepted = false;
            for _ in 0..MAX_ATTEMPTS {
                // two nodes per axis go to rounding
                let budget_eps = if per_dim >= 3.0 {
                    2.0 * r * (d as f64).sqrt() / (1.9 * (per_dim - 2.0))
                } else {
                    f64::INFINITY
                };
                let blo: Vec<f64> = center.iter().zip(&lo).map(|(c, l)| (c - r).max(*l)).collect();
                let bhi: Vec<f64> = center.iter().zip(&hi).map(|(c, u)| (c + r).min(*u)).collect();
                let mut next = self.target.max(cur / self.opts.max_zoom).max(budget_eps);
                while next < cur && grid_count(&blo, &bhi, 1.9 * next / (d as f64).sqrt()) > self.opts.level_budget as f64 {
                    next *= 1.25;
                }
                if next >= cur {
                    break;
                }
                let h = 1.9 * next / (d as f64).sqrt();
                let inside = box_inside_section(section, &blo, &bhi);
                let pk = |z: &[f64]| project_local(section, &blo, &bhi, inside, z);
                let net: Vec<Vec<f64>> = lattice(&blo, &bhi, h).iter().map(|v| pk(v)).collect();
                let f = |z: &[f64]| {
                    let w = pk(&t(z));
                    projection_at(&net, next, &w).unwrap_or(w)
                };
                let (sol, _) = brouwer::solve_best(&Problem {
                    f: &f,
                    retract: &pk,
                    lo: blo.clone(),
                    hi: bhi.clone(),
                    seeds: vec![pk(&center)],
                    tol: 1e-3 * next,
                    max_iter: self.opts.brouwer_iter,
                });
                refine_iterations += sol.iterations;
                let cand = sol.point;
                let tc = t(&cand);
                let rc = dist(&tc, &cand);
                if rc < next {
                    y = cand;
                    res = rc;
                    cur = next;
                    accepted = true;
                    break;
                }
                center = cand;
                r *= 2.0;
            }
            if !accepted {
                return Err(Error::NoConvergence { residual: res });
            }
        }

        // T(y) is kept when it is a better answer; constant maps land exactly.
        let ty = t(&y);
        let tty = t(&ty);
        if dist(&tty, &ty) < res && section.distance(&ty) <= MEMBER_TOL {
            y = ty;
        }
        Ok(AtomOutcome {
            point: y,
            level0_iterations,
            refine_iterations,
        })
    }
}

/// A point `x` with `|T(x) - x| < eps` at every atom.
pub fn solve_schauder_approx(t: &StableMapping, g: &SetSpec, eps: &RandomScalar) -> Result<FixedPointReport> {
    solve_schauder_approx_with(t, g, eps, &SchauderOptions::default())
}

pub fn solve_schauder_approx_with(
    t: &StableMapping,
    g: &SetSpec,
    eps: &RandomScalar,
    opts: &SchauderOptions,
) -> Result<FixedPointReport> {
    let space = g.space();
    space.ensure_same(t.space())?;
    space.ensure_same(eps.space())?;
    if !eps.is_strictly_positive() {
        return Err(Error::BadEpsilon);
    }
    if t.dim() != g.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            got: t.dim(),
        });
    }
    check_maps_into(g, g, opts.self_map_samples, opts.seed, |x| t.apply(x))?;

    let hull = g.l0_convex_hull();
    let n = space.len();
    let eps0 = RandomScalar::new(
        space,
        (0..n)
            .map(|a| coarse_eps(&hull.section(a), eps.at(a), opts.net_budget))
            .collect(),
    )?;
    let cert = build_net_with(
        &hull,
        &eps0,
        &NetOptions {
            search_budget: opts.net_budget,
            exec: opts.exec,
        },
    )?;

    let outcomes = map_indexed(opts.exec, n, |a| {
        AtomJob {
            atom: a,
            t: &**t.atom_map(a),
            section: hull.section(a),
            target: eps.at(a),
            eps0: eps0.at(a),
            net: cert.points_at(a),
            opts,
        }
        .run()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let coords: Vec<Vec<f64>> = outcomes.iter().map(|o| o.point.clone()).collect();
    let point = RandomPoint::new(space, &coords)?;
    let residual = t.residual(&point)?;
    if let Some(a) = (0..n).find(|&a| !(residual.at(a) < eps.at(a))) {
        return Err(Error::CertificateViolation(format!(
            "residual {:e} is not below eps {:e} at atom {a}",
            residual.at(a),
            eps.at(a)
        )));
    }
    Ok(FixedPointReport {
        point,
        residual,
        stages: vec![
            Stage {
                name: "net".into(),
                epsilon: Some(eps0),
                iterations: outcomes.iter().map(|o| o.level0_iterations).collect(),
            },
            Stage {
                name: "refine".into(),
                epsilon: Some(eps.clone()),
                iterations: outcomes.iter().map(|o| o.refine_iterations).collect(),
            },
        ],
        certificate: Some(cert),
        oracle_gap: None,
    })
}

/// Runs the approximate solver along a decreasing schedule. Accepts the first
/// approximant whose residual is at most `tol`, or that is within `tol` of
/// its predecessor in the quasinorm of convergence in probability.
pub fn solve_schauder(
    t: &StableMapping,
    g: &SetSpec,
    schedule: &[RandomScalar],
    tol: f64,
) -> Result<FixedPointReport> {
    solve_schauder_with(t, g, schedule, tol, &SchauderOptions::default())
}

pub fn solve_schauder_with(
    t: &StableMapping,
    g: &SetSpec,
    schedule: &[RandomScalar],
    tol: f64,
    opts: &SchauderOptions,
) -> Result<FixedPointReport> {
    if schedule.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut stages = Vec::new();
    let mut previous: Option<RandomPoint> = None;
    let mut best = f64::INFINITY;
    for (k, eps) in schedule.iter().enumerate() {
        let rep = solve_schauder_approx_with(t, g, eps, opts)?;
        best = best.min(rep.max_residual());
        stages.push(Stage {
            name: format!("eps_{}", k + 1),
            epsilon: Some(eps.clone()),
            iterations: (0..g.space().len())
                .map(|a| rep.stages.iter().map(|s| s.iterations[a]).sum())
                .collect(),
        });
        let cauchy = match &previous {
            Some(p) => el_quasinorm(&rep.point.sub(p)?) <= tol,
            None => false,
        };
        if rep.max_residual() <= tol || cauchy {
            return Ok(FixedPointReport { stages, ..rep });
        }
        previous = Some(rep.point);
    }
    Err(Error::NoConvergence { residual: best })
}
