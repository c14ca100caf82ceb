//! Random epsilon-nets.
//!
//! `build_net` is the greedy farthest-point construction with measurable
//! branching: keep a growing candidate list, compute the essential supremum
//! over the set of the distance to the candidates, close off the event where
//! that supremum is below epsilon, and on the remaining event adjoin a point
//! attaining the supremum. Since every quantity involved is sigma-stable, the
//! sequence of candidates at one atom depends only on that atom's section,
//! and the construction is carried out atom by atom and then glued.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sets::{Section, SetSpec, BALL_SHRINK};
use crate::error::{Error, Result};
use crate::hull::dist;
use crate::par::{map_indexed, Execution};
use crate::prob_space::MeasurablePartition;
use crate::rn_module::{distance_to_finite_set, RandomPoint};
use crate::scalar::{glue_scalars, RandomScalar};

/// Default cap on the number of grid nodes searched at one atom.
pub const DEFAULT_SEARCH_BUDGET: usize = 1 << 16;

/// A partition `{A_n}` with finite sets `G_n` such that on each `A_n` every
/// point of the set is within `epsilon` of `sigma(G_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetCertificate {
    pub epsilon: RandomScalar,
    pub partition: MeasurablePartition,
    pub finite_sets: Vec<Vec<RandomPoint>>,
}

impl NetCertificate {
    pub fn piece_count(&self) -> usize {
        self.partition.piece_count()
    }

    /// The finite set serving `atom`, evaluated at that atom.
    pub fn points_at(&self, atom: usize) -> Vec<Vec<f64>> {
        self.finite_sets[self.partition.label(atom)]
            .iter()
            .map(|p| p.at(atom).to_vec())
            .collect()
    }

    /// Concatenates certificates built for the pieces of `partition`: on piece
    /// `j` the certificate `certs[j]` is used.
    pub fn glue(partition: &MeasurablePartition, certs: &[NetCertificate]) -> Result<NetCertificate> {
        if certs.len() != partition.piece_count() {
            return Err(Error::PieceCountMismatch {
                expected: partition.piece_count(),
                got: certs.len(),
            });
        }
        let space = partition.space();
        for c in certs {
            space.ensure_same(c.epsilon.space())?;
        }
        let keys: Vec<(usize, usize)> = (0..space.len())
            .map(|a| {
                let j = partition.label(a);
                (j, certs[j].partition.label(a))
            })
            .collect();
        let joint = MeasurablePartition::from_keys(space, &keys)?;
        let mut finite_sets = vec![Vec::new(); joint.piece_count()];
        for a in 0..space.len() {
            let (j, l) = keys[a];
            let slot = &mut finite_sets[joint.label(a)];
            if slot.is_empty() {
                *slot = certs[j].finite_sets[l].clone();
            }
        }
        let eps: Vec<RandomScalar> = certs.iter().map(|c| c.epsilon.clone()).collect();
        Ok(NetCertificate {
            epsilon: glue_scalars(partition, &eps)?,
            partition: joint,
            finite_sets,
        })
    }
}

/// Points searched for the supremum at one atom, plus a bound on the distance
/// from any point of the section to the search set.
struct SearchSet {
    points: Vec<Vec<f64>>,
    slack: f64,
}

fn grid_nodes(lo: &[f64], hi: &[f64], spacing: f64, budget: usize) -> Result<Vec<Vec<f64>>> {
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| ((h - l) / spacing).ceil().max(0.0) as usize + 1)
        .collect();
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::Unsupported(format!(
                "search grid with spacing {spacing:e} exceeds the budget of {budget} nodes"
            ))
        })?;
    let mut nodes = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..total {
        nodes.push(
            idx.iter()
                .zip(lo)
                .map(|(&k, &l)| l + spacing * k as f64)
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
    Ok(nodes)
}

fn search_set(section: &Section, eps: f64, budget: usize) -> Result<SearchSet> {
    match section {
        // sup over sigma(G0) of a sigma-stable function is a max over generators
        Section::Points(p) => Ok(SearchSet {
            points: p.clone(),
            slack: 0.0,
        }),
        Section::Polytope(_) | Section::Ball { .. } => {
            let d = section.dim();
            let spacing = eps / 4.0;
            let (lo, hi) = section.bounds();
            let mut points: Vec<Vec<f64>> = section.vertices().map(<[_]>::to_vec).unwrap_or_default();
            // Projection is 1-Lipschitz, so the projected grid keeps the
            // grid's covering radius.
            for node in grid_nodes(&lo, &hi, spacing, budget)? {
                points.push(section.project(&node));
            }
            let mut slack = spacing * (d as f64).sqrt() / 2.0;
            if let Section::Ball { radius, .. } = section {
                slack += radius * BALL_SHRINK;
            }
            Ok(SearchSet { points, slack })
        }
    }
}

/// Greedy farthest-point sequence at one atom: returns the chosen search
/// indices; the atom's piece uses all of them.
fn greedy_at_atom(search: &SearchSet, eps: f64) -> Vec<usize> {
    let threshold = eps - search.slack;
    let mut chosen = vec![0usize];
    let mut mind: Vec<f64> = search
        .points
        .iter()
        .map(|p| dist(p, &search.points[0]))
        .collect();
    loop {
        let (far, xi) = mind
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, d)| if d > best.1 { (i, d) } else { best });
        if xi < threshold {
            return chosen;
        }
        chosen.push(far);
        let new = &search.points[far];
        for (m, p) in mind.iter_mut().zip(&search.points) {
            *m = m.min(dist(p, new));
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NetOptions {
    /// Cap on grid nodes per atom when searching polytopes and balls.
    pub search_budget: usize,
    pub exec: Execution,
}

impl Default for NetOptions {
    fn default() -> Self {
        NetOptions {
            search_budget: DEFAULT_SEARCH_BUDGET,
            exec: Execution::default(),
        }
    }
}

pub fn build_net(g: &SetSpec, eps: &RandomScalar) -> Result<NetCertificate> {
    build_net_with(g, eps, &NetOptions::default())
}

pub fn build_net_with(g: &SetSpec, eps: &RandomScalar, opts: &NetOptions) -> Result<NetCertificate> {
    let space = g.space();
    space.ensure_same(eps.space())?;
    if !eps.is_strictly_positive() {
        return Err(Error::BadEpsilon);
    }
    let n = space.len();
    let per_atom: Vec<Result<(SearchSet, Vec<usize>)>> = map_indexed(opts.exec, n, |a| {
        let search = search_set(&g.section(a), eps.at(a), opts.search_budget)?;
        let chosen = greedy_at_atom(&search, eps.at(a));
        Ok((search, chosen))
    });
    let per_atom: Vec<(SearchSet, Vec<usize>)> = per_atom.into_iter().collect::<Result<_>>()?;

    // Atoms closing after the same number of candidates form one piece;
    // pieces are emitted in the order the greedy closes them.
    let steps: Vec<usize> = per_atom.iter().map(|(_, c)| c.len()).collect();
    let mut order: Vec<usize> = steps.clone();
    order.sort_unstable();
    order.dedup();
    let labels: Vec<usize> = steps
        .iter()
        .map(|s| order.binary_search(s).unwrap())
        .collect();
    let partition = MeasurablePartition::new(space, labels)?;

    let max_steps = *order.last().unwrap();
    let dim = g.dim();
    let candidates: Vec<RandomPoint> = (0..max_steps)
        .map(|j| {
            RandomPoint::from_fn(space, dim, |a| {
                let (search, chosen) = &per_atom[a];
                search.points[chosen[j.min(chosen.len() - 1)]].clone()
            })
        })
        .collect();
    let finite_sets = order.iter().map(|&s| candidates[..s].to_vec()).collect();
    Ok(NetCertificate {
        epsilon: eps.clone(),
        partition,
        finite_sets,
    })
}

/// Outcome of sampling-based net verification.
#[derive(Debug, Clone, PartialEq)]
pub struct NetReport {
    pub samples: usize,
    /// Sample-atom pairs where the covering inequality failed.
    pub violations: usize,
    /// Smallest `eps - d(x, G_n)` seen (positive means every check passed).
    pub worst_margin: f64,
    pub worst_atom: Option<usize>,
}

impl NetReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn verify_net(g: &SetSpec, cert: &NetCertificate, samples: usize, seed: u64) -> Result<NetReport> {
    verify_net_with(Execution::default(), g, cert, samples, seed)
}

/// Draws `samples` points of `g` and checks `d(x, G_n) < eps` on each piece
/// `A_n`. Sample `i` uses its own ChaCha stream, so the report does not
/// depend on the execution mode.
pub fn verify_net_with(
    exec: Execution,
    g: &SetSpec,
    cert: &NetCertificate,
    samples: usize,
    seed: u64,
) -> Result<NetReport> {
    g.space().ensure_same(cert.epsilon.space())?;
    for set in &cert.finite_sets {
        if set.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for p in set {
            if p.dim() != g.dim() {
                return Err(Error::DimMismatch {
                    expected: g.dim(),
                    got: p.dim(),
                });
            }
        }
    }
    let pieces: Vec<Vec<usize>> = (0..cert.piece_count())
        .map(|k| cert.partition.piece(k).atoms())
        .collect();
    let outcomes: Vec<(usize, f64, usize)> = map_indexed(exec, samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let x = g.sample_point(&mut rng);
        let mut violations = 0;
        let mut worst = (f64::INFINITY, usize::MAX);
        for (k, atoms) in pieces.iter().enumerate() {
            let sel = distance_to_finite_set(&x, &cert.finite_sets[k]).expect("checked above");
            for &a in atoms {
                let margin = cert.epsilon.at(a) - sel.distance.at(a);
                if !(margin > 0.0) {
                    violations += 1;
                }
                if margin < worst.0 {
                    worst = (margin, a);
                }
            }
        }
        (violations, worst.0, worst.1)
    });
    let mut report = NetReport {
        samples,
        violations: 0,
        worst_margin: f64::INFINITY,
        worst_atom: None,
    };
    for (v, m, a) in outcomes {
        report.violations += v;
        if m < report.worst_margin {
            report.worst_margin = m;
            report.worst_atom = Some(a);
        }
    }
    Ok(report)
}

/// Net for the L0-convex hull of a sigma-hull: a net of the generators at
/// `eps/2`, then on each piece a grid over the weight simplex of that piece's
/// finite set fine enough to cover its convex hull within `eps/2`.
pub fn convex_hull_net(g: &SetSpec, eps: &RandomScalar) -> Result<NetCertificate> {
    convex_hull_net_with(g, eps, &NetOptions::default())
}

pub fn convex_hull_net_with(g: &SetSpec, eps: &RandomScalar, opts: &NetOptions) -> Result<NetCertificate> {
    if !matches!(g, SetSpec::FiniteSigmaHull(_)) {
        return Err(Error::Unsupported("convex hull nets need a finite sigma-hull".into()));
    }
    if !eps.is_strictly_positive() {
        return Err(Error::BadEpsilon);
    }
    let half = eps.scale(0.5);
    let base = build_net_with(g, &half, opts)?;
    let space = g.space();
    let mut finite_sets = Vec::with_capacity(base.piece_count());
    for (k, set) in base.finite_sets.iter().enumerate() {
        let atoms = base.partition.piece(k).atoms();
        let m = set.len();
        if m == 1 {
            finite_sets.push(set.clone());
            continue;
        }
        // Rounding convex weights to multiples of 1/N moves them by less than
        // m/N in l1; the hull point then moves by less than (m/N) * R where R
        // bounds the distance of the generators to their centroid.
        let mut resolution = 1usize;
        for &a in &atoms {
            let pts: Vec<Vec<f64>> = set.iter().map(|p| p.at(a).to_vec()).collect();
            let c = super::sets::centroid(&pts);
            let r = pts.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
            let need = (2.0 * m as f64 * r / eps.at(a)).floor() as usize + 1;
            resolution = resolution.max(need);
        }
        let count = binomial(resolution + m - 1, m - 1);
        if count.is_none_or(|c| c > opts.search_budget) {
            return Err(Error::Unsupported(format!(
                "weight grid of resolution {resolution} over {m} points exceeds the budget"
            )));
        }
        let mut grid = Vec::new();
        let mut weights = vec![0usize; m];
        compositions(resolution, 0, &mut weights, &mut |w| {
            grid.push(RandomPoint::from_fn(space, g.dim(), |a| {
                let mut x = vec![0.0; g.dim()];
                for (p, &wi) in set.iter().zip(w) {
                    if wi > 0 {
                        let t = wi as f64 / resolution as f64;
                        for (xc, pc) in x.iter_mut().zip(p.at(a)) {
                            *xc += t * pc;
                        }
                    }
                }
                x
            }));
        });
        finite_sets.push(grid);
    }
    Ok(NetCertificate {
        epsilon: eps.clone(),
        partition: base.partition,
        finite_sets,
    })
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

// All weight vectors of nonnegative integers summing to `total`.
fn compositions(total: usize, i: usize, w: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if i + 1 == w.len() {
        w[i] = total;
        f(w);
        return;
    }
    for k in 0..=total {
        w[i] = k;
        compositions(total - k, i + 1, w, f);
    }
}
