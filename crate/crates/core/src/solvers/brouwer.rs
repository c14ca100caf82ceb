//! Fixed points of continuous self-maps of a polytope in R^d.
//!
//! Damped iteration `x <- (x + f(x)) / 2` from a few deterministic seeds, then
//! a Sperner search as the fallback: an enclosing simplex is triangulated
//! (Freudenthal), completely labeled cells are found by exhaustive scan, and
//! the search recenters on the best one at a finer scale. Each candidate gets
//! a few Newton steps on `x - f(x)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compactness::Section;
use crate::error::{Error, Result};
use crate::hull::{dist, nearest_point};

const SELF_MAP_TOL: f64 = 1e-9;
const MAX_DEPTH: usize = 24;
const MAX_SEEDS: usize = 8;

/// A fixed-point problem on a compact convex set with a known retraction.
pub(crate) struct Problem<'a> {
    pub f: &'a dyn Fn(&[f64]) -> Vec<f64>,
    /// Nearest-point map onto a convex set containing the range of `f`.
    pub retract: &'a dyn Fn(&[f64]) -> Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub seeds: Vec<Vec<f64>>,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub point: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// The centroid, then points halfway from it towards the first vertices.
pub(crate) fn default_seeds(vertices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = crate::compactness::Section::Polytope(vertices.to_vec()).center();
    let mut seeds = vec![c.clone()];
    for v in vertices.iter().take(MAX_SEEDS - 1) {
        seeds.push(c.iter().zip(v).map(|(a, b)| 0.5 * (a + b)).collect());
    }
    seeds
}

pub(crate) fn solve(p: &Problem) -> Result<Solution> {
    let (s, ok) = solve_best(p);
    if ok {
        Ok(s)
    } else {
        Err(Error::NoConvergence { residual: s.residual })
    }
}

/// The best point found, and whether it meets `p.tol`.
pub(crate) fn solve_best(p: &Problem) -> (Solution, bool) {
    let mut best = Solution {
        point: p.seeds.first().cloned().unwrap_or_else(|| (p.retract)(&p.lo)),
        residual: f64::INFINITY,
        iterations: 0,
    };
    let mut iterations = 0;
    for seed in &p.seeds {
        let mut x = seed.clone();
        for _ in 0..p.max_iter {
            let fx = (p.f)(&x);
            iterations += 1;
            let r = dist(&fx, &x);
            if r < best.residual {
                best.point = x.clone();
                best.residual = r;
            }
            if r <= p.tol {
                let mut s = polish(p, x, fx, r);
                s.iterations += iterations;
                return (s, true);
            }
            x = x.iter().zip(&fx).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
        }
    }
    if let Some(s) = sperner(p, &mut iterations) {
        if s.residual < best.residual {
            best = s;
        }
    }
    let ok = best.residual <= p.tol;
    if best.residual.is_finite() {
        let fx = (p.f)(&best.point);
        best = polish(p, best.point, fx, best.residual);
    }
    best.iterations += iterations;
    (best, ok)
}

// f(x) is kept when it is at least as good as x; constant maps then return
// their value exactly.
fn polish(p: &Problem, x: Vec<f64>, fx: Vec<f64>, r: f64) -> Solution {
    let ffx = (p.f)(&fx);
    let rf = dist(&ffx, &fx);
    if rf <= r {
        Solution {
            point: fx,
            residual: rf,
            iterations: 2,
        }
    } else {
        Solution {
            point: x,
            residual: r,
            iterations: 2,
        }
    }
}

/// Vertices and barycentric solver of a full-dimensional simplex.
struct Simplex {
    vertices: Vec<Vec<f64>>,
    inverse: DMatrix<f64>,
}

impl Simplex {
    fn new(vertices: Vec<Vec<f64>>) -> Option<Simplex> {
        let d = vertices.len() - 1;
        let m = DMatrix::from_fn(d, d, |i, j| vertices[j + 1][i] - vertices[0][i]);
        let inverse = m.try_inverse()?;
        Some(Simplex { vertices, inverse })
    }

    /// Contains the box `[lo, hi]` with a small margin.
    fn enclosing(lo: &[f64], hi: &[f64]) -> Option<Simplex> {
        let d = lo.len();
        let side = lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max).max(1e-9);
        let margin = 0.01 * side;
        let len = d as f64 * (side + 2.0 * margin) + margin;
        let v0: Vec<f64> = lo.iter().map(|l| l - margin).collect();
        let mut vertices = vec![v0.clone()];
        for i in 0..d {
            let mut v = v0.clone();
            v[i] += len;
            vertices.push(v);
        }
        Simplex::new(vertices)
    }

    fn barycentric(&self, y: &[f64]) -> Vec<f64> {
        let v0 = &self.vertices[0];
        let rhs = DVector::from_iterator(y.len(), y.iter().zip(v0).map(|(a, b)| a - b));
        let lambda = &self.inverse * rhs;
        let mut beta = Vec::with_capacity(y.len() + 1);
        beta.push(1.0 - lambda.sum());
        beta.extend(lambda.iter());
        beta
    }

    fn point(&self, beta: &[f64]) -> Vec<f64> {
        let d = self.vertices[0].len();
        let mut x = vec![0.0; d];
        for (b, v) in beta.iter().zip(&self.vertices) {
            if *b != 0.0 {
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += b * vi;
                }
            }
        }
        x
    }

    fn clamp(&self, y: Vec<f64>) -> Vec<f64> {
        if self.barycentric(&y).iter().all(|&b| b >= 0.0) {
            y
        } else {
            nearest_point(&self.vertices, &y).point
        }
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// Lattice point `z` with `n >= z_1 >= ... >= z_d >= 0` in barycentric form.
fn lattice_beta(z: &[i64], n: i64) -> Vec<f64> {
    let d = z.len();
    let mut beta = Vec::with_capacity(d + 1);
    beta.push((n - z[0]) as f64 / n as f64);
    for i in 0..d {
        let next = if i + 1 < d { z[i + 1] } else { 0 };
        beta.push((z[i] - next) as f64 / n as f64);
    }
    beta
}

fn ordered(z: &[i64], n: i64) -> bool {
    z[0] <= n && z.windows(2).all(|w| w[0] >= w[1]) && *z.last().unwrap() >= 0
}

// Sperner label: the first vertex whose weight is positive at x and does not
// grow under g.
fn label(beta_x: &[f64], beta_g: &[f64]) -> usize {
    for i in 0..beta_x.len() {
        if beta_x[i] > 0.0 && beta_g[i] <= beta_x[i] {
            return i;
        }
    }
    (0..beta_x.len())
        .filter(|&i| beta_x[i] > 0.0)
        .max_by(|&a, &b| (beta_x[a] - beta_g[a]).total_cmp(&(beta_x[b] - beta_g[b])))
        .unwrap_or(0)
}

fn sperner(p: &Problem, iterations: &mut usize) -> Option<Solution> {
    let d = p.lo.len();
    if d == 0 || d > 5 {
        return None;
    }
    let n: i64 = match d {
        1 => 64,
        2 => 32,
        3 => 16,
        _ => 8,
    };
    let stride: Vec<usize> = (0..d).map(|i| (n as usize + 1).pow(i as u32)).collect();
    let zoom = 2.0;
    let perms = permutations(d);
    let mut simplex = Simplex::enclosing(&p.lo, &p.hi)?;
    let mut radius = p.lo.iter().zip(&p.hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let mut best: Option<Solution> = None;

    for _ in 0..MAX_DEPTH {
        let mut labels = vec![u8::MAX; (n as usize + 1).pow(d as u32)];
        let mut label_of = |z: &[i64]| -> usize {
            let idx: usize = z.iter().zip(&stride).map(|(&zi, s)| zi as usize * s).sum();
            if labels[idx] == u8::MAX {
                let beta = lattice_beta(z, n);
                let x = simplex.point(&beta);
                let gx = simplex.clamp((p.f)(&(p.retract)(&x)));
                *iterations += 1;
                labels[idx] = label(&beta, &simplex.barycentric(&gx)) as u8;
            }
            labels[idx] as usize
        };

        let mut cells: Vec<Vec<Vec<i64>>> = Vec::new();
        let mut base = vec![0i64; d];
        'bases: loop {
            if ordered(&base, n) {
                for perm in &perms {
                    let mut verts = vec![base.clone()];
                    let mut ok = true;
                    for &axis in perm {
                        let mut v = verts.last().unwrap().clone();
                        v[axis] += 1;
                        if !ordered(&v, n) {
                            ok = false;
                            break;
                        }
                        verts.push(v);
                    }
                    if !ok {
                        continue;
                    }
                    let mut seen = vec![false; d + 1];
                    for v in &verts {
                        seen[label_of(v)] = true;
                    }
                    if seen.iter().all(|&s| s) {
                        cells.push(verts);
                    }
                }
            }
            for i in 0..d {
                base[i] += 1;
                if base[i] < n {
                    continue 'bases;
                }
                base[i] = 0;
            }
            break;
        }

        let mut chosen: Option<(Vec<Vec<f64>>, Solution)> = None;
        for cell in cells {
            let pts: Vec<Vec<f64>> = cell.iter().map(|z| simplex.point(&lattice_beta(z, n))).collect();
            let c = Section::Polytope(pts.clone()).center();
            let x = (p.retract)(&c);
            let r = dist(&(p.f)(&x), &x);
            *iterations += 1;
            if chosen.as_ref().is_none_or(|(_, s)| r < s.residual) {
                chosen = Some((
                    pts,
                    Solution {
                        point: x,
                        residual: r,
                        iterations: 0,
                    },
                ));
            }
        }
        let (cell, sol) = chosen?;
        let sol = newton_polish(p, sol, iterations);
        let progressed = best.as_ref().is_none_or(|b| sol.residual < 0.9 * b.residual);
        if best.as_ref().is_none_or(|b| sol.residual < b.residual) {
            best = Some(sol.clone());
        }
        let best_sol = best.as_ref().unwrap();
        if best_sol.residual <= p.tol {
            break;
        }
        // Recenter on the best candidate. The window shrinks with the cell
        // while the residual improves and grows again when it stalls.
        radius = if progressed {
            let diam = cell
                .iter()
                .flat_map(|a| cell.iter().map(move |b| dist(a, b)))
                .fold(0.0, f64::max);
            (zoom * diam).max(4.0 * best_sol.residual)
        } else {
            4.0 * radius
        };
        let lo: Vec<f64> = best_sol.point.iter().map(|c| c - radius).collect();
        let hi: Vec<f64> = best_sol.point.iter().map(|c| c + radius).collect();
        match Simplex::enclosing(&lo, &hi) {
            Some(s) => simplex = s,
            None => break,
        }
    }
    best
}

/// Newton steps on `x - f(x)` with a finite-difference Jacobian, kept inside
/// the domain by the retraction and accepted only when the residual drops.
fn newton_polish(p: &Problem, start: Solution, iterations: &mut usize) -> Solution {
    let d = start.point.len();
    let mut x = start.point.clone();
    let mut fx = (p.f)(&x);
    let mut r = dist(&fx, &x);
    for _ in 0..30 {
        if r <= p.tol {
            break;
        }
        let h = 1e-7 * (1.0 + x.iter().fold(0.0f64, |m, c| m.max(c.abs())));
        let mut jac = DMatrix::<f64>::identity(d, d);
        for j in 0..d {
            let mut xh = x.clone();
            xh[j] += h;
            let fh = (p.f)(&xh);
            *iterations += 1;
            for i in 0..d {
                jac[(i, j)] -= (fh[i] - fx[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(d, fx.iter().zip(&x).map(|(a, b)| a - b));
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut improved = false;
        let mut t = 1.0;
        for _ in 0..8 {
            let cand = (p.retract)(&x.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect::<Vec<_>>());
            let fc = (p.f)(&cand);
            *iterations += 1;
            let rc = dist(&fc, &cand);
            if rc < r {
                x = cand;
                fx = fc;
                r = rc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if r < start.residual {
        Solution {
            point: x,
            residual: r,
            iterations: 0,
        }
    } else {
        start
    }
}

/// Fixed point of `f` on the convex hull of `vertices`, to `|f(x) - x| <= tol`.
///
/// `f` is first checked to map sampled points of the polytope into it.
pub fn solve_brouwer_atom(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    vertices: &[Vec<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    if vertices.is_empty() {
        return Err(Error::EmptySection(0));
    }
    let d = vertices[0].len();
    if let Some(v) = vertices.iter().find(|v| v.len() != d) {
        return Err(Error::DimMismatch {
            expected: d,
            got: v.len(),
        });
    }
    check_self_map(f, vertices, 64, 0)?;
    let section = Section::Polytope(vertices.to_vec());
    let (lo, hi) = section.bounds();
    let retract = |x: &[f64]| section.project(x);
    let problem = Problem {
        f,
        retract: &retract,
        lo,
        hi,
        seeds: default_seeds(vertices),
        tol,
        max_iter,
    };
    Ok(solve(&problem)?.point)
}

fn check_self_map(f: &dyn Fn(&[f64]) -> Vec<f64>, vertices: &[Vec<f64>], samples: usize, seed: u64) -> Result<()> {
    let section = Section::Polytope(vertices.to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = vertices.to_vec();
    points.push(section.center());
    for _ in 0..samples {
        points.push(section.sample_with(&mut rng));
    }
    let mut worst: Option<f64> = None;
    for x in &points {
        let y = f(x);
        if y.len() != x.len() {
            return Err(Error::DimMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let e = section.distance(&y);
        let scale = 1.0 + y.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if !(e <= SELF_MAP_TOL * scale) && worst.is_none_or(|w| e > w || e.is_nan()) {
            worst = Some(e);
        }
    }
    match worst {
        Some(excess) => Err(Error::NotSelfMap { atom: 0, excess }),
        None => Ok(()),
    }
}
