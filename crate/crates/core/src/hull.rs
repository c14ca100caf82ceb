//! Nearest point of a convex hull of finitely many vertices.
//!
//! Wolfe's minimum-norm-point method: an active-set solve over the vertex
//! weight simplex. Vertex order is the caller's, ties go to the lowest index,
//! so the result is deterministic.

use nalgebra::{DMatrix, DVector};

const OPTIMALITY_TOL: f64 = 1e-13;
const WEIGHT_TOL: f64 = 1e-12;
const MAX_MAJOR: usize = 500;

#[derive(Debug, Clone)]
pub struct HullProjection {
    /// Nearest point of the hull.
    pub point: Vec<f64>,
    /// Convex weights over the input vertices reproducing `point`.
    pub weights: Vec<f64>,
    pub distance: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Weights minimizing `|sum a_k q_k|` subject to `sum a_k = 1`.
fn affine_minimizer(q: &[&[f64]]) -> Vec<f64> {
    let m = q.len();
    if m == 1 {
        return vec![1.0];
    }
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..=i {
            let g = dot(q[i], q[j]);
            a[(i, j)] = g;
            a[(j, i)] = g;
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let sol = a
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| {
            a.svd(true, true)
                .solve(&rhs, 1e-14)
                .expect("svd solve with both factors")
        });
    (0..m).map(|i| sol[i]).collect()
}

/// Nearest point of `conv(vertices)` to `p`.
///
/// Panics if `vertices` is empty.
pub fn nearest_point(vertices: &[Vec<f64>], p: &[f64]) -> HullProjection {
    assert!(!vertices.is_empty(), "hull of an empty vertex list");
    let q: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.iter().zip(p).map(|(a, b)| a - b).collect())
        .collect();
    let scale = q.iter().map(|v| dot(v, v)).fold(0.0, f64::max).max(1e-300);

    let first = (0..q.len())
        .min_by(|&a, &b| dot(&q[a], &q[a]).total_cmp(&dot(&q[b], &q[b])))
        .unwrap();
    let mut active = vec![first];
    let mut lambda = vec![1.0];
    let mut x = q[first].clone();

    for _ in 0..MAX_MAJOR {
        let xx = dot(&x, &x);
        if xx == 0.0 {
            break;
        }
        let (j, xq) = (0..q.len())
            .map(|i| (i, dot(&x, &q[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xq <= OPTIMALITY_TOL * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);
        loop {
            let rows: Vec<&[f64]> = active.iter().map(|&i| q[i].as_slice()).collect();
            let alpha = affine_minimizer(&rows);
            if alpha.iter().all(|&a| a > WEIGHT_TOL) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for k in 0..alpha.len() {
                if alpha[k] <= WEIGHT_TOL {
                    let denom = lambda[k] - alpha[k];
                    if denom > 0.0 {
                        theta = theta.min(lambda[k] / denom);
                    }
                }
            }
            for k in 0..alpha.len() {
                lambda[k] = (1.0 - theta) * lambda[k] + theta * alpha[k];
            }
            let mut keep = Vec::with_capacity(active.len());
            let mut kept_lambda = Vec::with_capacity(active.len());
            for k in 0..active.len() {
                if lambda[k] > WEIGHT_TOL {
                    keep.push(active[k]);
                    kept_lambda.push(lambda[k]);
                }
            }
            if keep.is_empty() {
                // numerically degenerate step; keep the heaviest vertex
                let k = (0..lambda.len())
                    .max_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .unwrap();
                keep.push(active[k]);
                kept_lambda.push(1.0);
            }
            let total: f64 = kept_lambda.iter().sum();
            kept_lambda.iter_mut().for_each(|l| *l /= total);
            active = keep;
            lambda = kept_lambda;
            if active.len() == 1 {
                break;
            }
        }
        x = vec![0.0; p.len()];
        for (&i, &l) in active.iter().zip(&lambda) {
            for (xc, qc) in x.iter_mut().zip(&q[i]) {
                *xc += l * qc;
            }
        }
    }

    let mut weights = vec![0.0; vertices.len()];
    for (&i, &l) in active.iter().zip(&lambda) {
        weights[i] += l;
    }
    let mut point = vec![0.0; p.len()];
    for (v, &w) in vertices.iter().zip(&weights) {
        if w != 0.0 {
            for (pc, vc) in point.iter_mut().zip(v) {
                *pc += w * vc;
            }
        }
    }
    let distance = dist(&point, p);
    HullProjection {
        point,
        weights,
        distance,
    }
}
