//! L0-convex geometry: random convex combinations, the Schauder projection
//! and the separation functional.

use crate::compactness::AtomwisePolytope;
use crate::error::{Error, Result};
use crate::hull::{dist, dot, nearest_point};
use crate::prob_space::Event;
use crate::rn_module::{random_diameter, RandomPoint};
use crate::scalar::RandomScalar;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const MIN_WEIGHT_MASS: f64 = 1e-12;
const SEPARATION_TOL: f64 = 1e-9;

/// `sum_i xi_i x_i` with random weights that are nonnegative and sum to one
/// at every atom.
pub fn l0_convex_combination(weights: &[RandomScalar], points: &[RandomPoint]) -> Result<RandomPoint> {
    let first = points.first().ok_or(Error::EmptyFamily)?;
    if weights.len() != points.len() {
        return Err(Error::PieceCountMismatch {
            expected: points.len(),
            got: weights.len(),
        });
    }
    for (w, p) in weights.iter().zip(points) {
        first.ensure_compatible(p)?;
        first.space().ensure_same(w.space())?;
    }
    let space = first.space();
    for a in 0..space.len() {
        let mut total = 0.0;
        for w in weights {
            if w.at(a) < 0.0 {
                return Err(Error::NotConvexWeights(a));
            }
            total += w.at(a);
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::NotConvexWeights(a));
        }
    }
    Ok(RandomPoint::from_fn(space, first.dim(), |a| {
        let mut x = vec![0.0; first.dim()];
        for (w, p) in weights.iter().zip(points) {
            let t = w.at(a);
            if t != 0.0 {
                for (xc, pc) in x.iter_mut().zip(p.at(a)) {
                    *xc += t * pc;
                }
            }
        }
        x
    }))
}

/// A finite set `G = {x_1, ..., x_n}` and the radius of the Schauder
/// projection `P_{G, eps}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSpec {
    generators: Vec<RandomPoint>,
    epsilon: RandomScalar,
}

impl ProjectionSpec {
    pub fn new(generators: Vec<RandomPoint>, epsilon: RandomScalar) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyFamily)?;
        for g in &generators[1..] {
            first.ensure_compatible(g)?;
        }
        first.space().ensure_same(epsilon.space())?;
        if !epsilon.is_strictly_positive() {
            return Err(Error::BadEpsilon);
        }
        Ok(ProjectionSpec { generators, epsilon })
    }

    pub fn generators(&self) -> &[RandomPoint] {
        &self.generators
    }

    pub fn epsilon(&self) -> &RandomScalar {
        &self.epsilon
    }
}

/// `P_{G, eps}` at one atom. `None` when the weights `max(0, eps - |x - x_i|)`
/// carry no usable mass.
pub fn projection_at(generators: &[Vec<f64>], eps: f64, x: &[f64]) -> Option<Vec<f64>> {
    let u: Vec<f64> = generators
        .iter()
        .map(|g| (eps - dist(x, g)).max(0.0))
        .collect();
    let total: f64 = u.iter().sum();
    if !(total >= MIN_WEIGHT_MASS) {
        return None;
    }
    let mut p = vec![0.0; x.len()];
    for (g, ui) in generators.iter().zip(&u) {
        if *ui > 0.0 {
            let w = ui / total;
            for (pc, gc) in p.iter_mut().zip(g) {
                *pc += w * gc;
            }
        }
    }
    Some(p)
}

/// The Schauder projection, computed atom by atom. Fails with the atoms where
/// `x` lies outside the `eps`-enlargement of `G`.
pub fn schauder_projection(spec: &ProjectionSpec, x: &RandomPoint) -> Result<RandomPoint> {
    let first = &spec.generators[0];
    first.ensure_compatible(x)?;
    let space = x.space();
    let mut outside = Vec::new();
    let mut coords = Vec::with_capacity(space.len());
    for a in 0..space.len() {
        let gens: Vec<Vec<f64>> = spec.generators.iter().map(|g| g.at(a).to_vec()).collect();
        match projection_at(&gens, spec.epsilon.at(a), x.at(a)) {
            Some(p) => coords.push(p),
            None => outside.push(a),
        }
    }
    if !outside.is_empty() {
        return Err(Error::OutsideEnlargement(outside));
    }
    RandomPoint::new(space, &coords)
}

/// A per-atom linear functional `f(x)(w) = <y(w), x(w)>` separating `x` from a
/// polytope wherever `x` lies outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    pub functional: RandomPoint,
    /// Atoms where `d(x, G) > 0`, up to the separation tolerance.
    pub strict_event: Event,
    /// `sup { f(g) : g in G }` atom-wise.
    pub sup_over_g: RandomScalar,
    /// `f(x)` atom-wise.
    pub value_at_x: RandomScalar,
    /// `d(x, G)` atom-wise.
    pub distance: RandomScalar,
}

/// Separates `x` from `G` atom by atom, using the unit direction from the
/// nearest point of the section to `x`, and the zero functional where `x` is
/// (numerically) inside.
pub fn separate(x: &RandomPoint, g: &AtomwisePolytope) -> Result<SeparationResult> {
    g.space().ensure_same(x.space())?;
    if x.dim() != g.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            got: x.dim(),
        });
    }
    let space = x.space();
    let n = space.len();
    let mut func = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n);
    for a in 0..n {
        let h = nearest_point(g.vertices(a), x.at(a));
        dists.push(h.distance);
        if h.distance > SEPARATION_TOL {
            func.push(
                x.at(a)
                    .iter()
                    .zip(&h.point)
                    .map(|(xc, pc)| (xc - pc) / h.distance)
                    .collect(),
            );
            mask.push(true);
        } else {
            func.push(vec![0.0; x.dim()]);
            mask.push(false);
        }
    }
    let sup: Vec<f64> = (0..n)
        .map(|a| {
            g.vertices(a)
                .iter()
                .map(|v| dot(&func[a], v))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let val: Vec<f64> = (0..n).map(|a| dot(&func[a], x.at(a))).collect();
    Ok(SeparationResult {
        functional: RandomPoint::new(space, &func)?,
        strict_event: Event::from_mask(space, mask)?,
        sup_over_g: RandomScalar::new(space, sup)?,
        value_at_x: RandomScalar::new(space, val)?,
        distance: RandomScalar::new(space, dists)?,
    })
}

/// Outcome of the normal-structure spot check at the vertex barycenter.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalStructureCheck {
    pub barycenter: RandomPoint,
    /// `sup_v |h - v|` atom-wise.
    pub radius: RandomScalar,
    pub diameter: RandomScalar,
}

impl NormalStructureCheck {
    /// `radius < diameter` at every atom.
    pub fn holds(&self) -> bool {
        self.radius
            .values()
            .iter()
            .zip(self.diameter.values())
            .all(|(r, d)| r < d)
    }
}

pub fn normal_structure_check(h: &AtomwisePolytope) -> Result<NormalStructureCheck> {
    let barycenter = h.barycenter();
    let radius: Vec<f64> = (0..h.space().len())
        .map(|a| {
            h.vertices(a)
                .iter()
                .map(|v| dist(v, barycenter.at(a)))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(NormalStructureCheck {
        radius: RandomScalar::new(h.space(), radius)?,
        diameter: random_diameter(h)?,
        barycenter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob_space::FiniteProbSpace;

    fn sp(n: usize) -> FiniteProbSpace {
        FiniteProbSpace::uniform(n).unwrap()
    }

    fn pt(s: &FiniteProbSpace, v: &[&[f64]]) -> RandomPoint {
        RandomPoint::new(s, &v.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn convex_combination_examples() {
        let s = sp(2);
        let x = pt(&s, &[&[1.0, 0.0], &[2.0, 2.0]]);
        let y = pt(&s, &[&[3.0, 4.0], &[0.0, 0.0]]);
        let one = RandomScalar::constant(&s, 1.0);
        let zero = RandomScalar::zero(&s);
        assert_eq!(l0_convex_combination(&[one, zero], &[x.clone(), y.clone()]).unwrap(), x);
        let a = Event::from_atoms(&s, &[1]).unwrap();
        let ia = RandomScalar::indicator(&a);
        let iac = RandomScalar::indicator(&a.complement());
        let comb = l0_convex_combination(&[ia, iac], &[x.clone(), y.clone()]).unwrap();
        assert_eq!(comb.at(0), y.at(0));
        assert_eq!(comb.at(1), x.at(1));
        let half = RandomScalar::constant(&s, 0.5);
        let mid = l0_convex_combination(&[half.clone(), half], &[x.clone(), y.clone()]).unwrap();
        assert_eq!(mid.at(0), &[2.0, 2.0]);
        assert_eq!(mid.at(1), &[1.0, 1.0]);
        let bad = RandomScalar::new(&s, vec![0.5, 0.7]).unwrap();
        assert_eq!(
            l0_convex_combination(&[bad.clone(), bad], &[x.clone(), y.clone()]),
            Err(Error::NotConvexWeights(1))
        );
        let neg = RandomScalar::new(&s, vec![-0.5, 0.5]).unwrap();
        let pos = RandomScalar::new(&s, vec![1.5, 0.5]).unwrap();
        assert_eq!(
            l0_convex_combination(&[neg, pos], &[x, y]),
            Err(Error::NotConvexWeights(0))
        );
    }

    #[test]
    fn projection_examples() {
        let s = sp(1);
        let spec = ProjectionSpec::new(
            vec![pt(&s, &[&[0.0]]), pt(&s, &[&[1.0]])],
            RandomScalar::constant(&s, 1.0),
        )
        .unwrap();
        // u = (0.75, 0.25)
        let p = schauder_projection(&spec, &pt(&s, &[&[0.25]])).unwrap();
        assert_eq!(p.at(0), &[0.25]);

        let s2 = sp(2);
        let g = pt(&s2, &[&[0.3, 0.1], &[-2.0, 5.0]]);
        let spec = ProjectionSpec::new(vec![g.clone()], RandomScalar::constant(&s2, 0.5)).unwrap();
        let x = pt(&s2, &[&[0.4, 0.0], &[-2.1, 5.2]]);
        assert_eq!(schauder_projection(&spec, &x).unwrap(), g);
        let far = pt(&s2, &[&[0.4, 0.0], &[9.0, 9.0]]);
        assert_eq!(
            schauder_projection(&spec, &far),
            Err(Error::OutsideEnlargement(vec![1]))
        );
    }

    #[test]
    fn projection_is_odd_for_symmetric_generators() {
        let s = sp(1);
        let g = pt(&s, &[&[0.6, -0.2]]);
        let mg = pt(&s, &[&[-0.6, 0.2]]);
        let spec = ProjectionSpec::new(vec![g, mg], RandomScalar::constant(&s, 1.0)).unwrap();
        for x in [[0.1, 0.1], [-0.3, 0.05], [0.5, -0.5]] {
            let p = schauder_projection(&spec, &pt(&s, &[&x])).unwrap();
            let q = schauder_projection(&spec, &pt(&s, &[&[-x[0], -x[1]]])).unwrap();
            assert_eq!(p.at(0)[0], -q.at(0)[0]);
            assert_eq!(p.at(0)[1], -q.at(0)[1]);
        }
    }

    #[test]
    fn separation_examples() {
        let s = sp(1);
        let seg = AtomwisePolytope::uniform(&s, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = separate(&pt(&s, &[&[2.0, 0.0]]), &seg).unwrap();
        assert_eq!(r.functional.at(0), &[1.0, 0.0]);
        assert_eq!(r.value_at_x.at(0), 2.0);
        assert_eq!(r.sup_over_g.at(0), 1.0);
        assert!(r.strict_event.is_full());

        let s2 = sp(2);
        let sq = AtomwisePolytope::unit_cube(&s2, 2);
        let r = separate(&pt(&s2, &[&[0.5, 0.5], &[0.0, 1.0]]), &sq).unwrap();
        assert!(r.strict_event.is_empty());
        assert_eq!(r.functional, RandomPoint::zero(&s2, 2));
        assert_eq!(r.value_at_x.values(), r.sup_over_g.values());

        // atom 0 outside (nearest point (1, 0.5), distance 0.5), atom 1 inside
        let r = separate(&pt(&s2, &[&[1.5, 0.5], &[0.2, 0.9]]), &sq).unwrap();
        assert_eq!(r.strict_event.atoms(), vec![0]);
        assert!((r.distance.at(0) - 0.5).abs() < 1e-14);
        assert!(r.value_at_x.at(0) > r.sup_over_g.at(0));
    }

    #[test]
    fn normal_structure_on_square() {
        let s = sp(2);
        let c = normal_structure_check(&AtomwisePolytope::unit_cube(&s, 2)).unwrap();
        assert!(c.holds());
        assert!((c.radius.at(0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((c.diameter.at(1) - 2f64.sqrt()).abs() < 1e-15);
    }
}
