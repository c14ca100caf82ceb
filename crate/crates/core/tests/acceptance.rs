//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails or exceeds its time limit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rnmod::compactness::{
    build_net, extract_random_subsequence, verify_net, AtomwisePolytope, NetCertificate, SetSpec,
};
use rnmod::geometry::{schauder_projection, separate, ProjectionSpec};
use rnmod::hull::nearest_point;
use rnmod::oracle::{compare_with_oracle, Problem};
use rnmod::rn_module::glue_points;
use rnmod::solvers::{
    builtin, geometric_schedule, inner_tolerance, solve_brouwer_atom, solve_contraction, solve_krasnoselskii, solve_random_operator,
    solve_schauder, solve_schauder_approx, AtomMap, ContractionSpec, KrasnoselskiiOptions, SchauderOptions,
    StableMapping, DEFAULT_BROUWER_ITER,
};
use rnmod::{FiniteProbSpace, MeasurablePartition, RandomBall, RandomPoint, RandomScalar};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn rand_space(rng: &mut ChaCha8Rng, max_atoms: usize) -> FiniteProbSpace {
    let n = rng.random_range(1..=max_atoms);
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    FiniteProbSpace::new(&w).unwrap()
}

fn rand_vec(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..hi)).collect()
}

fn rand_point(rng: &mut ChaCha8Rng, s: &FiniteProbSpace, d: usize, lo: f64, hi: f64) -> RandomPoint {
    RandomPoint::from_fn(s, d, |_| rand_vec(rng, d, lo, hi))
}

fn rand_scalar(rng: &mut ChaCha8Rng, s: &FiniteProbSpace, lo: f64, hi: f64) -> RandomScalar {
    RandomScalar::new(s, (0..s.len()).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

fn rand_partition(rng: &mut ChaCha8Rng, s: &FiniteProbSpace, max_pieces: usize) -> MeasurablePartition {
    let keys: Vec<usize> = (0..s.len()).map(|_| rng.random_range(0..max_pieces)).collect();
    MeasurablePartition::from_keys(s, &keys).unwrap()
}

fn cube(s: &FiniteProbSpace, d: usize) -> SetSpec {
    SetSpec::AtomwisePolytope(AtomwisePolytope::unit_cube(s, d))
}

/// A damped rotation of the unit square into itself.
fn rand_rotation(rng: &mut ChaCha8Rng) -> AtomMap {
    let c: [f64; 2] = [rng.random_range(0.3..0.7), rng.random_range(0.3..0.7)];
    let inner = c[0].min(1.0 - c[0]).min(c[1]).min(1.0 - c[1]);
    let outer = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        .iter()
        .map(|p| dist(p, &c))
        .fold(0.0, f64::max);
    let scale = rng.random_range(0.05..inner / outer);
    builtin::damped_rotation(rng.random_range(-3.0..3.0), scale, c.to_vec())
}

/// `x` within `eps` of a random generator, at every atom.
fn point_in_enlargement(rng: &mut ChaCha8Rng, gens: &[RandomPoint], eps: &RandomScalar) -> RandomPoint {
    let s = eps.space();
    let d = gens[0].dim();
    RandomPoint::from_fn(s, d, |a| {
        let g = gens[rng.random_range(0..gens.len())].at(a);
        let dir = rand_vec(rng, d, -1.0, 1.0);
        let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
        let t = rng.random_range(0.0..0.999) * eps.at(a);
        g.iter().zip(&dir).map(|(gc, dc)| gc + dc / norm * t).collect()
    })
}

struct Scenario {
    name: &'static str,
    t: StableMapping,
    g: SetSpec,
}

fn scenario(name: &'static str, g: SetSpec, maps: Vec<AtomMap>) -> Scenario {
    Scenario {
        name,
        t: StableMapping::new(g.clone(), maps).unwrap(),
        g,
    }
}

/// Damped rotations, affine maps and constants on 1 to 4 atoms, d <= 3.
fn suite() -> Vec<Scenario> {
    let sp = |n| FiniteProbSpace::uniform(n).unwrap();
    let rot = builtin::damped_rotation;
    let affine = builtin::affine;
    let konst = builtin::constant;
    let r = 1.0 - FRAC_1_SQRT_2;
    let triangle = |s: &FiniteProbSpace| {
        SetSpec::AtomwisePolytope(
            AtomwisePolytope::uniform(s, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
    };
    let s4 = FiniteProbSpace::new(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    let balls = SetSpec::EpsilonBall(
        RandomBall::new(
            RandomPoint::new(&s4, &[vec![0.0, 0.0], vec![1.0, -1.0], vec![2.0, 0.5], vec![-0.5, 3.0]]).unwrap(),
            RandomScalar::new(&s4, vec![1.0, 0.5, 2.0, 0.25]).unwrap(),
        )
        .unwrap(),
    );
    vec![
        scenario("rotation-1", cube(&sp(1), 2), vec![rot(0.5, 0.6, vec![0.5, 0.5])]),
        scenario(
            "rotation-2",
            cube(&sp(2), 2),
            vec![rot(0.3, 0.7, vec![0.5, 0.5]), rot(1.2, 0.5, vec![0.4, 0.6])],
        ),
        scenario(
            "rotation-3",
            cube(&sp(3), 2),
            vec![
                rot(-0.7, 0.65, vec![0.5, 0.5]),
                rot(2.5, 0.4, vec![0.45, 0.4]),
                rot(3.1, 0.69, vec![0.5, 0.5]),
            ],
        ),
        scenario(
            "rotation-cube-4",
            cube(&sp(4), 3),
            vec![
                rot(0.4, 0.5, vec![0.5, 0.5, 0.5]),
                rot(1.0, 0.55, vec![0.5, 0.5, 0.5]),
                rot(-2.0, 0.3, vec![0.4, 0.6, 0.5]),
                rot(0.1, 0.57, vec![0.5, 0.5, 0.5]),
            ],
        ),
        scenario("affine-1d", cube(&sp(1), 1), vec![affine(vec![vec![0.3]], vec![0.2])]),
        scenario(
            "affine-2",
            cube(&sp(2), 2),
            vec![
                affine(vec![vec![0.2, 0.3], vec![-0.1, 0.4]], vec![0.3, 0.4]),
                affine(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![0.25, 0.25]),
            ],
        ),
        scenario(
            "affine-cube-3",
            cube(&sp(3), 3),
            vec![
                affine(vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.5]], vec![0.1, 0.2, 0.3]),
                affine(vec![vec![0.0, 0.9, 0.0], vec![0.0, 0.0, 0.9], vec![0.9, 0.0, 0.0]], vec![0.05, 0.05, 0.05]),
                affine(vec![vec![0.3, 0.3, 0.3], vec![0.1, 0.2, 0.3], vec![0.0, 0.0, 0.2]], vec![0.0, 0.2, 0.7]),
            ],
        ),
        scenario(
            "constant-2",
            cube(&sp(2), 2),
            vec![konst(vec![0.3, 0.8]), konst(vec![1.0, 0.0])],
        ),
        scenario(
            "constant-cube-4",
            cube(&sp(4), 3),
            vec![
                konst(vec![0.1, 0.2, 0.3]),
                konst(vec![0.5, 0.5, 0.5]),
                konst(vec![1.0, 1.0, 0.0]),
                konst(vec![0.9, 0.01, 0.7]),
            ],
        ),
        scenario(
            "mixed-3",
            cube(&sp(3), 2),
            vec![
                rot(0.9, 0.6, vec![0.5, 0.5]),
                affine(vec![vec![0.1, -0.2], vec![0.3, 0.1]], vec![0.5, 0.3]),
                konst(vec![0.25, 0.75]),
            ],
        ),
        scenario(
            "triangle-2",
            triangle(&sp(2)),
            vec![
                rot(1.3, 0.35, vec![r, r]),
                affine(vec![vec![0.5, 0.0], vec![0.0, 0.5]], vec![0.1, 0.1]),
            ],
        ),
        scenario(
            "balls-4",
            balls.clone(),
            (0..4)
                .map(|a| {
                    let c = match &balls {
                        SetSpec::EpsilonBall(b) => b.center().at(a).to_vec(),
                        _ => unreachable!(),
                    };
                    rot(0.7 * a as f64 - 1.0, 0.8, c)
                })
                .collect(),
        ),
    ]
}

/// Contraction scenarios `S(x) = alpha x` with a shift, on 1 to 4 atoms.
fn contraction_suite() -> Vec<(Vec<f64>, Vec<Vec<f64>>)> {
    vec![
        (vec![0.5, 0.9], vec![vec![1.0], vec![1.0]]),
        (vec![0.0, 0.3, 0.75], vec![vec![1.0, -2.0], vec![0.5, 0.5], vec![-3.0, 4.0]]),
        (
            vec![0.1, 0.5, 0.8, 0.95],
            vec![vec![1.0, 0.0, -1.0], vec![2.0, 2.0, 2.0], vec![0.1, -0.2, 0.3], vec![-1.0, 0.5, 0.25]],
        ),
        (vec![0.99], vec![vec![0.01, -0.01]]),
    ]
}

fn contraction_problem(s: &FiniteProbSpace, alpha: &[f64], shift: &[Vec<f64>], tol: f64) -> Problem {
    let d = shift[0].len();
    let bound = 1e4;
    let g = SetSpec::AtomwisePolytope(
        AtomwisePolytope::uniform(s, vec![vec![-bound; d], vec![bound; d]]).unwrap(),
    );
    let maps = alpha
        .iter()
        .map(|&a| {
            let rows = (0..d).map(|i| (0..d).map(|j| if i == j { a } else { 0.0 }).collect()).collect();
            builtin::affine(rows, vec![0.0; d])
        })
        .collect();
    Problem::Contraction {
        spec: ContractionSpec::new(
            StableMapping::new(g, maps).unwrap(),
            RandomScalar::new(s, alpha.to_vec()).unwrap(),
        )
        .unwrap(),
        shift: RandomPoint::new(s, shift).unwrap(),
        x0: RandomPoint::zero(s, d),
        tol: RandomScalar::constant(s, tol),
        max_iter: 1_000_000,
    }
}

fn c1_projection_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for i in 0..1000 {
        let s = rand_space(&mut rng, 5);
        let d = rng.random_range(1..=4);
        let count = rng.random_range(1..=6);
        let gens: Vec<RandomPoint> = (0..count).map(|_| rand_point(&mut rng, &s, d, -2.0, 2.0)).collect();
        let eps = rand_scalar(&mut rng, &s, 0.01, 2.0);
        let x = point_in_enlargement(&mut rng, &gens, &eps);
        let spec = ProjectionSpec::new(gens, eps.clone()).unwrap();
        let p = schauder_projection(&spec, &x).map_err(|e| format!("triple {i}: {e}"))?;
        for a in 0..s.len() {
            let gap = dist(x.at(a), p.at(a));
            ensure(gap < eps.at(a), || format!("triple {i} atom {a}: |x - P(x)| = {gap:e} >= eps"))?;
            worst = worst.min(eps.at(a) - gap);
        }
    }
    Ok(format!("1000 triples, smallest margin {worst:.3e}"))
}

fn c2_projection_sigma_stability() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let s = rand_space(&mut rng, 6);
        let d = rng.random_range(1..=4);
        let count = rng.random_range(1..=5);
        let gens: Vec<RandomPoint> = (0..count).map(|_| rand_point(&mut rng, &s, d, -2.0, 2.0)).collect();
        let eps = rand_scalar(&mut rng, &s, 0.05, 2.0);
        let part = rand_partition(&mut rng, &s, 4);
        let pieces: Vec<RandomPoint> = (0..part.piece_count())
            .map(|_| point_in_enlargement(&mut rng, &gens, &eps))
            .collect();
        let spec = ProjectionSpec::new(gens, eps).unwrap();
        let lhs = schauder_projection(&spec, &glue_points(&part, &pieces).unwrap()).map_err(|e| e.to_string())?;
        let projected: Vec<RandomPoint> = pieces.iter().map(|p| schauder_projection(&spec, p).unwrap()).collect();
        let rhs = glue_points(&part, &projected).unwrap();
        for a in 0..s.len() {
            let gap = dist(lhs.at(a), rhs.at(a));
            worst = worst.max(gap);
            ensure(gap <= 1e-14, || format!("partition {i} atom {a}: gap {gap:e}"))?;
        }
    }
    Ok(format!("500 partitions, largest gap {worst:e}"))
}

fn c3_net_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut points = 0usize;
    let mut worst = f64::INFINITY;
    for i in 0..200 {
        let s = rand_space(&mut rng, 4);
        let d = rng.random_range(1..=3);
        let count = rng.random_range(1..=6);
        let gens: Vec<RandomPoint> = (0..count).map(|_| rand_point(&mut rng, &s, d, -2.0, 2.0)).collect();
        let g = SetSpec::sigma_hull(gens).unwrap();
        let eps = rand_scalar(&mut rng, &s, 0.05, 2.0);
        let cert = build_net(&g, &eps).map_err(|e| format!("set {i}: {e}"))?;
        points += cert.finite_sets.iter().map(Vec::len).sum::<usize>();
        let rep = verify_net(&g, &cert, 10_000, i).unwrap();
        ensure(rep.passed(), || format!("set {i}: {} violations", rep.violations))?;
        worst = worst.min(rep.worst_margin);
    }
    Ok(format!("200 sets, {points} net points, smallest margin {worst:.3e}"))
}

fn c4_approximate_fixed_point() -> Check {
    let mut solves = 0;
    let mut worst: f64 = 0.0;
    for sc in suite() {
        for eps in [1e-2, 1e-4, 1e-6] {
            let e = RandomScalar::constant(sc.g.space(), eps);
            let rep = solve_schauder_approx(&sc.t, &sc.g, &e).map_err(|err| format!("{} at {eps:e}: {err}", sc.name))?;
            let res = sc.t.residual(&rep.point).unwrap();
            ensure(res.values().iter().all(|&r| r < eps), || {
                format!("{} at {eps:e}: residual {:e}", sc.name, res.max_value())
            })?;
            worst = worst.max(res.max_value() / eps);
            solves += 1;
        }
    }
    Ok(format!("{solves} solves over 12 scenarios, largest residual/eps {worst:.3e}"))
}

fn c5_oracle_equivalence() -> Check {
    for sc in suite() {
        let problem = Problem::Schauder {
            schedule: geometric_schedule(sc.g.space(), 1e-2, 1e-2, 3),
            t: sc.t,
            g: sc.g,
            tol: 1e-6,
            opts: SchauderOptions::default(),
        };
        let c = compare_with_oracle(&problem).map_err(|e| format!("{}: {e}", sc.name))?;
        ensure(c.residual_bound_matches(), || {
            format!(
                "{}: residuals {:e} / {:e} against bound {:e}",
                sc.name,
                c.direct.max_residual(),
                c.oracle.max_residual(),
                c.bound.min_value()
            )
        })?;
    }
    let tol = 1e-10;
    let mut worst_gap: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for (alpha, shift) in contraction_suite() {
        let s = FiniteProbSpace::uniform(alpha.len()).unwrap();
        let c = compare_with_oracle(&contraction_problem(&s, &alpha, &shift, tol)).map_err(|e| e.to_string())?;
        ensure(c.agrees(10.0 * tol), || format!("alpha {alpha:?}: point gap {:e}", c.max_point_gap()))?;
        worst_gap = worst_gap.max(c.max_point_gap());
        for (a, (&al, sh)) in alpha.iter().zip(&shift).enumerate() {
            let exact: Vec<f64> = sh.iter().map(|v| v / (1.0 - al)).collect();
            for x in [c.direct.point.at(a), c.oracle.point.at(a)] {
                let gap = dist(x, &exact);
                worst_closed = worst_closed.max(gap);
                ensure(gap <= 1e-8, || format!("alpha {alpha:?} atom {a}: closed-form gap {gap:e}"))?;
            }
        }
    }
    Ok(format!(
        "12 Schauder + 4 contraction scenarios, point gap {worst_gap:e}, closed-form gap {worst_closed:e}"
    ))
}

/// `S(x) = a x`, `T = (1 - a) f` with `f` a self-map of the unit cube.
fn krasnoselskii_scenario(
    s: &FiniteProbSpace,
    alpha: &[f64],
    fs: Vec<AtomMap>,
    d: usize,
) -> (ContractionSpec, StableMapping, SetSpec) {
    let g = cube(s, d);
    let smaps = alpha
        .iter()
        .map(|&a| {
            let rows = (0..d).map(|i| (0..d).map(|j| if i == j { a } else { 0.0 }).collect()).collect();
            builtin::affine(rows, vec![0.0; d])
        })
        .collect();
    let tmaps = alpha
        .iter()
        .zip(fs)
        .map(|(&a, f)| Arc::new(move |y: &[f64]| f(y).iter().map(|v| (1.0 - a) * v).collect()) as AtomMap)
        .collect();
    (
        ContractionSpec::new(StableMapping::new(g.clone(), smaps).unwrap(), RandomScalar::new(s, alpha.to_vec()).unwrap())
            .unwrap(),
        StableMapping::new(g.clone(), tmaps).unwrap(),
        g,
    )
}

fn c6_krasnoselskii() -> Check {
    let rot = builtin::damped_rotation;
    let poly = builtin::polynomial;
    let cases: Vec<(Vec<f64>, Vec<AtomMap>, usize)> = vec![
        (vec![0.5], vec![poly(vec![0.1, 0.0, 0.5])], 1),
        (vec![0.9, 0.2], vec![poly(vec![0.0, 0.0, 1.0]), poly(vec![1.0, -1.0])], 1),
        (vec![0.3, 0.6], vec![rot(0.5, 0.6, vec![0.5, 0.5]), rot(-1.0, 0.5, vec![0.5, 0.5])], 2),
        (
            vec![0.0, 0.45, 0.9],
            vec![
                rot(2.0, 0.7, vec![0.5, 0.5]),
                builtin::constant(vec![0.2, 0.9]),
                builtin::affine(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0, 0.0]),
            ],
            2,
        ),
        (
            vec![0.1, 0.8],
            vec![rot(0.3, 0.5, vec![0.5, 0.5, 0.5]), poly(vec![0.2, 0.3, 0.4])],
            3,
        ),
        (vec![0.75; 4], (0..4).map(|a| rot(a as f64, 0.6, vec![0.5, 0.5])).collect(), 2),
    ];
    let mut worst: f64 = 0.0;
    for (i, (alpha, fs, d)) in cases.into_iter().enumerate() {
        let sp = FiniteProbSpace::uniform(alpha.len()).unwrap();
        let (s, t, g) = krasnoselskii_scenario(&sp, &alpha, fs, d);
        let problem = Problem::Krasnoselskii {
            schedule: geometric_schedule(g.space(), 1e-2, 0.1, 7),
            s: s.clone(),
            t: t.clone(),
            g,
            tol: 1e-6,
            opts: KrasnoselskiiOptions::default(),
        };
        let rep = problem.solve().map_err(|e| format!("scenario {i}: {e}"))?;
        let eps = problem.certified_bound(&rep).unwrap();
        let image = s.map().apply(&rep.point).unwrap().add(&t.apply(&rep.point).unwrap()).unwrap();
        for a in 0..alpha.len() {
            let r = dist(image.at(a), rep.point.at(a));
            worst = worst.max(r);
            ensure(r < eps.at(a), || format!("scenario {i} atom {a}: residual {r:e} against eps {:e}", eps.at(a)))?;
        }
    }

    // Degenerate cases.
    let sp = FiniteProbSpace::uniform(2).unwrap();
    let g = SetSpec::AtomwisePolytope(AtomwisePolytope::uniform(&sp, vec![vec![0.0], vec![1.0]]).unwrap());
    let sched = geometric_schedule(&sp, 0.1, 0.1, 6);
    let tol = 1e-7;
    let sm = ContractionSpec::new(
        StableMapping::new(
            g.clone(),
            vec![builtin::affine(vec![vec![0.5]], vec![0.3]), builtin::affine(vec![vec![-0.9]], vec![0.9])],
        )
        .unwrap(),
        RandomScalar::new(&sp, vec![0.5, 0.9]).unwrap(),
    )
    .unwrap();
    let theta = RandomPoint::zero(&sp, 1);
    let zero_t = StableMapping::uniform(g.clone(), builtin::constant(vec![0.0]));
    let k = solve_krasnoselskii(&sm, &zero_t, &g, &sched, tol).map_err(|e| e.to_string())?;
    let c = solve_contraction(
        &sm,
        &theta,
        &theta,
        &RandomScalar::constant(&sp, inner_tolerance(&sched)),
        KrasnoselskiiOptions::default().inner_max_iter,
    )
    .map_err(|e| e.to_string())?;
    ensure(k.point == c.point, || format!("T = 0: {:?} vs {:?}", k.point, c.point))?;

    let zero_s = ContractionSpec::new(StableMapping::uniform(g.clone(), builtin::constant(vec![0.0])), RandomScalar::zero(&sp))
        .unwrap();
    let t = StableMapping::uniform(g.clone(), builtin::polynomial(vec![0.1, 0.0, 0.5]));
    let k = solve_krasnoselskii(&zero_s, &t, &g, &sched, tol).map_err(|e| e.to_string())?;
    let direct = solve_schauder(&t, &g, &sched, tol).map_err(|e| e.to_string())?;
    ensure(k.point == direct.point, || format!("S = 0: {:?} vs {:?}", k.point, direct.point))?;
    Ok(format!("6 scenarios, largest residual {worst:e}; degenerate cases exact"))
}

fn c7_random_operator() -> Check {
    let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let tol = 1e-8;
    let maps = [
        builtin::damped_rotation(0.8, 0.4, vec![0.4, 0.6]),
        builtin::polynomial(vec![0.0, 0.0, 1.0]),
        builtin::affine(vec![vec![0.0, -0.5], vec![0.5, 0.0]], vec![0.75, 0.25]),
    ];
    for (m, f) in maps.iter().enumerate() {
        let s = FiniteProbSpace::uniform(3).unwrap();
        let sched = geometric_schedule(&s, 0.1, 0.1, 8);
        let rep = solve_random_operator(&s, vec![f.clone(); 3], sq.clone(), &sched, tol).map_err(|e| format!("map {m}: {e}"))?;
        for a in 0..3 {
            for b in 0..3 {
                // T(w_b, .) = T(w_a, .), so p(w_a) must be certified for every b.
                let p = rep.point.at(a);
                let r = dist(&f(p), p);
                ensure(r <= tol, || format!("map {m}: p(atom {a}) has residual {r:e} under atom {b}"))?;
            }
        }
        let one = FiniteProbSpace::uniform(1).unwrap();
        let r1 = solve_random_operator(&one, vec![f.clone()], sq.clone(), &geometric_schedule(&one, 0.1, 0.1, 8), tol)
            .map_err(|e| format!("map {m}, one atom: {e}"))?;
        let classical = solve_brouwer_atom(&**f, &sq, tol, DEFAULT_BROUWER_ITER).map_err(|e| e.to_string())?;
        ensure(r1.point.at(0) == classical.as_slice(), || {
            format!("map {m}: one-atom answer {:?} differs from classical {:?}", r1.point.at(0), classical)
        })?;
    }
    Ok("3 operator families, common fixed points certified, one-atom answers bit-identical".into())
}

fn c8_subsequence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut extracted = 0;
    for i in 0..100 {
        let s = rand_space(&mut rng, 5);
        let d = rng.random_range(1..=3);
        let x0 = rand_point(&mut rng, &s, d, -1.0, 1.0);
        let decay: Vec<f64> = (0..s.len()).map(|_| rng.random_range(0.3..0.95)).collect();
        let amp: Vec<f64> = (0..s.len()).map(|_| rng.random_range(0.1..5.0)).collect();
        let dirs: Vec<Vec<f64>> = (0..s.len()).map(|_| rand_vec(&mut rng, d, -1.0, 1.0)).collect();
        // |x_n - x0| = amp * decay^n * |sin(n)| |dir|: decays but not monotonically.
        let seq: Vec<RandomPoint> = (1..=600)
            .map(|n| {
                RandomPoint::from_fn(&s, d, |a| {
                    let r = amp[a] * decay[a].powi(n) * (n as f64).sin();
                    x0.at(a).iter().zip(&dirs[a]).map(|(x, u)| x + r * u).collect()
                })
            })
            .collect();
        let count = rng.random_range(1..=10);
        let rates: Vec<RandomScalar> = (1..=count)
            .map(|k| RandomScalar::new(&s, (0..s.len()).map(|a| 0.5f64.powi(k) * (1.0 + a as f64)).collect()).unwrap())
            .collect();
        let idx = extract_random_subsequence(&seq, &x0, &rates).map_err(|e| format!("sequence {i}: {e}"))?;
        for a in 0..s.len() {
            for k in 0..count as usize {
                let n = idx[k].at(a);
                ensure(k == 0 || n > idx[k - 1].at(a), || format!("sequence {i} atom {a}: not increasing at {k}"))?;
                let gap = dist(seq[n - 1].at(a), x0.at(a));
                ensure(gap < rates[k].at(a), || format!("sequence {i} atom {a}: rate {k} missed by {gap:e}"))?;
            }
        }
        extracted += count as usize;
    }
    Ok(format!("100 sequences, {extracted} random indices"))
}

fn c9_separation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut strict = 0;
    let mut atoms = 0;
    for i in 0..300 {
        let s = rand_space(&mut rng, 5);
        let d = rng.random_range(1..=4);
        let nv = rng.random_range(1..=6);
        let verts: Vec<Vec<Vec<f64>>> = (0..s.len())
            .map(|_| (0..nv).map(|_| rand_vec(&mut rng, d, -1.0, 1.0)).collect())
            .collect();
        let h = AtomwisePolytope::new(&s, verts).unwrap();
        // Inside at some atoms (a convex combination of vertices), outside at others.
        let x = RandomPoint::from_fn(&s, d, |a| {
            if rng.random_bool(0.5) {
                let w: Vec<f64> = (0..nv).map(|_| rng.random::<f64>()).collect();
                let total: f64 = w.iter().sum();
                (0..d)
                    .map(|c| h.vertices(a).iter().zip(&w).map(|(v, wi)| v[c] * wi / total).sum())
                    .collect()
            } else {
                rand_vec(&mut rng, d, -3.0, 3.0)
            }
        });
        let r = separate(&x, &h).map_err(|e| e.to_string())?;
        for a in 0..s.len() {
            let oracle = nearest_point(h.vertices(a), x.at(a)).distance;
            ensure(r.strict_event.contains(a) == (oracle > 1e-9), || {
                format!("pair {i} atom {a}: strict_event disagrees with distance {oracle:e}")
            })?;
            let (fx, sup) = (r.value_at_x.at(a), r.sup_over_g.at(a));
            if r.strict_event.contains(a) {
                ensure(fx > sup, || format!("pair {i} atom {a}: f(x) = {fx} <= sup {sup}"))?;
                strict += 1;
            } else {
                ensure((fx - sup).abs() <= 1e-9, || format!("pair {i} atom {a}: |f(x) - sup| = {:e}", (fx - sup).abs()))?;
            }
            atoms += 1;
        }
    }
    Ok(format!("300 pairs, {strict} of {atoms} atoms strictly separated"))
}

fn c10_gluing_equivariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    for i in 0..100 {
        let s = rand_space(&mut rng, 4);
        let n = s.len();
        let part = rand_partition(&mut rng, &s, 3);
        let k = part.piece_count();
        let g = cube(&s, 2);
        let on_piece = |j: usize, maps: &[AtomMap], rest: AtomMap| -> Vec<AtomMap> {
            (0..n).map(|a| if part.label(a) == j { maps[a].clone() } else { rest.clone() }).collect()
        };
        let ctx = |what: &str, e: rnmod::Error| format!("partition {i}, {what}: {e}");

        // build_net: per-piece sets glued, per-piece certificates glued.
        let eps = rand_scalar(&mut rng, &s, 0.1, 1.0);
        let sets: Vec<SetSpec> = (0..k)
            .map(|_| SetSpec::sigma_hull((0..3).map(|_| rand_point(&mut rng, &s, 2, -1.0, 1.0)).collect()).unwrap())
            .collect();
        let glued_set = SetSpec::glue(&part, &sets).unwrap();
        let certs: Vec<NetCertificate> = sets.iter().map(|g| build_net(g, &eps).unwrap()).collect();
        let cert = NetCertificate::glue(&part, &certs).map_err(|e| ctx("net glue", e))?;
        let rep = verify_net(&glued_set, &cert, 2000, i).unwrap();
        ensure(rep.passed(), || format!("partition {i}: glued net has {} violations", rep.violations))?;

        // solve_contraction: exact identity.
        let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.9)).collect();
        let shift: Vec<Vec<f64>> = (0..n).map(|_| rand_vec(&mut rng, 2, -1.0, 1.0)).collect();
        let Problem::Contraction { spec, shift, x0, tol, max_iter } = contraction_problem(&s, &alpha, &shift, 1e-10) else {
            unreachable!()
        };
        let direct = solve_contraction(&spec, &shift, &x0, &tol, max_iter).map_err(|e| ctx("contraction", e))?;
        let pieces: Vec<RandomPoint> = (0..k)
            .map(|_| solve_contraction(&spec, &shift, &x0, &tol, max_iter).map(|r| r.point))
            .collect::<Result<_, _>>()
            .map_err(|e| ctx("contraction piece", e))?;
        ensure(glue_points(&part, &pieces).unwrap() == direct.point, || {
            format!("partition {i}: contraction gluing is not exact")
        })?;

        // Schauder-type solvers: residual bound.
        let maps: Vec<AtomMap> = (0..n).map(|_| rand_rotation(&mut rng)).collect();
        let t = StableMapping::new(g.clone(), maps.clone()).unwrap();
        let e = RandomScalar::constant(&s, 1e-4);
        let direct = solve_schauder_approx(&t, &g, &e).map_err(|err| ctx("schauder", err))?;
        let pieces: Vec<RandomPoint> = (0..k)
            .map(|j| {
                let tj = StableMapping::new(g.clone(), on_piece(j, &maps, builtin::identity())).unwrap();
                solve_schauder_approx(&tj, &g, &e).map(|r| r.point)
            })
            .collect::<Result<_, _>>()
            .map_err(|err| ctx("schauder piece", err))?;
        let glued = glue_points(&part, &pieces).unwrap();
        let res = t.residual(&glued).unwrap();
        ensure(
            (0..n).all(|a| res.at(a) < 1e-4 && direct.residual.at(a) < 1e-4),
            || format!("partition {i}: Schauder glued residual {:e}", res.max_value()),
        )?;

        let sched = geometric_schedule(&s, 1e-2, 1e-2, 2);
        let direct = solve_schauder(&t, &g, &sched, 1e-4).map_err(|err| ctx("schauder schedule", err))?;
        let pieces: Vec<RandomPoint> = (0..k)
            .map(|j| {
                let tj = StableMapping::new(g.clone(), on_piece(j, &maps, builtin::identity())).unwrap();
                solve_schauder(&tj, &g, &sched, 1e-4).map(|r| r.point)
            })
            .collect::<Result<_, _>>()
            .map_err(|err| ctx("schauder schedule piece", err))?;
        let res = t.residual(&glue_points(&part, &pieces).unwrap()).unwrap();
        ensure(
            (0..n).all(|a| res.at(a) <= 1e-4 && direct.residual.at(a) <= 1e-4),
            || format!("partition {i}: scheduled Schauder glued residual {:e}", res.max_value()),
        )?;

        // Krasnoselskii.
        let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.9)).collect();
        let (ks, kt, kg) = krasnoselskii_scenario(&s, &alpha, maps.clone(), 2);
        let ksched = geometric_schedule(&s, 1e-2, 1e-2, 3);
        let kproblem = |t: StableMapping| Problem::Krasnoselskii {
            s: ks.clone(),
            t,
            g: kg.clone(),
            schedule: ksched.clone(),
            tol: 1e-6,
            opts: KrasnoselskiiOptions::default(),
        };
        let direct_problem = kproblem(kt.clone());
        let direct = direct_problem.solve().map_err(|err| ctx("krasnoselskii", err))?;
        let direct_bound = direct_problem.certified_bound(&direct).unwrap();
        let mut pieces = Vec::with_capacity(k);
        let mut bounds = Vec::with_capacity(k);
        for j in 0..k {
            let pj = kproblem(StableMapping::new(kg.clone(), on_piece(j, kt.maps(), builtin::constant(vec![0.0, 0.0]))).unwrap());
            let r = pj.solve().map_err(|err| ctx("krasnoselskii piece", err))?;
            bounds.push(pj.certified_bound(&r).unwrap());
            pieces.push(r.point);
        }
        let x = glue_points(&part, &pieces).unwrap();
        let image = ks.map().apply(&x).unwrap().add(&kt.apply(&x).unwrap()).unwrap();
        ensure(
            (0..n).all(|a| {
                dist(image.at(a), x.at(a)) < bounds[part.label(a)].at(a) && direct.residual.at(a) < direct_bound.at(a)
            }),
            || format!("partition {i}: Krasnoselskii glued residual above its bound"),
        )?;

        // Random operator.
        let sched = geometric_schedule(&s, 1e-2, 1e-3, 3);
        let direct = solve_random_operator(&s, maps.clone(), sq.clone(), &sched, 1e-8).map_err(|err| ctx("random operator", err))?;
        let pieces: Vec<RandomPoint> = (0..k)
            .map(|j| solve_random_operator(&s, on_piece(j, &maps, builtin::identity()), sq.clone(), &sched, 1e-8).map(|r| r.point))
            .collect::<Result<_, _>>()
            .map_err(|err| ctx("random operator piece", err))?;
        let res = t.residual(&glue_points(&part, &pieces).unwrap()).unwrap();
        ensure(
            (0..n).all(|a| res.at(a) <= 1e-8 && direct.residual.at(a) <= 1e-8),
            || format!("partition {i}: random operator glued residual {:e}", res.max_value()),
        )?;
    }
    Ok("100 partitions, 6 constructions each".into())
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, fn() -> Check)> = vec![
        ("Schauder projection bound", 5, c1_projection_bound),
        ("projection sigma-stability", 5, c2_projection_sigma_stability),
        ("net round-trip", 60, c3_net_round_trip),
        ("approximate fixed point", 30, c4_approximate_fixed_point),
        ("oracle equivalence", 30, c5_oracle_equivalence),
        ("Krasnoselskii composite", 30, c6_krasnoselskii),
        ("random-operator lift", 10, c7_random_operator),
        ("random subsequence rates", 5, c8_subsequence),
        ("separation", 10, c9_separation),
        ("gluing equivariance", 60, c10_gluing_equivariance),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let limit = Duration::from_secs(limit);
        let (ok, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} ({:.2}s / {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
