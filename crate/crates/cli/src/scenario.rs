//! Scenario files: the JSON schema and its translation into kernel objects.

use std::path::Path;

use rnmod::compactness::{AtomwisePolytope, SetSpec};
use rnmod::solvers::{
    builtin, geometric_schedule, harmonic_schedule, AtomMap, ContractionSpec, KrasnoselskiiOptions, SchauderOptions,
    StableMapping,
};
use rnmod::{FiniteProbSpace, Problem, RandomBall, RandomPoint, RandomScalar};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    /// Atom weights, in atom order.
    pub space: Vec<f64>,
    pub dimension: usize,
    pub set: SetJson,
    pub solver: SolverJson,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub schedule: ScheduleJson,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetJson {
    /// `[0, 1]^d` at every atom.
    UnitCube,
    /// The same vertex list at every atom.
    Polytope { vertices: Vec<Vec<f64>> },
    /// One vertex list per atom.
    AtomwisePolytope { vertices: Vec<Vec<Vec<f64>>> },
    /// Generators, each given by its per-atom coordinates.
    SigmaHull { generators: Vec<Vec<Vec<f64>>> },
    Ball { center: Vec<Vec<f64>>, radius: Vec<f64> },
}

/// A builtin per-atom map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapJson {
    Identity,
    Constant { value: Vec<f64> },
    /// `x -> A x + b`, `A` by rows.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// `x -> c + s R (x - c)`, `R` rotating the first two coordinates.
    DampedRotation { angle: f64, scale: f64, center: Vec<f64> },
    /// The same polynomial `sum_k c_k t^k` in every coordinate.
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverJson {
    /// `x = S(x) + shift` with `|S(x) - S(y)| <= alpha |x - y|`.
    Contraction {
        maps: Vec<MapJson>,
        alpha: Vec<f64>,
        shift: Vec<Vec<f64>>,
        #[serde(default)]
        x0: Option<Vec<Vec<f64>>>,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
    },
    Schauder { maps: Vec<MapJson> },
    /// `x = S(x) + T(x)`, `S` a contraction with modulus `alpha`.
    Krasnoselskii { s_maps: Vec<MapJson>, alpha: Vec<f64>, t_maps: Vec<MapJson> },
    /// A random operator on a fixed polytope, lifted to the module.
    RandomOperator { maps: Vec<MapJson> },
}

fn default_max_iter() -> usize {
    100_000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleJson {
    /// `1/k` for `k = 1..=count`.
    Harmonic { count: usize },
    Geometric { start: f64, ratio: f64, count: usize },
    /// Explicit per-atom values, one list per stage.
    Explicit { values: Vec<Vec<f64>> },
}

impl Default for ScheduleJson {
    fn default() -> Self {
        ScheduleJson::Harmonic { count: 20 }
    }
}

impl SolverJson {
    pub fn name(&self) -> &'static str {
        match self {
            SolverJson::Contraction { .. } => "contraction",
            SolverJson::Schauder { .. } => "schauder",
            SolverJson::Krasnoselskii { .. } => "krasnoselskii",
            SolverJson::RandomOperator { .. } => "random_operator",
        }
    }
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let sc: Scenario = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("scenario: {e}")))?;
    if sc.schema_version != SCHEMA_VERSION {
        return Err(CliError::Invalid(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            sc.schema_version
        )));
    }
    if sc.dimension == 0 {
        return Err(CliError::Invalid("dimension must be at least 1".into()));
    }
    if !(sc.tol.is_finite() && sc.tol > 0.0) {
        return Err(CliError::Invalid("tol must be positive".into()));
    }
    Ok(sc)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn check_vec(what: &str, v: &[f64], d: usize) -> Result<(), CliError> {
    if v.len() != d {
        return Err(invalid(format!("{what}: expected {d} coordinates, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!("{what}: non-finite coordinate")));
    }
    Ok(())
}

fn check_atoms<T>(what: &str, v: &[T], n: usize) -> Result<(), CliError> {
    if v.len() != n {
        return Err(invalid(format!("{what}: expected {n} atom entries, got {}", v.len())));
    }
    Ok(())
}

impl MapJson {
    fn build(&self, d: usize, what: &str) -> Result<AtomMap, CliError> {
        Ok(match self {
            MapJson::Identity => builtin::identity(),
            MapJson::Constant { value } => {
                check_vec(what, value, d)?;
                builtin::constant(value.clone())
            }
            MapJson::Affine { matrix, offset } => {
                check_atoms(&format!("{what} matrix rows"), matrix, d)?;
                for row in matrix {
                    check_vec(&format!("{what} matrix"), row, d)?;
                }
                check_vec(&format!("{what} offset"), offset, d)?;
                builtin::affine(matrix.clone(), offset.clone())
            }
            MapJson::DampedRotation { angle, scale, center } => {
                if !angle.is_finite() || !(scale.is_finite() && *scale >= 0.0) {
                    return Err(invalid(format!("{what}: angle must be finite and scale nonnegative")));
                }
                check_vec(&format!("{what} center"), center, d)?;
                builtin::damped_rotation(*angle, *scale, center.clone())
            }
            MapJson::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(invalid(format!("{what}: coefficients must be finite and nonempty")));
                }
                builtin::polynomial(coeffs.clone())
            }
        })
    }
}

impl Scenario {
    pub fn space(&self) -> Result<FiniteProbSpace, CliError> {
        FiniteProbSpace::new(&self.space).map_err(|e| invalid(format!("space: {e}")))
    }

    pub fn build_set(&self, space: &FiniteProbSpace) -> Result<SetSpec, CliError> {
        let (n, d) = (space.len(), self.dimension);
        let kernel = |e: rnmod::Error| invalid(format!("set: {e}"));
        let point = |coords: &[Vec<f64>], what: &str| -> Result<RandomPoint, CliError> {
            check_atoms(what, coords, n)?;
            for c in coords {
                check_vec(what, c, d)?;
            }
            RandomPoint::new(space, coords).map_err(kernel)
        };
        let polytope = |verts: &[Vec<f64>], what: &str| -> Result<(), CliError> {
            if verts.is_empty() {
                return Err(invalid(format!("{what}: no vertices")));
            }
            verts.iter().try_for_each(|v| check_vec(what, v, d))
        };
        Ok(match &self.set {
            SetJson::UnitCube => SetSpec::AtomwisePolytope(AtomwisePolytope::unit_cube(space, d)),
            SetJson::Polytope { vertices } => {
                polytope(vertices, "set vertices")?;
                SetSpec::AtomwisePolytope(AtomwisePolytope::uniform(space, vertices.clone()).map_err(kernel)?)
            }
            SetJson::AtomwisePolytope { vertices } => {
                check_atoms("set vertices", vertices, n)?;
                for v in vertices {
                    polytope(v, "set vertices")?;
                }
                SetSpec::AtomwisePolytope(AtomwisePolytope::new(space, vertices.clone()).map_err(kernel)?)
            }
            SetJson::SigmaHull { generators } => {
                let gens = generators
                    .iter()
                    .map(|g| point(g, "set generator"))
                    .collect::<Result<Vec<_>, _>>()?;
                SetSpec::sigma_hull(gens).map_err(kernel)?
            }
            SetJson::Ball { center, radius } => {
                let c = point(center, "ball center")?;
                check_atoms("ball radius", radius, n)?;
                let r = RandomScalar::new(space, radius.clone()).map_err(kernel)?;
                SetSpec::EpsilonBall(RandomBall::new(c, r).map_err(kernel)?)
            }
        })
    }

    pub fn schedule(&self, space: &FiniteProbSpace) -> Result<Vec<RandomScalar>, CliError> {
        let schedule = match &self.schedule {
            ScheduleJson::Harmonic { count } => harmonic_schedule(space, *count),
            ScheduleJson::Geometric { start, ratio, count } => {
                if !(ratio.is_finite() && *ratio > 0.0 && *ratio <= 1.0) {
                    return Err(invalid("schedule ratio must lie in (0, 1]"));
                }
                geometric_schedule(space, *start, *ratio, *count)
            }
            ScheduleJson::Explicit { values } => values
                .iter()
                .map(|v| {
                    check_atoms("schedule stage", v, space.len())?;
                    RandomScalar::new(space, v.clone()).map_err(|e| invalid(format!("schedule: {e}")))
                })
                .collect::<Result<_, _>>()?,
        };
        if schedule.is_empty() {
            return Err(invalid("schedule is empty"));
        }
        if schedule.iter().any(|e| !e.is_strictly_positive()) {
            return Err(invalid("schedule epsilons must be positive at every atom"));
        }
        Ok(schedule)
    }

    fn maps(&self, maps: &[MapJson], what: &str, n: usize) -> Result<Vec<AtomMap>, CliError> {
        check_atoms(what, maps, n)?;
        maps.iter()
            .enumerate()
            .map(|(a, m)| m.build(self.dimension, &format!("{what} at atom {a}")))
            .collect()
    }

    fn alpha(&self, alpha: &[f64], space: &FiniteProbSpace) -> Result<RandomScalar, CliError> {
        check_atoms("alpha", alpha, space.len())?;
        if alpha.iter().any(|a| !(0.0..1.0).contains(a)) {
            return Err(invalid("alpha must lie in [0, 1) at every atom"));
        }
        RandomScalar::new(space, alpha.to_vec()).map_err(|e| invalid(format!("alpha: {e}")))
    }

    /// The kernel problem this scenario describes. `seed` overrides the
    /// scenario's own seed.
    pub fn problem(&self, seed: Option<u64>) -> Result<Problem, CliError> {
        let space = self.space()?;
        let n = space.len();
        let g = self.build_set(&space)?;
        let schedule = self.schedule(&space)?;
        let opts = SchauderOptions {
            seed: seed.unwrap_or(self.seed),
            ..SchauderOptions::default()
        };
        let kernel = |e: rnmod::Error| invalid(e.to_string());
        Ok(match &self.solver {
            SolverJson::Contraction { maps, alpha, shift, x0, max_iter } => {
                let s = StableMapping::new(g.clone(), self.maps(maps, "maps", n)?).map_err(kernel)?;
                let spec = ContractionSpec::new(s, self.alpha(alpha, &space)?).map_err(kernel)?;
                let coords = |c: &[Vec<f64>], what: &str| -> Result<RandomPoint, CliError> {
                    check_atoms(what, c, n)?;
                    c.iter().try_for_each(|v| check_vec(what, v, self.dimension))?;
                    RandomPoint::new(&space, c).map_err(kernel)
                };
                let shift = coords(shift, "shift")?;
                let x0 = match x0 {
                    Some(x) => coords(x, "x0")?,
                    None => RandomPoint::from_fn(&space, self.dimension, |_| vec![0.0; self.dimension]),
                };
                Problem::Contraction {
                    spec,
                    shift,
                    x0,
                    tol: RandomScalar::constant(&space, self.tol),
                    max_iter: *max_iter,
                }
            }
            SolverJson::Schauder { maps } => Problem::Schauder {
                t: StableMapping::new(g.clone(), self.maps(maps, "maps", n)?).map_err(kernel)?,
                g,
                schedule,
                tol: self.tol,
                opts,
            },
            SolverJson::Krasnoselskii { s_maps, alpha, t_maps } => {
                let s = StableMapping::new(g.clone(), self.maps(s_maps, "s_maps", n)?).map_err(kernel)?;
                Problem::Krasnoselskii {
                    s: ContractionSpec::new(s, self.alpha(alpha, &space)?).map_err(kernel)?,
                    t: StableMapping::new(g.clone(), self.maps(t_maps, "t_maps", n)?).map_err(kernel)?,
                    g,
                    schedule,
                    tol: self.tol,
                    opts: KrasnoselskiiOptions {
                        schauder: opts,
                        ..KrasnoselskiiOptions::default()
                    },
                }
            }
            SolverJson::RandomOperator { maps } => {
                let SetJson::Polytope { vertices } = &self.set else {
                    return Err(CliError::Unsupported(
                        "random_operator needs a `polytope` set shared by every atom".into(),
                    ));
                };
                Problem::RandomOperator {
                    op: self.maps(maps, "maps", n)?,
                    space,
                    vertices: vertices.clone(),
                    schedule,
                    tol: self.tol,
                    opts,
                }
            }
        })
    }
}
