//! Fixed-point solvers for sigma-stable mappings.

mod brouwer;
mod contraction;
mod krasnoselskii;
mod mapping;
mod random_operator;
mod report;
mod schauder;

pub use brouwer::solve_brouwer_atom;
pub use contraction::{solve_contraction, ContractionSpec, LipschitzReport};
pub use mapping::{builtin, check_sigma_stability, AtomMap, StabilityReport, StabilityWitness, StableMapping, WholeMap};
pub use report::{FixedPointReport, Stage};
pub use schauder::{
    geometric_schedule, harmonic_schedule, solve_schauder, solve_schauder_approx, solve_schauder_approx_with,
    solve_schauder_with, SchauderOptions,
};
pub use krasnoselskii::{inner_tolerance, inverse_composite, solve_krasnoselskii, solve_krasnoselskii_with, KrasnoselskiiOptions};
pub use random_operator::{solve_random_operator, solve_random_operator_with, DEFAULT_BROUWER_ITER};
