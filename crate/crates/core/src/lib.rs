//! Random normed modules over finite probability spaces.
//!
//! Every object lives on a [`FiniteProbSpace`]: random scalars and random
//! points are indexed by atoms, sigma-stable sets are given by per-atom
//! sections, and sigma-stable mappings by per-atom maps. On top of that sit
//! random epsilon-nets, the Schauder projection with random weights, and the
//! fixed-point solvers, each of which can be checked against the per-atom
//! classical computation in [`oracle`].

pub mod compactness;
pub mod error;
pub mod geometry;
pub mod hull;
pub mod oracle;
pub mod par;
pub mod prob_space;
pub mod rn_module;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use oracle::{compare_with_oracle, solve_per_atom, OracleComparison, Problem};
pub use par::Execution;
pub use prob_space::{common_refinement, essential_sup_events, Event, FiniteProbSpace, MeasurablePartition};
pub use rn_module::{PointNorm, RandomBall, RandomPoint};
pub use scalar::{RandomScalar, Relation};
