use crate::compactness::NetCertificate;
use crate::rn_module::RandomPoint;
use crate::scalar::RandomScalar;

/// Work done by one stage of a solver, per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: String,
    pub epsilon: Option<RandomScalar>,
    pub iterations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub point: RandomPoint,
    /// `|T(x) - x|` re-evaluated at `point`.
    pub residual: RandomScalar,
    pub stages: Vec<Stage>,
    pub certificate: Option<NetCertificate>,
    /// Distance to the per-atom oracle's answer, once compared.
    pub oracle_gap: Option<RandomScalar>,
}

impl FixedPointReport {
    pub fn max_residual(&self) -> f64 {
        self.residual.max_value()
    }

    pub fn total_iterations(&self) -> usize {
        self.stages.iter().flat_map(|s| &s.iterations).sum()
    }
}
