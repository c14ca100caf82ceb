//! Report files. Every field except `timing` is a function of the scenario
//! and the seed.

use rnmod::compactness::{NetCertificate, NetReport};
use rnmod::solvers::FixedPointReport;
use rnmod::{Error, RandomScalar};
use serde::Serialize;

use crate::scenario::SCHEMA_VERSION;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    BoundViolated,
    Disagreement,
    NoConvergence,
    Failed,
    NotSelfMap,
    HypothesisViolation,
    Invalid,
    Unsupported,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::BoundViolated | Status::Disagreement | Status::NoConvergence | Status::Failed => 1,
            Status::NotSelfMap | Status::HypothesisViolation | Status::Invalid => 2,
            Status::Unsupported => 3,
        }
    }

    pub fn of_kernel(e: &Error) -> Status {
        match e {
            Error::NoConvergence { .. } => Status::NoConvergence,
            Error::NotSelfMap { .. } => Status::NotSelfMap,
            Error::HypothesisViolation(_) => Status::HypothesisViolation,
            Error::Unsupported(_) => Status::Unsupported,
            Error::CertificateViolation(_) => Status::Failed,
            _ => Status::Invalid,
        }
    }

    pub fn of_cli(e: &CliError) -> Status {
        match e {
            CliError::Invalid(_) => Status::Invalid,
            CliError::Unsupported(_) => Status::Unsupported,
            CliError::Kernel(k) => Status::of_kernel(k),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<&'static str>,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Best residual seen before a solver gave up.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<Solution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSection>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

impl Report {
    pub fn new(command: &'static str, solver: Option<&'static str>, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            solver,
            seed,
            status: Status::Ok,
            error: None,
            best_residual: None,
            solution: None,
            oracle: None,
            net: None,
            timing: Timing { seconds: 0.0 },
        }
    }

    pub fn fail(mut self, e: &CliError) -> Self {
        self.status = Status::of_cli(e);
        self.error = Some(e.to_string());
        if let CliError::Kernel(Error::NoConvergence { residual }) = e {
            self.best_residual = Some(*residual);
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageJson {
    pub name: String,
    pub epsilon: Option<Vec<f64>>,
    pub iterations: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub epsilon: Vec<f64>,
    pub partition: Vec<usize>,
    /// Net size on each piece.
    pub piece_sizes: Vec<usize>,
}

impl CertificateSummary {
    fn of(c: &NetCertificate) -> Self {
        CertificateSummary {
            epsilon: c.epsilon.values().to_vec(),
            partition: c.partition.labels().to_vec(),
            piece_sizes: c.finite_sets.iter().map(Vec::len).collect(),
        }
    }
}

/// A solver answer with its per-atom residuals and certified bound.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub point: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub max_residual: f64,
    pub bound: Vec<f64>,
    /// `residual < bound` at every atom.
    pub bound_holds: bool,
    pub stages: Vec<StageJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<Vec<f64>>,
}

impl Solution {
    pub fn new(r: &FixedPointReport, bound: &RandomScalar) -> Self {
        Solution {
            point: r.point.to_vecs(),
            residual: r.residual.values().to_vec(),
            max_residual: r.max_residual(),
            bound: bound.values().to_vec(),
            bound_holds: r.residual.values().iter().zip(bound.values()).all(|(x, b)| x < b),
            stages: r
                .stages
                .iter()
                .map(|s| StageJson {
                    name: s.name.clone(),
                    epsilon: s.epsilon.as_ref().map(|e| e.values().to_vec()),
                    iterations: s.iterations.clone(),
                })
                .collect(),
            certificate: r.certificate.as_ref().map(CertificateSummary::of),
            oracle_gap: r.oracle_gap.as_ref().map(|g| g.values().to_vec()),
        }
    }
}

/// One of the two pipelines of an oracle comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Pipeline {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<Vec<f64>>>,
}

impl Pipeline {
    pub fn of(r: &Result<FixedPointReport, Error>) -> Self {
        match r {
            Ok(r) => Pipeline {
                status: Status::Ok,
                error: None,
                best_residual: None,
                residual: Some(r.residual.values().to_vec()),
                point: Some(r.point.to_vecs()),
            },
            Err(e) => Pipeline {
                status: Status::of_kernel(e),
                error: Some(e.to_string()),
                best_residual: match e {
                    Error::NoConvergence { residual } => Some(*residual),
                    _ => None,
                },
                residual: None,
                point: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub direct: Pipeline,
    pub per_atom: Pipeline,
    /// Whether the fixed point is unique, so that points are compared.
    pub unique: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_bound_matches: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_gap: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    pub epsilon: Vec<f64>,
    pub partition: Vec<usize>,
    /// Per piece, the net points by atom.
    pub finite_sets: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyJson {
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub worst_atom: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetSection {
    pub set_kind: &'static str,
    pub certificate: CertificateJson,
    pub verify: VerifyJson,
}

impl NetSection {
    pub fn new(set_kind: &'static str, c: &NetCertificate, v: &NetReport) -> Self {
        NetSection {
            set_kind,
            certificate: CertificateJson {
                epsilon: c.epsilon.values().to_vec(),
                partition: c.partition.labels().to_vec(),
                finite_sets: c
                    .finite_sets
                    .iter()
                    .map(|set| set.iter().map(|p| p.to_vecs()).collect())
                    .collect(),
            },
            verify: VerifyJson {
                samples: v.samples,
                violations: v.violations,
                worst_margin: v.worst_margin,
                worst_atom: v.worst_atom,
                passed: v.passed(),
            },
        }
    }
}
