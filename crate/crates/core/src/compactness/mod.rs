//! Sigma-stable sets, random epsilon-nets and random subsequences.

mod net;
mod sets;
mod subsequence;

pub use net::{
    build_net, build_net_with, convex_hull_net, convex_hull_net_with, verify_net, verify_net_with,
    NetCertificate, NetOptions, NetReport, DEFAULT_SEARCH_BUDGET,
};
pub use sets::{AtomwisePolytope, Section, SetSpec};
pub use subsequence::{ess_least_index, extract_random_subsequence, glue_sequence, RandomIndex};
