//! Classical side of the hierarchy: deterministic local strategies, set
//! partitions, nonsignaling block distributions and their products.
//!
//! A nonsignaling `m`-local model is a mixture, over partitions of the
//! parties into `m` blocks and over a hidden variable, of products of
//! nonsignaling block distributions. The left-hand side of an inequality is
//! linear in the mixture, so checking the bound on individual products is
//! enough; [`certify_m_local_bound`] samples such products.

mod certify;
mod distribution;
mod partition;
mod sampler;
pub mod simplex;
mod strategy;

pub use certify::{
    certify_m_local_bound, certify_with, CertificationFailure, CertificationReport,
    CERTIFICATION_TOLERANCE,
};
pub use distribution::{
    check_nonsignaling, distribution_lhs, product_distribution, Behavior, ConditionalDistribution,
    NonsignalingReport, ProductBehavior, CLAMP_TOLERANCE, NONSIGNALING_TOLERANCE,
};
pub use partition::{enumerate_partitions, stirling2, Partition, MAX_PARTITION_PARTIES};
pub use sampler::{
    nonsignaling_constraints, nonsignaling_vertex, sample_nonsignaling_block, NonsignalingSampler,
    MAX_VERTEX_BLOCK,
};
pub use strategy::{
    enumerate_strategies, max_strategy_lhs, strategy_lhs, DeterministicStrategy,
    MAX_STRATEGY_PARTIES,
};
