//! Multipartite Bell-type inequalities for nonsignaling `m`-local models,
//! from genuine multipartite nonlocality (`m = 2`) to Hardy's inequality
//! (`m = n`).
//!
//! For `n` parties with two dichotomic settings `a`, `b` each, the
//! inequality built for locality `m` holds whenever the parties split into
//! at most `m` groups with arbitrary nonsignaling correlations inside a
//! group and only shared randomness across groups.
//!
//! - [`inequality`]: expression construction and serialization.
//! - [`quantum`]: evaluation on noisy GHZ / W states with X-Z-plane
//!   measurements.
//! - [`lhv`]: exhaustive deterministic bounds and sampled certification
//!   against nonsignaling product models.
//! - [`search`]: angle optimization and visibility thresholds.
//!
//! ```
//! use bell_hierarchy::inequality::build_hierarchy_inequality;
//! use bell_hierarchy::quantum::StateFamily;
//! use bell_hierarchy::search::{find_threshold, OptimizerConfig};
//!
//! let expr = build_hierarchy_inequality(4, 4, 1)?;
//! assert_eq!(expr.terms().len(), 6);
//!
//! let config = OptimizerConfig { grid_resolution: 12, ..OptimizerConfig::default() };
//! let r = find_threshold(4, 4, StateFamily::W, &config, 5e-4)?;
//! assert!((r.p_threshold - 0.573).abs() < 0.005);
//! # Ok::<(), bell_hierarchy::Error>(())
//! ```

pub mod error;
pub mod inequality;
pub mod lhv;
pub mod quantum;
pub mod search;

pub use error::{Error, Result};

// The guide's chapters are compiled as doctests so their snippets keep
// working.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/quantum.md")]
    mod quantum {}
    #[doc = include_str!("../../../book/src/classical.md")]
    mod classical {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
