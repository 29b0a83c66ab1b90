use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Error, Result};
use crate::inequality::BellExpression;
use crate::lhv::Partition;

/// Tolerance for normalization and nonsignaling checks.
pub const NONSIGNALING_TOLERANCE: f64 = 1e-9;
/// Entries down to this (negative) value are treated as rounding noise and
/// clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// Anything that assigns a probability `P(r|M)` to every setting combination
/// and outcome string of `n` parties. Indices pack party 1 into the most
/// significant bit; setting `b` and outcome `1` are the set bits.
pub trait Behavior {
    fn parties(&self) -> usize;
    fn probability(&self, settings: usize, outcomes: usize) -> f64;
}

/// Full conditional table `P(r_β|M_β)` for a set of parties `β`.
///
/// Storage is row-major, setting-major: entry `settings * 2^|β| + outcomes`,
/// where bit `|β|-1-j` of either index belongs to the `j`-th listed party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDistribution {
    parties: Vec<usize>,
    table: Vec<f64>,
}

impl ConditionalDistribution {
    /// Validates and wraps a table for the given 1-based parties (strictly
    /// increasing). Entries in `[-1e-12, 0)` are clamped to zero and every
    /// row is renormalized; rows further than `1e-9` from unit sum are
    /// rejected.
    pub fn new(parties: Vec<usize>, mut table: Vec<f64>) -> Result<Self> {
        if parties.is_empty() {
            return Err(domain("a distribution needs at least one party"));
        }
        if parties.len() > 15 {
            return Err(Error::SizeGuard {
                what: "conditional distribution",
                limit: 15,
                requested: parties.len(),
            });
        }
        if parties[0] == 0 || parties.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain(format!(
                "parties must be 1-based and strictly increasing, got {parties:?}"
            )));
        }
        let rows = 1usize << parties.len();
        check_len(rows * rows, table.len())?;
        for row in table.chunks_mut(rows) {
            for x in row.iter_mut() {
                if !x.is_finite() || *x < -CLAMP_TOLERANCE {
                    return Err(domain(format!("invalid probability {x}")));
                }
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NONSIGNALING_TOLERANCE {
                return Err(domain(format!("row sums to {sum}, expected 1")));
            }
            row.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(ConditionalDistribution { parties, table })
    }

    /// All rows uniform.
    pub fn uniform(parties: Vec<usize>) -> Result<Self> {
        let rows = 1usize << parties.len();
        Self::new(parties, vec![1.0 / rows as f64; rows * rows])
    }

    pub fn parties(&self) -> &[usize] {
        &self.parties
    }

    pub fn size(&self) -> usize {
        self.parties.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, settings: usize, outcomes: usize) -> f64 {
        self.table[(settings << self.parties.len()) | outcomes]
    }

    /// Convex combination `Σ w_i d_i` of distributions over the same
    /// parties. Weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &ConditionalDistribution)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| domain("empty mixture"))?.1;
        let mut table = vec![0.0; first.table.len()];
        for (w, d) in parts {
            if d.parties != first.parties {
                return Err(domain("mixture components cover different parties"));
            }
            if *w < 0.0 {
                return Err(domain("negative mixture weight"));
            }
            for (t, x) in table.iter_mut().zip(&d.table) {
                *t += w * x;
            }
        }
        Self::new(first.parties.clone(), table)
    }
}

impl Behavior for ConditionalDistribution {
    fn parties(&self) -> usize {
        self.parties.len()
    }

    fn probability(&self, settings: usize, outcomes: usize) -> f64 {
        self.get(settings, outcomes)
    }
}

/// Outcome of [`check_nonsignaling`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonsignalingReport {
    pub nonsignaling: bool,
    /// Largest difference between two marginals that should agree.
    pub max_violation: f64,
}

/// For every party `k` of the block and every setting/outcome assignment of
/// the other parties, compares the marginal obtained by summing out `r_k`
/// under `M_k = a` and `M_k = b`.
pub fn check_nonsignaling(dist: &ConditionalDistribution) -> NonsignalingReport {
    let s = dist.size();
    let mut worst: f64 = 0.0;
    if s >= 2 {
        let rows = 1usize << s;
        for j in 0..s {
            let bit = 1usize << (s - 1 - j);
            for settings in (0..rows).filter(|x| x & bit == 0) {
                for outcomes in (0..rows).filter(|x| x & bit == 0) {
                    let with_a = dist.get(settings, outcomes) + dist.get(settings, outcomes | bit);
                    let with_b = dist.get(settings | bit, outcomes)
                        + dist.get(settings | bit, outcomes | bit);
                    worst = worst.max((with_a - with_b).abs());
                }
            }
        }
    }
    NonsignalingReport {
        nonsignaling: worst <= NONSIGNALING_TOLERANCE,
        max_violation: worst,
    }
}

/// Signed sum of the behavior's probabilities over the expression's terms.
pub fn distribution_lhs<B: Behavior + ?Sized>(expr: &BellExpression, behavior: &B) -> Result<f64> {
    check_len(expr.n(), behavior.parties())?;
    Ok(expr
        .terms()
        .iter()
        .map(|t| {
            t.coefficient() as f64 * behavior.probability(t.settings_index(), t.outcomes_index())
        })
        .sum())
}

/// Gathers the bits at `positions` (most significant first) out of `index`.
#[inline]
fn gather(index: usize, positions: &[u32]) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | (index >> p & 1))
}

/// Lazily evaluated product `Π_i P_{α_i}` of block distributions over a
/// partition of all `n` parties.
#[derive(Debug, Clone)]
pub struct ProductBehavior<'a> {
    n: usize,
    blocks: Vec<(Vec<u32>, &'a ConditionalDistribution)>,
}

impl<'a> ProductBehavior<'a> {
    /// `blocks[i]` must cover exactly the parties of the partition's `i`-th
    /// block.
    pub fn new(partition: &Partition, blocks: &'a [ConditionalDistribution]) -> Result<Self> {
        check_len(partition.blocks().len(), blocks.len())?;
        let n = partition.n();
        let mut placed = Vec::with_capacity(blocks.len());
        for (members, dist) in partition.blocks().iter().zip(blocks) {
            if members.as_slice() != dist.parties() {
                return Err(domain(format!(
                    "block distribution covers {:?}, partition block is {:?}",
                    dist.parties(),
                    members
                )));
            }
            let positions = members.iter().map(|&k| (n - k) as u32).collect();
            placed.push((positions, dist));
        }
        Ok(ProductBehavior { n, blocks: placed })
    }

    /// Materializes the full `n`-party table.
    pub fn to_distribution(&self) -> Result<ConditionalDistribution> {
        let rows = 1usize << self.n;
        let mut table = Vec::with_capacity(rows * rows);
        for settings in 0..rows {
            for outcomes in 0..rows {
                table.push(self.probability(settings, outcomes));
            }
        }
        ConditionalDistribution::new((1..=self.n).collect(), table)
    }
}

impl Behavior for ProductBehavior<'_> {
    fn parties(&self) -> usize {
        self.n
    }

    fn probability(&self, settings: usize, outcomes: usize) -> f64 {
        self.blocks
            .iter()
            .map(|(pos, d)| d.get(gather(settings, pos), gather(outcomes, pos)))
            .product()
    }
}

/// Full table of the product distribution over `partition`.
pub fn product_distribution(
    partition: &Partition,
    blocks: &[ConditionalDistribution],
) -> Result<ConditionalDistribution> {
    if partition.n() > 12 {
        return Err(Error::SizeGuard {
            what: "product table",
            limit: 12,
            requested: partition.n(),
        });
    }
    ProductBehavior::new(partition, blocks)?.to_distribution()
}
