//! Random points of the nonsignaling polytope of a block of parties.
//!
//! For blocks of up to [`MAX_VERTEX_BLOCK`] parties a random linear objective
//! is maximized over the polytope, which lands on a vertex (deterministic
//! boxes, PR boxes and their multipartite analogues). Larger blocks are
//! covered by products of smaller sampled blocks. Either kind of point may be
//! replaced by a convex mixture of several independent draws.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::lhv::simplex::{maximize, LpOutcome};
use crate::lhv::{ConditionalDistribution, Partition, ProductBehavior};

/// Largest block solved directly as a linear program (`4^3 = 64` variables).
pub const MAX_VERTEX_BLOCK: usize = 3;

/// Equality constraints of the nonsignaling polytope for `size` parties:
/// one normalization row per setting combination and one marginal
/// consistency row per (party, other settings, other outcomes).
pub fn nonsignaling_constraints(size: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rows = 1usize << size;
    let vars = rows * rows;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for settings in 0..rows {
        let mut r = vec![0.0; vars];
        r[settings * rows..(settings + 1) * rows].fill(1.0);
        a.push(r);
        b.push(1.0);
    }
    for j in 0..size {
        let bit = 1usize << (size - 1 - j);
        for settings in (0..rows).filter(|x| x & bit == 0) {
            for outcomes in (0..rows).filter(|x| x & bit == 0) {
                let mut r = vec![0.0; vars];
                r[settings * rows + outcomes] = 1.0;
                r[settings * rows + (outcomes | bit)] = 1.0;
                r[(settings | bit) * rows + outcomes] = -1.0;
                r[(settings | bit) * rows + (outcomes | bit)] = -1.0;
                a.push(r);
                b.push(0.0);
            }
        }
    }
    (a, b)
}

/// Maximizer of `objective` over the nonsignaling polytope of `parties`.
///
/// # Panics
///
/// The polytope is never empty or unbounded, so any other LP outcome is a
/// solver bug and aborts.
pub fn nonsignaling_vertex(
    parties: Vec<usize>,
    objective: &[f64],
) -> Result<ConditionalDistribution> {
    let size = parties.len();
    if size == 0 || size > MAX_VERTEX_BLOCK {
        return Err(domain(format!(
            "vertex sampling supports 1..={MAX_VERTEX_BLOCK} parties, got {size}"
        )));
    }
    let (a, b) = nonsignaling_constraints(size);
    match maximize(&a, &b, objective) {
        LpOutcome::Optimal { x, .. } => ConditionalDistribution::new(parties, x),
        other => panic!("nonsignaling polytope LP failed: {other:?}"),
    }
}

/// Objective `Σ_M w_M Σ_r (-1)^(r·S_M) P(r|M)`, a signed sum of correlators,
/// plus a small uniform perturbation so the maximizer is unique.
///
/// `S_M` is the whole block for half of the draws and a random nonempty
/// subset otherwise; `|w_M|` is drawn from `[0.5, 1)` with a random sign.
/// Full-block correlators with an odd number of negative signs are
/// maximized by PR-type boxes.
fn correlator_objective<R: Rng>(size: usize, rng: &mut R) -> Vec<f64> {
    let rows = 1usize << size;
    let full = rng.gen_bool(0.5);
    let mut objective = Vec::with_capacity(rows * rows);
    for _ in 0..rows {
        let magnitude = rng.gen_range(0.5..1.0);
        let weight = if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        };
        let subset = if full {
            rows - 1
        } else {
            rng.gen_range(1..rows)
        };
        for outcomes in 0..rows {
            let sign = if (outcomes & subset).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            objective.push(weight * sign + 0.05 * rng.gen_range(-1.0..1.0));
        }
    }
    objective
}

/// Draws nonsignaling block distributions from a caller-supplied RNG.
#[derive(Debug, Clone)]
pub struct NonsignalingSampler {
    /// Probability of returning a mixture instead of a single draw.
    pub mixture_probability: f64,
    /// Mixtures combine `2..=max_mixture` draws.
    pub max_mixture: usize,
    /// Probability of drawing a correlator-shaped objective instead of an
    /// entrywise uniform one. Uniform objectives reach nonlocal vertices
    /// (PR boxes and relatives) only a few percent of the time.
    pub correlator_probability: f64,
}

impl Default for NonsignalingSampler {
    fn default() -> Self {
        NonsignalingSampler {
            mixture_probability: 0.25,
            max_mixture: 3,
            correlator_probability: 0.5,
        }
    }
}

impl NonsignalingSampler {
    /// One distribution over `parties` (1-based, strictly increasing).
    pub fn sample<R: Rng>(
        &self,
        parties: &[usize],
        rng: &mut R,
    ) -> Result<ConditionalDistribution> {
        if self.max_mixture >= 2 && rng.gen_bool(self.mixture_probability) {
            let count = rng.gen_range(2..=self.max_mixture);
            let draws = (0..count)
                .map(|_| self.extreme(parties, rng))
                .collect::<Result<Vec<_>>>()?;
            let mut weights: Vec<f64> = (0..count)
                .map(|_| -rng.gen::<f64>().max(1e-300).ln())
                .collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let parts: Vec<_> = weights.iter().copied().zip(draws.iter()).collect();
            ConditionalDistribution::mixture(&parts)
        } else {
            self.extreme(parties, rng)
        }
    }

    /// A vertex for small blocks, a product of smaller sampled blocks
    /// otherwise.
    fn extreme<R: Rng>(&self, parties: &[usize], rng: &mut R) -> Result<ConditionalDistribution> {
        let size = parties.len();
        if size <= MAX_VERTEX_BLOCK {
            let objective = if size >= 2 && rng.gen_bool(self.correlator_probability) {
                correlator_objective(size, rng)
            } else {
                let vars = 1usize << (2 * size);
                (0..vars).map(|_| rng.gen_range(-1.0..1.0)).collect()
            };
            return nonsignaling_vertex(parties.to_vec(), &objective);
        }

        // random split into chunks of at most MAX_VERTEX_BLOCK parties
        let mut shuffled = parties.to_vec();
        shuffled.shuffle(rng);
        let mut chunks = Vec::new();
        let mut rest = &shuffled[..];
        while !rest.is_empty() {
            let take = rng.gen_range(1..=MAX_VERTEX_BLOCK.min(rest.len()));
            chunks.push(rest[..take].to_vec());
            rest = &rest[take..];
        }

        // relabel the block's parties as 1..=size for the product
        let local = |k: usize| parties.iter().position(|&p| p == k).expect("member") + 1;
        let local_blocks: Vec<Vec<usize>> = chunks
            .iter()
            .map(|c| {
                let mut l: Vec<usize> = c.iter().map(|&k| local(k)).collect();
                l.sort_unstable();
                l
            })
            .collect();
        let partition = Partition::new(size, local_blocks)?;
        let dists = partition
            .blocks()
            .iter()
            .map(|b| self.extreme(b, rng))
            .collect::<Result<Vec<_>>>()?;
        let table = ProductBehavior::new(&partition, &dists)?.to_distribution()?;
        ConditionalDistribution::new(parties.to_vec(), table.table().to_vec())
    }
}

/// Convenience entry point: one block of `size` parties labelled `1..=size`,
/// drawn with a seeded generator.
pub fn sample_nonsignaling_block(size: usize, seed: u64) -> Result<ConditionalDistribution> {
    if size == 0 {
        return Err(domain("block size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parties: Vec<usize> = (1..=size).collect();
    NonsignalingSampler::default().sample(&parties, &mut rng)
}
