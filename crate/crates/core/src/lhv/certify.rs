use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::inequality::{serialize_expression, BellExpression, ExpressionFormat};
use crate::lhv::{
    distribution_lhs, enumerate_partitions, ConditionalDistribution, NonsignalingSampler,
    Partition, ProductBehavior,
};

/// Largest LHS value accepted as satisfying the bound.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-9;

/// Sampled product model whose LHS exceeded the bound.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationFailure {
    pub sample: u64,
    pub expression: serde_json::Value,
    pub partition: Vec<Vec<usize>>,
    pub blocks: Vec<ConditionalDistribution>,
    pub lhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub n: usize,
    pub m: usize,
    pub k_prime: usize,
    pub samples: u64,
    pub seed: u64,
    pub max_lhs: f64,
    /// Sample index attaining `max_lhs`.
    pub argmax: u64,
    pub failures: Vec<CertificationFailure>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Failures kept in a report; the rest are only counted in `max_lhs`.
const MAX_REPORTED_FAILURES: usize = 16;

struct Draw {
    partition: usize,
    blocks: Vec<ConditionalDistribution>,
    lhs: f64,
}

fn draw(
    expr: &BellExpression,
    partitions: &[Partition],
    sampler: &NonsignalingSampler,
    seed: u64,
    sample: u64,
) -> Result<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let index = rng.gen_range(0..partitions.len());
    let partition = &partitions[index];
    let blocks = partition
        .blocks()
        .iter()
        .map(|b| sampler.sample(b, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let lhs = distribution_lhs(expr, &ProductBehavior::new(partition, &blocks)?)?;
    Ok(Draw {
        partition: index,
        blocks,
        lhs,
    })
}

/// Samples `samples` nonsignaling `m`-local product models (partition drawn
/// uniformly from [`enumerate_partitions`], blocks from
/// [`NonsignalingSampler`]) and evaluates the expression on each.
///
/// Sample `i` uses ChaCha stream `i` under `seed`, so the report does not
/// depend on how the work is scheduled.
pub fn certify_m_local_bound(
    expr: &BellExpression,
    samples: u64,
    seed: u64,
) -> Result<CertificationReport> {
    certify_with(expr, samples, seed, &NonsignalingSampler::default())
}

pub fn certify_with(
    expr: &BellExpression,
    samples: u64,
    seed: u64,
    sampler: &NonsignalingSampler,
) -> Result<CertificationReport> {
    let partitions = enumerate_partitions(expr.n(), expr.m())?;
    certify_over(expr, &partitions, samples, seed, sampler)
}

/// Certification against an explicit partition list.
fn certify_over(
    expr: &BellExpression,
    partitions: &[Partition],
    samples: u64,
    seed: u64,
    sampler: &NonsignalingSampler,
) -> Result<CertificationReport> {
    if samples == 0 {
        return Err(domain("at least one sample is required"));
    }

    let values = (0..samples)
        .into_par_iter()
        .map(|i| draw(expr, partitions, sampler, seed, i).map(|d| d.lhs))
        .collect::<Result<Vec<f64>>>()?;

    let (argmax, max_lhs) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });

    let expression =
        serde_json::from_slice(&serialize_expression(expr, ExpressionFormat::Structured))?;
    let mut failures = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v > CERTIFICATION_TOLERANCE {
            if failures.len() == MAX_REPORTED_FAILURES {
                break;
            }
            // replay the draw to recover the offending model
            let d = draw(expr, partitions, sampler, seed, i as u64)?;
            failures.push(CertificationFailure {
                sample: i as u64,
                expression: serde_json::Value::clone(&expression),
                partition: partitions[d.partition].blocks().to_vec(),
                blocks: d.blocks,
                lhs: d.lhs,
            });
        }
    }

    Ok(CertificationReport {
        n: expr.n(),
        m: expr.m(),
        k_prime: expr.k_prime(),
        samples,
        seed,
        max_lhs,
        argmax: argmax as u64,
        failures,
    })
}
