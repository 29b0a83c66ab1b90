//! Maximization of the quantum LHS over X-Z-plane angles and visibility
//! thresholds.
//!
//! The LHS is affine in the visibility, `L(p) = p L₁ + (1-p) L₀`, where
//! `L₀` is the angle-independent maximally mixed value and `L₁` the pure
//! state value. The angle search therefore runs once on `L₁` and every
//! visibility is answered from that optimum.

mod compass;
mod threshold;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Result};
use crate::inequality::{BellExpression, Outcome, Setting};
use crate::quantum::{
    normalize_angle, outcome_vector, product_overlap, MeasurementAngles, NoisyState, StateVector,
};

pub use compass::compass_maximize;
pub use threshold::{
    find_threshold, find_threshold_for, format_significant, reproduce_table, write_table,
    TableFormat, ThresholdResult, DEFAULT_BISECTION_TOLERANCE, VIOLATION_THRESHOLD,
};

/// Largest number of grid points used for the full `2n`-angle search.
pub const FULL_GRID_BUDGET: usize = 1 << 18;

/// Angles with parties `2..n` sharing one pair of settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricAngles {
    pub theta_a1: f64,
    pub theta_b1: f64,
    pub theta_a_rest: f64,
    pub theta_b_rest: f64,
}

impl SymmetricAngles {
    pub fn new(theta_a1: f64, theta_b1: f64, theta_a_rest: f64, theta_b_rest: f64) -> Result<Self> {
        let s = SymmetricAngles {
            theta_a1,
            theta_b1,
            theta_a_rest,
            theta_b_rest,
        };
        if s.to_array().iter().any(|t| !t.is_finite()) {
            return Err(domain("angles must be finite"));
        }
        Ok(s.normalized())
    }

    fn from_slice(x: &[f64]) -> Self {
        SymmetricAngles {
            theta_a1: x[0],
            theta_b1: x[1],
            theta_a_rest: x[2],
            theta_b_rest: x[3],
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [
            self.theta_a1,
            self.theta_b1,
            self.theta_a_rest,
            self.theta_b_rest,
        ]
    }

    fn normalized(&self) -> Self {
        Self::from_slice(&self.to_array().map(normalize_angle))
    }

    /// Per-party angles for `n` parties.
    pub fn expand(&self, n: usize) -> Result<MeasurementAngles> {
        if n < 2 {
            return Err(domain(format!("symmetric angles need n >= 2, got {n}")));
        }
        let mut a = vec![self.theta_a_rest; n];
        let mut b = vec![self.theta_b_rest; n];
        a[0] = self.theta_a1;
        b[0] = self.theta_b1;
        MeasurementAngles::new(a, b)
    }
}

/// Knobs of the grid + compass search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Grid points per angle over `[0, 2π)`.
    pub grid_resolution: usize,
    /// Cap on objective evaluations of each local refinement.
    pub refinement_rounds: usize,
    /// Refinement stops once the compass step falls below this.
    pub local_tolerance: f64,
    /// Number of best grid points refined, and of extra random starts.
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_resolution: 24,
            refinement_rounds: 20_000,
            local_tolerance: 1e-9,
            restarts: 8,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution == 0 || self.refinement_rounds == 0 || self.restarts == 0 {
            return Err(domain(
                "grid_resolution, refinement_rounds and restarts must be positive",
            ));
        }
        if !(self.local_tolerance > 0.0 && self.local_tolerance.is_finite()) {
            return Err(domain("local_tolerance must be positive"));
        }
        Ok(())
    }
}

/// Pure-state LHS `L₁` as a function of raw angle parameters.
struct PureObjective {
    n: usize,
    amplitudes: Vec<Complex64>,
    terms: Vec<(f64, Vec<(Setting, Outcome)>)>,
    symmetric: bool,
}

impl PureObjective {
    fn new(expr: &BellExpression, psi: &StateVector, symmetric: bool) -> Self {
        PureObjective {
            n: expr.n(),
            amplitudes: psi.amplitudes().to_vec(),
            terms: expr
                .terms()
                .iter()
                .map(|t| {
                    let pairs = t
                        .settings()
                        .iter()
                        .copied()
                        .zip(t.outcomes().iter().copied());
                    (t.coefficient() as f64, pairs.collect())
                })
                .collect(),
            symmetric,
        }
    }

    fn dimension(&self) -> usize {
        if self.symmetric {
            4
        } else {
            2 * self.n
        }
    }

    /// Angle of party `k` under `setting` for parameter vector `x`.
    fn theta(&self, x: &[f64], k: usize, setting: Setting) -> f64 {
        let s = setting.index();
        if self.symmetric {
            if k == 0 {
                x[s]
            } else {
                x[2 + s]
            }
        } else {
            x[s * self.n + k]
        }
    }

    fn value(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        self.terms
            .iter()
            .map(|(c, pairs)| {
                scratch.locals.clear();
                scratch.locals.extend(
                    pairs
                        .iter()
                        .enumerate()
                        .map(|(k, &(s, r))| outcome_vector(self.theta(x, k, s), r)),
                );
                c * product_overlap(&self.amplitudes, &scratch.locals, &mut scratch.overlap)
                    .norm_sqr()
            })
            .sum()
    }
}

#[derive(Default)]
struct Scratch {
    locals: Vec<[f64; 2]>,
    overlap: Vec<Complex64>,
}

/// Grid points per dimension actually used: the configured resolution for
/// the symmetric search, reduced for the full search so that the grid has
/// at most [`FULL_GRID_BUDGET`] points.
pub fn effective_resolution(config: &OptimizerConfig, dimension: usize) -> usize {
    if dimension <= 4 {
        return config.grid_resolution;
    }
    let mut r = config.grid_resolution;
    while r > 2 && (r as f64).powi(dimension as i32) > FULL_GRID_BUDGET as f64 {
        r -= 1;
    }
    r
}

/// Result of the angle search for one expression and state.
///
/// Holds the pure-state optimum; [`ViolationSearch::max_lhs`] turns it into
/// the optimum at any visibility.
#[derive(Debug, Clone)]
pub struct ViolationSearch {
    n: usize,
    symmetric: bool,
    uniform_value: f64,
    grid_best: f64,
    best_pure: f64,
    best_params: Vec<f64>,
}

impl ViolationSearch {
    pub fn run(
        expr: &BellExpression,
        psi: &StateVector,
        config: &OptimizerConfig,
        symmetric: bool,
    ) -> Result<Self> {
        check_len(expr.n(), psi.n())?;
        config.validate()?;
        let objective = PureObjective::new(expr, psi, symmetric);
        let mut seeds = Vec::new();
        if !symmetric {
            let sym = Self::run(expr, psi, config, true)?;
            let angles = sym.angles()?;
            seeds.push([angles.theta_a(), angles.theta_b()].concat());
        }
        let (grid_best, best_pure, best_params) = optimize(&objective, config, seeds);
        Ok(ViolationSearch {
            n: expr.n(),
            symmetric,
            uniform_value: expr.uniform_value(),
            grid_best,
            best_pure,
            best_params,
        })
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Maximum LHS over the searched angles at visibility `p`.
    pub fn max_lhs(&self, p: f64) -> f64 {
        p * self.best_pure + (1.0 - p) * self.uniform_value
    }

    /// Best coarse-grid value at visibility `p`.
    pub fn grid_lhs(&self, p: f64) -> f64 {
        p * self.grid_best + (1.0 - p) * self.uniform_value
    }

    pub fn angles(&self) -> Result<MeasurementAngles> {
        if self.symmetric {
            self.symmetric_angles().expect("symmetric").expand(self.n)
        } else {
            MeasurementAngles::new(
                self.best_params[..self.n].to_vec(),
                self.best_params[self.n..].to_vec(),
            )
        }
    }

    /// The optimum in symmetric form, for symmetric searches.
    pub fn symmetric_angles(&self) -> Option<SymmetricAngles> {
        self.symmetric
            .then(|| SymmetricAngles::from_slice(&self.best_params).normalized())
    }
}

/// Grid scan, then compass refinement from the best grid points, random
/// points and any extra `seeds`. Returns `(grid max, refined max, argmax)`.
fn optimize(
    objective: &PureObjective,
    config: &OptimizerConfig,
    seeds: Vec<Vec<f64>>,
) -> (f64, f64, Vec<f64>) {
    let d = objective.dimension();
    let r = effective_resolution(config, d);
    let spacing = TAU / r as f64;
    let point = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; d];
        for xi in x.iter_mut().rev() {
            *xi = (idx % r) as f64 * spacing;
            idx /= r;
        }
        x
    };

    let total = r.pow(d as u32);
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, idx| {
            objective.value(&point(idx), scratch)
        })
        .collect();

    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let grid_best = values[order[0]];

    let mut starts: Vec<Vec<f64>> = order
        .iter()
        .take(config.restarts)
        .map(|&i| point(i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    starts.extend((0..config.restarts).map(|_| (0..d).map(|_| rng.gen_range(0.0..TAU)).collect()));
    starts.extend(seeds);

    let refined: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|x0| {
            let mut scratch = Scratch::default();
            let (x, fx) = compass_maximize(
                |x| objective.value(x, &mut scratch),
                x0,
                spacing / 2.0,
                config.local_tolerance,
                config.refinement_rounds,
            );
            (x.into_iter().map(normalize_angle).collect(), fx)
        })
        .collect();

    let (best_params, best_pure) = refined
        .into_iter()
        .reduce(|a, b| match b.1.total_cmp(&a.1) {
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Equal => {
                if b.0
                    .iter()
                    .zip(&a.0)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    == Some(std::cmp::Ordering::Less)
                {
                    b
                } else {
                    a
                }
            }
        })
        .expect("at least one start");
    (grid_best, best_pure, best_params)
}

/// Maximum of the LHS over X-Z-plane angles at the state's visibility.
///
/// With `symmetric` set the search covers the four angles of
/// [`SymmetricAngles`]; otherwise all `2n` angles, starting also from the
/// symmetric optimum. Deterministic for a fixed config.
pub fn maximize_violation(
    expr: &BellExpression,
    state: &NoisyState,
    config: &OptimizerConfig,
    symmetric: bool,
) -> Result<(f64, MeasurementAngles)> {
    let search = ViolationSearch::run(expr, state.psi(), config, symmetric)?;
    Ok((search.max_lhs(state.visibility()), search.angles()?))
}
