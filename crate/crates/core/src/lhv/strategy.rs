use crate::error::{check_len, Error, Result};
use crate::inequality::{BellExpression, Outcome, Setting};
use crate::lhv::{Behavior, ConditionalDistribution};

pub const MAX_STRATEGY_PARTIES: usize = 12;

/// Local deterministic strategy: every party answers each setting with a
/// fixed outcome.
///
/// Stored as two outcome strings, one per setting, packed with party 1 in
/// the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    n: usize,
    under_a: u32,
    under_b: u32,
}

impl DeterministicStrategy {
    /// `answers[k] = (outcome under a, outcome under b)` for party `k + 1`.
    pub fn from_answers(answers: &[(Outcome, Outcome)]) -> Self {
        let n = answers.len();
        assert!(n <= 31, "too many parties for a packed strategy");
        let mut under_a = 0;
        let mut under_b = 0;
        for (k, &(ra, rb)) in answers.iter().enumerate() {
            let bit = 1u32 << (n - 1 - k);
            if ra == Outcome::One {
                under_a |= bit;
            }
            if rb == Outcome::One {
                under_b |= bit;
            }
        }
        DeterministicStrategy {
            n,
            under_a,
            under_b,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Outcome of party `k` (0-based) under `setting`.
    pub fn outcome(&self, k: usize, setting: Setting) -> Outcome {
        let word = match setting {
            Setting::A => self.under_a,
            Setting::B => self.under_b,
        };
        if word >> (self.n - 1 - k) & 1 == 1 {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }

    /// Outcome string produced under a packed setting combination.
    #[inline]
    pub fn outcomes_for(&self, settings: usize) -> usize {
        let s = settings as u32;
        ((self.under_a & !s) | (self.under_b & s)) as usize
    }

    /// The 0/1 behavior table of this strategy.
    pub fn indicator(&self) -> Result<ConditionalDistribution> {
        let rows = 1usize << self.n;
        let mut table = vec![0.0; rows * rows];
        for settings in 0..rows {
            table[settings * rows + self.outcomes_for(settings)] = 1.0;
        }
        ConditionalDistribution::new((1..=self.n).collect(), table)
    }
}

impl Behavior for DeterministicStrategy {
    fn parties(&self) -> usize {
        self.n
    }

    fn probability(&self, settings: usize, outcomes: usize) -> f64 {
        if self.outcomes_for(settings) == outcomes {
            1.0
        } else {
            0.0
        }
    }
}

/// All `4^n` deterministic strategies.
pub fn enumerate_strategies(n: usize) -> Result<impl Iterator<Item = DeterministicStrategy>> {
    if n > MAX_STRATEGY_PARTIES {
        return Err(Error::SizeGuard {
            what: "strategy enumeration",
            limit: MAX_STRATEGY_PARTIES,
            requested: n,
        });
    }
    let mask = (1u32 << n) - 1;
    Ok((0u64..1 << (2 * n)).map(move |i| DeterministicStrategy {
        n,
        under_a: i as u32 & mask,
        under_b: (i >> n) as u32 & mask,
    }))
}

/// Value of the left-hand side on a deterministic strategy. Every term
/// probability is 0 or 1, so the value is an integer.
pub fn strategy_lhs(expr: &BellExpression, strategy: &DeterministicStrategy) -> Result<i64> {
    check_len(expr.n(), strategy.n)?;
    Ok(packed_terms(expr)
        .map(|(c, s, r)| if strategy.outcomes_for(s) == r { c } else { 0 })
        .sum())
}

fn packed_terms(expr: &BellExpression) -> impl Iterator<Item = (i64, usize, usize)> + '_ {
    expr.terms().iter().map(|t| {
        (
            t.coefficient() as i64,
            t.settings_index(),
            t.outcomes_index(),
        )
    })
}

/// Exhaustive maximum of [`strategy_lhs`] over all `4^n` strategies, with a
/// maximizing strategy (the first in enumeration order).
pub fn max_strategy_lhs(expr: &BellExpression) -> Result<(i64, DeterministicStrategy)> {
    use rayon::prelude::*;

    let n = expr.n();
    if n > MAX_STRATEGY_PARTIES {
        return Err(Error::SizeGuard {
            what: "strategy enumeration",
            limit: MAX_STRATEGY_PARTIES,
            requested: n,
        });
    }
    let terms: Vec<_> = packed_terms(expr).collect();
    let mask = (1u32 << n) - 1;
    let best = (0u64..1 << (2 * n))
        .into_par_iter()
        .map(|i| {
            let s = DeterministicStrategy {
                n,
                under_a: i as u32 & mask,
                under_b: (i >> n) as u32 & mask,
            };
            let v: i64 = terms
                .iter()
                .map(|&(c, st, r)| if s.outcomes_for(st) == r { c } else { 0 })
                .sum();
            (v, std::cmp::Reverse(i), s)
        })
        .max_by_key(|&(v, i, _)| (v, i))
        .expect("at least one strategy");
    Ok((best.0, best.2))
}
