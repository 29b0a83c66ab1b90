//! The hierarchy of Bell-type inequalities.
//!
//! For `n` parties, each choosing between two settings `a`/`b` with binary
//! outcomes, the inequality associated with nonsignaling `m`-local models
//! (`2 <= m <= n`) and a distinguished party `k'` reads
//!
//! ```text
//! P(0..0|a..a) - sum_k P(0..0|b_k a_rest) - sum_S P(1_S 0_rest | b_S a_rest) <= 0
//! ```
//!
//! where `S` ranges over the sets `{k'} ∪ T` with `T` an `(m-1)`-subset of the
//! remaining parties. `m = 2` gives the genuine-nonlocality inequality with
//! `n - 1` pair terms; `m = n` gives Hardy's inequality with the single term
//! `P(1..1|b..b)`.
//!
//! Terms are stored in a fixed order: the positive term, the `n` single-`b`
//! terms in ascending party order, then the second-sum terms in lexicographic
//! order of `T`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Measurement setting chosen by one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    A,
    B,
}

impl Setting {
    pub fn as_char(self) -> char {
        match self {
            Setting::A => 'a',
            Setting::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a' => Some(Setting::A),
            'b' => Some(Setting::B),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Binary measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub fn as_char(self) -> char {
        match self {
            Outcome::Zero => '0',
            Outcome::One => '1',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Outcome::Zero),
            '1' => Some(Outcome::One),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Packs per-party flags into an index with party 1 as the most significant
/// bit.
pub(crate) fn pack_bits(bits: impl ExactSizeIterator<Item = bool>) -> usize {
    bits.fold(0, |acc, b| (acc << 1) | b as usize)
}

/// One signed probability `±P(outcomes|settings)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    coefficient: i8,
    settings: Vec<Setting>,
    outcomes: Vec<Outcome>,
}

impl Term {
    fn new(coefficient: i8, settings: Vec<Setting>, outcomes: Vec<Outcome>) -> Self {
        debug_assert!(coefficient == 1 || coefficient == -1);
        debug_assert_eq!(settings.len(), outcomes.len());
        Term {
            coefficient,
            settings,
            outcomes,
        }
    }

    /// `+1` or `-1`.
    pub fn coefficient(&self) -> i8 {
        self.coefficient
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    /// Setting combination as an index, party 1 most significant, `b` = 1.
    pub fn settings_index(&self) -> usize {
        pack_bits(self.settings.iter().map(|&s| s == Setting::B))
    }

    /// Outcome string as an index, party 1 most significant.
    pub fn outcomes_index(&self) -> usize {
        pack_bits(self.outcomes.iter().map(|&r| r == Outcome::One))
    }

    pub fn settings_string(&self) -> String {
        self.settings.iter().map(|s| s.as_char()).collect()
    }

    pub fn outcomes_string(&self) -> String {
        self.outcomes.iter().map(|r| r.as_char()).collect()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coefficient > 0 { '+' } else { '-' };
        write!(
            f,
            "{sign}P({}|{})",
            self.outcomes_string(),
            self.settings_string()
        )
    }
}

/// The `(m-1)`-th inequality of the hierarchy for `n` parties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellExpression {
    n: usize,
    m: usize,
    k_prime: usize,
    terms: Vec<Term>,
}

impl BellExpression {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The distinguished party, 1-based.
    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The value of the left-hand side on the maximally mixed behavior
    /// (every probability equal to `2^-n`).
    pub fn uniform_value(&self) -> f64 {
        let coefficient_sum: i64 = self.terms.iter().map(|t| t.coefficient as i64).sum();
        coefficient_sum as f64 / (1u64 << self.n) as f64
    }
}

impl fmt::Display for BellExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{term}")?;
        }
        f.write_str(" <= 0")
    }
}

/// `binomial(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    if m < 2 || m > n {
        return Err(domain(format!("m must satisfy 2 <= m <= n={n}, got {m}")));
    }
    Ok(())
}

/// Number of terms in the `(n, m)` inequality: `1 + n + binomial(n-1, m-1)`.
pub fn term_count(n: usize, m: usize) -> Result<usize> {
    check_nm(n, m)?;
    Ok(1 + n + binomial(n - 1, m - 1) as usize)
}

/// Calls `visit` with every `size`-subset of `items`, in lexicographic order.
pub(crate) fn for_each_subset(items: &[usize], size: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        items: &[usize],
        size: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == size {
            visit(chosen);
            return;
        }
        let needed = size - chosen.len();
        for i in start..=items.len() - needed {
            chosen.push(items[i]);
            rec(items, size, i + 1, chosen, visit);
            chosen.pop();
        }
    }
    if size <= items.len() {
        rec(items, size, 0, &mut Vec::with_capacity(size), &mut visit);
    }
}

/// Builds the inequality for `n` parties, locality `m` and distinguished
/// party `k_prime` (1-based).
pub fn build_hierarchy_inequality(n: usize, m: usize, k_prime: usize) -> Result<BellExpression> {
    check_nm(n, m)?;
    if k_prime < 1 || k_prime > n {
        return Err(domain(format!(
            "k' must satisfy 1 <= k' <= n={n}, got {k_prime}"
        )));
    }

    let mut terms = Vec::with_capacity(1 + n + binomial(n - 1, m - 1) as usize);
    terms.push(Term::new(1, vec![Setting::A; n], vec![Outcome::Zero; n]));

    for k in 0..n {
        let mut settings = vec![Setting::A; n];
        settings[k] = Setting::B;
        terms.push(Term::new(-1, settings, vec![Outcome::Zero; n]));
    }

    let kp = k_prime - 1;
    let others: Vec<usize> = (0..n).filter(|&k| k != kp).collect();
    for_each_subset(&others, m - 1, |subset| {
        let mut settings = vec![Setting::A; n];
        let mut outcomes = vec![Outcome::Zero; n];
        for &k in subset.iter().chain(std::iter::once(&kp)) {
            settings[k] = Setting::B;
            outcomes[k] = Outcome::One;
        }
        terms.push(Term::new(-1, settings, outcomes));
    });

    Ok(BellExpression {
        n,
        m,
        k_prime,
        terms,
    })
}

/// Output encodings for [`serialize_expression`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpressionFormat {
    /// One line: `+P(0000|aaaa) -P(0000|baaa) ... <= 0`.
    Text,
    /// JSON document with `n`, `m`, `k_prime` and a `terms` array.
    Structured,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermRecord {
    coefficient: i8,
    settings: String,
    outcomes: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExpressionDocument {
    n: usize,
    m: usize,
    k_prime: usize,
    terms: Vec<TermRecord>,
}

pub fn serialize_expression(expr: &BellExpression, format: ExpressionFormat) -> Vec<u8> {
    match format {
        ExpressionFormat::Text => format!("{expr}\n").into_bytes(),
        ExpressionFormat::Structured => {
            let doc = ExpressionDocument {
                n: expr.n,
                m: expr.m,
                k_prime: expr.k_prime,
                terms: expr
                    .terms
                    .iter()
                    .map(|t| TermRecord {
                        coefficient: t.coefficient,
                        settings: t.settings_string(),
                        outcomes: t.outcomes_string(),
                    })
                    .collect(),
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("expression document serializes");
            out.push(b'\n');
            out
        }
    }
}

/// Reads a structured document back. The term list must be exactly the one
/// [`build_hierarchy_inequality`] produces for the document's header.
pub fn parse_expression(bytes: &[u8]) -> Result<BellExpression> {
    let doc: ExpressionDocument = serde_json::from_slice(bytes)?;
    let expected = build_hierarchy_inequality(doc.n, doc.m, doc.k_prime)?;

    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, rec) in doc.terms.iter().enumerate() {
        if rec.coefficient != 1 && rec.coefficient != -1 {
            return Err(Error::Parse(format!(
                "term {i}: coefficient must be +1 or -1, got {}",
                rec.coefficient
            )));
        }
        let settings = rec
            .settings
            .chars()
            .map(Setting::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse(format!("term {i}: settings must be over \"ab\"")))?;
        let outcomes = rec
            .outcomes
            .chars()
            .map(Outcome::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Parse(format!("term {i}: outcomes must be over \"01\"")))?;
        if settings.len() != doc.n || outcomes.len() != doc.n {
            return Err(Error::Parse(format!(
                "term {i}: expected {} parties",
                doc.n
            )));
        }
        terms.push(Term::new(rec.coefficient, settings, outcomes));
    }

    if terms != expected.terms {
        return Err(Error::Parse(format!(
            "term list does not match the (n={}, m={}, k'={}) inequality",
            doc.n, doc.m, doc.k_prime
        )));
    }
    Ok(expected)
}
