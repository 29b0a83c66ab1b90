//! Noisy `n`-qubit states and X-Z-plane projective measurements.
//!
//! Basis index convention: party 1 is the most significant bit, so the
//! amplitude of `|r_1 r_2 ... r_n>` sits at index `sum_k r_k 2^(n-k)`.
//!
//! Setting `θ` for a party is the real vector `|v(θ)> = cos(θ/2)|0> + sin(θ/2)|1>`
//! (Bloch vector `(sin θ, 0, cos θ)`). Outcome `0` projects onto `|v(θ)>` and
//! outcome `1` onto the orthogonal vector `-sin(θ/2)|0> + cos(θ/2)|1>`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Error, Result};
use crate::inequality::{BellExpression, Outcome, Setting, Term};
use crate::lhv::ConditionalDistribution;

const NORM_TOLERANCE: f64 = 1e-12;

/// Pure `n`-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps explicit amplitudes. The length must be `2^n` and the norm 1
    /// within `1e-12`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 4 || !len.is_power_of_two() {
            return Err(domain(format!(
                "amplitude count must be 2^n with n >= 2, got {len}"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(domain(format!("state is not normalized: |psi|^2 = {norm}")));
        }
        Ok(StateVector {
            n: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(amplitudes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn check_party_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!("party count must be at least 2, got {n}")));
    }
    if n > 30 {
        return Err(Error::SizeGuard {
            what: "state vector",
            limit: 30,
            requested: n,
        });
    }
    Ok(())
}

/// `(|0...0> + |1...1>)/√2`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    check_party_count(n)?;
    let dim = 1usize << n;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = a;
    amplitudes[dim - 1] = a;
    Ok(StateVector { n, amplitudes })
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<StateVector> {
    check_party_count(n)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << n];
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amplitudes[1 << k] = a;
    }
    Ok(StateVector { n, amplitudes })
}

/// The two state families used for threshold tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateFamily {
    Ghz,
    W,
}

impl StateFamily {
    pub fn state(self, n: usize) -> Result<StateVector> {
        match self {
            StateFamily::Ghz => ghz_state(n),
            StateFamily::W => w_state(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Ghz => "ghz",
            StateFamily::W => "w",
        }
    }
}

impl std::str::FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(StateFamily::Ghz),
            "w" => Ok(StateFamily::W),
            other => Err(domain(format!(
                "unknown state family {other:?}; expected ghz or w"
            ))),
        }
    }
}

impl std::fmt::Display for StateFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `p |ψ><ψ| + (1-p) 1/2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyState {
    psi: StateVector,
    p: f64,
}

impl NoisyState {
    pub fn new(psi: StateVector, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("visibility must lie in [0, 1], got {p}")));
        }
        Ok(NoisyState { psi, p })
    }

    pub fn pure(psi: StateVector) -> Self {
        NoisyState { psi, p: 1.0 }
    }

    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    pub fn visibility(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.psi.n
    }
}

/// Per-party polar angles of the two settings, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementAngles {
    theta_a: Vec<f64>,
    theta_b: Vec<f64>,
}

/// Maps an angle into `[0, 2π)`. The projectors only depend on the angle
/// modulo `2π`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl MeasurementAngles {
    pub fn new(theta_a: Vec<f64>, theta_b: Vec<f64>) -> Result<Self> {
        check_len(theta_a.len(), theta_b.len())?;
        if theta_a.is_empty() {
            return Err(domain("angle lists must not be empty"));
        }
        if theta_a.iter().chain(&theta_b).any(|t| !t.is_finite()) {
            return Err(domain("angles must be finite"));
        }
        Ok(MeasurementAngles {
            theta_a: theta_a.into_iter().map(normalize_angle).collect(),
            theta_b: theta_b.into_iter().map(normalize_angle).collect(),
        })
    }

    /// Same `(θ_a, θ_b)` for every party.
    pub fn uniform(n: usize, theta_a: f64, theta_b: f64) -> Result<Self> {
        Self::new(vec![theta_a; n], vec![theta_b; n])
    }

    pub fn n(&self) -> usize {
        self.theta_a.len()
    }

    pub fn theta_a(&self) -> &[f64] {
        &self.theta_a
    }

    pub fn theta_b(&self) -> &[f64] {
        &self.theta_b
    }

    /// Angle used by party `k` (0-based) under `setting`.
    pub fn theta(&self, k: usize, setting: Setting) -> f64 {
        match setting {
            Setting::A => self.theta_a[k],
            Setting::B => self.theta_b[k],
        }
    }
}

/// `(cos(θ/2), sin(θ/2))`.
pub fn setting_vector(theta: f64) -> [f64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [c, s]
}

/// Vector onto which outcome `r` of setting `θ` projects.
pub fn outcome_vector(theta: f64, outcome: Outcome) -> [f64; 2] {
    let [c, s] = setting_vector(theta);
    match outcome {
        Outcome::Zero => [c, s],
        Outcome::One => [-s, c],
    }
}

/// `<v_1 ⊗ ... ⊗ v_n | ψ>` for real local vectors, contracting from the
/// least significant party up. `scratch` is reused between calls.
pub(crate) fn product_overlap(
    amplitudes: &[Complex64],
    locals: &[[f64; 2]],
    scratch: &mut Vec<Complex64>,
) -> Complex64 {
    debug_assert_eq!(amplitudes.len(), 1 << locals.len());
    let half = amplitudes.len() / 2;
    scratch.clear();
    let v = locals[locals.len() - 1];
    scratch.extend((0..half).map(|i| amplitudes[2 * i] * v[0] + amplitudes[2 * i + 1] * v[1]));
    let mut len = half;
    for v in locals[..locals.len() - 1].iter().rev() {
        len /= 2;
        for i in 0..len {
            scratch[i] = scratch[2 * i] * v[0] + scratch[2 * i + 1] * v[1];
        }
    }
    scratch[0]
}

fn term_locals(term: &Term, angles: &MeasurementAngles, out: &mut Vec<[f64; 2]>) {
    out.clear();
    out.extend(
        term.settings()
            .iter()
            .zip(term.outcomes())
            .enumerate()
            .map(|(k, (&s, &r))| outcome_vector(angles.theta(k, s), r)),
    );
}

/// `p <ψ|Π|ψ> + (1-p)/2^n` for the product projector selected by `term`.
pub fn term_probability(
    state: &NoisyState,
    term: &Term,
    angles: &MeasurementAngles,
) -> Result<f64> {
    check_len(state.n(), term.parties())?;
    check_len(state.n(), angles.n())?;
    let mut locals = Vec::with_capacity(state.n());
    term_locals(term, angles, &mut locals);
    let overlap = product_overlap(state.psi.amplitudes(), &locals, &mut Vec::new());
    Ok(mix(state, overlap.norm_sqr()))
}

fn mix(state: &NoisyState, pure_probability: f64) -> f64 {
    state.p * pure_probability + (1.0 - state.p) / (1u64 << state.n()) as f64
}

/// Left-hand side of the inequality on a noisy state: the signed sum of
/// term probabilities. Positive values violate the inequality.
pub fn evaluate_lhs(
    expr: &BellExpression,
    state: &NoisyState,
    angles: &MeasurementAngles,
) -> Result<f64> {
    check_len(expr.n(), state.n())?;
    check_len(expr.n(), angles.n())?;
    let mut locals = Vec::with_capacity(expr.n());
    let mut scratch = Vec::with_capacity(1 << expr.n());
    let amplitudes = state.psi.amplitudes();
    Ok(expr
        .terms()
        .iter()
        .map(|term| {
            term_locals(term, angles, &mut locals);
            let pure = product_overlap(amplitudes, &locals, &mut scratch).norm_sqr();
            term.coefficient() as f64 * mix(state, pure)
        })
        .sum())
}

/// Full behavior `P(r|M)` of the noisy state under the given settings: one
/// row per setting combination, one column per outcome string.
pub fn behavior(state: &NoisyState, angles: &MeasurementAngles) -> Result<ConditionalDistribution> {
    let n = state.n();
    check_len(n, angles.n())?;
    if n > 12 {
        return Err(Error::SizeGuard {
            what: "behavior table",
            limit: 12,
            requested: n,
        });
    }
    let dim = 1usize << n;
    let mut table = Vec::with_capacity(dim * dim);
    let mut work = vec![Complex64::new(0.0, 0.0); dim];
    for settings in 0..dim {
        work.copy_from_slice(state.psi.amplitudes());
        // rotate each qubit into its measurement basis
        for k in 0..n {
            let setting = if settings >> (n - 1 - k) & 1 == 1 {
                Setting::B
            } else {
                Setting::A
            };
            let [c, s] = setting_vector(angles.theta(k, setting));
            let stride = 1usize << (n - 1 - k);
            for base in (0..dim).step_by(2 * stride) {
                for i in base..base + stride {
                    let (x0, x1) = (work[i], work[i + stride]);
                    work[i] = x0 * c + x1 * s;
                    work[i + stride] = x1 * c - x0 * s;
                }
            }
        }
        table.extend(work.iter().map(|a| mix(state, a.norm_sqr())));
    }
    ConditionalDistribution::new((1..=n).collect(), table)
}
