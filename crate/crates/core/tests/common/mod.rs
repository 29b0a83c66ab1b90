//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use bell_hierarchy::inequality::{BellExpression, Outcome, Setting};

/// Local projector vector for a setting angle, written out directly.
fn local(theta: f64, outcome: Outcome) -> [f64; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match outcome {
        Outcome::Zero => [c, s],
        Outcome::One => [-s, c],
    }
}

fn projector(v: [f64; 2]) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| Complex64::new(v[i] * v[j], 0.0))
}

/// `p |ψ><ψ| + (1-p) 1/2^n` as a dense matrix.
pub fn density_matrix(amplitudes: &[Complex64], p: f64) -> DMatrix<Complex64> {
    let d = amplitudes.len();
    assert!(d <= 1 << 8, "dense oracle limited to 8 qubits");
    DMatrix::from_fn(d, d, |i, j| {
        let mixed = if i == j { (1.0 - p) / d as f64 } else { 0.0 };
        amplitudes[i] * amplitudes[j].conj() * p + mixed
    })
}

/// LHS as `Σ c_t tr(ρ Π_t)` with `Π_t` a Kronecker product of 2x2
/// projectors, party 1 as the leftmost factor.
pub fn dense_density_oracle(
    expr: &BellExpression,
    amplitudes: &[Complex64],
    p: f64,
    theta_a: &[f64],
    theta_b: &[f64],
) -> f64 {
    let rho = density_matrix(amplitudes, p);
    expr.terms()
        .iter()
        .map(|t| {
            let mut pi = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            for (k, (&s, &r)) in t.settings().iter().zip(t.outcomes()).enumerate() {
                let theta = match s {
                    Setting::A => theta_a[k],
                    Setting::B => theta_b[k],
                };
                pi = pi.kronecker(&projector(local(theta, r)));
            }
            t.coefficient() as f64 * (&rho * pi).trace().re
        })
        .sum()
}

/// Haar-like random pure state: normalized complex Gaussian vector.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut gauss = || {
        // Box-Muller
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    let mut amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(gauss(), gauss()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

/// Exact maximum of the pure-state LHS over the symmetric angle grid
/// `θ ∈ {2πj/r}` for all four angles.
///
/// Party 1 enters every term through exactly one of its two settings, so
/// for fixed `(θ_a, θ_b)` of parties `2..n` the LHS splits into a function
/// of `θ_a1` plus a function of `θ_b1`, each maximized over its own grid
/// line. This gives the maximum of the full `r^4` grid.
pub fn symmetric_grid_max(expr: &BellExpression, amplitudes: &[Complex64], r: usize) -> f64 {
    let n = expr.n();
    let half = amplitudes.len() / 2;
    let (psi0, psi1) = amplitudes.split_at(half);
    let grid: Vec<f64> = (0..r)
        .map(|j| std::f64::consts::TAU * j as f64 / r as f64)
        .collect();
    // party-1 vectors for both outcomes at every grid angle
    let line: Vec<[[f64; 2]; 2]> = grid
        .iter()
        .map(|&t| [local(t, Outcome::Zero), local(t, Outcome::One)])
        .collect();

    let mut best = f64::NEG_INFINITY;
    for &ta in &grid {
        for &tb in &grid {
            // Q[setting][outcome] = Σ_t c_t (B B^†) restricted to party-1 choice
            let mut q = [[[[0.0f64; 2]; 2]; 2]; 2];
            for t in expr.terms() {
                let mut rest = vec![Complex64::new(1.0, 0.0)];
                for k in 1..n {
                    let theta = match t.settings()[k] {
                        Setting::A => ta,
                        Setting::B => tb,
                    };
                    let v = local(theta, t.outcomes()[k]);
                    rest = rest.iter().flat_map(|&x| [x * v[0], x * v[1]]).collect();
                }
                let b0: Complex64 = rest.iter().zip(psi0).map(|(v, a)| v * a).sum();
                let b1: Complex64 = rest.iter().zip(psi1).map(|(v, a)| v * a).sum();
                let bs = [b0, b1];
                let c = t.coefficient() as f64;
                let qq = &mut q[t.settings()[0].index()][t.outcomes()[0].index()];
                for i in 0..2 {
                    for j in 0..2 {
                        qq[i][j] += c * (bs[i] * bs[j].conj()).re;
                    }
                }
            }
            let quad = |m: &[[f64; 2]; 2], u: [f64; 2]| {
                m[0][0] * u[0] * u[0] + 2.0 * m[0][1] * u[0] * u[1] + m[1][1] * u[1] * u[1]
            };
            let part = |s: usize| {
                line.iter()
                    .map(|l| quad(&q[s][0], l[0]) + quad(&q[s][1], l[1]))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            best = best.max(part(0) + part(1));
        }
    }
    best
}
