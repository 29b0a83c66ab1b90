use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::inequality::build_hierarchy_inequality;
use crate::quantum::StateFamily;
use crate::search::{OptimizerConfig, SymmetricAngles, ViolationSearch};

pub const DEFAULT_BISECTION_TOLERANCE: f64 = 5e-4;

/// A maximum LHS counts as a violation only above this value.
pub const VIOLATION_THRESHOLD: f64 = 1e-9;

/// Visibility above which the noisy family state violates the inequality
/// built for `m`-local models (`k′ = 1`). Column `i = m - 1` of the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub family: StateFamily,
    pub n: usize,
    pub m: usize,
    pub i: usize,
    pub k_prime: usize,
    /// Midpoint of the final bracket.
    pub p_threshold: f64,
    /// Final bisection bracket `[no violation, violation]`.
    pub bracket: [f64; 2],
    pub bisection_rounds: usize,
    pub best_angles: SymmetricAngles,
    pub max_lhs_at_p1: f64,
    pub seed: u64,
}

/// Threshold for the state family, with symmetric angles.
pub fn find_threshold(
    n: usize,
    m: usize,
    family: StateFamily,
    config: &OptimizerConfig,
    bisection_tolerance: f64,
) -> Result<ThresholdResult> {
    let expr = build_hierarchy_inequality(n, m, 1)?;
    let psi = family.state(n)?;
    if bisection_tolerance.is_nan() || bisection_tolerance <= 0.0 {
        return Err(domain("bisection tolerance must be positive"));
    }
    let search = ViolationSearch::run(&expr, &psi, config, true)?;
    let ([lo, hi], rounds) = find_threshold_for(&search, bisection_tolerance)?;
    Ok(ThresholdResult {
        family,
        n,
        m,
        i: m - 1,
        k_prime: 1,
        p_threshold: 0.5 * (lo + hi),
        bracket: [lo, hi],
        bisection_rounds: rounds,
        best_angles: search.symmetric_angles().expect("symmetric search"),
        max_lhs_at_p1: search.max_lhs(1.0),
        seed: config.rng_seed,
    })
}

/// Bisection on `p ∈ [0, 1]` with predicate `max LHS(p) > VIOLATION_THRESHOLD`.
/// Returns the final bracket and the number of halvings.
pub fn find_threshold_for(search: &ViolationSearch, tolerance: f64) -> Result<([f64; 2], usize)> {
    let violates = |p: f64| search.max_lhs(p) > VIOLATION_THRESHOLD;
    if !violates(1.0) {
        return Err(Error::NoViolation {
            max_lhs: search.max_lhs(1.0),
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut rounds = 0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if violates(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        rounds += 1;
    }
    Ok(([lo, hi], rounds))
}

/// Thresholds for every `m = 2..=n` of every requested row, in row-major
/// order. Cells run in parallel; each carries its own outcome.
pub fn reproduce_table(
    family: StateFamily,
    n_list: &[usize],
    config: &OptimizerConfig,
    bisection_tolerance: f64,
) -> Result<Vec<Result<ThresholdResult>>> {
    if let Some(&n) = n_list.iter().find(|&&n| !(2..=8).contains(&n)) {
        return Err(domain(format!("table rows support 2 <= n <= 8, got {n}")));
    }
    config.validate()?;
    let cells: Vec<(usize, usize)> = n_list
        .iter()
        .flat_map(|&n| (2..=n).map(move |m| (n, m)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(n, m)| find_threshold(n, m, family, config, bisection_tolerance))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Structured,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    n: usize,
    i: usize,
    m: usize,
    p_i: String,
    max_lhs_at_p1: String,
    theta_a1: String,
    theta_b1: String,
    theta_a: String,
    theta_b: String,
    seed: u64,
}

/// `x` with `digits` significant digits, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exponent) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes results as CSV (header row first) or as a JSON array.
pub fn write_table<W: Write>(
    results: &[ThresholdResult],
    format: TableFormat,
    mut out: W,
) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in results {
                let f = |x: f64| format_significant(x, 12);
                w.serialize(CsvRow {
                    family: r.family.name(),
                    n: r.n,
                    i: r.i,
                    m: r.m,
                    p_i: f(r.p_threshold),
                    max_lhs_at_p1: f(r.max_lhs_at_p1),
                    theta_a1: f(r.best_angles.theta_a1),
                    theta_b1: f(r.best_angles.theta_b1),
                    theta_a: f(r.best_angles.theta_a_rest),
                    theta_b: f(r.best_angles.theta_b_rest),
                    seed: r.seed,
                })?;
            }
            if results.is_empty() {
                w.write_record([
                    "family",
                    "n",
                    "i",
                    "m",
                    "p_i",
                    "max_lhs_at_p1",
                    "theta_a1",
                    "theta_b1",
                    "theta_a",
                    "theta_b",
                    "seed",
                ])?;
            }
            w.flush()?;
        }
        TableFormat::Structured => {
            serde_json::to_writer_pretty(&mut out, results)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            grid_resolution: 10,
            restarts: 4,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn bisection_matches_closed_form() {
        let r = find_threshold(3, 3, StateFamily::Ghz, &quick(), 1e-6).unwrap();
        // L(p) = p L1 + (1-p) L0 crosses zero at -L0 / (L1 - L0)
        let l0 = -3.0 / 8.0;
        let exact = -l0 / (r.max_lhs_at_p1 - l0);
        assert!((r.p_threshold - exact).abs() < 1e-6);
        assert!(r.bracket[1] - r.bracket[0] <= 1e-6);
        assert_eq!(
            r.bracket[1] - r.bracket[0],
            0.5f64.powi(r.bisection_rounds as i32)
        );
    }

    #[test]
    fn bracket_straddles_sign_change() {
        let config = quick();
        let expr = build_hierarchy_inequality(4, 4, 1).unwrap();
        let search =
            ViolationSearch::run(&expr, &StateFamily::W.state(4).unwrap(), &config, true).unwrap();
        let ([lo, hi], _) = find_threshold_for(&search, DEFAULT_BISECTION_TOLERANCE).unwrap();
        assert!(search.max_lhs(lo) <= VIOLATION_THRESHOLD);
        assert!(search.max_lhs(hi) > VIOLATION_THRESHOLD);
        assert!(hi - lo <= DEFAULT_BISECTION_TOLERANCE);
    }

    #[test]
    fn domain_errors() {
        assert!(find_threshold(4, 5, StateFamily::Ghz, &quick(), 5e-4).is_err());
        assert!(find_threshold(4, 2, StateFamily::Ghz, &quick(), 0.0).is_err());
        assert!(reproduce_table(StateFamily::W, &[9], &quick(), 5e-4).is_err());
    }

    #[test]
    fn table_cells_in_order() {
        let cells = reproduce_table(StateFamily::Ghz, &[3, 2], &quick(), 1e-3).unwrap();
        let nm: Vec<_> = cells
            .iter()
            .map(|c| {
                let r = c.as_ref().unwrap();
                (r.n, r.m, r.i)
            })
            .collect();
        assert_eq!(nm, [(3, 2, 1), (3, 3, 2), (2, 2, 1)]);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.947265625, 12), "0.947265625");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(-0.25, 12), "-0.25");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(1.5e-9, 3), "1.50e-9");
        assert_eq!(
            format_significant(std::f64::consts::TAU, 12),
            "6.28318530718"
        );
    }

    #[test]
    fn csv_and_json_output() {
        let r = find_threshold(3, 2, StateFamily::W, &quick(), 1e-3).unwrap();
        let mut buf = Vec::new();
        write_table(std::slice::from_ref(&r), TableFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,n,i,m,p_i,max_lhs_at_p1,theta_a1,theta_b1,theta_a,theta_b,seed"
        );
        assert!(lines.next().unwrap().starts_with("w,3,1,2,"));

        let mut buf = Vec::new();
        write_table(std::slice::from_ref(&r), TableFormat::Structured, &mut buf).unwrap();
        let back: Vec<ThresholdResult> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, vec![r]);
    }

    #[test]
    fn empty_csv_has_header() {
        let mut buf = Vec::new();
        write_table(&[], TableFormat::Csv, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("family,n,i,m,p_i"));
    }
}
