//! Dense two-phase tableau simplex for small equality-form programs
//!
//! ```text
//! maximize c·x  subject to  A x = b,  x >= 0
//! ```
//!
//! Bland's rule picks entering and leaving variables, so degenerate
//! polytopes (the nonsignaling polytope is highly degenerate) cannot cycle.
//! Redundant equality rows are detected after phase one and dropped.

pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Constraint rows, each `cols + 1` wide; the last entry is the RHS.
    rows: Vec<Vec<f64>>,
    /// Reduced costs `c_j - c_B B^-1 A_j`, last entry `-c_B x_B`.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        self.rows[row].iter_mut().for_each(|x| *x /= p);
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                r.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            self.cost
                .iter_mut()
                .zip(&pivot_row)
                .for_each(|(x, y)| *x -= f * y);
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule pivots over columns `0..allowed`. Returns `false` on
    /// an unbounded ray.
    fn optimize(&mut self, allowed: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(col) = (0..allowed).find(|&j| self.cost[j] > FEASIBILITY_TOLERANCE) else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if r[col] > FEASIBILITY_TOLERANCE {
                    let ratio = r[rhs] / r[col];
                    let better = match best {
                        None => true,
                        Some((q, _, b)) => {
                            ratio < q - FEASIBILITY_TOLERANCE
                                || (ratio <= q + FEASIBILITY_TOLERANCE && self.basis[i] < b)
                        }
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves the program. `a` is row-major with `c.len()` columns.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let vars = c.len();
    let m = a.len();
    assert_eq!(b.len(), m, "one right-hand side per row");
    assert!(
        a.iter().all(|r| r.len() == vars),
        "rows must have one entry per variable"
    );

    // phase one: artificial variable per row, maximize -Σ artificials
    let cols = vars + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; cols + 1];
        for (x, &v) in r.iter_mut().zip(row) {
            *x = sign * v;
        }
        r[vars + i] = 1.0;
        r[cols] = sign * bi;
        rows.push(r);
    }
    let mut cost = vec![0.0; cols + 1];
    for r in &rows {
        for j in 0..vars {
            cost[j] += r[j];
        }
        cost[cols] += r[cols];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (vars..cols).collect(),
    };
    t.optimize(vars);
    if t.cost[cols] > FEASIBILITY_TOLERANCE * (1.0 + m as f64) {
        return LpOutcome::Infeasible;
    }

    // drive artificials out of the basis; rows where that is impossible are
    // linear combinations of the others
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= vars {
            match (0..vars).find(|&j| t.rows[i][j].abs() > FEASIBILITY_TOLERANCE) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // phase two
    let mut cost = vec![0.0; cols + 1];
    cost[..vars].copy_from_slice(c);
    for (r, &bv) in t.rows.iter().zip(&t.basis) {
        let cb = c[bv];
        if cb != 0.0 {
            cost.iter_mut().zip(r).for_each(|(x, y)| *x -= cb * y);
        }
    }
    t.cost = cost;
    if !t.optimize(vars) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; vars];
    for (r, &bv) in t.rows.iter().zip(&t.basis) {
        x[bv] = r[cols];
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(out: LpOutcome) -> (Vec<f64>, f64) {
        match out {
            LpOutcome::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_program() {
        // max 3x + 2y, x + y + s1 = 4, x + 3y + s2 = 6
        let a = vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]];
        let (x, v) = optimal(maximize(&a, &[4.0, 6.0], &[3.0, 2.0, 0.0, 0.0]));
        assert!((v - 12.0).abs() < 1e-12);
        assert!((x[0] - 4.0).abs() < 1e-12 && x[1].abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        // x + y = 1 stated three ways, one negated
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![-1.0, -1.0]];
        let (x, v) = optimal(maximize(&a, &[1.0, 2.0, -1.0], &[1.0, 2.0]));
        assert!((v - 2.0).abs() < 1e-12);
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(
            maximize(&a, &[1.0, 2.0], &[1.0, 0.0]),
            LpOutcome::Infeasible
        );
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(maximize(&a, &[0.0], &[1.0, 1.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // Beale's cycling example in equality form with slacks
        let a = vec![
            vec![0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let c = [0.75, -150.0, 0.02, -6.0, 0.0, 0.0, 0.0];
        let (_, v) = optimal(maximize(&a, &[0.0, 0.0, 1.0], &c));
        assert!((v - 0.05).abs() < 1e-12);
    }
}
