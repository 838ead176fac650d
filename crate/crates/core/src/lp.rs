//! Dense two-phase simplex for `min c^T x` subject to `A x = b`, `x >= 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on the heavily degenerate polytopes that
//! no-disturbance constraints produce. Redundant equality rows are detected
//! at the end of phase one and dropped.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const FEASIBILITY_EPS: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let pv = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= pv;
        }
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        if pr < self.basis.len() {
            self.basis[pr] = pc;
        }
    }

    /// Runs simplex iterations on the cost row (last row) until optimal.
    /// Only columns `< allowed` may enter.
    fn optimize(&mut self, allowed: usize, iterations: &mut usize) -> Result<()> {
        let cost = self.rows;
        loop {
            let entering = (0..allowed).find(|&c| self.at(cost, c) < -COST_EPS);
            let Some(pc) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(pr, pc);
            *iterations += 1;
            if *iterations > MAX_ITERATIONS {
                return Err(Error::NoConvergence(*iterations));
            }
        }
    }
}

/// Minimizes `cost . x` subject to `rows[k] . x = rhs[k]` and `x >= 0`.
pub fn minimize(cost: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<LpSolution> {
    let n = cost.len();
    let m = rows.len();
    assert_eq!(rhs.len(), m, "one right-hand side per row");
    assert!(rows.iter().all(|r| r.len() == n), "rows must match the number of variables");

    // columns: n structural, m artificial, rhs
    let width = n + m + 1;
    let mut data = vec![0.0; (m + 1) * width];
    for (r, (row, &b)) in rows.iter().zip(rhs).enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for c in 0..n {
            data[r * width + c] = sign * row[c];
        }
        data[r * width + n + r] = 1.0;
        data[r * width + width - 1] = sign * b;
    }
    // phase-one cost row: minimize the sum of artificials
    for r in 0..m {
        for c in 0..n {
            data[m * width + c] -= data[r * width + c];
        }
        data[m * width + width - 1] -= data[r * width + width - 1];
    }
    let mut t = Tableau {
        rows: m,
        width,
        data,
        basis: (n..n + m).collect(),
    };
    let mut iterations = 0;
    t.optimize(n, &mut iterations)?;
    let infeasibility = -t.rhs(m);
    let scale = 1.0 + rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
    if infeasibility > FEASIBILITY_EPS * scale {
        return Err(Error::Infeasible);
    }

    // Drive artificial variables out of the basis; rows where that is
    // impossible are linearly dependent on the others and are removed.
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n {
            match (0..n).find(|&c| t.at(r, c).abs() > PIVOT_EPS) {
                Some(c) => {
                    t.pivot(r, c);
                    r += 1;
                }
                None => remove_row(&mut t, r),
            }
        } else {
            r += 1;
        }
    }

    // phase-two cost row
    let m2 = t.rows;
    let w = t.width;
    for c in 0..w {
        t.data[m2 * w + c] = if c < n { cost[c] } else { 0.0 };
    }
    for r in 0..m2 {
        let cb = cost[t.basis[r]];
        if cb != 0.0 {
            for c in 0..w {
                t.data[m2 * w + c] -= cb * t.data[r * w + c];
            }
        }
    }
    t.optimize(n, &mut iterations)?;

    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(r);
        }
    }
    let objective = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, objective, iterations })
}

fn remove_row(t: &mut Tableau, r: usize) {
    let w = t.width;
    t.data.drain(r * w..(r + 1) * w);
    t.basis.remove(r);
    t.rows -= 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_textbook_problem() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let cost = [-1.0, -1.0, 0.0, 0.0];
        let rows = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        let sol = minimize(&cost, &rows, &[4.0, 6.0]).unwrap();
        assert!((sol.objective + 2.8).abs() < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // x + y = 1 stated twice, plus the sum of both
        let rows = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        let sol = minimize(&[1.0, 2.0], &rows, &[1.0, 1.0, 2.0]).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let rows = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(minimize(&[0.0, 0.0], &rows, &[1.0, 2.0]), Err(Error::Infeasible)));
        let rows = vec![vec![1.0, -1.0]];
        assert!(matches!(minimize(&[0.0, -1.0], &rows, &[0.0]), Err(Error::Unbounded)));
    }

    #[test]
    fn negative_rhs_is_normalized() {
        let rows = vec![vec![-1.0, -1.0]];
        let sol = minimize(&[3.0, 1.0], &rows, &[-2.0]).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }
}
