//! Dense LP feasibility solver.
//!
//! Phase-1 simplex with Bland's rule on a full tableau. Problems here are
//! desk scale (a few hundred rows, under a hundred free variables), so a
//! dense tableau is simpler and easier to audit than a revised method.
//! Free variables are split into positive and negative parts.

use crate::error::{GptError, Result};
use nalgebra::DMatrix;

const PIVOT_EPS: f64 = 1e-10;

/// Feasibility problem over free real variables: `a.x = b` rows and
/// `a.x <= b` rows.
#[derive(Debug, Clone)]
pub struct LpProblem {
    n_vars: usize,
    eq: Vec<(Vec<f64>, f64)>,
    ub: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Feasible(Vec<f64>),
    Infeasible,
}

impl LpProblem {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            eq: Vec::new(),
            ub: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Add `a . x = b`.
    pub fn eq(&mut self, a: Vec<f64>, b: f64) {
        debug_assert_eq!(a.len(), self.n_vars);
        self.eq.push((a, b));
    }

    /// Add `a . x <= b`.
    pub fn ub(&mut self, a: Vec<f64>, b: f64) {
        debug_assert_eq!(a.len(), self.n_vars);
        self.ub.push((a, b));
    }

    /// Add `a . x >= b`.
    pub fn lb(&mut self, a: Vec<f64>, b: f64) {
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        self.ub(neg, -b);
    }

    /// Run phase-1 simplex. Returns a feasible point or `Infeasible`.
    pub fn solve(&self) -> Result<LpOutcome> {
        let m = self.eq.len() + self.ub.len();
        let n_struct = 2 * self.n_vars; // x = p - q
        let n_slack = self.ub.len();
        let n_art = m;
        let ncols = n_struct + n_slack + n_art;

        // tableau rows: [structural | slack | artificial | rhs]
        let mut t = DMatrix::<f64>::zeros(m, ncols + 1);
        let mut bscale: f64 = 1.0;
        for (i, (a, b)) in self.eq.iter().chain(self.ub.iter()).enumerate() {
            let is_ub = i >= self.eq.len();
            let flip = *b < 0.0;
            let sgn = if flip { -1.0 } else { 1.0 };
            for (j, &aj) in a.iter().enumerate() {
                t[(i, 2 * j)] = sgn * aj;
                t[(i, 2 * j + 1)] = -sgn * aj;
            }
            if is_ub {
                let s = n_struct + (i - self.eq.len());
                t[(i, s)] = sgn;
            }
            t[(i, ncols)] = sgn * b;
            bscale = bscale.max(b.abs());
        }

        // initial basis: slack where it carries +1 and rhs >= 0, else artificial
        let mut basis = vec![0usize; m];
        let mut art_used = vec![false; m];
        for i in 0..m {
            let is_ub = i >= self.eq.len();
            if is_ub && t[(i, n_struct + (i - self.eq.len()))] > 0.5 {
                basis[i] = n_struct + (i - self.eq.len());
            } else {
                let a_col = n_struct + n_slack + i;
                t[(i, a_col)] = 1.0;
                basis[i] = a_col;
                art_used[i] = true;
            }
        }

        // phase-1 objective row: sum of artificial-basic rows
        let mut w = vec![0.0f64; ncols + 1];
        for i in 0..m {
            if art_used[i] {
                for j in 0..=ncols {
                    w[j] += t[(i, j)];
                }
            }
        }

        let max_iters = 200 * (m + ncols + 10);
        let art_start = n_struct + n_slack;
        for _ in 0..max_iters {
            // Bland: smallest non-artificial column with positive reduced cost
            let mut enter = None;
            for j in 0..art_start {
                if w[j] > PIVOT_EPS {
                    enter = Some(j);
                    break;
                }
            }
            let Some(enter) = enter else { break };

            // ratio test, Bland tie-break on basis index
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                let aij = t[(i, enter)];
                if aij > PIVOT_EPS {
                    let ratio = t[(i, ncols)] / aij;
                    let better = ratio < best - PIVOT_EPS
                        || (ratio < best + PIVOT_EPS
                            && leave.map(|l| basis[i] < basis[l]).unwrap_or(false));
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(leave) = leave else {
                // phase-1 objective is bounded below by 0, so an unbounded
                // direction means numerical trouble
                return Err(GptError::LpNumericalFailure(
                    "unbounded phase-1 direction".into(),
                ));
            };

            // pivot
            let piv = t[(leave, enter)];
            for j in 0..=ncols {
                t[(leave, j)] /= piv;
            }
            for i in 0..m {
                if i != leave {
                    let f = t[(i, enter)];
                    if f != 0.0 {
                        for j in 0..=ncols {
                            t[(i, j)] -= f * t[(leave, j)];
                        }
                    }
                }
            }
            let f = w[enter];
            if f != 0.0 {
                for j in 0..=ncols {
                    w[j] -= f * t[(leave, j)];
                }
            }
            basis[leave] = enter;
        }

        // residual infeasibility = current value of the artificial sum
        let mut infeas = 0.0;
        for i in 0..m {
            if basis[i] >= art_start {
                infeas += t[(i, ncols)].max(0.0);
            }
        }
        let feas_tol = 1e-9 * (1.0 + bscale);
        if infeas > feas_tol {
            return Ok(LpOutcome::Infeasible);
        }

        // read off structural solution
        let mut pq = vec![0.0f64; n_struct];
        for i in 0..m {
            if basis[i] < n_struct {
                pq[basis[i]] = t[(i, ncols)];
            }
        }
        let x: Vec<f64> = (0..self.n_vars).map(|j| pq[2 * j] - pq[2 * j + 1]).collect();
        Ok(LpOutcome::Feasible(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible_system() {
        // x + y = 1, x >= 0.2, y >= 0.3
        let mut lp = LpProblem::new(2);
        lp.eq(vec![1.0, 1.0], 1.0);
        lp.lb(vec![1.0, 0.0], 0.2);
        lp.lb(vec![0.0, 1.0], 0.3);
        match lp.solve().unwrap() {
            LpOutcome::Feasible(x) => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!(x[0] >= 0.2 - 1e-9);
                assert!(x[1] >= 0.3 - 1e-9);
            }
            LpOutcome::Infeasible => panic!("should be feasible"),
        }
    }

    #[test]
    fn detects_infeasible_bounds() {
        // x <= 0, x >= 1
        let mut lp = LpProblem::new(1);
        lp.ub(vec![1.0], 0.0);
        lp.lb(vec![1.0], 1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn free_variables_can_go_negative() {
        // x = -3 exactly
        let mut lp = LpProblem::new(1);
        lp.eq(vec![1.0], -3.0);
        match lp.solve().unwrap() {
            LpOutcome::Feasible(x) => assert!((x[0] + 3.0).abs() < 1e-9),
            LpOutcome::Infeasible => panic!("should be feasible"),
        }
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let mut lp = LpProblem::new(2);
        lp.eq(vec![1.0, 1.0], 1.0);
        lp.eq(vec![1.0, 1.0], 2.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));
    }
}
