//! Small exact linear programs.
//!
//! Dense two-phase simplex over `Ratio<i128>` with Bland's rule. Problems are
//! given in equality form `A x = b, x >= 0`; the sizes used in this crate are
//! a few dozen rows by at most a hundred columns.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, point: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// `A x = b, x >= 0` over `vars` non-negative unknowns.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    vars: usize,
    rows: Vec<(Vec<(usize, Q)>, Q)>,
}

impl LinearProgram {
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Adds `Σ coeff·x = rhs`. Repeated indices are summed.
    pub fn add_equality(&mut self, terms: Vec<(usize, Q)>, rhs: Q) {
        assert!(terms.iter().all(|(j, _)| *j < self.vars), "variable out of range");
        self.rows.push((terms, rhs));
    }

    pub fn minimize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        let mut c = vec![Q::zero(); self.vars];
        for (j, v) in objective {
            c[*j] += v;
        }
        Tableau::build(self).solve(&c)
    }

    pub fn maximize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        let neg: Vec<(usize, Q)> = objective.iter().map(|(j, v)| (*j, -v)).collect();
        match self.minimize(&neg) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal {
                value: -value,
                point,
            },
            other => other,
        }
    }
}

struct Tableau {
    n: usize,
    /// Rows of `[A | I_art | b]`.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.vars;
        let m = lp.rows.len();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m);
        for (i, (terms, rhs)) in lp.rows.iter().enumerate() {
            let mut row = vec![Q::zero(); width];
            for (j, v) in terms {
                row[*j] += v;
            }
            let mut rhs = *rhs;
            if rhs.is_negative() {
                row.iter_mut().for_each(|x| *x = -*x);
                rhs = -rhs;
            }
            row[n + i] = Q::one();
            row[width - 1] = rhs;
            t.push(row);
        }
        Tableau {
            n,
            t,
            basis: (n..n + m).collect(),
        }
    }

    fn width(&self) -> usize {
        self.t.first().map_or(self.n + 1, Vec::len)
    }

    fn pivot(&mut self, cost: &mut [Q], row: usize, col: usize) {
        let p = self.t[row][col];
        for x in self.t[row].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col];
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= f * y;
                }
            }
        }
        let f = cost[col];
        if !f.is_zero() {
            for (x, y) in cost.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= f * y;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex on reduced-cost row `cost` (last entry is minus the
    /// objective value) over columns `< allowed`. Returns false if unbounded.
    fn run(&mut self, cost: &mut [Q], allowed: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(col) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for (i, r) in self.t.iter().enumerate() {
                if r[col].is_positive() {
                    let ratio = r[rhs] / r[col];
                    let better = match &best {
                        None => true,
                        Some((bi, bv)) => {
                            ratio < *bv || (ratio == *bv && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(cost, row, col),
                None => return false,
            }
        }
    }

    fn solve(mut self, c: &[Q]) -> LpOutcome {
        let n = self.n;
        let m = self.t.len();
        let width = self.width();
        let rhs = width - 1;

        // Phase 1: minimise the sum of artificials.
        let mut cost = vec![Q::zero(); width];
        for r in &self.t {
            for j in 0..n {
                cost[j] -= r[j];
            }
            cost[rhs] -= r[rhs];
        }
        self.run(&mut cost, n + m);
        if !cost[rhs].is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining artificials out of the basis or drop redundant rows.
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| !self.t[i][j].is_zero()) {
                    Some(j) => {
                        let mut dummy = vec![Q::zero(); width];
                        self.pivot(&mut dummy, i, j);
                        i += 1;
                    }
                    None => {
                        self.t.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }

        // Phase 2.
        let mut cost = vec![Q::zero(); width];
        cost[..n].copy_from_slice(c);
        for (i, r) in self.t.iter().enumerate() {
            let cb = c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if j < n || j == rhs {
                    cost[j] -= cb * r[j];
                }
            }
        }
        if !self.run(&mut cost, n) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Q::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                point[b] = self.t[i][rhs];
            }
        }
        LpOutcome::Optimal {
            value: -cost[rhs],
            point,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn simple_box() {
        // x + y + s = 1, maximise x + 2y.
        let mut lp = LinearProgram::new(3);
        lp.add_equality(vec![(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))], q(1, 1));
        assert_eq!(lp.maximize(&[(0, q(1, 1)), (1, q(2, 1))]).value(), Some(q(2, 1)));
        assert_eq!(lp.minimize(&[(0, q(1, 1)), (1, q(2, 1))]).value(), Some(q(0, 1)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_equality(vec![(0, q(1, 1))], q(-1, 1));
        assert_eq!(lp.minimize(&[]), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.add_equality(vec![(0, q(1, 1)), (1, q(-1, 1))], q(0, 1));
        assert_eq!(lp.maximize(&[(0, q(1, 1))]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let mut lp = LinearProgram::new(2);
        lp.add_equality(vec![(0, q(1, 1)), (1, q(1, 1))], q(1, 2));
        lp.add_equality(vec![(0, q(2, 1)), (1, q(2, 1))], q(1, 1));
        let out = lp.maximize(&[(1, q(1, 1))]);
        assert_eq!(out.value(), Some(q(1, 2)));
    }

    #[test]
    fn degenerate_transport() {
        // 2x2 doubly stochastic with row/col sums 1/3: entry (0,0) ranges over [0, 1/3].
        let mut lp = LinearProgram::new(4);
        let one = q(1, 1);
        lp.add_equality(vec![(0, one), (1, one)], q(1, 3));
        lp.add_equality(vec![(2, one), (3, one)], q(1, 3));
        lp.add_equality(vec![(0, one), (2, one)], q(1, 3));
        lp.add_equality(vec![(1, one), (3, one)], q(1, 3));
        assert_eq!(lp.minimize(&[(0, one)]).value(), Some(q(0, 1)));
        assert_eq!(lp.maximize(&[(0, one)]).value(), Some(q(1, 3)));
    }
}
