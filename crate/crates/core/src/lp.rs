//! Exact rational linear programming (two-phase tableau simplex, Bland's rule).
//!
//! All variables are nonnegative. Sizes here are small (one variable per
//! crossing, one row per disk), so a dense tableau over `BigRational` is
//! plenty.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Q, point: Vec<Q> },
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

struct Tableau {
    /// rows x (cols + 1); last column is the right-hand side.
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost . x` over the columns allowed by `allowed`.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[Q], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            // Reduced costs: c_j - c_B B^-1 A_j, read off the current tableau.
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        rc -= &cost[b] * &self.t[i][j];
                    }
                }
                rc.is_negative()
            });
            let Some(j) = entering else { return true };
            let mut best: Option<(Q, usize, usize)> = None;
            for i in 0..self.t.len() {
                if self.t[i][j].is_positive() {
                    let ratio = &self.t[i][self.cols] / &self.t[i][j];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else { return false };
            self.pivot(r, j);
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.num_vars));
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn minimize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        // Column layout: [x (n)] [slack per row (m)] [artificial per row (m)]
        let cols = n + 2 * m;
        let mut t = vec![vec![Q::zero(); cols + 1]; m];
        let mut basis = vec![0; m];
        let mut artificial_used = vec![false; m];
        for (i, c) in self.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sgn = |v: &Q| if flip { -v.clone() } else { v.clone() };
            for (v, a) in &c.coeffs {
                t[i][*v] += sgn(a);
            }
            t[i][cols] = sgn(&c.rhs);
            let cmp = match (c.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (cmp, _) => cmp,
            };
            match cmp {
                Cmp::Le => {
                    t[i][n + i] = Q::one();
                    basis[i] = n + i;
                }
                Cmp::Ge => {
                    t[i][n + i] = -Q::one();
                    t[i][n + m + i] = Q::one();
                    basis[i] = n + m + i;
                    artificial_used[i] = true;
                }
                Cmp::Eq => {
                    t[i][n + m + i] = Q::one();
                    basis[i] = n + m + i;
                    artificial_used[i] = true;
                }
            }
        }
        let mut tab = Tableau { t, basis, cols };
        let is_art = |j: usize| j >= n + m;

        // Phase 1.
        let mut cost1 = vec![Q::zero(); cols];
        for (i, used) in artificial_used.iter().enumerate() {
            if *used {
                cost1[n + m + i] = Q::one();
            }
        }
        let art_ok = |j: usize| !is_art(j) || artificial_used[j - n - m];
        tab.optimize(&cost1, &art_ok);
        let infeasibility: Q = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| is_art(b))
            .map(|(i, _)| tab.t[i][cols].clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for i in 0..m {
            if is_art(tab.basis[i]) {
                if let Some(j) = (0..n + m).find(|&j| !tab.t[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }

        // Phase 2.
        let mut cost2 = vec![Q::zero(); cols];
        for (v, a) in objective {
            cost2[*v] += a.clone();
        }
        if !tab.optimize(&cost2, &|j| !is_art(j)) {
            return LpOutcome::Unbounded;
        }
        let mut point = vec![Q::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < n {
                point[b] = tab.t[i][cols].clone();
            }
        }
        let value = objective.iter().map(|(v, a)| a * &point[*v]).sum();
        LpOutcome::Optimal { value, point }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self.minimize(&[]), LpOutcome::Infeasible)
    }
}
