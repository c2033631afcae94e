//! Exact linear programming over rationals.
//!
//! Solves `max <c, x>` subject to `<a_i, x> <= b_i` with every `x_j` free.
//! The solver works on a dense tableau with one slack per constraint:
//!
//! 1. each free variable is pivoted into the basis once and never leaves
//!    (its row is excluded from ratio tests);
//! 2. if the resulting basic solution violates some slack, an auxiliary
//!    variable is added to every slack row and driven to zero (phase 1);
//! 3. the objective is optimized over the remaining slack dictionary (phase 2).
//!
//! Both phases use Bland's rule, so the method terminates on degenerate
//! problems. When the feasible region is bounded and full-dimensional the
//! returned witness is a vertex: the `n` nonbasic slacks are tight.

use num_traits::{Signed, Zero};

use crate::linalg::QVector;
use crate::polytope::Halfspace;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub objective: Rational,
    pub witness: QVector,
    /// Indices of constraints that hold with equality at the witness.
    pub tight: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpResult::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Maximizes `<objective, x>` over `{x : <a_i, x> <= b_i}`, `x` free.
pub fn lp_max(objective: &QVector, constraints: &[Halfspace]) -> LpResult {
    let n = objective.len();
    assert!(
        constraints.iter().all(|h| h.normal.len() == n),
        "constraint dimension mismatch"
    );
    let mut t = Tableau::new(n, constraints);
    t.pivot_in_free_variables();
    if !t.phase_one() {
        return LpResult::Infeasible;
    }
    let mut cost = vec![Rational::zero(); t.cols];
    for (j, c) in objective.iter().enumerate() {
        cost[j] = c.clone();
    }
    if !t.optimize(&cost, true) {
        return LpResult::Unbounded;
    }
    let witness = t.primal(n);
    let objective_value = objective.dot(&witness);
    let tight = constraints
        .iter()
        .enumerate()
        .filter(|(_, h)| h.is_tight(&witness))
        .map(|(i, _)| i)
        .collect();
    debug_assert!(constraints.iter().all(|h| h.contains(&witness)));
    LpResult::Optimal(LpSolution {
        objective: objective_value,
        witness,
        tight,
    })
}

struct Tableau {
    n: usize,
    cols: usize,
    aux: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    // Row whose basic variable is an original (free) variable.
    free_row: Vec<bool>,
    // Columns barred from entering: the auxiliary column after phase 1, and
    // free columns that could not be pivoted in (linearly dependent).
    barred: Vec<bool>,
    dependent_free: Vec<usize>,
}

impl Tableau {
    fn new(n: usize, constraints: &[Halfspace]) -> Self {
        let m = constraints.len();
        let cols = n + m + 1;
        let rows = constraints
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let mut row = vec![Rational::zero(); cols];
                row[..n].clone_from_slice(&h.normal.0);
                row[n + i] = Rational::from_integer(1.into());
                row
            })
            .collect();
        let mut barred = vec![false; cols];
        barred[n + m] = true;
        Tableau {
            n,
            cols,
            aux: n + m,
            rows,
            rhs: constraints.iter().map(|h| h.offset.clone()).collect(),
            basis: (0..m).map(|i| n + i).collect(),
            free_row: vec![false; m],
            barred,
            dependent_free: Vec::new(),
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn pivot_in_free_variables(&mut self) {
        for k in 0..self.n {
            let row = (0..self.rows.len()).find(|&i| !self.free_row[i] && !self.rows[i][k].is_zero());
            match row {
                Some(r) => {
                    self.pivot(r, k);
                    self.free_row[r] = true;
                }
                None => {
                    self.barred[k] = true;
                    self.dependent_free.push(k);
                }
            }
        }
    }

    /// Drives the basic solution to feasibility. Returns false if infeasible.
    fn phase_one(&mut self) -> bool {
        let worst = (0..self.rows.len())
            .filter(|&i| !self.free_row[i] && self.rhs[i].is_negative())
            .min_by(|&a, &b| self.rhs[a].cmp(&self.rhs[b]).then(a.cmp(&b)));
        let Some(worst) = worst else {
            return true;
        };
        let minus_one = -Rational::from_integer(1.into());
        for i in 0..self.rows.len() {
            if !self.free_row[i] {
                self.rows[i][self.aux] = minus_one.clone();
            }
        }
        self.barred[self.aux] = false;
        self.pivot(worst, self.aux);

        let mut cost = vec![Rational::zero(); self.cols];
        cost[self.aux] = minus_one;
        let bounded = self.optimize(&cost, false);
        debug_assert!(bounded, "auxiliary problem is bounded by zero");
        let aux_value = self
            .basis
            .iter()
            .position(|&b| b == self.aux)
            .map(|r| self.rhs[r].clone())
            .unwrap_or_else(Rational::zero);
        if aux_value.is_positive() {
            return false;
        }
        if let Some(r) = self.basis.iter().position(|&b| b == self.aux) {
            let entering = (0..self.cols).find(|&j| {
                j != self.aux && !self.basis.contains(&j) && !self.rows[r][j].is_zero()
            });
            match entering {
                Some(j) => self.pivot(r, j),
                None => {
                    // Redundant equality row; drop it.
                    self.rows.remove(r);
                    self.rhs.remove(r);
                    self.basis.remove(r);
                    self.free_row.remove(r);
                }
            }
        }
        for row in self.rows.iter_mut() {
            row[self.aux] = Rational::zero();
        }
        self.barred[self.aux] = true;
        true
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        self.rows
            .iter()
            .zip(&self.basis)
            .fold(cost[j].clone(), |acc, (row, &b)| {
                if cost[b].is_zero() || row[j].is_zero() {
                    acc
                } else {
                    acc - &cost[b] * &row[j]
                }
            })
    }

    /// Primal simplex with Bland's rule. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], check_dependent: bool) -> bool {
        if check_dependent {
            // A dependent free column spans a line inside the feasible set.
            for &k in &self.dependent_free {
                if !self.reduced_cost(cost, k).is_zero() {
                    return false;
                }
            }
        }
        loop {
            let entering = (0..self.cols).find(|&j| {
                !self.barred[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive()
            });
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.free_row[i] || !self.rows[i][e].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][e];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, e);
        }
    }

    fn primal(&self, n: usize) -> QVector {
        let mut x = QVector::zeros(n);
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}
