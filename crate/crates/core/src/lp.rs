//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the small Chebyshev-approximation programs in this crate (a few
//! thousand rows and columns at most). Every call builds a private tableau.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    /// Primal feasibility and reduced-cost tolerance.
    pub tolerance: f64,
    pub max_pivots: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            tolerance: 1e-9,
            max_pivots: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the caller's sense; meaningful only when optimal.
    pub objective: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<Row>,
}

impl LinearProgram {
    /// `n_vars` variables, all nonnegative until marked free.
    pub fn new(n_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: vec![0.0; n_vars],
            free: vec![false; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.n_vars() {
            return Err(Error::dims(self.n_vars(), coeffs.len()));
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Lp("non-finite constraint data".into()));
        }
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_with(&SimplexOptions::default())
    }

    pub fn solve_with(&self, opts: &SimplexOptions) -> Result<LpSolution> {
        Tableau::build(self, opts.tolerance).run(self, opts)
    }
}

/// Column layout: structural columns (free variables split into a `+` and a
/// `-` column), then one slack/surplus per inequality, then artificials.
struct Tableau {
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_struct: usize,
    first_artificial: usize,
    n_cols: usize,
    /// structural column -> (original variable, sign)
    col_var: Vec<(usize, f64)>,
    tol: f64,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram, tol: f64) -> Self {
        let mut col_var = Vec::new();
        for (j, &free) in lp.free.iter().enumerate() {
            col_var.push((j, 1.0));
            if free {
                col_var.push((j, -1.0));
            }
        }
        let n_struct = col_var.len();
        let n_slack = lp.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        // normalise to nonnegative right-hand sides
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|r| {
                let coeffs: Vec<f64> = col_var.iter().map(|&(j, s)| s * r.coeffs[j]).collect();
                if r.rhs < 0.0 {
                    let rel = match r.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (coeffs.iter().map(|c| -c).collect(), rel, -r.rhs)
                } else {
                    (coeffs, r.relation, r.rhs)
                }
            })
            .collect();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = n_struct + n_slack;
        let n_cols = first_artificial + n_art;

        let mut a = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut slack, mut art) = (n_struct, first_artificial);
        for (coeffs, rel, rhs) in rows {
            let mut row = vec![0.0; n_cols + 1];
            row[..n_struct].copy_from_slice(&coeffs);
            row[n_cols] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = 1.0;
                    basis.push(art);
                    art += 1;
                }
            }
            a.push(row);
        }
        Tableau {
            a,
            basis,
            n_struct,
            first_artificial,
            n_cols,
            col_var,
            tol,
            pivots: 0,
        }
    }

    fn run(mut self, lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
        let n_vars = lp.n_vars();
        // phase 1: minimise the sum of artificials
        if self.first_artificial < self.n_cols {
            let cost: Vec<f64> = (0..self.n_cols)
                .map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 })
                .collect();
            let value = match self.optimise(&cost, self.n_cols, opts)? {
                Some(v) => v,
                None => return Err(Error::Lp("phase one reported unbounded".into())),
            };
            let scale = 1.0 + self.a.iter().map(|r| r[self.n_cols].abs()).fold(0.0, f64::max);
            if value > self.tol * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    x: vec![0.0; n_vars],
                    pivots: self.pivots,
                });
            }
            self.expel_artificials();
        }

        // phase 2
        let sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; self.n_cols];
        for (c, &(j, s)) in cost.iter_mut().zip(&self.col_var) {
            *c = sign * s * lp.objective[j];
        }
        let status = match self.optimise(&cost, self.first_artificial, opts)? {
            Some(_) => LpStatus::Optimal,
            None => LpStatus::Unbounded,
        };

        let mut x = vec![0.0; n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                let (j, s) = self.col_var[b];
                x[j] += s * self.a[i][self.n_cols];
            }
        }
        let objective = x.iter().zip(&lp.objective).map(|(v, c)| v * c).sum();
        Ok(LpSolution {
            status,
            objective,
            x,
            pivots: self.pivots,
        })
    }

    /// Minimises `cost · x` over columns `< allowed`. Returns the optimum, or
    /// `None` when unbounded.
    fn optimise(&mut self, cost: &[f64], allowed: usize, opts: &SimplexOptions) -> Result<Option<f64>> {
        let rhs = self.n_cols;
        loop {
            // reduced costs d_j = c_j - c_B B^-1 A_j; rows already hold B^-1 A
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let d = cost[j]
                    - self
                        .a
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                if d < -self.tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                let value = self
                    .a
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b] * row[rhs])
                    .sum();
                return Ok(Some(value));
            };

            // ratio test, ties broken by the smallest basic index
            let mut leaving: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[j] > self.tol {
                    let ratio = row[rhs] / row[j];
                    let better = match leaving {
                        None => true,
                        Some((k, best)) => {
                            ratio < best - self.tol
                                || (ratio <= best + self.tol && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((i, _)) = leaving else {
                return Ok(None);
            };
            if self.pivots >= opts.max_pivots {
                return Err(Error::Lp(format!("pivot limit {} reached", opts.max_pivots)));
            }
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// After phase one, pivots zero-level artificials out of the basis and
    /// drops rows that turn out to be redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial)
                    .filter(|j| !self.basis.contains(j))
                    .max_by(|&x, &y| self.a[i][x].abs().total_cmp(&self.a[i][y].abs()))
                    .filter(|&j| self.a[i][j].abs() > self.tol);
                match col {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
