//! Dense two-phase simplex with Bland's rule, for the small systems the
//! witness oracle produces (a handful of variables, tens of rows).

use crate::linalg;

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

/// `minimize c·x` subject to `eq` rows (`a·x = b`), `le` rows (`a·x <= b`)
/// and `lower <= x <= upper`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    /// Phase one ended with this total artificial residual.
    Infeasible { residual: f64 },
    Unbounded,
}

struct Tableau {
    /// Rows `0..m` are constraints `[coeffs | rhs]`; row `m` is the cost row.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the cost row over columns `allowed`.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let m = self.basis.len();
        for _ in 0..MAX_PIVOTS {
            let cost = &self.t[m];
            let Some(c) = (0..self.cols).find(|&j| allowed[j] && cost[j] < -COST_EPS) else {
                return true;
            };
            let mut best: Option<(f64, usize)> = None;
            for r in 0..m {
                let a = self.t[r][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    best = match best {
                        None => Some((ratio, r)),
                        Some((br, bi)) => {
                            if ratio < br - 1e-15 || (ratio <= br + 1e-15 && self.basis[r] < self.basis[bi]) {
                                Some((ratio, r))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            match best {
                Some((_, r)) => self.pivot(r, c),
                None => return false,
            }
        }
        true
    }
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Solves with feasibility tolerance `feas_tol` on the phase-one residual.
    /// Every variable must have a finite lower bound.
    pub fn solve(&self, feas_tol: f64) -> LpOutcome {
        let n = self.n_vars();
        assert!(self.lower.iter().all(|l| l.is_finite()), "finite lower bounds required");

        // Shift x = lower + z, z >= 0; finite upper bounds become rows.
        let shift = |a: &[f64], b: f64| b - linalg::dot(a, &self.lower);
        let mut le: Vec<(Vec<f64>, f64)> = self.inequalities.iter().map(|(a, b)| (a.clone(), shift(a, *b))).collect();
        for i in 0..n {
            if self.upper[i].is_finite() {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                le.push((a, self.upper[i] - self.lower[i]));
            }
        }
        let eq: Vec<(Vec<f64>, f64)> = self.equalities.iter().map(|(a, b)| (a.clone(), shift(a, *b))).collect();

        let m = le.len() + eq.len();
        let n_slack = le.len();
        // Artificial for every equality and every <= row with negative rhs.
        let needs_art: Vec<bool> = le.iter().map(|(_, b)| *b < 0.0).chain(eq.iter().map(|_| true)).collect();
        let n_art = needs_art.iter().filter(|&&x| x).count();
        let cols = n + n_slack + n_art;

        let mut t = vec![vec![0.0; cols + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut art = n + n_slack;
        for (r, (a, b)) in le.iter().chain(eq.iter()).enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[r][j] = sign * a[j];
            }
            if r < n_slack {
                t[r][n + r] = sign;
            }
            t[r][cols] = sign * b;
            if needs_art[r] {
                t[r][art] = 1.0;
                basis[r] = art;
                art += 1;
            } else {
                basis[r] = n + r;
            }
        }
        let is_art: Vec<bool> = (0..cols).map(|j| j >= n + n_slack).collect();

        // Phase one: minimize the sum of artificials.
        for r in 0..m {
            if is_art[basis[r]] {
                let (rows, obj) = t.split_at_mut(m);
                for (o, x) in obj[0].iter_mut().zip(&rows[r]) {
                    *o -= x;
                }
                t[m][basis[r]] = 0.0;
            }
        }
        for j in 0..cols {
            if is_art[j] {
                t[m][j] = 0.0;
            }
        }
        let mut tab = Tableau { t, basis, cols };
        let all = vec![true; cols];
        tab.optimize(&all);
        let residual = -tab.t[m][cols];
        if residual > feas_tol {
            return LpOutcome::Infeasible { residual };
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.basis.len() {
            if is_art[tab.basis[r]] {
                let col = (0..cols)
                    .filter(|&j| !is_art[j])
                    .max_by(|&i, &j| tab.t[r][i].abs().total_cmp(&tab.t[r][j].abs()))
                    .filter(|&j| tab.t[r][j].abs() > 1e-9);
                match col {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        // Phase two.
        let m2 = tab.basis.len();
        let mut cost = vec![0.0; cols + 1];
        cost[..n].copy_from_slice(&self.objective);
        for r in 0..m2 {
            let cb = cost[tab.basis[r]];
            if cb != 0.0 {
                for (c, x) in cost.iter_mut().zip(&tab.t[r]) {
                    *c -= cb * x;
                }
            }
        }
        tab.t[m2] = cost;
        let allowed: Vec<bool> = (0..cols).map(|j| !is_art[j]).collect();
        if !tab.optimize(&allowed) {
            return LpOutcome::Unbounded;
        }

        let mut z = vec![0.0; cols];
        for (r, &b) in tab.basis.iter().enumerate() {
            z[b] = tab.rhs(r);
        }
        let x: Vec<f64> = (0..n).map(|i| self.lower[i] + z[i].max(0.0)).collect();
        let value = linalg::dot(&self.objective, &x);
        LpOutcome::Optimal { x, value }
    }
}
