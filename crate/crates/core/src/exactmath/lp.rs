//! Two-phase primal simplex on a dense tableau, Bland's rule throughout.
//!
//! Variables are free unless the program contains a row of the form
//! `-c * x_i <= 0` with `c > 0`; such rows are absorbed as sign bounds so that
//! the common `x >= 0` case does not double the column count.

use serde::{Deserialize, Serialize};

use super::MathError;
use crate::scalar::Scalar;

/// `coeffs · x (= or <=) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn new(coeffs: Vec<T>, rhs: T) -> Self {
        LinearConstraint { coeffs, rhs }
    }

    pub fn lhs(&self, x: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

/// Maximize `objective · x` subject to equality rows and `<=` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub eq_constraints: Vec<LinearConstraint<T>>,
    pub ineq_constraints: Vec<LinearConstraint<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { value: T, witness: Vec<T> },
    Unbounded,
    Infeasible,
}

impl<T> LpOutcome<T> {
    pub fn witness(&self) -> Option<&[T]> {
        match self {
            LpOutcome::Optimal { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn into_witness(self) -> Option<Vec<T>> {
        match self {
            LpOutcome::Optimal { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

impl<T: Scalar> LinearProgram<T> {
    /// Feasibility program (zero objective).
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![T::zero(); num_vars],
            eq_constraints: Vec::new(),
            ineq_constraints: Vec::new(),
        }
    }

    pub fn maximize(mut self, objective: Vec<T>) -> Self {
        self.objective = objective;
        self
    }

    pub fn equal(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.eq_constraints.push(LinearConstraint::new(coeffs, rhs));
        self
    }

    pub fn at_most(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        self.ineq_constraints.push(LinearConstraint::new(coeffs, rhs));
        self
    }

    pub fn at_least(&mut self, coeffs: Vec<T>, rhs: T) -> &mut Self {
        let coeffs = coeffs.into_iter().map(|c| -c).collect();
        self.at_most(coeffs, -rhs)
    }

    /// `x_i >= 0`.
    pub fn nonneg(&mut self, i: usize) -> &mut Self {
        let mut row = vec![T::zero(); self.num_vars];
        row[i] = -T::one();
        self.at_most(row, T::zero())
    }

    /// `x_i = v`.
    pub fn fix(&mut self, i: usize, v: T) -> &mut Self {
        let mut row = vec![T::zero(); self.num_vars];
        row[i] = T::one();
        self.equal(row, v)
    }

    fn validate(&self) -> Result<(), MathError> {
        if self.objective.len() != self.num_vars {
            return Err(MathError::Dimension(format!(
                "objective has length {}, expected {}",
                self.objective.len(),
                self.num_vars
            )));
        }
        for c in self.eq_constraints.iter().chain(&self.ineq_constraints) {
            if c.coeffs.len() != self.num_vars {
                return Err(MathError::Dimension(format!(
                    "constraint row has length {}, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    /// True when `x` satisfies every constraint (up to the scalar tolerance).
    pub fn is_feasible_point(&self, x: &[T]) -> bool {
        x.len() == self.num_vars
            && self.eq_constraints.iter().all(|c| c.lhs(x).approx_eq(&c.rhs))
            && self
                .ineq_constraints
                .iter()
                .all(|c| (c.lhs(x) - c.rhs.clone()).is_nonpos())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

struct Tableau<T> {
    /// `rows x (cols + 1)`; last entry of each row is the right-hand side.
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    cols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.a[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / piv.clone();
            }
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            row[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Maximize `cost · x` from the current basic feasible solution.
    /// `allowed` limits which columns may enter.
    fn run(&mut self, cost: &[T], allowed: usize) -> Phase {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[i][j].is_zero() {
                        r = r - cost[b].clone() * self.a[i][j].clone();
                    }
                }
                if r.is_pos() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_pos() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / self.a[i][c].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        if ratio.approx_eq(lr) {
                            self.basis[i] < self.basis[*li]
                        } else {
                            ratio < *lr
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(r, c);
        }
    }

    fn column_values(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            v[b] = self.rhs(i).clone();
        }
        v
    }
}

/// Solve `p` exactly (for exact scalars). The witness of an optimal outcome
/// satisfies every constraint.
pub fn lp_max<T: Scalar>(p: &LinearProgram<T>) -> Result<LpOutcome<T>, MathError> {
    p.validate()?;
    let nv = p.num_vars;

    let mut nonneg = vec![false; nv];
    let mut general: Vec<&LinearConstraint<T>> = Vec::new();
    for c in &p.ineq_constraints {
        let nz: Vec<usize> = (0..nv).filter(|&i| !c.coeffs[i].negligible()).collect();
        if nz.len() == 1 && c.coeffs[nz[0]].is_neg() && c.rhs.negligible() {
            nonneg[nz[0]] = true;
        } else {
            general.push(c);
        }
    }

    // column layout: one column per nonneg var, two (x+, x-) per free var,
    // then slacks, then artificials
    let mut pos_col = vec![0; nv];
    let mut neg_col: Vec<Option<usize>> = vec![None; nv];
    let mut cols = 0;
    for v in 0..nv {
        pos_col[v] = cols;
        cols += 1;
        if !nonneg[v] {
            neg_col[v] = Some(cols);
            cols += 1;
        }
    }
    let structural = cols;
    let n_slack = general.len();
    let slack_start = structural;
    let art_start = slack_start + n_slack;

    struct Row<T> {
        coeffs: Vec<T>,
        rhs: T,
        slack: Option<(usize, bool)>,
    }
    let expand = |c: &LinearConstraint<T>| -> Vec<T> {
        let mut row = vec![T::zero(); structural];
        for v in 0..nv {
            if c.coeffs[v].is_zero() {
                continue;
            }
            row[pos_col[v]] = c.coeffs[v].clone();
            if let Some(nc) = neg_col[v] {
                row[nc] = -c.coeffs[v].clone();
            }
        }
        row
    };
    let mut rows: Vec<Row<T>> = Vec::new();
    for c in &p.eq_constraints {
        rows.push(Row { coeffs: expand(c), rhs: c.rhs.clone(), slack: None });
    }
    for (s, c) in general.iter().enumerate() {
        rows.push(Row { coeffs: expand(c), rhs: c.rhs.clone(), slack: Some((slack_start + s, true)) });
    }
    for r in rows.iter_mut() {
        if r.rhs.is_neg() {
            r.coeffs.iter_mut().for_each(|v| *v = -v.clone());
            r.rhs = -r.rhs.clone();
            r.slack = r.slack.map(|(c, _)| (c, false));
        }
    }

    let needs_art: Vec<bool> = rows.iter().map(|r| !matches!(r.slack, Some((_, true)))).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let total = art_start + n_art;
    let mut tab = Tableau { a: Vec::with_capacity(rows.len()), basis: Vec::with_capacity(rows.len()), cols: total };
    let mut next_art = art_start;
    for (r, art) in rows.into_iter().zip(&needs_art) {
        let mut line = r.coeffs;
        line.resize(total + 1, T::zero());
        if let Some((sc, positive)) = r.slack {
            line[sc] = if positive { T::one() } else { -T::one() };
        }
        line[total] = r.rhs;
        if *art {
            line[next_art] = T::one();
            tab.basis.push(next_art);
            next_art += 1;
        } else {
            tab.basis.push(r.slack.unwrap().0);
        }
        tab.a.push(line);
    }

    if n_art > 0 {
        let mut cost = vec![T::zero(); total];
        for c in cost.iter_mut().skip(art_start) {
            *c = -T::one();
        }
        // phase 1 is bounded above by zero
        let _ = tab.run(&cost, total);
        let infeasibility: T = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .fold(T::zero(), |acc, (i, _)| acc + tab.rhs(i).clone());
        if infeasibility.is_pos() {
            return Ok(LpOutcome::Infeasible);
        }
        let mut redundant = Vec::new();
        for i in 0..tab.a.len() {
            if tab.basis[i] < art_start {
                continue;
            }
            match (0..art_start).find(|&j| !tab.a[i][j].negligible()) {
                Some(j) => tab.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            tab.a.remove(i);
            tab.basis.remove(i);
        }
        for row in tab.a.iter_mut() {
            let rhs = row[total].clone();
            row.truncate(art_start);
            row.push(rhs);
        }
        tab.cols = art_start;
    }

    let mut cost = vec![T::zero(); tab.cols];
    for v in 0..nv {
        cost[pos_col[v]] = p.objective[v].clone();
        if let Some(nc) = neg_col[v] {
            cost[nc] = -p.objective[v].clone();
        }
    }
    match tab.run(&cost, tab.cols) {
        Phase::Unbounded => Ok(LpOutcome::Unbounded),
        Phase::Optimal => {
            let vals = tab.column_values();
            let witness: Vec<T> = (0..nv)
                .map(|v| match neg_col[v] {
                    Some(nc) => vals[pos_col[v]].clone() - vals[nc].clone(),
                    None => vals[pos_col[v]].clone(),
                })
                .collect();
            let value = p.objective_value(&witness);
            Ok(LpOutcome::Optimal { value, witness })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn bounded_maximum() {
        // max x s.t. x <= 3, -x <= 0
        let mut p = LinearProgram::new(1).maximize(vec![r(1)]);
        p.at_most(vec![r(1)], r(3)).at_most(vec![r(-1)], r(0));
        assert_eq!(lp_max(&p).unwrap(), LpOutcome::Optimal { value: r(3), witness: vec![r(3)] });
    }

    #[test]
    fn infeasible() {
        // max 0 s.t. x <= 0, -x <= -1
        let mut p = LinearProgram::new(1);
        p.at_most(vec![r(1)], r(0)).at_most(vec![r(-1)], r(-1));
        assert_eq!(lp_max(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        // max x s.t. -x <= 0
        let mut p = LinearProgram::new(1).maximize(vec![r(1)]);
        p.at_most(vec![r(-1)], r(0));
        assert_eq!(lp_max(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // max -x - y s.t. x + y = 1, x - y <= 3, y <= 5 with x, y free
        let mut p = LinearProgram::new(2).maximize(vec![r(-1), r(-2)]);
        p.equal(vec![r(1), r(1)], r(1)).at_most(vec![r(1), r(-1)], r(3)).at_most(vec![r(0), r(1)], r(5));
        match lp_max(&p).unwrap() {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(witness, vec![r(2), r(-1)]);
                assert_eq!(value, r(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LinearProgram::new(2).maximize(vec![r(1), r(0)]);
        p.equal(vec![r(1), r(1)], r(2)).equal(vec![r(2), r(2)], r(4)).nonneg(0).nonneg(1);
        assert_eq!(lp_max(&p).unwrap(), LpOutcome::Optimal { value: r(2), witness: vec![r(2), r(0)] });
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let q = |n, d| Rational::new(n, d);
        let mut p = LinearProgram::new(4).maximize(vec![q(3, 4), r(-150), q(1, 50), r(-6)]);
        p.at_most(vec![q(1, 4), r(-60), q(-1, 25), r(9)], r(0))
            .at_most(vec![q(1, 2), r(-90), q(-1, 50), r(3)], r(0))
            .at_most(vec![r(0), r(0), r(1), r(0)], r(1));
        for i in 0..4 {
            p.nonneg(i);
        }
        match lp_max(&p).unwrap() {
            LpOutcome::Optimal { value, witness } => {
                assert_eq!(value, q(1, 20));
                assert!(p.is_feasible_point(&witness));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_rows() {
        let mut p = LinearProgram::<Rational>::new(2);
        p.at_most(vec![r(1)], r(0));
        assert!(lp_max(&p).is_err());
    }
}
