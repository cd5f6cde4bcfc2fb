use serde::{Deserialize, Serialize};

use crate::exactmath::{solve_linear, Mat};
use crate::model::{var_index, verify_solution, Instance, SolutionTuple};
use crate::scalar::Scalar;

const ARMIJO_SIGMA: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum NewtonOutcome<T: Scalar> {
    Converged {
        solution: SolutionTuple<T>,
        iterations: usize,
        residual: f64,
        /// The rationalized iterate passed [`verify_solution`] exactly.
        verified: bool,
    },
    Failure {
        reason: String,
        iterations: usize,
    },
}

impl<T: Scalar> NewtonOutcome<T> {
    pub fn solution(&self) -> Option<&SolutionTuple<T>> {
        match self {
            NewtonOutcome::Converged { solution, .. } => Some(solution),
            NewtonOutcome::Failure { .. } => None,
        }
    }
}

struct System {
    n: usize,
    k: usize,
    rows: Vec<Vec<f64>>,
    q: Vec<f64>,
    d: Vec<Vec<f64>>,
}

/// One argument of a min row: `sign * x[idx] + offset`.
type Arg = (usize, f64, f64);

impl System {
    fn new<T: Scalar>(inst: &Instance<T>) -> Self {
        let f = |v: &T| v.to_f64().unwrap_or(f64::NAN);
        System {
            n: inst.n(),
            k: inst.k(),
            rows: inst.tuple().equation_rows().iter().map(|r| r.iter().map(f).collect()).collect(),
            q: inst.q().iter().map(f).collect(),
            d: inst.bounds().iter().map(|v| v.iter().map(f).collect()).collect(),
        }
    }

    fn args(&self, m: usize, i: usize) -> (Arg, Arg) {
        let n = self.n;
        let first = if m == 1 {
            (var_index(n, 0, i), 1.0, 0.0)
        } else {
            (var_index(n, m - 1, i), -1.0, self.d[m - 2][i])
        };
        (first, (var_index(n, m, i), 1.0, 0.0))
    }

    /// `F(x) - (q, 0, ..., 0)` and an element of its generalized Jacobian,
    /// taking the first argument of each min on ties.
    fn linearize(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let len = x.len();
        let mut g = Vec::with_capacity(len);
        let mut jac = Vec::with_capacity(len);
        for (row, q) in self.rows.iter().zip(&self.q) {
            g.push(row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - q);
            jac.push(row.clone());
        }
        for m in 1..=self.k {
            for i in 0..self.n {
                let (a, b) = self.args(m, i);
                let va = a.1 * x[a.0] + a.2;
                let vb = b.1 * x[b.0] + b.2;
                let (arg, v) = if va <= vb { (a, va) } else { (b, vb) };
                let mut row = vec![0.0; len];
                row[arg.0] = arg.1;
                g.push(v);
                jac.push(row);
            }
        }
        (g, jac)
    }

    fn merit(&self, x: &[f64]) -> f64 {
        0.5 * self.linearize(x).0.iter().map(|v| v * v).sum::<f64>()
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped semismooth Newton on `F(x) - (q, 0, ..., 0)` in `f64`. A converged
/// iterate is rationalized and re-verified; `verified` records whether the
/// exact check passed.
pub fn solve_newton<T: Scalar>(
    inst: &Instance<T>,
    start: &SolutionTuple<T>,
    tol: f64,
    max_iter: usize,
) -> NewtonOutcome<T> {
    assert!(tol > 0.0, "tolerance must be positive");
    let sys = System::new(inst);
    let mut x: Vec<f64> = start.stacked().iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    if x.len() != inst.tuple().stacked_len() {
        return NewtonOutcome::Failure { reason: "start has the wrong shape".into(), iterations: 0 };
    }
    for iter in 0..=max_iter {
        let (g, jac) = sys.linearize(&x);
        let residual = inf_norm(&g);
        if !residual.is_finite() {
            return NewtonOutcome::Failure { reason: "non-finite residual".into(), iterations: iter };
        }
        if residual <= tol {
            return finish(inst, &x, iter, residual);
        }
        if iter == max_iter {
            break;
        }
        let jac = Mat::from_rows(jac).expect("square");
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let Ok(step) = solve_linear(&jac, &neg) else {
            return NewtonOutcome::Failure { reason: "singular Jacobian element".into(), iterations: iter };
        };
        let m0 = 0.5 * g.iter().map(|v| v * v).sum::<f64>();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            if sys.merit(&trial) <= (1.0 - 2.0 * ARMIJO_SIGMA * t) * m0 {
                x = trial;
                break;
            }
            t *= 0.5;
            if t < MIN_STEP {
                return NewtonOutcome::Failure { reason: "line search stalled".into(), iterations: iter };
            }
        }
    }
    NewtonOutcome::Failure { reason: format!("no convergence in {max_iter} iterations"), iterations: max_iter }
}

fn finish<T: Scalar>(inst: &Instance<T>, x: &[f64], iterations: usize, residual: f64) -> NewtonOutcome<T> {
    let (n, k) = (inst.n(), inst.k());
    let rounded: Option<Vec<T>> = x.iter().map(|&v| T::from_f64_approx(v)).collect();
    if let Some(v) = rounded {
        let candidate = SolutionTuple::from_stacked(n, k, &v);
        if verify_solution(inst, &candidate).unwrap_or(false) {
            return NewtonOutcome::Converged { solution: candidate, iterations, residual, verified: true };
        }
    }
    let raw: Vec<T> = x.iter().map(|&v| T::from_f64(v).expect("finite")).collect();
    NewtonOutcome::Converged { solution: SolutionTuple::from_stacked(n, k, &raw), iterations, residual, verified: false }
}
