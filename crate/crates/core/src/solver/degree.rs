use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{det, lp_max, solve_linear, LinearProgram, Mat};
use crate::model::{var_index, Branch, Instance, MatrixTuple};
use crate::scalar::Scalar;
use crate::wprops::r0_w;

pub const MAX_DRAWS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountedSolution {
    pub branch: Branch,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DegreeResult<T: Scalar> {
    pub value: i64,
    /// First block of the regular target `(p, 0, ..., 0)`.
    pub generic_point: Vec<T>,
    pub solutions_counted: Vec<CountedSolution>,
    pub draws: usize,
}

/// One row of `F` restricted to a branch: `coeffs · x = rhs` on the active
/// argument, with `inactive · x - inactive_rhs > 0` required strictly.
struct MinRow<T> {
    active: (usize, T, T),
    inactive: (usize, T, T),
}

/// Active and inactive argument of every min row of `F` on the linear piece
/// where coordinate `i` sits at level `l`: the first `l` mins select their
/// first argument, the rest their second. Each argument is `s * x[idx] + c`.
fn min_rows<T: Scalar>(n: usize, k: usize, d: &[Vec<T>], b: &Branch) -> Vec<MinRow<T>> {
    let mut rows = Vec::with_capacity(k * n);
    for m in 1..=k {
        for i in 0..n {
            let first = if m == 1 {
                (var_index(n, 0, i), T::one(), T::zero())
            } else {
                (var_index(n, m - 1, i), -T::one(), d[m - 2][i].clone())
            };
            let second = (var_index(n, m, i), T::one(), T::zero());
            let (active, inactive) = if m <= b.level(i) { (first, second) } else { (second, first) };
            rows.push(MinRow { active, inactive });
        }
    }
    rows
}

fn eval<T: Scalar>(arg: &(usize, T, T), x: &[T]) -> T {
    arg.1.clone() * x[arg.0].clone() + arg.2.clone()
}

enum BranchSolve {
    Interior(i8),
    Outside,
    Degenerate,
}

fn solve_branch<T: Scalar>(c: &MatrixTuple<T>, d: &[Vec<T>], b: &Branch, p: &[T]) -> BranchSolve {
    let (n, k, len) = (c.n(), c.k(), c.stacked_len());
    let rows = min_rows(n, k, d, b);
    let mut jac = c.equation_rows();
    let mut rhs = p.to_vec();
    for row in &rows {
        let mut coeffs = vec![T::zero(); len];
        coeffs[row.active.0] = row.active.1.clone();
        jac.push(coeffs);
        rhs.push(-row.active.2.clone());
    }
    let jac = Mat::from_rows(jac).expect("rectangular");
    match solve_linear(&jac, &rhs) {
        Ok(x) => {
            let mut on_boundary = false;
            for row in &rows {
                let slack = eval(&row.inactive, &x);
                if slack.negligible() {
                    on_boundary = true;
                } else if slack.is_neg() {
                    return BranchSolve::Outside;
                }
            }
            if on_boundary {
                BranchSolve::Degenerate
            } else {
                BranchSolve::Interior(det(&jac).expect("square").sign())
            }
        }
        Err(_) => {
            let mut lp = LinearProgram::new(len);
            for (r, v) in jac.to_rows().into_iter().zip(rhs) {
                lp.equal(r, v);
            }
            for row in &rows {
                let mut coeffs = vec![T::zero(); len];
                coeffs[row.inactive.0] = -row.inactive.1.clone();
                lp.at_most(coeffs, row.inactive.2.clone());
            }
            if lp_max(&lp).expect("well-formed").is_infeasible() {
                BranchSolve::Outside
            } else {
                BranchSolve::Degenerate
            }
        }
    }
}

/// Degree of `F` at the origin, computed as the signed count of solutions of
/// `F(x) = (p, 0, ..., 0)` for a random regular `p`. Undefined without R0-W.
pub fn degree<T: Scalar>(c: &MatrixTuple<T>, d: &[Vec<T>], seed: u64) -> Result<DegreeResult<T>> {
    Instance::new(c.clone(), d.to_vec(), vec![T::zero(); c.n()])?;
    if r0_w(c).is_no() {
        return Err(Error::NotR0W);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'draw: for draw in 1..=MAX_DRAWS {
        let p: Vec<T> = (0..c.n())
            .map(|_| T::ratio(rng.gen_range(-1000..=1000), rng.gen_range(1..=997)))
            .collect();
        let mut counted = Vec::new();
        for b in Branch::all(c.n(), c.k()) {
            match solve_branch(c, d, &b, &p) {
                BranchSolve::Interior(sign) => counted.push(CountedSolution { branch: b, sign }),
                BranchSolve::Outside => {}
                BranchSolve::Degenerate => continue 'draw,
            }
        }
        let value = counted.iter().map(|s| i64::from(s.sign)).sum();
        return Ok(DegreeResult { value, generic_point: p, solutions_counted: counted, draws: draw });
    }
    Err(Error::GenericityExhausted(MAX_DRAWS))
}
