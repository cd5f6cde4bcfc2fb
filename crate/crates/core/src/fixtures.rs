//! Hand-picked tuples and instances with known verdicts.

use crate::exactmath::Mat;
use crate::model::{Instance, MatrixTuple};
use crate::{QInstance, QTuple, Rational};

/// `C0 = I`, `C1 = [1 -2; 0 1]`, `C2 = [1 0; -2 1]`. Both blocks are P
/// matrices, yet `((0,0), (1,1), (1,1))` refutes SSM-W.
pub fn p_blocks_without_ssm_w() -> QTuple {
    MatrixTuple::from_i64(&[&[&[1, 0], &[0, 1]], &[&[1, -2], &[0, 1]], &[&[1, 0], &[-2, 1]]])
}

/// `C0 = I`, `C1 = C2 = [1 1; 1 1]`: SSM-W but not column W, since
/// `det(C1) = 0`.
pub fn rank_one_ssm_w() -> QTuple {
    let ones: &[&[i64]] = &[&[1, 1], &[1, 1]];
    MatrixTuple::from_i64(&[&[&[1, 0], &[0, 1]], ones, ones])
}

/// `(I, I)` in dimension `n`.
pub fn identity_pair(n: usize) -> QTuple {
    MatrixTuple::new(vec![Mat::identity(n), Mat::identity(n)]).expect("two matrices")
}

/// `([1], [-1])` with `q = 1`: solutions `(1, 0)` and `(0, 1)` only.
pub fn two_point_instance() -> QInstance {
    let t = MatrixTuple::from_i64(&[&[&[1]], &[&[-1]]]);
    Instance::new(t, vec![], vec![Rational::from(1)]).expect("valid")
}

/// `([1], [0])`: `(0, t)` solves the homogeneous system for every `t >= 0`.
pub fn degenerate_scalar_pair() -> QTuple {
    MatrixTuple::from_i64(&[&[&[1]], &[&[0]]])
}

/// `([1], [1], [1])`, `d = (1)`, `q = -3/2`, solved only by `(0, 1, 1/2)`.
pub fn scalar_chain() -> QInstance {
    let t = MatrixTuple::from_i64(&[&[&[1]], &[&[1]], &[&[1]]]);
    Instance::new(t, vec![vec![Rational::from(1)]], vec![Rational::new(-3, 2)]).expect("valid")
}
