//! Dense matrices, determinants, linear solves and a small simplex engine.
//!
//! Everything is generic over [`Scalar`](crate::Scalar); property checkers
//! instantiate it with [`Rational`](crate::Rational) so that every verdict is
//! exact.

mod linalg;
mod lp;
mod matrix;
mod polyhedron;

pub use linalg::{det, inverse, null_vector, rank, solve_linear};
pub use lp::{lp_max, LinearConstraint, LinearProgram, LpOutcome};
pub use matrix::Mat;
pub use polyhedron::Polyhedron;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
}

/// All subsets of `0..n` ordered by size, then lexicographically.
pub fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u64..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
