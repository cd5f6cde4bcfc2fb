//! Exhaustive branch enumeration, the degree of the residual map and a
//! floating-point semismooth Newton method.

mod degree;
mod enumerate;
mod newton;

pub use degree::{degree, DegreeResult, CountedSolution};
pub use enumerate::{ehlcp_residual, solve_all, SolutionSet};
pub use newton::{solve_newton, NewtonOutcome};
