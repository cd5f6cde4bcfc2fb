//! Extended horizontal linear complementarity problems over exact rationals.
//!
//! The core is generic over [`Scalar`]; the aliases below fix it to
//! [`Rational`], which is what every property checker and the solver use.

pub mod analysis;
pub mod error;
pub mod exactmath;
pub mod fixtures;
pub mod harness;
pub mod matclass;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod verdict;
pub mod wprops;

pub use error::{Error, Result};
pub use exactmath::{Mat, MathError, Polyhedron};
pub use model::{Branch, Instance, MatrixTuple, Piece, SolutionTuple};
pub use scalar::{Rational, Scalar};
pub use verdict::{Certificate, RepDet, Status, Verdict};

pub type QMat = Mat<Rational>;
pub type QTuple = MatrixTuple<Rational>;
pub type QInstance = Instance<Rational>;
pub type QSolution = SolutionTuple<Rational>;
pub type QPiece = Piece<Rational>;
