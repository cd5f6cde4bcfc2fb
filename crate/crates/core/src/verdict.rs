use serde::{Deserialize, Serialize};

use crate::model::{MatrixTuple, SolutionTuple};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Yes,
    No,
    Unknown,
}

/// A column representative given by the tuple index chosen for each column,
/// together with its determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepDet<T> {
    pub choice: Vec<usize>,
    pub det: T,
}

/// Evidence backing a verdict. Every variant can be re-checked by
/// substitution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "data",
    rename_all = "snake_case",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub enum Certificate<T: Scalar> {
    /// All representative determinants have this strict sign.
    CommonSign(i8),
    ZeroRepresentative(RepDet<T>),
    OppositeSigns { first: RepDet<T>, second: RepDet<T> },
    Witness(SolutionTuple<T>),
    Vector(Vec<T>),
    Entry { row: usize, col: usize, value: T },
    Kernel(Vec<T>),
    InverseColumn { column: usize, values: Vec<T> },
    Perturbation { candidate: MatrixTuple<T>, eps_grid: Vec<T> },
    /// Diagonals of nonnegative diagonal matrices `D1, ..., Dk`.
    Diagonal(Vec<Vec<T>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Verdict<T: Scalar> {
    pub property: String,
    pub status: Status,
    pub certificate: Option<Certificate<T>>,
}

impl<T: Scalar> Verdict<T> {
    pub fn yes(property: &str, certificate: Option<Certificate<T>>) -> Self {
        Verdict { property: property.into(), status: Status::Yes, certificate }
    }

    pub fn no(property: &str, certificate: Certificate<T>) -> Self {
        Verdict { property: property.into(), status: Status::No, certificate: Some(certificate) }
    }

    pub fn unknown(property: &str) -> Self {
        Verdict { property: property.into(), status: Status::Unknown, certificate: None }
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::Yes
    }

    pub fn is_no(&self) -> bool {
        self.status == Status::No
    }
}
