use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{branch_constraints, Branch, Instance, MatrixTuple, Piece, SolutionTuple};
use crate::scalar::Scalar;

/// `F(x) = (C0 x0 - Σ Cj xj, x0 ∧ x1, (d1 - x1) ∧ x2, ..., (d_{k-1} - x_{k-1}) ∧ xk)`.
pub fn ehlcp_residual<T: Scalar>(c: &MatrixTuple<T>, d: &[Vec<T>], x: &SolutionTuple<T>) -> Result<Vec<T>> {
    let (n, k) = (c.n(), c.k());
    if d.len() != k - 1 || d.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension(format!("expected {} bound vectors of length {n}", k - 1)));
    }
    let mut out = c.linear_part(x)?;
    out.extend(x.block(0).iter().zip(x.block(1)).map(|(a, b)| T::min_of(a, b)));
    for j in 1..k {
        for i in 0..n {
            let slack = d[j - 1][i].clone() - x.block(j)[i].clone();
            out.push(T::min_of(&slack, &x.block(j + 1)[i]));
        }
    }
    Ok(out)
}

/// Every solution of an instance as a finite union of polyhedral pieces.
/// Branches whose piece is one and the same point are merged into the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SolutionSet<T: Scalar> {
    pub pieces: Vec<Piece<T>>,
}

impl<T: Scalar> SolutionSet<T> {
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn contains(&self, x: &SolutionTuple<T>) -> bool {
        let v = x.stacked();
        self.pieces.iter().any(|p| p.polyhedron.contains(&v))
    }

    /// Samples of the zero-dimensional pieces.
    pub fn points(&self) -> Vec<&SolutionTuple<T>> {
        self.pieces.iter().filter(|p| p.is_point).map(|p| &p.sample).collect()
    }
}

pub fn solve_all<T: Scalar>(inst: &Instance<T>) -> SolutionSet<T> {
    let (n, k) = (inst.n(), inst.k());
    let branches: Vec<Branch> = Branch::all(n, k).collect();
    let found: Vec<Piece<T>> = branches
        .into_par_iter()
        .filter_map(|branch| {
            let polyhedron = branch_constraints(inst, &branch).expect("branch fits the instance");
            let feasible = polyhedron.feasible_point()?;
            let point = polyhedron.single_point();
            let is_point = point.is_some();
            let sample = SolutionTuple::from_stacked(n, k, &point.unwrap_or(feasible));
            Some(Piece { branch, polyhedron, sample, is_point, merged_branches: Vec::new() })
        })
        .collect();
    let mut pieces: Vec<Piece<T>> = Vec::with_capacity(found.len());
    for piece in found {
        if piece.is_point {
            if let Some(prev) = pieces.iter_mut().find(|p| p.is_point && p.sample == piece.sample) {
                prev.merged_branches.push(piece.branch);
                continue;
            }
        }
        pieces.push(piece);
    }
    SolutionSet { pieces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{check_chain_lemma, verify_solution};
    use crate::{QSolution, Rational};

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn residual_examples() {
        let c = fixtures::identity_pair(2);
        let x = QSolution::from_i64(&[&[1, 0], &[0, 1]]);
        assert_eq!(ehlcp_residual(&c, &[], &x).unwrap(), vec![r(1), r(-1), r(0), r(0)]);
        assert_eq!(ehlcp_residual(&c, &[], &QSolution::zero(2, 1)).unwrap(), vec![r(0); 4]);
        let inst = fixtures::scalar_chain();
        let x = QSolution::new(vec![vec![r(0)], vec![r(1)], vec![Rational::new(1, 2)]]).unwrap();
        assert_eq!(
            ehlcp_residual(inst.tuple(), inst.bounds(), &x).unwrap(),
            vec![Rational::new(-3, 2), r(0), r(0)]
        );
        assert!(ehlcp_residual(inst.tuple(), &[], &x).is_err());
    }

    #[test]
    fn solve_examples() {
        let inst = Instance::new(fixtures::identity_pair(2), vec![], vec![r(1), r(-1)]).unwrap();
        let s = solve_all(&inst);
        assert_eq!(s.len(), 1);
        assert!(s.pieces[0].is_point);
        assert_eq!(s.pieces[0].sample, QSolution::from_i64(&[&[1, 0], &[0, 1]]));

        let s = solve_all(&fixtures::two_point_instance());
        let pts: Vec<QSolution> = s.points().into_iter().cloned().collect();
        assert_eq!(pts, vec![QSolution::from_i64(&[&[1], &[0]]), QSolution::from_i64(&[&[0], &[1]])]);

        let inst = fixtures::scalar_chain();
        let s = solve_all(&inst);
        assert_eq!(s.len(), 1);
        let x = &s.pieces[0].sample;
        assert_eq!(x, &QSolution::new(vec![vec![r(0)], vec![r(1)], vec![Rational::new(1, 2)]]).unwrap());
        assert!(verify_solution(&inst, x).unwrap());
        assert!(check_chain_lemma(&inst, x).unwrap());
    }

    #[test]
    fn shared_points_are_merged() {
        // q = 0 with (I, I): the origin lies in every branch.
        let inst = Instance::new(fixtures::identity_pair(2), vec![], vec![r(0), r(0)]).unwrap();
        let s = solve_all(&inst);
        assert_eq!(s.len(), 1);
        assert_eq!(s.pieces[0].merged_branches.len(), 3);
    }

    #[test]
    fn ray_piece_is_not_a_point() {
        let inst = Instance::new(fixtures::degenerate_scalar_pair(), vec![], vec![r(0)]).unwrap();
        let s = solve_all(&inst);
        assert!(s.pieces.iter().any(|p| !p.is_point));
        assert!(s.contains(&QSolution::from_i64(&[&[0], &[7]])));
        assert!(!s.contains(&QSolution::from_i64(&[&[1], &[7]])));
    }
}
