use serde::{Deserialize, Serialize};

use super::lp::{lp_max, LinearConstraint, LinearProgram, LpOutcome};
use crate::scalar::Scalar;

/// `{ x : E x = e, A x <= a }` in a fixed ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron<T> {
    pub dim: usize,
    pub equalities: Vec<LinearConstraint<T>>,
    pub inequalities: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> Polyhedron<T> {
    pub fn new(dim: usize) -> Self {
        Polyhedron { dim, equalities: Vec::new(), inequalities: Vec::new() }
    }

    pub fn add_eq(&mut self, coeffs: Vec<T>, rhs: T) {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.equalities.push(LinearConstraint::new(coeffs, rhs));
    }

    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.inequalities.push(LinearConstraint::new(coeffs, rhs));
    }

    pub fn unit(&self, i: usize, v: T) -> Vec<T> {
        let mut row = vec![T::zero(); self.dim];
        row[i] = v;
        row
    }

    pub fn fix(&mut self, i: usize, v: T) {
        let row = self.unit(i, T::one());
        self.add_eq(row, v);
    }

    pub fn lower(&mut self, i: usize, v: T) {
        let row = self.unit(i, -T::one());
        self.add_le(row, -v);
    }

    pub fn upper(&mut self, i: usize, v: T) {
        let row = self.unit(i, T::one());
        self.add_le(row, v);
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.program(vec![T::zero(); self.dim]).is_feasible_point(x)
    }

    pub fn program(&self, objective: Vec<T>) -> LinearProgram<T> {
        LinearProgram {
            num_vars: self.dim,
            objective,
            eq_constraints: self.equalities.clone(),
            ineq_constraints: self.inequalities.clone(),
        }
    }

    pub fn maximize(&self, objective: Vec<T>) -> LpOutcome<T> {
        lp_max(&self.program(objective)).expect("constraint rows match the ambient dimension")
    }

    pub fn feasible_point(&self) -> Option<Vec<T>> {
        self.maximize(vec![T::zero(); self.dim]).into_witness()
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    pub fn intersect(&self, other: &Polyhedron<T>) -> Polyhedron<T> {
        assert_eq!(self.dim, other.dim);
        let mut p = self.clone();
        p.equalities.extend(other.equalities.iter().cloned());
        p.inequalities.extend(other.inequalities.iter().cloned());
        p
    }

    /// `{ r : E r = 0, A r <= 0 }`.
    pub fn recession_cone(&self) -> Polyhedron<T> {
        let zero = |c: &LinearConstraint<T>| LinearConstraint::new(c.coeffs.clone(), T::zero());
        Polyhedron {
            dim: self.dim,
            equalities: self.equalities.iter().map(zero).collect(),
            inequalities: self.inequalities.iter().map(zero).collect(),
        }
    }

    /// A nonzero recession direction, if any. Each coordinate direction
    /// `±e_i` is probed with the normalization `±r_i <= 1`.
    pub fn recession_direction(&self) -> Option<Vec<T>> {
        let cone = self.recession_cone();
        for i in 0..self.dim {
            for s in [T::one(), -T::one()] {
                let mut c = cone.clone();
                c.add_le(cone.unit(i, s.clone()), T::one());
                if let LpOutcome::Optimal { value, witness } = c.maximize(cone.unit(i, s)) {
                    if value.is_pos() {
                        return Some(witness);
                    }
                }
            }
        }
        None
    }

    /// Empty sets count as bounded.
    pub fn is_bounded(&self) -> bool {
        self.is_empty() || self.recession_direction().is_none()
    }

    /// The unique point when the polyhedron is a singleton.
    pub fn single_point(&self) -> Option<Vec<T>> {
        let mut point = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let hi = match self.maximize(self.unit(i, T::one())) {
                LpOutcome::Optimal { value, .. } => value,
                _ => return None,
            };
            let lo = match self.maximize(self.unit(i, -T::one())) {
                LpOutcome::Optimal { value, .. } => -value,
                _ => return None,
            };
            if !hi.approx_eq(&lo) {
                return None;
            }
            point.push(hi);
        }
        Some(point)
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
    fn ray_is_unbounded_segment_is_not() {
        let mut ray = Polyhedron::<Rational>::new(2);
        ray.lower(0, r(0));
        ray.fix(1, r(1));
        assert!(!ray.is_bounded());
        assert_eq!(ray.recession_direction(), Some(vec![r(1), r(0)]));
        let mut seg = ray.clone();
        seg.upper(0, r(2));
        assert!(seg.is_bounded());
        assert_eq!(seg.single_point(), None);
        let mut pt = seg.clone();
        pt.fix(0, r(2));
        assert_eq!(pt.single_point(), Some(vec![r(2), r(1)]));
    }

    #[test]
    fn intersection_and_membership() {
        let mut a = Polyhedron::<Rational>::new(1);
        a.lower(0, r(0));
        a.upper(0, r(1));
        let mut b = Polyhedron::<Rational>::new(1);
        b.lower(0, r(2));
        assert!(a.intersect(&b).is_empty());
        assert!(a.contains(&[Rational::new(1, 2)]));
        assert!(!a.contains(&[r(2)]));
    }
}
