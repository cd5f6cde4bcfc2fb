//! Single-matrix classes: Z, P, M and strictly semimonotone.

use serde::{Deserialize, Serialize};

use crate::exactmath::{det, inverse, lp_max, null_vector, subsets_by_size, LinearProgram, LpOutcome, Mat};
use crate::scalar::Scalar;
use crate::verdict::{Certificate, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MatrixClassReport<T: Scalar> {
    pub is_z: Verdict<T>,
    pub is_p: Verdict<T>,
    pub is_m: Verdict<T>,
    pub is_ssm: Verdict<T>,
}

pub fn classify<T: Scalar>(m: &Mat<T>) -> MatrixClassReport<T> {
    MatrixClassReport { is_z: z_verdict(m), is_p: is_p(m), is_m: is_m_matrix(m), is_ssm: is_ssm(m) }
}

fn first_positive_off_diagonal<T: Scalar>(m: &Mat<T>) -> Option<(usize, usize)> {
    let n = m.rows();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && m[(i, j)].is_pos())
}

pub fn is_z<T: Scalar>(m: &Mat<T>) -> bool {
    first_positive_off_diagonal(m).is_none()
}

pub fn z_verdict<T: Scalar>(m: &Mat<T>) -> Verdict<T> {
    match first_positive_off_diagonal(m) {
        None => Verdict::yes("Z", None),
        Some((row, col)) => Verdict::no("Z", Certificate::Entry { row, col, value: m[(row, col)].clone() }),
    }
}

/// Decided by principal minors; a `No` carries a nonzero `x` with
/// `x_i (Mx)_i <= 0` for every `i`.
pub fn is_p<T: Scalar>(m: &Mat<T>) -> Verdict<T> {
    assert!(m.is_square(), "is_p needs a square matrix");
    let all_positive = subsets_by_size(m.rows())
        .iter()
        .skip(1)
        .all(|s| det(&m.principal_submatrix(s)).expect("square").is_pos());
    if all_positive {
        return Verdict::yes("P", None);
    }
    let x = p_violation_witness(m).expect("a non-P matrix reverses the sign of some nonzero vector");
    Verdict::no("P", Certificate::Vector(x))
}

/// Searches support and sign patterns for a nonzero `x` with
/// `x * Mx <= 0`. Supports go by size then lexicographically, the first sign
/// of each pattern is `+`.
pub fn p_violation_witness<T: Scalar>(m: &Mat<T>) -> Option<Vec<T>> {
    let n = m.rows();
    for support in subsets_by_size(n).into_iter().skip(1) {
        for mask in 0u64..1 << (support.len() - 1) {
            let sign = |pos: usize| if pos > 0 && mask >> (pos - 1) & 1 == 1 { -T::one() } else { T::one() };
            let mut lp = LinearProgram::new(n);
            let mut norm = vec![T::zero(); n];
            for i in 0..n {
                if !support.contains(&i) {
                    lp.fix(i, T::zero());
                }
            }
            for (pos, &i) in support.iter().enumerate() {
                let s = sign(pos);
                let mut row = vec![T::zero(); n];
                row[i] = -s.clone();
                lp.at_most(row, T::zero());
                lp.at_most(m.row(i).iter().map(|v| v.clone() * s.clone()).collect(), T::zero());
                norm[i] = s;
            }
            lp.equal(norm, T::one());
            if let Some(x) = lp_max(&lp).expect("well-formed").into_witness() {
                return Some(x);
            }
        }
    }
    None
}

/// Strictly semimonotone: no nonzero `x >= 0` has `x * Mx <= 0`. For each
/// support the margin `min x_α` is maximized; a positive margin refutes.
pub fn is_ssm<T: Scalar>(m: &Mat<T>) -> Verdict<T> {
    assert!(m.is_square(), "is_ssm needs a square matrix");
    let n = m.rows();
    for support in subsets_by_size(n).into_iter().skip(1) {
        let t = n;
        let mut obj = vec![T::zero(); n + 1];
        obj[t] = T::one();
        let mut lp = LinearProgram::new(n + 1).maximize(obj);
        let mut norm = vec![T::zero(); n + 1];
        for i in 0..n {
            if !support.contains(&i) {
                lp.fix(i, T::zero());
            }
        }
        for &i in &support {
            let mut row = vec![T::zero(); n + 1];
            row[i] = -T::one();
            row[t] = T::one();
            lp.at_most(row, T::zero());
            let mut mx = m.row(i).to_vec();
            mx.push(T::zero());
            lp.at_most(mx, T::zero());
            norm[i] = T::one();
        }
        lp.equal(norm, T::one());
        if let LpOutcome::Optimal { value, mut witness } = lp_max(&lp).expect("well-formed") {
            if value.is_pos() {
                witness.truncate(n);
                return Verdict::no("SSM", Certificate::Vector(witness));
            }
        }
    }
    Verdict::yes("SSM", None)
}

/// Z matrix with an entrywise nonnegative inverse.
pub fn is_m_matrix<T: Scalar>(m: &Mat<T>) -> Verdict<T> {
    if let Some((row, col)) = first_positive_off_diagonal(m) {
        return Verdict::no("M", Certificate::Entry { row, col, value: m[(row, col)].clone() });
    }
    let inv = match inverse(m) {
        Ok(inv) => inv,
        Err(_) => {
            let v = null_vector(m).expect("singular matrix has a kernel");
            return Verdict::no("M", Certificate::Kernel(v));
        }
    };
    for col in 0..inv.cols() {
        let values = inv.column(col);
        if values.iter().any(Scalar::is_neg) {
            return Verdict::no("M", Certificate::InverseColumn { column: col, values });
        }
    }
    Verdict::yes("M", None)
}

/// `x != 0` and `x_i (Mx)_i <= 0` for all `i`, optionally with `x >= 0`.
pub fn reverses_sign<T: Scalar>(m: &Mat<T>, x: &[T], nonneg: bool) -> bool {
    let mx = m.mul_vec(x).expect("dimensions");
    x.iter().any(|v| !v.negligible())
        && (!nonneg || x.iter().all(Scalar::is_nonneg))
        && x.iter().zip(&mx).all(|(a, b)| (a.clone() * b.clone()).is_nonpos())
}
