use super::{Mat, MathError};
use crate::scalar::Scalar;

fn require_square<T: Scalar>(m: &Mat<T>) -> Result<usize, MathError> {
    if !m.is_square() {
        return Err(MathError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows())
}

/// Row index in `from..n` of the largest non-negligible entry in column `col`.
fn pivot_row<T: Scalar>(a: &[Vec<T>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (r, row) in a.iter().enumerate().skip(from) {
        if row[col].negligible() {
            continue;
        }
        match best {
            Some(b) if a[b][col].abs() >= row[col].abs() => {}
            _ => best = Some(r),
        }
    }
    best
}

/// Determinant by fraction-free (Bareiss) elimination. Every division is
/// exact over the rationals.
pub fn det<T: Scalar>(m: &Mat<T>) -> Result<T, MathError> {
    let n = require_square(m)?;
    let mut a = m.to_rows();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n {
        let Some(p) = pivot_row(&a, k, k) else {
            return Ok(T::zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone())
                    / prev.clone();
                a[i][j] = v;
            }
            a[i][k] = T::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Unique solution of `a x = b`, or [`MathError::Singular`].
pub fn solve_linear<T: Scalar>(a: &Mat<T>, b: &[T]) -> Result<Vec<T>, MathError> {
    let n = require_square(a)?;
    if b.len() != n {
        return Err(MathError::Dimension(format!(
            "right-hand side has length {}, expected {n}",
            b.len()
        )));
    }
    let mut aug: Vec<Vec<T>> = a
        .to_rows()
        .into_iter()
        .zip(b)
        .map(|(mut row, bi)| {
            row.push(bi.clone());
            row
        })
        .collect();
    for k in 0..n {
        let p = pivot_row(&aug, k, k).ok_or(MathError::Singular)?;
        aug.swap(p, k);
        let piv = aug[k][k].clone();
        for j in k..=n {
            aug[k][j] = aug[k][j].clone() / piv.clone();
        }
        for i in 0..n {
            if i == k || aug[i][k].is_zero() {
                continue;
            }
            let f = aug[i][k].clone();
            for j in k..=n {
                let v = aug[i][j].clone() - f.clone() * aug[k][j].clone();
                aug[i][j] = v;
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[n].clone()).collect())
}

pub fn inverse<T: Scalar>(m: &Mat<T>) -> Result<Mat<T>, MathError> {
    let n = require_square(m)?;
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        let col = solve_linear(m, &e)?;
        inv.set_column(j, &col);
    }
    Ok(inv)
}

/// Reduced row echelon form; returns the pivot columns.
fn rref<T: Scalar>(a: &mut [Vec<T>], cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(a, c, r) else { continue };
        a.swap(p, r);
        let piv = a[r][c].clone();
        for j in c..cols {
            a[r][j] = a[r][j].clone() / piv.clone();
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                let v = a[i][j].clone() - f.clone() * a[r][j].clone();
                a[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(m: &Mat<T>) -> usize {
    let mut a = m.to_rows();
    rref(&mut a, m.cols()).len()
}

/// A nonzero `x` with `m x = 0`, if the kernel is nontrivial.
pub fn null_vector<T: Scalar>(m: &Mat<T>) -> Option<Vec<T>> {
    let cols = m.cols();
    let mut a = m.to_rows();
    let pivots = rref(&mut a, cols);
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![T::zero(); cols];
    x[free] = T::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -a[r][free].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_i64(rows)
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(m: &Mat<Rational>) -> Rational {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rational::from(0);
        for j in 0..n {
            let minor = Mat::from_fn(n - 1, n - 1, |r, c| {
                m[(r + 1, if c < j { c } else { c + 1 })].clone()
            });
            let term = m[(0, j)].clone() * cofactor_det(&minor);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&Mat::<Rational>::identity(2)).unwrap(), Rational::from(1));
        assert_eq!(det(&q(&[&[1, 1], &[1, 1]])).unwrap(), Rational::from(0));
        let m = q(&[&[1, -2], &[-2, 1]]);
        assert_eq!(cofactor_det(&m), Rational::from(-3));
        assert_eq!(det(&m).unwrap(), Rational::from(-3));
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(det(&q(&[&[1, 2, 3]])), Err(MathError::Dimension(_))));
    }

    #[test]
    fn det_needs_row_swap() {
        let m = q(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(det(&m).unwrap(), cofactor_det(&m));
    }

    #[test]
    fn solve_examples() {
        let x = solve_linear(&Mat::identity(2), &[Rational::from(3), Rational::from(5)]).unwrap();
        assert_eq!(x, vec![Rational::from(3), Rational::from(5)]);
        assert_eq!(
            solve_linear(&q(&[&[1, 1], &[1, 1]]), &[Rational::from(1), Rational::from(0)]),
            Err(MathError::Singular)
        );
        // back substitution: x2 = 1, x1 - 2 x2 = 1
        let x = solve_linear(&q(&[&[1, -2], &[0, 1]]), &[Rational::from(1), Rational::from(1)]).unwrap();
        assert_eq!(x, vec![Rational::from(3), Rational::from(1)]);
        assert!(solve_linear(&q(&[&[1, 0], &[0, 1]]), &[Rational::from(1)]).is_err());
    }

    #[test]
    fn inverse_and_kernel() {
        let m = q(&[&[1, -1], &[0, 1]]);
        assert_eq!(inverse(&m).unwrap(), q(&[&[1, 1], &[0, 1]]));
        let s = q(&[&[1, 2], &[2, 4]]);
        let v = null_vector(&s).unwrap();
        assert!(s.mul_vec(&v).unwrap().iter().all(|x| x == &Rational::from(0)));
        assert!(v.iter().any(|x| x != &Rational::from(0)));
        assert_eq!(null_vector(&m), None);
        assert_eq!(rank(&s), 1);
    }

    #[test]
    fn generic_over_floats() {
        let m = Mat::<f64>::from_i64(&[&[1, -2], &[-2, 1]]);
        assert!((det(&m).unwrap() + 3.0).abs() < 1e-12);
        let x = solve_linear(&Mat::<f64>::from_i64(&[&[1, -2], &[0, 1]]), &[1.0, 1.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }
}
