//! Properties of matrix tuples: column W, column W0, R0-W and SSM-W, plus the
//! tuple transformations they are tested against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{det, inverse, lp_max, subsets_by_size, LinearProgram, Mat};
use crate::model::{var_index, MatrixTuple, SolutionTuple};
use crate::scalar::Scalar;
use crate::verdict::{Certificate, RepDet, Verdict};

pub const COLUMN_W: &str = "column-W";
pub const COLUMN_W0: &str = "column-W0";
pub const COLUMN_W_PROBE: &str = "column-W diagonal probe";
pub const R0_W: &str = "R0-W";
pub const SSM_W: &str = "SSM-W";

/// Choice vector of the `index`-th representative; the first coordinate is
/// the most significant digit.
pub fn choice_at(index: usize, n: usize, k: usize) -> Vec<usize> {
    let mut idx = index;
    let mut choice = vec![0; n];
    for slot in choice.iter_mut().rev() {
        *slot = idx % (k + 1);
        idx /= k + 1;
    }
    choice
}

/// Column `i` taken from `C_{choice[i]}`.
pub fn representative<T: Scalar>(c: &MatrixTuple<T>, choice: &[usize]) -> Mat<T> {
    let n = c.n();
    Mat::from_fn(n, n, |r, col| c.mat(choice[col])[(r, col)].clone())
}

/// All `(k+1)^n` column representatives in lexicographic choice order.
pub fn representatives<T: Scalar>(c: &MatrixTuple<T>) -> Vec<Mat<T>> {
    let total = (c.k() + 1).pow(c.n() as u32);
    (0..total).map(|i| representative(c, &choice_at(i, c.n(), c.k()))).collect()
}

pub fn representative_dets<T: Scalar>(c: &MatrixTuple<T>) -> Vec<RepDet<T>> {
    let total = (c.k() + 1).pow(c.n() as u32);
    (0..total)
        .into_par_iter()
        .map(|i| {
            let choice = choice_at(i, c.n(), c.k());
            let det = det(&representative(c, &choice)).expect("square");
            RepDet { choice, det }
        })
        .collect()
}

fn rep_det<T: Scalar>(c: &MatrixTuple<T>, choice: &[usize]) -> RepDet<T> {
    RepDet { choice: choice.to_vec(), det: det(&representative(c, choice)).expect("square") }
}

/// Walks from `from` towards `to` one coordinate at a time and returns the
/// first step across which the determinant changes sign. Both endpoints and
/// every representative on the way must have nonzero determinant.
fn adjacent_pair<T: Scalar>(c: &MatrixTuple<T>, from: RepDet<T>, to: &[usize]) -> (RepDet<T>, RepDet<T>) {
    let sign = from.det.sign();
    let mut cur = from;
    for i in 0..to.len() {
        if cur.choice[i] == to[i] {
            continue;
        }
        let mut choice = cur.choice.clone();
        choice[i] = to[i];
        let next = rep_det(c, &choice);
        if next.det.sign() != sign {
            return (cur, next);
        }
        cur = next;
    }
    unreachable!("endpoint determinants have opposite signs")
}

/// All representative determinants are positive, or all are negative.
pub fn column_w<T: Scalar>(c: &MatrixTuple<T>) -> Verdict<T> {
    let dets = representative_dets(c);
    if let Some(z) = dets.iter().find(|r| r.det.negligible()) {
        return Verdict::no(COLUMN_W, Certificate::ZeroRepresentative(z.clone()));
    }
    let sign = dets[0].det.sign();
    match dets.iter().find(|r| r.det.sign() != sign) {
        None => Verdict::yes(COLUMN_W, Some(Certificate::CommonSign(sign))),
        Some(other) => {
            let (first, second) = adjacent_pair(c, dets[0].clone(), &other.choice);
            Verdict::no(COLUMN_W, Certificate::OppositeSigns { first, second })
        }
    }
}

/// Diagonals `D0, ..., Dk` with `Σ Dj = I` and `det(Σ Cj Dj) = 0`, built from
/// a column-W refutation. An adjacent opposite-sign pair differs in a single
/// column, along which the determinant is affine, so the mixing weight that
/// zeroes it is exact.
pub fn singular_combination<T: Scalar>(c: &MatrixTuple<T>, refutation: &Certificate<T>) -> Option<Vec<Vec<T>>> {
    let (n, k) = (c.n(), c.k());
    let mut ds = vec![vec![T::zero(); n]; k + 1];
    match refutation {
        Certificate::ZeroRepresentative(z) => {
            for (i, &j) in z.choice.iter().enumerate() {
                ds[j][i] = T::one();
            }
        }
        Certificate::OppositeSigns { first, second } => {
            let diff: Vec<usize> = (0..n).filter(|&i| first.choice[i] != second.choice[i]).collect();
            if diff.len() != 1 {
                return None;
            }
            let p = diff[0];
            let s = first.det.clone() / (first.det.clone() - second.det.clone());
            for (i, &j) in first.choice.iter().enumerate() {
                if i != p {
                    ds[j][i] = T::one();
                }
            }
            ds[first.choice[p]][p] = T::one() - s.clone();
            ds[second.choice[p]][p] = s;
        }
        _ => return None,
    }
    Some(ds)
}

/// `det(Σ Cj Dj)` for diagonals `D0, ..., Dk`.
pub fn combination_det<T: Scalar>(c: &MatrixTuple<T>, ds: &[Vec<T>]) -> T {
    let n = c.n();
    let m = Mat::from_fn(n, n, |r, col| {
        (0..=c.k()).fold(T::zero(), |acc, j| acc + c.mat(j)[(r, col)].clone() * ds[j][col].clone())
    });
    det(&m).expect("square")
}

/// Samples nonnegative diagonal tuples `D0, ..., Dk` with positive diagonal
/// sum and reports `No` on a singular combination. Never answers `Yes`.
pub fn column_w_diag_probe<T: Scalar>(c: &MatrixTuple<T>, trials: usize, seed: u64) -> Verdict<T> {
    let (n, k) = (c.n(), c.k());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let mut ds = vec![vec![T::zero(); n]; k + 1];
        if t <= k {
            ds[t] = vec![T::one(); n];
        } else if rng.gen_bool(0.5) {
            for i in 0..n {
                ds[rng.gen_range(0..=k)][i] = T::one();
            }
        } else {
            for i in 0..n {
                for d in ds.iter_mut() {
                    d[i] = T::from_i64(rng.gen_range(0..=4)).unwrap();
                }
                if ds.iter().all(|d| d[i].negligible()) {
                    ds[0][i] = T::one();
                }
            }
        }
        if combination_det(c, &ds).negligible() {
            return Verdict::no(COLUMN_W_PROBE, Certificate::Diagonal(ds));
        }
    }
    Verdict::unknown(COLUMN_W_PROBE)
}

/// `ε = 1, 1/10, 1/100, 1/1000, 1/10^6`.
pub fn default_eps_grid<T: Scalar>() -> Vec<T> {
    [1i64, 10, 100, 1000, 1_000_000].iter().map(|&d| T::ratio(1, d)).collect()
}

/// The all-identity tuple `(I, ..., I)`.
pub fn identity_tuple<T: Scalar>(n: usize, k: usize) -> MatrixTuple<T> {
    MatrixTuple::new(vec![Mat::identity(n); k + 1]).expect("k >= 1")
}

fn perturb<T: Scalar>(c: &MatrixTuple<T>, nn: &MatrixTuple<T>, eps: &T) -> MatrixTuple<T> {
    let mats = c.mats().iter().zip(nn.mats()).map(|(a, b)| a.add(&b.scale(eps)).expect("same shape")).collect();
    MatrixTuple::new(mats).expect("same shape")
}

/// Semi-decision: `No` when representative determinants take both strict
/// signs, `Yes` when the tuple is column W or some candidate `N` makes
/// `C + εN` column W on every grid value, `Unknown` otherwise. `N = 0` in a
/// `Yes` certificate means the tuple is column W itself.
pub fn column_w0<T: Scalar>(c: &MatrixTuple<T>, candidates: &[MatrixTuple<T>], eps_grid: &[T]) -> Result<Verdict<T>> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if eps_grid.iter().any(|e| !e.is_pos()) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid("grid must be positive and strictly decreasing".into()));
    }
    if let Some(bad) = candidates.iter().find(|nn| nn.n() != c.n() || nn.k() != c.k()) {
        return Err(Error::Dimension(format!(
            "candidate has n = {}, k = {}; tuple has n = {}, k = {}",
            bad.n(),
            bad.k(),
            c.n(),
            c.k()
        )));
    }
    let dets = representative_dets(c);
    let pos = dets.iter().find(|r| r.det.is_pos());
    let neg = dets.iter().find(|r| r.det.is_neg());
    if let (Some(p), Some(q)) = (pos, neg) {
        let (first, second) = if p.choice < q.choice { (p, q) } else { (q, p) };
        return Ok(Verdict::no(
            COLUMN_W0,
            Certificate::OppositeSigns { first: first.clone(), second: second.clone() },
        ));
    }
    let grid = eps_grid.to_vec();
    if column_w(c).is_yes() {
        let zero = MatrixTuple::new(vec![Mat::zeros(c.n(), c.n()); c.k() + 1]).expect("k >= 1");
        return Ok(Verdict::yes(COLUMN_W0, Some(Certificate::Perturbation { candidate: zero, eps_grid: grid })));
    }
    for nn in candidates {
        if eps_grid.iter().all(|e| column_w(&perturb(c, nn, e)).is_yes()) {
            return Ok(Verdict::yes(
                COLUMN_W0,
                Some(Certificate::Perturbation { candidate: nn.clone(), eps_grid: grid }),
            ));
        }
    }
    Ok(Verdict::unknown(COLUMN_W0))
}

fn block_row<T: Scalar>(len: usize, idx: usize, v: T) -> Vec<T> {
    let mut row = vec![T::zero(); len];
    row[idx] = v;
    row
}

fn homogeneous_rows<T: Scalar>(c: &MatrixTuple<T>, lp: &mut LinearProgram<T>) {
    for row in c.equation_rows() {
        lp.equal(row, T::zero());
    }
}

/// Solves one support subproblem per subset `α` in size-then-lex order and
/// returns the first feasible witness.
fn first_feasible<T: Scalar>(
    c: &MatrixTuple<T>,
    build: impl Fn(&[usize]) -> LinearProgram<T> + Sync,
) -> Option<SolutionTuple<T>> {
    subsets_by_size(c.n())
        .par_iter()
        .map(|alpha| lp_max(&build(alpha)).expect("well-formed").into_witness())
        .find_first(Option::is_some)
        .flatten()
        .map(|w| SolutionTuple::from_stacked(c.n(), c.k(), &w))
}

/// Only the zero tuple solves `C0 x0 = Σ Cj xj`, `x0 ∧ xj = 0` for all `j`.
pub fn r0_w<T: Scalar>(c: &MatrixTuple<T>) -> Verdict<T> {
    let (n, k, len) = (c.n(), c.k(), c.stacked_len());
    let witness = first_feasible(c, |alpha| {
        let mut lp = LinearProgram::new(len);
        for i in 0..n {
            let on = alpha.contains(&i);
            if on {
                lp.at_most(block_row(len, var_index(n, 0, i), -T::one()), T::zero());
            } else {
                lp.fix(var_index(n, 0, i), T::zero());
            }
            for j in 1..=k {
                if on {
                    lp.fix(var_index(n, j, i), T::zero());
                } else {
                    lp.at_most(block_row(len, var_index(n, j, i), -T::one()), T::zero());
                }
            }
        }
        homogeneous_rows(c, &mut lp);
        lp.equal(vec![T::one(); len], T::one());
        lp
    });
    match witness {
        None => Verdict::yes(R0_W, None),
        Some(w) => Verdict::no(R0_W, Certificate::Witness(w)),
    }
}

/// Only the zero tuple solves `C0 x0 = Σ Cj xj`, `xj >= 0`, `x0 * xj <= 0`.
pub fn ssm_w<T: Scalar>(c: &MatrixTuple<T>) -> Verdict<T> {
    let (n, k, len) = (c.n(), c.k(), c.stacked_len());
    let witness = first_feasible(c, |alpha| {
        let mut lp = LinearProgram::new(len);
        let mut norm = vec![T::one(); len];
        for i in 0..n {
            let on = alpha.contains(&i);
            let s = if on { T::one() } else { -T::one() };
            lp.at_most(block_row(len, var_index(n, 0, i), -s.clone()), T::zero());
            norm[var_index(n, 0, i)] = s;
            for j in 1..=k {
                if on {
                    lp.fix(var_index(n, j, i), T::zero());
                } else {
                    lp.at_most(block_row(len, var_index(n, j, i), -T::one()), T::zero());
                }
            }
        }
        homogeneous_rows(c, &mut lp);
        lp.equal(norm, T::one());
        lp
    });
    match witness {
        None => Verdict::yes(SSM_W, None),
        Some(w) => Verdict::no(SSM_W, Certificate::Witness(w)),
    }
}

/// Nonzero `x` with `C0 x0 = Σ Cj xj`, `xj >= 0` and `x0 * xj <= 0`.
pub fn is_ssm_w_witness<T: Scalar>(c: &MatrixTuple<T>, x: &SolutionTuple<T>) -> bool {
    homogeneous_holds(c, x)
        && !x.is_zero()
        && (1..=c.k()).all(|j| {
            x.block(j)
                .iter()
                .zip(x.block(0))
                .all(|(a, b)| a.is_nonneg() && (a.clone() * b.clone()).is_nonpos())
        })
}

/// Nonzero `x` with `C0 x0 = Σ Cj xj` and `x0 ∧ xj = 0` for every `j`.
pub fn is_r0_w_witness<T: Scalar>(c: &MatrixTuple<T>, x: &SolutionTuple<T>) -> bool {
    homogeneous_holds(c, x)
        && !x.is_zero()
        && (1..=c.k()).all(|j| crate::model::check_complementarity(x.block(0), x.block(j)).unwrap_or(false))
}

fn homogeneous_holds<T: Scalar>(c: &MatrixTuple<T>, x: &SolutionTuple<T>) -> bool {
    c.linear_part(x).map(|v| v.iter().all(Scalar::negligible)).unwrap_or(false)
}

/// `(I, C0⁻¹C1, ..., C0⁻¹Ck)`.
pub fn normalize_tuple<T: Scalar>(c: &MatrixTuple<T>) -> Result<MatrixTuple<T>> {
    let inv = inverse(c.mat(0))?;
    let mut mats = vec![Mat::identity(c.n())];
    for j in 1..=c.k() {
        mats.push(inv.mul(c.mat(j))?);
    }
    MatrixTuple::new(mats)
}

/// The pair `(C0, C1 D1 + ... + Ck Dk)` for nonnegative diagonals `D1..Dk`
/// whose sum has a positive diagonal.
pub fn diagonal_collapse<T: Scalar>(c: &MatrixTuple<T>, ds: &[Vec<T>]) -> Result<MatrixTuple<T>> {
    let n = c.n();
    if ds.len() != c.k() || ds.iter().any(|d| d.len() != n) {
        return Err(Error::InvalidDiagonal(format!("expected {} diagonals of length {n}", c.k())));
    }
    if ds.iter().flatten().any(Scalar::is_neg) {
        return Err(Error::InvalidDiagonal("negative diagonal entry".into()));
    }
    if let Some(i) = (0..n).find(|&i| ds.iter().all(|d| d[i].negligible())) {
        return Err(Error::InvalidDiagonal(format!("diagonal sum vanishes at position {i}")));
    }
    let mut sum = Mat::zeros(n, n);
    for (j, d) in ds.iter().enumerate() {
        sum = sum.add(&c.mat(j + 1).mul(&Mat::diag(d))?)?;
    }
    MatrixTuple::new(vec![c.mat(0).clone(), sum])
}

/// Diagonals `D1, ..., Dk` whose collapse is not column W, derived from a
/// column-W refutation of `c`.
pub fn failing_column_w_collapse<T: Scalar>(c: &MatrixTuple<T>, refutation: &Certificate<T>) -> Option<Vec<Vec<T>>> {
    let (n, k) = (c.n(), c.k());
    let mut ds = vec![vec![T::zero(); n]; k];
    match refutation {
        Certificate::ZeroRepresentative(z) => {
            for (i, &j) in z.choice.iter().enumerate() {
                ds[j.max(1) - 1][i] = T::one();
            }
        }
        Certificate::OppositeSigns { first, second } => {
            let mix = singular_combination(c, refutation)?;
            for i in 0..n {
                let (a, b) = (first.choice[i], second.choice[i]);
                if a == b || (a >= 1 && b >= 1) {
                    for j in 1..=k {
                        ds[j - 1][i] = mix[j][i].clone();
                    }
                    if a == 0 {
                        ds[0][i] = T::one();
                    }
                } else {
                    ds[a.max(b) - 1][i] = T::one();
                }
            }
        }
        _ => return None,
    }
    Some(ds)
}

/// Diagonals `D1, ..., Dk` whose collapse is not SSM-W, built from an SSM-W
/// witness `x` of `c`: where some `xj_i > 0` take `(Dj)_ii = xj_i` and
/// `y_i = 1`, elsewhere `(Dj)_ii = 1` and `y_i = 0`. Then `(x0, y)` refutes
/// the collapse.
pub fn failing_ssm_w_collapse<T: Scalar>(
    c: &MatrixTuple<T>,
    witness: &SolutionTuple<T>,
) -> (Vec<Vec<T>>, SolutionTuple<T>) {
    let (n, k) = (c.n(), c.k());
    let mut ds = vec![vec![T::one(); n]; k];
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        if (1..=k).any(|j| !witness.block(j)[i].negligible()) {
            y[i] = T::one();
            for j in 1..=k {
                ds[j - 1][i] = witness.block(j)[i].clone();
            }
        }
    }
    let pair = SolutionTuple::new(vec![witness.block(0).to_vec(), y]).expect("equal lengths");
    (ds, pair)
}

/// `(PᵀC0P, ..., PᵀCkP)` where `P e_i = e_{p[i]}`, so entry `(i, j)` becomes
/// `C[p[i]][p[j]]`.
pub fn permute_tuple<T: Scalar>(c: &MatrixTuple<T>, p: &[usize]) -> Result<MatrixTuple<T>> {
    let n = c.n();
    let mut seen = vec![false; n];
    if p.len() != n || p.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::InvalidPermutation(format!("{p:?} is not a permutation of 0..{n}")));
    }
    let mats = c.mats().iter().map(|m| Mat::from_fn(n, n, |i, j| m[(p[i], p[j])].clone())).collect();
    MatrixTuple::new(mats)
}
