//! Problem instances, candidate solutions and the per-coordinate branch
//! structure of the complementarity chain.
//!
//! An instance asks for `x0, ..., xk` with
//!
//! ```text
//! C0 x0 = q + C1 x1 + ... + Ck xk
//! x0 ∧ x1 = 0,   (d_j - x_j) ∧ x_{j+1} = 0   (1 <= j <= k-1)
//! ```
//!
//! where `∧` is the componentwise minimum. Solution vectors are addressed in
//! stacked form: coordinate `i` of block `j` is entry `j * n + i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{Mat, Polyhedron};
use crate::scalar::Scalar;

pub fn var_index(n: usize, block: usize, i: usize) -> usize {
    block * n + i
}

/// Ordered tuple `(C0, ..., Ck)` of `n x n` matrices, `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "TupleRepr<T>",
    into = "TupleRepr<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct MatrixTuple<T: Scalar> {
    n: usize,
    mats: Vec<Mat<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct TupleRepr<T: Scalar> {
    n: usize,
    k: usize,
    #[serde(rename = "C")]
    mats: Vec<Mat<T>>,
}

impl<T: Scalar> TryFrom<TupleRepr<T>> for MatrixTuple<T> {
    type Error = Error;
    fn try_from(r: TupleRepr<T>) -> Result<Self> {
        check_declared(r.n, r.k, &r.mats)?;
        MatrixTuple::new(r.mats)
    }
}

impl<T: Scalar> From<MatrixTuple<T>> for TupleRepr<T> {
    fn from(t: MatrixTuple<T>) -> Self {
        TupleRepr { n: t.n, k: t.k(), mats: t.mats }
    }
}

fn check_declared<T: Scalar>(n: usize, k: usize, mats: &[Mat<T>]) -> Result<()> {
    if mats.len() != k + 1 {
        return Err(Error::Dimension(format!(
            "k = {k} requires {} matrices, found {}",
            k + 1,
            mats.len()
        )));
    }
    if let Some(m) = mats.iter().find(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::Dimension(format!(
            "n = {n} but a matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

impl<T: Scalar> MatrixTuple<T> {
    /// Like [`MatrixTuple::new`], additionally checking the declared sizes.
    pub fn declared(n: usize, k: usize, mats: Vec<Mat<T>>) -> Result<Self> {
        check_declared(n, k, &mats)?;
        MatrixTuple::new(mats)
    }

    pub fn new(mats: Vec<Mat<T>>) -> Result<Self> {
        if mats.len() < 2 {
            return Err(Error::Dimension(format!(
                "a tuple needs at least two matrices, found {}",
                mats.len()
            )));
        }
        let n = mats[0].rows();
        if let Some(m) = mats.iter().find(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::Dimension(format!(
                "all matrices must be {n}x{n}, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(MatrixTuple { n, mats })
    }

    pub fn from_i64(mats: &[&[&[i64]]]) -> Self {
        MatrixTuple::new(mats.iter().map(|m| Mat::from_i64(m)).collect()).expect("well-formed literal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn mats(&self) -> &[Mat<T>] {
        &self.mats
    }

    pub fn mat(&self, j: usize) -> &Mat<T> {
        &self.mats[j]
    }

    pub fn into_mats(self) -> Vec<Mat<T>> {
        self.mats
    }

    /// Length of the stacked vector `(x0, ..., xk)`.
    pub fn stacked_len(&self) -> usize {
        (self.k() + 1) * self.n
    }

    /// `C0 x0 - C1 x1 - ... - Ck xk`.
    pub fn linear_part(&self, x: &SolutionTuple<T>) -> Result<Vec<T>> {
        self.check_solution_shape(x)?;
        let mut acc = self.mats[0].mul_vec(x.block(0))?;
        for j in 1..=self.k() {
            let term = self.mats[j].mul_vec(x.block(j))?;
            for (a, t) in acc.iter_mut().zip(term) {
                *a = a.clone() - t;
            }
        }
        Ok(acc)
    }

    /// Coefficient rows of `C0 x0 - Σ Cj xj` over the stacked variables.
    pub fn equation_rows(&self) -> Vec<Vec<T>> {
        let n = self.n;
        (0..n)
            .map(|r| {
                let mut row = vec![T::zero(); self.stacked_len()];
                for j in 0..=self.k() {
                    for i in 0..n {
                        let c = self.mats[j][(r, i)].clone();
                        row[var_index(n, j, i)] = if j == 0 { c } else { -c };
                    }
                }
                row
            })
            .collect()
    }

    pub fn check_solution_shape(&self, x: &SolutionTuple<T>) -> Result<()> {
        if x.xs.len() != self.k() + 1 || x.xs.iter().any(|v| v.len() != self.n) {
            return Err(Error::Dimension(format!(
                "expected {} vectors of length {}",
                self.k() + 1,
                self.n
            )));
        }
        Ok(())
    }
}

/// One problem: tuple, `k - 1` positive bound vectors and right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "InstanceRepr<T>",
    into = "InstanceRepr<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct Instance<T: Scalar> {
    tuple: MatrixTuple<T>,
    d: Vec<Vec<T>>,
    q: Vec<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct InstanceRepr<T: Scalar> {
    n: usize,
    k: usize,
    #[serde(rename = "C")]
    mats: Vec<Mat<T>>,
    #[serde(default)]
    d: Vec<Vec<T>>,
    q: Vec<T>,
}

impl<T: Scalar> TryFrom<InstanceRepr<T>> for Instance<T> {
    type Error = Error;
    fn try_from(r: InstanceRepr<T>) -> Result<Self> {
        check_declared(r.n, r.k, &r.mats)?;
        Instance::new(MatrixTuple::new(r.mats)?, r.d, r.q)
    }
}

impl<T: Scalar> From<Instance<T>> for InstanceRepr<T> {
    fn from(i: Instance<T>) -> Self {
        InstanceRepr { n: i.tuple.n, k: i.tuple.k(), mats: i.tuple.mats, d: i.d, q: i.q }
    }
}

impl<T: Scalar> Instance<T> {
    /// Rejects wrong dimensions and bound vectors that are not strictly
    /// positive.
    pub fn new(tuple: MatrixTuple<T>, d: Vec<Vec<T>>, q: Vec<T>) -> Result<Self> {
        let n = tuple.n();
        let k = tuple.k();
        if q.len() != n {
            return Err(Error::Dimension(format!("q has length {}, expected {n}", q.len())));
        }
        if d.len() != k - 1 {
            return Err(Error::Dimension(format!(
                "k = {k} requires {} bound vectors, found {}",
                k - 1,
                d.len()
            )));
        }
        for (j, dj) in d.iter().enumerate() {
            if dj.len() != n {
                return Err(Error::Dimension(format!(
                    "d{} has length {}, expected {n}",
                    j + 1,
                    dj.len()
                )));
            }
            if let Some((i, v)) = dj.iter().enumerate().find(|(_, v)| !v.is_pos()) {
                return Err(Error::NonPositiveBound { index: j + 1, position: i, entry: v.to_string() });
            }
        }
        Ok(Instance { tuple, d, q })
    }

    /// Every bound vector equal to the all-ones vector.
    pub fn with_unit_bounds(tuple: MatrixTuple<T>, q: Vec<T>) -> Result<Self> {
        let d = vec![vec![T::one(); tuple.n()]; tuple.k() - 1];
        Instance::new(tuple, d, q)
    }

    pub fn tuple(&self) -> &MatrixTuple<T> {
        &self.tuple
    }

    /// `d_j` for `1 <= j <= k - 1`.
    pub fn bound(&self, j: usize) -> &[T] {
        &self.d[j - 1]
    }

    pub fn bounds(&self) -> &[Vec<T>] {
        &self.d
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.tuple.n()
    }

    pub fn k(&self) -> usize {
        self.tuple.k()
    }

    pub fn with_q(&self, q: Vec<T>) -> Result<Self> {
        Instance::new(self.tuple.clone(), self.d.clone(), q)
    }
}

/// Candidate solution `(x0, ..., xk)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionTuple<T> {
    xs: Vec<Vec<T>>,
}

impl<T: Scalar> SolutionTuple<T> {
    pub fn new(xs: Vec<Vec<T>>) -> Result<Self> {
        let n = xs.first().map_or(0, Vec::len);
        if xs.len() < 2 || xs.iter().any(|v| v.len() != n) {
            return Err(Error::Dimension("solution tuple needs at least two vectors of equal length".into()));
        }
        Ok(SolutionTuple { xs })
    }

    pub fn from_i64(xs: &[&[i64]]) -> Self {
        SolutionTuple::new(xs.iter().map(|v| v.iter().map(|&a| T::from_i64(a).unwrap()).collect()).collect())
            .expect("well-formed literal")
    }

    pub fn zero(n: usize, k: usize) -> Self {
        SolutionTuple { xs: vec![vec![T::zero(); n]; k + 1] }
    }

    pub fn from_stacked(n: usize, k: usize, v: &[T]) -> Self {
        assert_eq!(v.len(), (k + 1) * n);
        SolutionTuple { xs: v.chunks(n).map(<[T]>::to_vec).collect() }
    }

    pub fn stacked(&self) -> Vec<T> {
        self.xs.iter().flatten().cloned().collect()
    }

    pub fn block(&self, j: usize) -> &[T] {
        &self.xs[j]
    }

    pub fn blocks(&self) -> &[Vec<T>] {
        &self.xs
    }

    pub fn n(&self) -> usize {
        self.xs[0].len()
    }

    pub fn k(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.xs.iter().flatten().all(|v| v.negligible())
    }

    pub fn approx_eq(&self, other: &SolutionTuple<T>) -> bool {
        self.xs.len() == other.xs.len()
            && self
                .xs
                .iter()
                .zip(&other.xs)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y)))
    }
}

/// Which case of the chain is active in each coordinate: level `0` means
/// `x0_i >= 0` with every other block zero; level `l >= 1` means `x0_i = 0`,
/// `x_j,i = d_j,i` below `l`, `x_l,i` free within its bounds and zero above.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Branch {
    levels: Vec<usize>,
}

impl Branch {
    pub fn new(levels: Vec<usize>, k: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidBranch("empty level vector".into()));
        }
        if let Some(l) = levels.iter().find(|&&l| l > k) {
            return Err(Error::InvalidBranch(format!("level {l} exceeds k = {k}")));
        }
        Ok(Branch { levels })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> usize {
        self.levels[i]
    }

    /// All `(k+1)^n` branches in lexicographic order.
    pub fn all(n: usize, k: usize) -> impl Iterator<Item = Branch> {
        let total = (k + 1).pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut levels = vec![0; n];
            for slot in levels.iter_mut().rev() {
                *slot = idx % (k + 1);
                idx /= k + 1;
            }
            Branch { levels }
        })
    }
}

/// Polyhedral cell of the solution set: every point of `polyhedron` solves
/// the instance, and `sample` is one such point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Piece<T: Scalar> {
    pub branch: Branch,
    pub polyhedron: Polyhedron<T>,
    pub sample: SolutionTuple<T>,
    /// The cell is a single point (then `sample` is that point).
    pub is_point: bool,
    /// Other branches whose cell is the same single point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged_branches: Vec<Branch>,
}

/// `x ∧ y = 0`. The min form, the Hadamard form and the inner-product form
/// are all evaluated; for exact scalars they must agree.
pub fn check_complementarity<T: Scalar>(x: &[T], y: &[T]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", x.len(), y.len())));
    }
    let by_min = x.iter().zip(y).all(|(a, b)| T::min_of(a, b).negligible());
    let nonneg = x.iter().chain(y).all(Scalar::is_nonneg);
    let by_hadamard = nonneg && x.iter().zip(y).all(|(a, b)| (a.clone() * b.clone()).negligible());
    let by_inner = nonneg
        && x
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            .negligible();
    if T::EXACT {
        assert!(
            by_min == by_hadamard && by_hadamard == by_inner,
            "complementarity forms disagree"
        );
    }
    Ok(by_min)
}

fn sub_vec<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// True iff `x` solves `inst`.
pub fn verify_solution<T: Scalar>(inst: &Instance<T>, x: &SolutionTuple<T>) -> Result<bool> {
    let tuple = inst.tuple();
    let lhs = tuple.linear_part(x)?;
    if !lhs.iter().zip(inst.q()).all(|(a, b)| a.approx_eq(b)) {
        return Ok(false);
    }
    if !check_complementarity(x.block(0), x.block(1))? {
        return Ok(false);
    }
    for j in 1..tuple.k() {
        let slack = sub_vec(inst.bound(j), x.block(j));
        if !check_complementarity(&slack, x.block(j + 1))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For a verified solution, `x0 ∧ xj = 0` for every `j >= 1`.
pub fn check_chain_lemma<T: Scalar>(inst: &Instance<T>, x: &SolutionTuple<T>) -> Result<bool> {
    if !verify_solution(inst, x)? {
        return Err(Error::Contract("chain check requires a verified solution".into()));
    }
    for j in 1..=inst.k() {
        if !check_complementarity(x.block(0), x.block(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Linear system whose solutions are exactly the solutions of `inst` lying in
/// branch `b`.
pub fn branch_constraints<T: Scalar>(inst: &Instance<T>, b: &Branch) -> Result<Polyhedron<T>> {
    let n = inst.n();
    let k = inst.k();
    if b.levels.len() != n || b.levels.iter().any(|&l| l > k) {
        return Err(Error::InvalidBranch(format!(
            "branch {:?} does not fit n = {n}, k = {k}",
            b.levels
        )));
    }
    let mut p = Polyhedron::new(inst.tuple().stacked_len());
    for (i, &l) in b.levels.iter().enumerate() {
        if l == 0 {
            p.lower(var_index(n, 0, i), T::zero());
            for j in 1..=k {
                p.fix(var_index(n, j, i), T::zero());
            }
            continue;
        }
        p.fix(var_index(n, 0, i), T::zero());
        for j in 1..l {
            p.fix(var_index(n, j, i), inst.bound(j)[i].clone());
        }
        p.lower(var_index(n, l, i), T::zero());
        if l < k {
            p.upper(var_index(n, l, i), inst.bound(l)[i].clone());
        }
        for j in l + 1..=k {
            p.fix(var_index(n, j, i), T::zero());
        }
    }
    for (row, rhs) in inst.tuple().equation_rows().into_iter().zip(inst.q()) {
        p.add_eq(row, rhs.clone());
    }
    Ok(p)
}
