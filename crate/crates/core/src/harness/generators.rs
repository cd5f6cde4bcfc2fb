use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{det, Mat};
use crate::model::{Instance, MatrixTuple};
use crate::wprops::column_w;
use crate::{QInstance, QMat, QTuple, Rational, Scalar};

const RESAMPLE_BUDGET: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TupleKind {
    General,
    /// Identity-anchored perturbation, left-multiplied by a random invertible
    /// matrix and certified by the column-W checker.
    ColumnW,
    /// `C0⁻¹Cj` is a Z matrix for every `j`.
    ZNormalized,
    /// `C0` is a strictly diagonally dominant Z matrix, hence an M matrix.
    MZero,
    /// `G · (I, B1, ..., Bk)` with positively biased `Bj`.
    SsmWCandidate,
    /// `G · (I, T1, ..., Tk)` with lower triangular `Tj` whose diagonals are
    /// nonnegative and may vanish.
    WeakSign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub k: usize,
    pub kind: TupleKind,
    pub entry_range: (Rational, Rational),
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(n: usize, k: usize, kind: TupleKind, seed: u64) -> Self {
        GeneratorSpec { n, k, kind, entry_range: default_range(), seed }
    }
}

pub fn default_range() -> (Rational, Rational) {
    (Rational::from(-3), Rational::from(3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QMode {
    Any,
    NonNeg,
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DMode {
    Unit,
    Random,
}

pub fn gen_tuple(spec: &GeneratorSpec) -> Result<QTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    gen_tuple_with(&mut rng, spec.n, spec.k, spec.kind, &spec.entry_range)
}

pub fn gen_instance(tuple: &QTuple, q_mode: QMode, d_mode: DMode, seed: u64) -> QInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_instance_with(&mut rng, tuple, q_mode, d_mode)
}

/// Entry in `[lo, hi]` with denominator 1 or 2.
pub fn rand_entry(rng: &mut impl Rng, range: &(Rational, Rational)) -> Rational {
    let den: i64 = if rng.gen_bool(0.75) { 1 } else { 2 };
    let scale = Rational::from(den);
    let lo = (range.0.clone() * scale.clone()).as_big().ceil().to_integer();
    let hi = (range.1.clone() * scale).as_big().floor().to_integer();
    let lo: i64 = lo.try_into().expect("small range");
    let hi: i64 = hi.try_into().expect("small range");
    Rational::new(rng.gen_range(lo..=hi), den)
}

fn rand_matrix(rng: &mut impl Rng, n: usize, range: &(Rational, Rational)) -> QMat {
    Mat::from_fn(n, n, |_, _| rand_entry(rng, range))
}

fn max_abs(range: &(Rational, Rational)) -> Rational {
    let (a, b) = (range.0.abs(), range.1.abs());
    let m = if a > b { a } else { b };
    if m.is_pos() {
        m
    } else {
        Rational::from(1)
    }
}

pub fn rand_invertible(rng: &mut impl Rng, n: usize, range: &(Rational, Rational)) -> Result<QMat> {
    for _ in 0..RESAMPLE_BUDGET {
        let g = rand_matrix(rng, n, range);
        if !det(&g)?.negligible() {
            return Ok(g);
        }
    }
    Err(Error::BudgetExhausted("no invertible matrix drawn".into()))
}

fn left_multiply(g: &QMat, mats: Vec<QMat>) -> Vec<QMat> {
    mats.iter().map(|m| g.mul(m).expect("square")).collect()
}

fn z_matrix(rng: &mut impl Rng, n: usize, range: &(Rational, Rational)) -> QMat {
    let nonpos = (range.0.clone().min(Rational::from(0)), Rational::from(0));
    Mat::from_fn(n, n, |i, j| if i == j { rand_entry(rng, range) } else { rand_entry(rng, &nonpos) })
}

pub fn gen_tuple_with(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    kind: TupleKind,
    range: &(Rational, Rational),
) -> Result<QTuple> {
    if n == 0 || k == 0 {
        return Err(Error::Dimension(format!("need n >= 1 and k >= 1, got n = {n}, k = {k}")));
    }
    let id = QMat::identity(n);
    let big = max_abs(range);
    let mats = match kind {
        TupleKind::General => (0..=k).map(|_| rand_matrix(rng, n, range)).collect(),
        TupleKind::ColumnW => {
            for _ in 0..RESAMPLE_BUDGET {
                let eps = Rational::from(1) / (big.clone() * Rational::from(rng.gen_range(1..=2 * n as i64)));
                let base: Vec<QMat> = (0..=k)
                    .map(|j| if j == 0 { id.clone() } else { id.add(&rand_matrix(rng, n, range).scale(&eps)).unwrap() })
                    .collect();
                let g = rand_invertible(rng, n, range)?;
                let t = MatrixTuple::new(left_multiply(&g, base))?;
                if column_w(&t).is_yes() {
                    return Ok(t);
                }
            }
            return Err(Error::BudgetExhausted("no column-W tuple drawn".into()));
        }
        TupleKind::ZNormalized => {
            let mut mats = vec![id.clone()];
            mats.extend((0..k).map(|_| z_matrix(rng, n, range)));
            if rng.gen_bool(0.5) {
                let g = rand_invertible(rng, n, range)?;
                mats = left_multiply(&g, mats);
            }
            mats
        }
        TupleKind::MZero => {
            let z = z_matrix(rng, n, range);
            let margins: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(1..=4), 2)).collect();
            let c0 = Mat::from_fn(n, n, |i, j| {
                if i == j {
                    (0..n).filter(|&l| l != i).map(|l| z[(i, l)].abs()).sum::<Rational>() + margins[i].clone()
                } else {
                    z[(i, j)].clone()
                }
            });
            let mut mats = vec![c0.clone()];
            for _ in 0..k {
                let mut b = rand_matrix(rng, n, range);
                if rng.gen_bool(0.5) {
                    b = b.add(&id.scale(&(big.clone() * Rational::from(n as i64)))).unwrap();
                }
                mats.push(c0.mul(&b).unwrap());
            }
            mats
        }
        TupleKind::SsmWCandidate => {
            let nonneg = (Rational::from(0), big.clone());
            let mut mats = vec![id.clone()];
            for _ in 0..k {
                let b = if rng.gen_bool(0.5) {
                    rand_matrix(rng, n, &nonneg).add(&id).unwrap()
                } else {
                    rand_matrix(rng, n, range).add(&id.scale(&(big.clone() * Rational::from(n as i64)))).unwrap()
                };
                mats.push(b);
            }
            let g = rand_invertible(rng, n, range)?;
            left_multiply(&g, mats)
        }
        TupleKind::WeakSign => {
            let mut mats = vec![id.clone()];
            for _ in 0..k {
                mats.push(Mat::from_fn(n, n, |i, j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => Rational::from(0),
                    std::cmp::Ordering::Equal => Rational::from(rng.gen_range(0..=2)),
                    std::cmp::Ordering::Greater => rand_entry(rng, range),
                }));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mats = mats.iter().map(|m| Mat::from_fn(n, n, |i, j| m[(perm[i], perm[j])].clone())).collect();
            let g = rand_invertible(rng, n, range)?;
            left_multiply(&g, mats)
        }
    };
    MatrixTuple::new(mats)
}

pub fn gen_q(rng: &mut impl Rng, n: usize, mode: QMode) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=3);
            match mode {
                QMode::Any => Rational::new(rng.gen_range(-5 * den..=5 * den), den),
                QMode::NonNeg => {
                    if rng.gen_bool(0.25) {
                        Rational::from(0)
                    } else {
                        Rational::new(rng.gen_range(0..=5 * den), den)
                    }
                }
                QMode::Positive => Rational::new(rng.gen_range(1..=5 * den), den),
            }
        })
        .collect()
}

pub fn gen_d(rng: &mut impl Rng, n: usize, k: usize, mode: DMode) -> Vec<Vec<Rational>> {
    (1..k)
        .map(|_| {
            (0..n)
                .map(|_| match mode {
                    DMode::Unit => Rational::from(1),
                    DMode::Random => Rational::new(rng.gen_range(1..=8), 2),
                })
                .collect()
        })
        .collect()
}

pub fn gen_instance_with(rng: &mut impl Rng, tuple: &QTuple, q_mode: QMode, d_mode: DMode) -> QInstance {
    let d = gen_d(rng, tuple.n(), tuple.k(), d_mode);
    let q = gen_q(rng, tuple.n(), q_mode);
    Instance::new(tuple.clone(), d, q).expect("generated bounds are positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matclass::{is_m_matrix, is_z};
    use crate::wprops::{column_w0, default_eps_grid, identity_tuple, normalize_tuple};

    #[test]
    fn column_w_kind_is_certified() {
        let t = gen_tuple(&GeneratorSpec::new(2, 2, TupleKind::ColumnW, 7)).unwrap();
        assert!(column_w(&t).is_yes());
    }

    #[test]
    fn deterministic() {
        for kind in [
            TupleKind::General,
            TupleKind::ColumnW,
            TupleKind::ZNormalized,
            TupleKind::MZero,
            TupleKind::SsmWCandidate,
            TupleKind::WeakSign,
        ] {
            let spec = GeneratorSpec::new(3, 2, kind, 11);
            assert_eq!(gen_tuple(&spec).unwrap(), gen_tuple(&spec).unwrap());
        }
        let t = gen_tuple(&GeneratorSpec::new(2, 3, TupleKind::General, 1)).unwrap();
        assert_eq!(gen_instance(&t, QMode::Any, DMode::Random, 5), gen_instance(&t, QMode::Any, DMode::Random, 5));
    }

    #[test]
    fn kinds_keep_their_promises() {
        for seed in 0..20 {
            let z = gen_tuple(&GeneratorSpec::new(3, 2, TupleKind::ZNormalized, seed)).unwrap();
            let nz = normalize_tuple(&z).unwrap();
            assert!((1..=2).all(|j| is_z(nz.mat(j))));
            let m = gen_tuple(&GeneratorSpec::new(3, 2, TupleKind::MZero, seed)).unwrap();
            assert!(is_m_matrix(m.mat(0)).is_yes());
            let w = gen_tuple(&GeneratorSpec::new(3, 2, TupleKind::WeakSign, seed)).unwrap();
            let cands = [identity_tuple(3, 2), MatrixTuple::new(vec![w.mat(0).clone(); 3]).unwrap()];
            assert!(column_w0(&w, &cands, &default_eps_grid()).unwrap().is_yes());
        }
    }

    #[test]
    fn instance_modes() {
        let t = gen_tuple(&GeneratorSpec::new(3, 3, TupleKind::General, 2)).unwrap();
        for seed in 0..20 {
            let pos = gen_instance(&t, QMode::Positive, DMode::Random, seed);
            assert!(pos.q().iter().all(Scalar::is_pos));
            let nn = gen_instance(&t, QMode::NonNeg, DMode::Unit, seed);
            assert!(nn.q().iter().all(Scalar::is_nonneg));
            assert!(pos.bounds().iter().flatten().all(Scalar::is_pos));
            assert_eq!(pos.bounds().len(), 2);
        }
    }
}
