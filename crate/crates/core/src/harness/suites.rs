use std::collections::BTreeMap;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{default_range, gen_d, gen_instance_with, gen_tuple_with, DMode, QMode, TupleKind};
use super::report::{FailureRecord, FixtureCheck, SuiteReport};
use crate::analysis::{is_bounded, is_connected, is_unique, piece_graph};
use crate::error::{Error, Result};
use crate::exactmath::{det, inverse, null_vector, Mat};
use crate::fixtures;
use crate::matclass::{is_m_matrix, is_p, is_ssm};
use crate::model::{check_chain_lemma, verify_solution, Instance, MatrixTuple, SolutionTuple};
use crate::solver::{degree, solve_all, SolutionSet};
use crate::verdict::{Certificate, Status};
use crate::wprops::{
    column_w, column_w0, default_eps_grid, diagonal_collapse, failing_column_w_collapse, failing_ssm_w_collapse,
    identity_tuple, is_ssm_w_witness, normalize_tuple, permute_tuple, representative, r0_w, ssm_w,
};
use crate::{QInstance, QSolution, QTuple, Rational, Scalar};

/// `(q, d)` pairs drawn per tuple.
const SAMPLES: usize = 3;
const COLUMN_W_SAMPLES: usize = 5;
const DEGREE_SEEDS: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    ColumnWUnique,
    PairPMatrix,
    R0WBounded,
    DegreeExistence,
    SsmWNormalForm,
    ColumnWImpliesSsmW,
    SsmWCollapse,
    ColumnWCollapse,
    ZEquivalence,
    SsmWExistence,
    MMatrixUnique,
    MMatrixConnected,
    W0Connected,
}

impl SuiteId {
    pub const ALL: [SuiteId; 13] = [
        SuiteId::ColumnWUnique,
        SuiteId::PairPMatrix,
        SuiteId::R0WBounded,
        SuiteId::DegreeExistence,
        SuiteId::SsmWNormalForm,
        SuiteId::ColumnWImpliesSsmW,
        SuiteId::SsmWCollapse,
        SuiteId::ColumnWCollapse,
        SuiteId::ZEquivalence,
        SuiteId::SsmWExistence,
        SuiteId::MMatrixUnique,
        SuiteId::MMatrixConnected,
        SuiteId::W0Connected,
    ];

    /// Short identifier accepted on the command line.
    pub fn code(self) -> &'static str {
        match self {
            SuiteId::ColumnWUnique => "S-T21",
            SuiteId::PairPMatrix => "S-T22",
            SuiteId::R0WBounded => "S-T31",
            SuiteId::DegreeExistence => "S-T32",
            SuiteId::SsmWNormalForm => "S-P41",
            SuiteId::ColumnWImpliesSsmW => "S-T41",
            SuiteId::SsmWCollapse => "S-T42",
            SuiteId::ColumnWCollapse => "S-T43",
            SuiteId::ZEquivalence => "S-T44",
            SuiteId::SsmWExistence => "S-T45",
            SuiteId::MMatrixUnique => "S-T46",
            SuiteId::MMatrixConnected => "S-T51",
            SuiteId::W0Connected => "S-T52",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::ColumnWUnique => "column-w-unique",
            SuiteId::PairPMatrix => "pair-p-matrix",
            SuiteId::R0WBounded => "r0-w-bounded",
            SuiteId::DegreeExistence => "degree-existence",
            SuiteId::SsmWNormalForm => "ssm-w-normal-form",
            SuiteId::ColumnWImpliesSsmW => "column-w-implies-ssm-w",
            SuiteId::SsmWCollapse => "ssm-w-collapse",
            SuiteId::ColumnWCollapse => "column-w-collapse",
            SuiteId::ZEquivalence => "z-equivalence",
            SuiteId::SsmWExistence => "ssm-w-existence",
            SuiteId::MMatrixUnique => "m-matrix-unique",
            SuiteId::MMatrixConnected => "m-matrix-connected",
            SuiteId::W0Connected => "w0-connected",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            SuiteId::ColumnWUnique => "column W => exactly one solution for every (q, d); for k = 1 also C0^-1 C1 is P",
            SuiteId::PairPMatrix => "for pairs: column W <=> C0 invertible with C0^-1 C1 a P matrix <=> unique solutions",
            SuiteId::R0WBounded => "R0-W => every solution set is bounded, and solutions obey the extended chain",
            SuiteId::DegreeExistence => "R0-W and nonzero degree => nonempty bounded solution set",
            SuiteId::SsmWNormalForm => {
                "SSM-W => C0 invertible with SSM blocks; SSM-W is invariant under normalization and permutation"
            }
            SuiteId::ColumnWImpliesSsmW => "column W => SSM-W => R0-W",
            SuiteId::SsmWCollapse => "SSM-W <=> every diagonal collapse (C0, sum Cj Dj) is SSM-W",
            SuiteId::ColumnWCollapse => "column W <=> every diagonal collapse (C0, sum Cj Dj) is column W",
            SuiteId::ZEquivalence => "C0^-1 Cj Z matrices => (column W <=> SSM-W <=> unique solutions)",
            SuiteId::SsmWExistence => "SSM-W => nonempty solution set and seed-independent nonzero degree",
            SuiteId::MMatrixUnique => "SSM-W and C0 an M matrix, q >= 0 => the only solution is (C0^-1 q, 0, ..., 0)",
            SuiteId::MMatrixConnected => {
                "C0 an M matrix, q > 0, connected solution set => it is {(C0^-1 q, 0, ..., 0)}"
            }
            SuiteId::W0Connected => "column W0 and a bounded connected component => connected solution set",
        }
    }

    pub fn sampled_universal(self) -> bool {
        !matches!(self, SuiteId::ColumnWImpliesSsmW)
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = match key.as_str() {
            "s-t44/c41" | "s-c41" => "s-t44",
            other => other,
        };
        SuiteId::ALL
            .into_iter()
            .find(|id| id.code().to_ascii_lowercase() == key || id.name() == key)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Upper bounds on the sizes drawn per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sizes {
    pub max_n: usize,
    pub max_k: usize,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes { max_n: 3, max_k: 2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    /// The hypothesis did not hold for the drawn data.
    Skipped,
    Passed(Vec<&'static str>),
    /// The hypothesis checker itself could not decide.
    Unknown,
    Failed { tuple: QTuple, instance: Option<QInstance>, expected: String, observed: String },
}

struct Ctx {
    rng: ChaCha8Rng,
    n: usize,
    k: usize,
}

impl Ctx {
    fn tuple(&mut self, kind: TupleKind) -> Option<QTuple> {
        gen_tuple_with(&mut self.rng, self.n, self.k, kind, &default_range()).ok()
    }

    fn pick(&mut self, kinds: &[TupleKind]) -> TupleKind {
        *kinds.choose(&mut self.rng).expect("nonempty")
    }

    fn instance(&mut self, c: &QTuple, q: QMode) -> QInstance {
        gen_instance_with(&mut self.rng, c, q, DMode::Random)
    }

    fn diagonals(&mut self, n: usize, k: usize) -> Vec<Vec<Rational>> {
        let mut ds: Vec<Vec<Rational>> = (0..k)
            .map(|_| (0..n).map(|_| Rational::new(self.rng.gen_range(0..=4), self.rng.gen_range(1..=2))).collect())
            .collect();
        for i in 0..n {
            if ds.iter().all(|d| d[i].negligible()) {
                let j = self.rng.gen_range(0..k);
                ds[j][i] = Rational::from(1);
            }
        }
        ds
    }
}

fn fail(c: &QTuple, inst: Option<&QInstance>, expected: impl Into<String>, observed: impl Into<String>) -> TrialOutcome {
    TrialOutcome::Failed {
        tuple: c.clone(),
        instance: inst.cloned(),
        expected: expected.into(),
        observed: observed.into(),
    }
}

fn describe(s: &SolutionSet<Rational>) -> String {
    let points: Vec<String> = s.pieces.iter().map(|p| format!("{:?}", p.sample.blocks())).collect();
    format!("{} piece(s): {}", s.len(), points.join(", "))
}

/// `(C0⁻¹ q, 0, ..., 0)`.
fn base_solution(inst: &QInstance) -> Option<QSolution> {
    let x0 = crate::exactmath::solve_linear(inst.tuple().mat(0), inst.q()).ok()?;
    let mut xs = vec![x0];
    xs.extend((0..inst.k()).map(|_| vec![Rational::from(0); inst.n()]));
    SolutionTuple::new(xs).ok()
}

fn sampled_unique(ctx: &mut Ctx, c: &QTuple, samples: usize, q: QMode) -> Option<TrialOutcome> {
    for _ in 0..samples {
        let inst = ctx.instance(c, q);
        let s = solve_all(&inst);
        if !is_unique(&s) {
            return Some(fail(c, Some(&inst), "exactly one solution", describe(&s)));
        }
    }
    None
}

/// Start of cell `level` along the chain parameter of coordinate `i`.
fn breakpoint(d: &[Vec<Rational>], level: usize, i: usize) -> Rational {
    (0..level).map(|j| d[j][i].clone()).sum()
}

/// Lower and upper end of the chain cell `level` of coordinate `i`; `None`
/// marks an unbounded side.
fn cell(d: &[Vec<Rational>], k: usize, level: usize, i: usize) -> (Option<Rational>, Option<Rational>) {
    if level == 0 {
        (None, Some(Rational::from(0)))
    } else if level == k {
        (Some(breakpoint(d, k - 1, i)), None)
    } else {
        (Some(breakpoint(d, level - 1, i)), Some(breakpoint(d, level, i)))
    }
}

fn cell_center(d: &[Vec<Rational>], k: usize, level: usize, i: usize) -> Rational {
    match cell(d, k, level, i) {
        (None, Some(hi)) => hi - Rational::from(1),
        (Some(lo), None) => lo + Rational::from(1),
        (Some(lo), Some(hi)) => (lo + hi) / Rational::from(2),
        (None, None) => Rational::from(0),
    }
}

/// Point of the chain set with parameter `tau`: `τ_i = -x0_i + x1_i + ... + xk_i`.
fn chain_point(n: usize, k: usize, d: &[Vec<Rational>], tau: &[Rational]) -> QSolution {
    let mut xs = vec![vec![Rational::from(0); n]; k + 1];
    for i in 0..n {
        let t = tau[i].clone();
        if !t.is_pos() {
            xs[0][i] = -t;
            continue;
        }
        let mut rest = t;
        for (j, x) in xs.iter_mut().enumerate().skip(1) {
            if j < k && rest > d[j - 1][i] {
                rest -= d[j - 1][i].clone();
                x[i] = d[j - 1][i].clone();
            } else {
                x[i] = rest;
                break;
            }
        }
    }
    SolutionTuple::new(xs).expect("shape")
}

fn instance_at(c: &QTuple, d: &[Vec<Rational>], tau: &[Rational]) -> QInstance {
    let x = chain_point(c.n(), c.k(), d, tau);
    let q = c.linear_part(&x).expect("shape");
    Instance::new(c.clone(), d.to_vec(), q).expect("positive bounds")
}

/// A right-hand side with more than one solution, built from a column-W
/// refutation. A singular representative yields a cell whose interior holds
/// a segment of solutions. Two representatives of opposite sign on adjacent
/// chain cells fold the residual map over their shared facet, so a point just
/// across the facet has a second preimage.
pub fn non_uniqueness_target(c: &QTuple, d: &[Vec<Rational>], refutation: &Certificate<Rational>) -> Option<QInstance> {
    let (n, k) = (c.n(), c.k());
    let centers = |levels: &[usize]| -> Vec<Rational> { (0..n).map(|i| cell_center(d, k, levels[i], i)).collect() };
    let (levels, p) = match refutation {
        Certificate::ZeroRepresentative(z) => return Some(instance_at(c, d, &centers(&z.choice))),
        Certificate::OppositeSigns { first, second } => {
            let diff: Vec<usize> = (0..n).filter(|&i| first.choice[i] != second.choice[i]).collect();
            if diff.len() != 1 {
                return None;
            }
            (first.choice.clone(), diff[0])
        }
        _ => return None,
    };
    let (a, b) = (levels[p], refutation_second_level(refutation, p));
    let step: isize = if b > a { 1 } else { -1 };
    let mut l = a;
    while l != b {
        let next = (l as isize + step) as usize;
        let (mut la, mut lb) = (levels.clone(), levels.clone());
        la[p] = l.min(next);
        lb[p] = l.max(next);
        let (ra, rb) = (representative(c, &la), representative(c, &lb));
        let (da, db) = (det(&ra).ok()?, det(&rb).ok()?);
        if da.negligible() {
            return Some(instance_at(c, d, &centers(&la)));
        }
        if db.negligible() {
            return Some(instance_at(c, d, &centers(&lb)));
        }
        if da.sign() != db.sign() {
            return Some(fold_target(c, d, &la, &lb, p, &ra, &rb));
        }
        l = next;
    }
    None
}

fn refutation_second_level(refutation: &Certificate<Rational>, p: usize) -> usize {
    match refutation {
        Certificate::OppositeSigns { second, .. } => second.choice[p],
        _ => unreachable!(),
    }
}

fn fold_target(
    c: &QTuple,
    d: &[Vec<Rational>],
    la: &[usize],
    lb: &[usize],
    p: usize,
    ra: &Mat<Rational>,
    rb: &Mat<Rational>,
) -> QInstance {
    let (n, k) = (c.n(), c.k());
    let mut tau: Vec<Rational> = (0..n).map(|i| cell_center(d, k, la[i], i)).collect();
    tau[p] = breakpoint(d, la[p], p);
    // Preimage in the lower cell of the image of τ* + δ e_p is τ* + δ u.
    let u = inverse(ra).expect("nonsingular").mul_vec(&rb.column(p)).expect("shape");
    let room = |lo: Option<Rational>, hi: Option<Rational>, at: &Rational| -> Option<Rational> {
        match (lo, hi) {
            (Some(lo), Some(hi)) => Some(if at.clone() - lo.clone() < hi.clone() - at.clone() {
                at.clone() - lo
            } else {
                hi - at.clone()
            }),
            (Some(lo), None) => Some(at.clone() - lo),
            (None, Some(hi)) => Some(hi - at.clone()),
            (None, None) => None,
        }
    };
    let mut limit: Option<Rational> = None;
    let mut tighten = |bound: Rational| {
        limit = Some(match limit.take() {
            Some(cur) if cur < bound => cur,
            _ => bound,
        });
    };
    for i in 0..n {
        if i == p || u[i].negligible() {
            continue;
        }
        let (lo, hi) = cell(d, k, la[i], i);
        if let Some(r) = room(lo, hi, &tau[i]) {
            tighten(r / u[i].abs());
        }
    }
    if let (Some(lo), _) = cell(d, k, la[p], p) {
        tighten((tau[p].clone() - lo) / u[p].abs());
    }
    if let (_, Some(hi)) = cell(d, k, lb[p], p) {
        tighten(hi - tau[p].clone());
    }
    let delta = limit.unwrap_or_else(|| Rational::from(1)) / Rational::from(2);
    tau[p] = tau[p].clone() + delta;
    instance_at(c, d, &tau)
}

trait Abs {
    fn abs(&self) -> Self;
}

impl Abs for Rational {
    fn abs(&self) -> Self {
        num_traits::Signed::abs(self)
    }
}

fn ctx(seed: u64, trial: u64, sizes: Sizes, pairs_only: bool) -> Ctx {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let n = rng.gen_range(1..=sizes.max_n.max(1));
    let k = if pairs_only { 1 } else { rng.gen_range(1..=sizes.max_k.max(1)) };
    Ctx { rng, n, k }
}

/// Regenerates and evaluates one trial; `run_suite` is the ordered collection
/// of these.
pub fn run_trial(id: SuiteId, seed: u64, trial: u64, sizes: Sizes) -> TrialOutcome {
    let mut ctx = ctx(seed, trial, sizes, id == SuiteId::PairPMatrix);
    match id {
        SuiteId::ColumnWUnique => column_w_unique(&mut ctx),
        SuiteId::PairPMatrix => pair_p_matrix(&mut ctx),
        SuiteId::R0WBounded => r0_w_bounded(&mut ctx),
        SuiteId::DegreeExistence => degree_existence(&mut ctx, seed ^ trial),
        SuiteId::SsmWNormalForm => ssm_w_normal_form(&mut ctx),
        SuiteId::ColumnWImpliesSsmW => column_w_implies_ssm_w(&mut ctx),
        SuiteId::SsmWCollapse => ssm_w_collapse(&mut ctx),
        SuiteId::ColumnWCollapse => column_w_collapse(&mut ctx),
        SuiteId::ZEquivalence => z_equivalence(&mut ctx),
        SuiteId::SsmWExistence => ssm_w_existence(&mut ctx, seed ^ trial),
        SuiteId::MMatrixUnique => m_matrix_unique(&mut ctx),
        SuiteId::MMatrixConnected => m_matrix_connected(&mut ctx),
        SuiteId::W0Connected => w0_connected(&mut ctx),
    }
}

fn column_w_unique(ctx: &mut Ctx) -> TrialOutcome {
    let Some(c) = ctx.tuple(TupleKind::ColumnW) else { return TrialOutcome::Skipped };
    if let Some(f) = sampled_unique(ctx, &c, COLUMN_W_SAMPLES, QMode::Any) {
        return f;
    }
    if c.k() == 1 {
        let p = normalize_tuple(&c).map(|nc| is_p(nc.mat(1)).status);
        if p != Ok(Status::Yes) {
            return fail(&c, None, "C0^-1 C1 is a P matrix", format!("{p:?}"));
        }
    }
    TrialOutcome::Passed(vec!["column-w"])
}

fn pair_p_matrix(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::ColumnW, TupleKind::General]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let cw = column_w(&c);
    let p = normalize_tuple(&c).map(|nc| is_p(nc.mat(1)).is_yes()).unwrap_or(false);
    if cw.is_yes() != p {
        return fail(&c, None, format!("P test = {}", cw.is_yes()), format!("P test = {p}"));
    }
    if cw.is_yes() {
        if let Some(f) = sampled_unique(ctx, &c, SAMPLES, QMode::Any) {
            return f;
        }
        return TrialOutcome::Passed(vec!["column-w"]);
    }
    let d = gen_d(&mut ctx.rng, c.n(), c.k(), DMode::Random);
    non_unique_at_target(&c, &d, &cw.certificate.expect("refutation"), "not-column-w")
}

fn non_unique_at_target(c: &QTuple, d: &[Vec<Rational>], cert: &Certificate<Rational>, tag: &'static str) -> TrialOutcome {
    let Some(inst) = non_uniqueness_target(c, d, cert) else {
        return fail(c, None, "a right-hand side with several solutions", "no target constructed");
    };
    let s = solve_all(&inst);
    if is_unique(&s) || s.is_empty() {
        return fail(c, Some(&inst), "several solutions", describe(&s));
    }
    TrialOutcome::Passed(vec![tag])
}

fn r0_w_bounded(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::General, TupleKind::General, TupleKind::SsmWCandidate]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    if !r0_w(&c).is_yes() {
        return TrialOutcome::Skipped;
    }
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Any);
        let s = solve_all(&inst);
        if !is_bounded(&s) {
            return fail(&c, Some(&inst), "bounded solution set", describe(&s));
        }
        for piece in &s.pieces {
            if check_chain_lemma(&inst, &piece.sample) != Ok(true) {
                return fail(&c, Some(&inst), "x0 ∧ xj = 0 for every j", format!("{:?}", piece.sample.blocks()));
            }
        }
    }
    TrialOutcome::Passed(vec!["r0-w"])
}

fn degree_existence(ctx: &mut Ctx, seed: u64) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::General, TupleKind::SsmWCandidate]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let d = gen_d(&mut ctx.rng, c.n(), c.k(), DMode::Random);
    let deg = match degree(&c, &d, seed) {
        Ok(res) => res.value,
        Err(Error::NotR0W) => return TrialOutcome::Skipped,
        Err(_) => return TrialOutcome::Unknown,
    };
    if deg == 0 {
        return TrialOutcome::Skipped;
    }
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Any);
        let s = solve_all(&inst);
        if s.is_empty() || !is_bounded(&s) {
            return fail(&c, Some(&inst), "nonempty bounded solution set", describe(&s));
        }
    }
    TrialOutcome::Passed(vec!["nonzero-degree"])
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn ssm_w_normal_form(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::SsmWCandidate, TupleKind::General]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let v = ssm_w(&c);
    let p = random_permutation(&mut ctx.rng, c.n());
    let permuted = ssm_w(&permute_tuple(&c, &p).expect("valid permutation"));
    if permuted.status != v.status {
        return fail(&c, None, format!("{:?} after permuting by {p:?}", v.status), format!("{:?}", permuted.status));
    }
    match normalize_tuple(&c) {
        Ok(nc) => {
            let nv = ssm_w(&nc);
            if nv.status != v.status {
                return fail(&c, None, format!("{:?} after normalizing", v.status), format!("{:?}", nv.status));
            }
            if v.is_yes() {
                if let Some(j) = (1..=c.k()).find(|&j| !is_ssm(nc.mat(j)).is_yes()) {
                    return fail(&c, None, "every C0^-1 Cj is SSM", format!("block {j} is not"));
                }
            }
        }
        Err(_) if v.is_yes() => return fail(&c, None, "C0 invertible", "C0 singular"),
        Err(_) => {}
    }
    TrialOutcome::Passed(vec![if v.is_yes() { "ssm-w" } else { "not-ssm-w" }])
}

fn column_w_implies_ssm_w(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::General, TupleKind::General, TupleKind::General, TupleKind::ColumnW]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let (cw, sw, rw) = (column_w(&c).is_yes(), ssm_w(&c).is_yes(), r0_w(&c).is_yes());
    if cw && !sw {
        return fail(&c, None, "column W => SSM-W", "SSM-W fails");
    }
    if sw && !rw {
        return fail(&c, None, "SSM-W => R0-W", "R0-W fails");
    }
    let mut tags = vec![];
    if cw {
        tags.push("column-w");
    }
    if sw {
        tags.push("ssm-w");
    }
    if rw {
        tags.push("r0-w");
    }
    TrialOutcome::Passed(tags)
}

fn ssm_w_collapse(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::SsmWCandidate, TupleKind::General]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let v = ssm_w(&c);
    if v.is_yes() {
        for _ in 0..SAMPLES {
            let ds = ctx.diagonals(c.n(), c.k());
            let pair = diagonal_collapse(&c, &ds).expect("valid diagonals");
            if !ssm_w(&pair).is_yes() {
                return fail(&c, None, format!("collapse by {ds:?} is SSM-W"), "it is not");
            }
        }
        return TrialOutcome::Passed(vec!["ssm-w"]);
    }
    let Some(Certificate::Witness(w)) = v.certificate else {
        return fail(&c, None, "an SSM-W witness", "none");
    };
    let (ds, y) = failing_ssm_w_collapse(&c, &w);
    let pair = diagonal_collapse(&c, &ds).expect("valid diagonals");
    if !is_ssm_w_witness(&pair, &y) || !ssm_w(&pair).is_no() {
        return fail(&c, None, format!("collapse by {ds:?} is not SSM-W"), "it is");
    }
    TrialOutcome::Passed(vec!["not-ssm-w"])
}

fn column_w_collapse(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::ColumnW, TupleKind::General]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let v = column_w(&c);
    if v.is_yes() {
        for _ in 0..SAMPLES {
            let ds = ctx.diagonals(c.n(), c.k());
            let pair = diagonal_collapse(&c, &ds).expect("valid diagonals");
            if !column_w(&pair).is_yes() {
                return fail(&c, None, format!("collapse by {ds:?} is column W"), "it is not");
            }
        }
        return TrialOutcome::Passed(vec!["column-w"]);
    }
    let cert = v.certificate.expect("refutation");
    let Some(ds) = failing_column_w_collapse(&c, &cert) else {
        return fail(&c, None, "a failing collapse", "none constructed");
    };
    let pair = diagonal_collapse(&c, &ds).expect("valid diagonals");
    if !column_w(&pair).is_no() {
        return fail(&c, None, format!("collapse by {ds:?} is not column W"), "it is");
    }
    TrialOutcome::Passed(vec!["not-column-w"])
}

fn z_equivalence(ctx: &mut Ctx) -> TrialOutcome {
    let Some(c) = ctx.tuple(TupleKind::ZNormalized) else { return TrialOutcome::Skipped };
    let (cw, sw) = (column_w(&c), ssm_w(&c));
    if cw.status != sw.status {
        return fail(&c, None, format!("column W {:?}", cw.status), format!("SSM-W {:?}", sw.status));
    }
    let mut unique_all = true;
    let mut last_d = Vec::new();
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Any);
        let s = solve_all(&inst);
        let u = is_unique(&s);
        if cw.is_yes() && !u {
            return fail(&c, Some(&inst), "exactly one solution", describe(&s));
        }
        unique_all &= u;
        last_d = inst.bounds().to_vec();
    }
    if cw.is_yes() {
        return TrialOutcome::Passed(vec!["column-w"]);
    }
    let tag = if unique_all { "not-column-w-constructed" } else { "not-column-w-sampled" };
    non_unique_at_target(&c, &last_d, &cw.certificate.expect("refutation"), tag)
}

fn ssm_w_existence(ctx: &mut Ctx, seed: u64) -> TrialOutcome {
    let Some(c) = ctx.tuple(TupleKind::SsmWCandidate) else { return TrialOutcome::Skipped };
    if !ssm_w(&c).is_yes() {
        return TrialOutcome::Skipped;
    }
    let d = gen_d(&mut ctx.rng, c.n(), c.k(), DMode::Random);
    let mut values = Vec::new();
    for s in 0..DEGREE_SEEDS {
        match degree(&c, &d, seed.wrapping_add(s)) {
            Ok(res) => values.push(res.value),
            Err(e) => return fail(&c, None, "a degree value", e.to_string()),
        }
    }
    if values[0] == 0 || values.iter().any(|&v| v != values[0]) {
        return fail(&c, None, "one nonzero degree across seeds", format!("{values:?}"));
    }
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Any);
        let s = solve_all(&inst);
        if s.is_empty() {
            return fail(&c, Some(&inst), "a solution", "none");
        }
    }
    TrialOutcome::Passed(vec!["ssm-w"])
}

fn m_matrix_unique(ctx: &mut Ctx) -> TrialOutcome {
    let Some(c) = ctx.tuple(TupleKind::MZero) else { return TrialOutcome::Skipped };
    if !is_m_matrix(c.mat(0)).is_yes() || !ssm_w(&c).is_yes() {
        return TrialOutcome::Skipped;
    }
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::NonNeg);
        let s = solve_all(&inst);
        let base = base_solution(&inst).expect("C0 invertible");
        if !is_unique(&s) || s.pieces[0].sample != base {
            return fail(&c, Some(&inst), format!("only {:?}", base.blocks()), describe(&s));
        }
    }
    TrialOutcome::Passed(vec!["ssm-w"])
}

fn m_matrix_connected(ctx: &mut Ctx) -> TrialOutcome {
    let Some(c) = ctx.tuple(TupleKind::MZero) else { return TrialOutcome::Skipped };
    if !is_m_matrix(c.mat(0)).is_yes() {
        return TrialOutcome::Skipped;
    }
    let mut all_connected = true;
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Positive);
        let s = solve_all(&inst);
        let base = base_solution(&inst).expect("C0 invertible");
        if !s.contains(&base) || !verify_solution(&inst, &base).unwrap_or(false) {
            return fail(&c, Some(&inst), format!("{:?} solves", base.blocks()), describe(&s));
        }
        if is_connected(&s) {
            if !is_unique(&s) || s.pieces[0].sample != base {
                return fail(&c, Some(&inst), format!("only {:?}", base.blocks()), describe(&s));
            }
        } else {
            all_connected = false;
        }
    }
    TrialOutcome::Passed(vec![if all_connected { "connected" } else { "disconnected" }])
}

fn w0_connected(ctx: &mut Ctx) -> TrialOutcome {
    let kind = ctx.pick(&[TupleKind::WeakSign, TupleKind::WeakSign, TupleKind::General]);
    let Some(c) = ctx.tuple(kind) else { return TrialOutcome::Skipped };
    let candidates = [
        identity_tuple(c.n(), c.k()),
        MatrixTuple::new(vec![c.mat(0).clone(); c.k() + 1]).expect("k >= 1"),
    ];
    let v = column_w0(&c, &candidates, &default_eps_grid()).expect("valid grid");
    match v.status {
        Status::No => return TrialOutcome::Skipped,
        Status::Unknown => return TrialOutcome::Unknown,
        Status::Yes => {}
    }
    let mut tags = vec!["column-w0"];
    for _ in 0..SAMPLES {
        let inst = ctx.instance(&c, QMode::Any);
        let s = solve_all(&inst);
        let graph = piece_graph(&s);
        let bounded_component = graph.components().iter().any(|comp| {
            comp.iter().all(|&i| s.pieces[i].is_point || s.pieces[i].polyhedron.is_bounded())
        });
        if bounded_component {
            if !tags.contains(&"bounded-component") {
                tags.push("bounded-component");
            }
            if graph.components().len() != 1 {
                return fail(&c, Some(&inst), "connected solution set", describe(&s));
            }
        }
    }
    TrialOutcome::Passed(tags)
}

fn fixture_checks(id: SuiteId) -> Vec<FixtureCheck> {
    let check = |name: &str, passed: bool, detail: String| FixtureCheck { name: name.into(), passed, detail };
    match id {
        SuiteId::SsmWNormalForm => {
            let c = fixtures::p_blocks_without_ssm_w();
            let blocks_p = (1..=2).all(|j| is_p(c.mat(j)).is_yes() && is_ssm(c.mat(j)).is_yes());
            let v = ssm_w(&c);
            let witness_ok = matches!(&v.certificate, Some(Certificate::Witness(w)) if is_ssm_w_witness(&c, w));
            vec![check(
                "p-blocks-without-ssm-w",
                blocks_p && v.is_no() && witness_ok,
                "SSM blocks do not give SSM-W".into(),
            )]
        }
        SuiteId::ColumnWImpliesSsmW => {
            let c = fixtures::rank_one_ssm_w();
            let zero_rep = matches!(column_w(&c).certificate, Some(Certificate::ZeroRepresentative(ref z)) if z.det.negligible());
            vec![check("rank-one-ssm-w", ssm_w(&c).is_yes() && zero_rep, "SSM-W does not give column W".into())]
        }
        SuiteId::MMatrixConnected => {
            let inst = fixtures::two_point_instance();
            let s = solve_all(&inst);
            vec![check("two-point", s.points().len() == 2 && !is_connected(&s), describe(&s))]
        }
        SuiteId::ZEquivalence => {
            let c = fixtures::identity_pair(2);
            let ok = column_w(&c).is_yes() && ssm_w(&c).is_yes();
            vec![check("identity-pair", ok, "column W and SSM-W".into())]
        }
        _ => Vec::new(),
    }
}

pub fn run_suite(id: SuiteId, trials: u64, sizes: Sizes, seed: u64) -> SuiteReport {
    let outcomes: Vec<TrialOutcome> = (0..trials).into_par_iter().map(|t| run_trial(id, seed, t, sizes)).collect();
    let mut report = SuiteReport {
        suite: id.code().into(),
        name: id.name().into(),
        statement: id.statement().into(),
        sampled_universal: id.sampled_universal(),
        seed,
        max_n: sizes.max_n,
        max_k: sizes.max_k,
        trials,
        evaluated: 0,
        skipped: 0,
        passes: 0,
        unknown: 0,
        tags: BTreeMap::new(),
        fixtures: fixture_checks(id),
        failures: Vec::new(),
    };
    for (trial, outcome) in (0u64..).zip(outcomes) {
        match outcome {
            TrialOutcome::Skipped => report.skipped += 1,
            TrialOutcome::Unknown => report.unknown += 1,
            TrialOutcome::Passed(tags) => {
                report.evaluated += 1;
                report.passes += 1;
                for t in tags {
                    *report.tags.entry(t.to_string()).or_insert(0) += 1;
                }
            }
            TrialOutcome::Failed { tuple, instance, expected, observed } => {
                report.evaluated += 1;
                report.failures.push(FailureRecord { seed, trial, tuple, instance, expected, observed });
            }
        }
    }
    report
}

/// Kernel direction of a singular representative, for callers that want to
/// display the segment of solutions inside a degenerate cell.
pub fn degenerate_direction(c: &QTuple, levels: &[usize]) -> Option<Vec<Rational>> {
    null_vector(&representative(c, levels))
}
