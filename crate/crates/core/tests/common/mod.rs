//! Brute-force oracles working in chain coordinates.
//!
//! For each coordinate the complementarity conditions describe a single
//! polygonal chain, parametrized by `τ`: `x0 = -τ` for `τ <= 0`, then the
//! blocks `x1, x2, ...` fill up to their bounds in order. Every tuple that
//! satisfies complementarity is `chain_point(τ)` for exactly one `τ`, so the
//! solution set is the zero set of a piecewise affine map of `τ`.

#![allow(dead_code)]

use std::collections::HashMap;

use ehlcp::exactmath::{LpOutcome, Polyhedron};
use ehlcp::{QInstance, Rational, Scalar};
use num_traits::ToPrimitive;

pub fn r(v: i64) -> Rational {
    Rational::from(v)
}

/// Lower end of the chain segment carrying block `level >= 1`.
fn offset(inst: &QInstance, level: usize, i: usize) -> Rational {
    (1..level).map(|j| inst.bound(j)[i].clone()).sum()
}

pub fn chain_point(inst: &QInstance, tau: &[Rational]) -> Vec<Vec<Rational>> {
    let (n, k) = (inst.n(), inst.k());
    let mut xs = vec![vec![r(0); n]; k + 1];
    for i in 0..n {
        if !tau[i].is_pos() {
            xs[0][i] = -tau[i].clone();
            continue;
        }
        let mut rest = tau[i].clone();
        for j in 1..=k {
            if j < k && rest > inst.bound(j)[i] {
                xs[j][i] = inst.bound(j)[i].clone();
                rest -= inst.bound(j)[i].clone();
            } else {
                xs[j][i] = rest;
                break;
            }
        }
    }
    xs
}

/// `C0 x0 - C1 x1 - ... - Ck xk`, written out directly.
pub fn lhs(inst: &QInstance, xs: &[Vec<Rational>]) -> Vec<Rational> {
    let n = inst.n();
    (0..n)
        .map(|row| {
            let mut acc = r(0);
            for (j, x) in xs.iter().enumerate() {
                let m = inst.tuple().mat(j);
                for col in 0..n {
                    let t = m.row(row)[col].clone() * x[col].clone();
                    acc = if j == 0 { acc + t } else { acc - t };
                }
            }
            acc
        })
        .collect()
}

pub fn is_member(inst: &QInstance, xs: &[Vec<Rational>]) -> bool {
    lhs(inst, xs) == inst.q()
}

/// `τ`-interval of chain segment `level`; `None` marks an open end.
fn segment(inst: &QInstance, level: usize, i: usize) -> (Option<Rational>, Option<Rational>) {
    let k = inst.k();
    match level {
        0 => (None, Some(r(0))),
        l if l == k => (Some(offset(inst, l, i)), None),
        l => (Some(offset(inst, l, i)), Some(offset(inst, l + 1, i))),
    }
}

fn levels(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p| (0..=k).map(move |l| [p.clone(), vec![l]].concat())).collect();
    }
    out
}

/// Solutions on one combination of chain segments, restricted to a box.
fn segment_polyhedron(inst: &QInstance, lv: &[usize], lo: &[Rational], hi: &[Rational]) -> Polyhedron<Rational> {
    let n = inst.n();
    let mut p = Polyhedron::new(n);
    for i in 0..n {
        let (a, b) = segment(inst, lv[i], i);
        p.lower(i, a.map_or(lo[i].clone(), |a| if a > lo[i] { a } else { lo[i].clone() }));
        p.upper(i, b.map_or(hi[i].clone(), |b| if b < hi[i] { b } else { hi[i].clone() }));
    }
    let base: Vec<Vec<Rational>> = {
        let mut xs = vec![vec![r(0); n]; inst.k() + 1];
        for i in 0..n {
            for j in 1..lv[i] {
                xs[j][i] = inst.bound(j)[i].clone();
            }
            if lv[i] >= 1 {
                xs[lv[i]][i] = -offset(inst, lv[i], i);
            }
        }
        xs
    };
    let c = lhs(inst, &base);
    for row in 0..n {
        // On these segments lhs(chain_point(τ)) = c - M τ with column i of M
        // taken from the matrix of segment lv[i].
        let coeffs: Vec<Rational> = (0..n).map(|col| -inst.tuple().mat(lv[col]).row(row)[col].clone()).collect();
        p.add_eq(coeffs, inst.q()[row].clone() - c[row].clone());
    }
    p
}

pub fn box_hits(inst: &QInstance, lo: &[Rational], hi: &[Rational]) -> bool {
    levels(inst.n(), inst.k())
        .iter()
        .any(|lv| !segment_polyhedron(inst, lv, lo, hi).is_empty())
}

/// Smallest integer box `[-b, b]^n` in `τ` containing the solution set, or
/// `None` when it is unbounded.
pub fn extent(inst: &QInstance) -> Option<i64> {
    let n = inst.n();
    let big = vec![r(-1_000_000); n];
    let huge = vec![r(1_000_000); n];
    let mut b = 1i64;
    for lv in levels(n, inst.k()) {
        let p = segment_polyhedron(inst, &lv, &big, &huge);
        for i in 0..n {
            for s in [1, -1] {
                let mut obj = vec![r(0); n];
                obj[i] = r(s);
                match p.maximize(obj) {
                    LpOutcome::Optimal { value, .. } => {
                        if value.clone() >= r(999_999) {
                            return None;
                        }
                        let v = value.to_f64().expect("finite").abs().ceil() as i64;
                        b = b.max(v + 1);
                    }
                    LpOutcome::Infeasible => break,
                    LpOutcome::Unbounded => return None,
                }
            }
        }
    }
    Some(b)
}

/// Number of connected components of the solution set seen on a grid of
/// `cells` closed cells per unit: hit cells are joined when the solution set
/// meets their common face or corner. Exact unless one cell holds parts of
/// two components.
pub fn grid_components(inst: &QInstance, bound: i64, cells: i64) -> usize {
    let n = inst.n();
    assert!(n <= 2);
    let h = Rational::new(1, cells);
    let side = (2 * bound * cells) as usize;
    let at = |c: usize| r(-bound) + h.clone() * Rational::from(c as i64);
    let coords: Vec<Vec<usize>> = if n == 1 {
        (0..side).map(|a| vec![a]).collect()
    } else {
        (0..side).flat_map(|a| (0..side).map(move |b| vec![a, b])).collect()
    };
    let hit: Vec<Vec<usize>> = coords
        .into_iter()
        .filter(|c| {
            let lo: Vec<Rational> = c.iter().map(|&v| at(v)).collect();
            let hi: Vec<Rational> = c.iter().map(|&v| at(v + 1)).collect();
            box_hits(inst, &lo, &hi)
        })
        .collect();
    let index: HashMap<&[usize], usize> = hit.iter().enumerate().map(|(a, c)| (c.as_slice(), a)).collect();
    let mut parent: Vec<usize> = (0..hit.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let steps: Vec<Vec<isize>> = if n == 1 { vec![vec![1]] } else { vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]] };
    for (a, ca) in hit.iter().enumerate() {
        for step in &steps {
            let cb: Option<Vec<usize>> = ca.iter().zip(step).map(|(&v, &s)| v.checked_add_signed(s)).collect();
            let Some(&b) = cb.as_ref().and_then(|cb| index.get(cb.as_slice())) else { continue };
            let lo: Vec<Rational> = (0..n).map(|i| at(ca[i].max(hit[b][i]))).collect();
            let hi: Vec<Rational> = (0..n).map(|i| at(ca[i].min(hit[b][i]) + 1)).collect();
            if box_hits(inst, &lo, &hi) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..hit.len()).filter(|&a| find(&mut parent, a) == a).count()
}

/// Lattice `{-bound, ..., bound}^n` scaled by `1/per_unit`.
pub fn lattice(n: usize, bound: i64, per_unit: i64) -> Vec<Vec<Rational>> {
    let ticks: Vec<Rational> = (-bound * per_unit..=bound * per_unit).map(|t| Rational::new(t, per_unit)).collect();
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Rational>| ticks.iter().map(move |t| [p.clone(), vec![t.clone()]].concat()))
            .collect();
    }
    out
}
