//! Degree-by-degree linear algebra on presented graded rings, and the
//! blow-up rank oracle.
//!
//! All ranks are dimensions over the rationals. Non-membership over `Q`
//! certifies non-membership over `Z`; membership over `Q` says nothing about
//! integral membership, and torsion in Chow groups is invisible here.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::poly::{Monomial, Poly, VarTable};
use crate::present::Presentation;
use crate::setcomb::{canonical_walk, merge_family, LargeFamily};

/// Default refusal threshold on the number of monomials in one degree.
pub const DEFAULT_MONOMIAL_CAP: usize = 20_000;

/// Graded ranks `dim_Q A^k` for `k = 0..=top_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankTable(pub Vec<usize>);

impl RankTable {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_palindromic(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    /// Entrywise `self <= other`, over equal lengths.
    pub fn dominated_by(&self, other: &RankTable) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// First index at which two tables differ.
    pub fn first_difference(&self, other: &RankTable) -> Option<usize> {
        let n = self.0.len().max(other.0.len());
        (0..n).find(|&k| self.0.get(k) != other.0.get(k))
    }
}

impl fmt::Display for RankTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, r) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    pub monomial_cap: usize,
    /// Evaluate degrees on the rayon pool.
    pub parallel: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            monomial_cap: DEFAULT_MONOMIAL_CAP,
            parallel: true,
        }
    }
}

/// All monomials of degree `k` respecting the caps, in increasing monomial order.
pub fn monomials_of_degree(p: &Presentation, k: u32) -> Result<Vec<Monomial>> {
    if k > p.top_degree() {
        return Err(Error::Argument(format!(
            "degree {k} exceeds the top degree {}",
            p.top_degree()
        )));
    }
    Ok(enumerate_monomials(p.vars(), k))
}

pub(crate) fn enumerate_monomials(vars: &VarTable, k: u32) -> Vec<Monomial> {
    fn go(vars: &VarTable, idx: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if idx == vars.len() {
            if left == 0 {
                out.push(Monomial::from_exponents(cur.clone()));
            }
            return;
        }
        let v = vars.get(idx);
        let mut e = 0u32;
        while e * v.degree <= left && v.cap.is_none_or(|c| e < c) {
            cur[idx] = e as u16;
            go(vars, idx + 1, left - e * v.degree, cur, out);
            e += 1;
        }
        cur[idx] = 0;
    }
    let mut out = Vec::new();
    go(vars, 0, k, &mut vec![0; vars.len()], &mut out);
    out.sort();
    out
}

fn count_monomials(vars: &VarTable, k: u32, cap: usize) -> usize {
    // dp[j] = number of monomials of degree j using the variables seen so far
    let mut dp = vec![0usize; k as usize + 1];
    dp[0] = 1;
    for v in vars.vars() {
        let mut next = vec![0usize; k as usize + 1];
        for (j, &c) in dp.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut e = 0u32;
            while j as u32 + e * v.degree <= k && v.cap.is_none_or(|cp| e < cp) {
                let t = j + (e * v.degree) as usize;
                next[t] = next[t].saturating_add(c).min(cap.saturating_add(1));
                e += 1;
            }
        }
        dp = next;
    }
    dp[k as usize]
}

/// The degree-`k` part of an ideal: all products `g * m` of a generator with
/// a monomial, in coordinates over the degree-`k` monomials.
///
/// Monomials divisible by a single-term generator span their own coordinate
/// directions; they are recorded in `killed` and dropped from the rows, which
/// shrinks the matrix without changing the rank of the span.
pub struct DegreeSpan {
    pub degree: u32,
    pub basis: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    killed: Vec<bool>,
    echelon: Echelon,
}

impl DegreeSpan {
    pub fn build(
        vars: &Arc<VarTable>,
        gens: &[&Poly],
        k: u32,
        opts: &RankOptions,
    ) -> Result<DegreeSpan> {
        let count = count_monomials(vars, k, opts.monomial_cap);
        if count > opts.monomial_cap {
            return Err(Error::CapExceeded(format!(
                "degree {k} has more than {} monomials",
                opts.monomial_cap
            )));
        }
        let mut basis = enumerate_monomials(vars, k);
        // Leading column = largest monomial.
        basis.reverse();
        let index: HashMap<Monomial, u32> = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();

        let monomial_gens: Vec<&Monomial> = gens
            .iter()
            .filter(|g| g.len() == 1)
            .map(|g| g.terms().next().expect("one term").0)
            .collect();
        let killed: Vec<bool> = basis
            .iter()
            .map(|m| monomial_gens.iter().any(|g| g.divides(m)))
            .collect();

        let mut span = DegreeSpan {
            degree: k,
            basis,
            index,
            killed,
            echelon: Echelon::new(),
        };
        let mut lower: HashMap<u32, Vec<Monomial>> = HashMap::new();
        for g in gens.iter().filter(|g| g.len() > 1) {
            let Some(dg) = g.homogeneous_degree() else {
                return Err(Error::Degree(format!("generator `{g}` is not homogeneous")));
            };
            if dg > k {
                continue;
            }
            let multipliers = lower.entry(k - dg).or_insert_with(|| {
                enumerate_monomials(vars, k - dg)
                    .into_iter()
                    .filter(|m| !monomial_gens.iter().any(|g| g.divides(m)))
                    .collect()
            });
            for m in multipliers.iter() {
                let row = span.row_of(&g.mul_monomial(m));
                span.echelon.insert(row);
            }
        }
        Ok(span)
    }

    /// Coordinates of a degree-`k` polynomial on the surviving columns.
    fn row_of(&self, p: &Poly) -> SparseRow {
        SparseRow::new(
            p.terms()
                .filter_map(|(m, c)| {
                    let col = self.index[m];
                    (!self.killed[col as usize]).then(|| (col, c.clone()))
                })
                .collect(),
        )
    }

    pub fn killed_count(&self) -> usize {
        self.killed.iter().filter(|&&k| k).count()
    }

    /// Dimension of the degree-`k` part of the ideal.
    pub fn rank(&self) -> usize {
        self.killed_count() + self.echelon.rank()
    }

    /// Dimension of the degree-`k` part of the quotient.
    pub fn quotient_rank(&self) -> usize {
        self.basis.len() - self.rank()
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.echelon.contains(self.row_of(p))
    }

    /// Adds a polynomial to the span; returns whether it was independent.
    pub fn insert(&mut self, p: &Poly) -> bool {
        let row = self.row_of(p);
        self.echelon.insert(row)
    }
}

fn run_degrees<T: Send>(
    top: u32,
    parallel: bool,
    f: impl Fn(u32) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    if parallel {
        (0..=top).into_par_iter().map(f).collect()
    } else {
        (0..=top).map(f).collect()
    }
}

pub fn graded_ranks(p: &Presentation) -> Result<RankTable> {
    graded_ranks_with(p, &RankOptions::default())
}

pub fn graded_ranks_with(p: &Presentation, opts: &RankOptions) -> Result<RankTable> {
    let gens: Vec<&Poly> = p.relations().iter().collect();
    let ranks = run_degrees(p.top_degree(), opts.parallel, |k| {
        Ok(DegreeSpan::build(p.vars(), &gens, k, opts)?.quotient_rank())
    })?;
    Ok(RankTable(ranks))
}

/// Per-degree dimension of the image of the ideal `(gens)` in the quotient.
pub fn ideal_ranks(p: &Presentation, gens: &[Poly]) -> Result<RankTable> {
    let opts = RankOptions::default();
    let rels: Vec<&Poly> = p.relations().iter().collect();
    let lifted = gens
        .iter()
        .map(|g| g.lift_into(p.vars()))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<&Poly> = rels.iter().copied().chain(lifted.iter()).collect();
    let ranks = run_degrees(p.top_degree(), opts.parallel, |k| {
        let with = DegreeSpan::build(p.vars(), &all, k, &opts)?.rank();
        let without = DegreeSpan::build(p.vars(), &rels, k, &opts)?.rank();
        Ok(with - without)
    })?;
    Ok(RankTable(ranks))
}

/// Whether `f` lies in the rational span of the relations and `gens` in its degree.
pub fn membership(p: &Presentation, gens: &[Poly], f: &Poly) -> Result<bool> {
    membership_with(p, gens, f, &RankOptions::default())
}

pub fn membership_with(
    p: &Presentation,
    gens: &[Poly],
    f: &Poly,
    opts: &RankOptions,
) -> Result<bool> {
    let f = f.lift_into(p.vars())?;
    if f.is_zero() {
        return Ok(true);
    }
    let k = f
        .homogeneous_degree()
        .ok_or_else(|| Error::Degree(format!("`{f}` is not homogeneous")))?;
    let lifted = gens
        .iter()
        .map(|g| g.lift_into(p.vars()))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<&Poly> = p.relations().iter().chain(lifted.iter()).collect();
    let span = DegreeSpan::build(p.vars(), &all, k, opts)?;
    Ok(span.contains(&f))
}

/// Membership of each polynomial in the relation ideal, sharing one span per degree.
pub fn membership_many(p: &Presentation, polys: &[Poly], opts: &RankOptions) -> Result<Vec<bool>> {
    let lifted = polys
        .iter()
        .map(|f| f.lift_into(p.vars()))
        .collect::<Result<Vec<_>>>()?;
    let mut by_degree: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, f) in lifted.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let k = f
            .homogeneous_degree()
            .ok_or_else(|| Error::Degree(format!("`{f}` is not homogeneous")))?;
        by_degree.entry(k).or_default().push(i);
    }
    let rels: Vec<&Poly> = p.relations().iter().collect();
    let mut out = vec![true; polys.len()];
    let mut degrees: Vec<u32> = by_degree.keys().copied().collect();
    degrees.sort_unstable();
    for k in degrees {
        let span = DegreeSpan::build(p.vars(), &rels, k, opts)?;
        for &i in &by_degree[&k] {
            out[i] = span.contains(&lifted[i]);
        }
    }
    Ok(out)
}

/// Ring map given by variable images, as a list aligned with the source table.
pub fn images_from_map(
    source: &Presentation,
    target: &Presentation,
    map: &HashMap<String, Poly>,
) -> Result<Vec<Poly>> {
    source
        .vars()
        .vars()
        .iter()
        .map(|v| {
            map.get(&v.name)
                .ok_or_else(|| Error::Argument(format!("no image given for {}", v.name)))?
                .lift_into(target.vars())
        })
        .collect()
}

/// Per-degree rank of the kernel of the ring map `source -> target` sending
/// variable `k` to `images[k]`.
pub fn kernel_ranks(
    source: &Presentation,
    target: &Presentation,
    images: &[Poly],
) -> Result<RankTable> {
    let opts = RankOptions::default();
    let tv = target.vars();
    if images.len() != source.vars().len() {
        return Err(Error::Argument(format!(
            "{} images for {} source variables",
            images.len(),
            source.vars().len()
        )));
    }
    for (v, img) in source.vars().vars().iter().zip(images) {
        if !img.is_homogeneous_of(v.degree) {
            return Err(Error::Degree(format!(
                "image `{img}` of {} has the wrong degree",
                v.name
            )));
        }
    }
    // Well-definedness: relations and caps of the source must die in the target.
    let mut checks: Vec<(String, Poly)> = source
        .relations()
        .iter()
        .map(|r| Ok((r.to_string(), r.substitute(tv, images)?)))
        .collect::<Result<_>>()?;
    for (v, img) in source.vars().vars().iter().zip(images) {
        if let Some(c) = v.cap {
            checks.push((format!("{}^{c}", v.name), img.pow(c)));
        }
    }
    for (name, img) in &checks {
        if !membership_with(target, &[], img, &opts)? {
            return Err(Error::Map {
                relation: name.clone(),
            });
        }
    }

    let source_ranks = graded_ranks_with(source, &opts)?;
    let trels: Vec<&Poly> = target.relations().iter().collect();
    let ranks = run_degrees(source.top_degree(), opts.parallel, |k| {
        let mut span = DegreeSpan::build(tv, &trels, k, &opts)?;
        let base = span.rank();
        let one = Poly::one(source.vars());
        for m in enumerate_monomials(source.vars(), k) {
            let img = one.mul_monomial(&m).substitute(tv, images)?;
            span.insert(&img);
        }
        let image_rank = span.rank() - base;
        Ok(source_ranks.0[k as usize] - image_rank)
    })?;
    Ok(RankTable(ranks))
}

/// Coefficients of `(1 + q + ... + q^d)^n`.
pub fn product_ranks(d: u32, n: usize) -> RankTable {
    let mut out = vec![1usize];
    for _ in 0..n {
        let mut next = vec![0usize; out.len() + d as usize];
        for (k, &c) in out.iter().enumerate() {
            for j in 0..=d as usize {
                next[k + j] += c;
            }
        }
        out = next;
    }
    RankTable(out)
}

/// Graded ranks of `X_A[n]` for `X = P^d` from the blow-up formula alone:
/// blowing up a center of codimension `c` adds the center's ranks shifted by
/// `1..c-1`, and each center is again a weighted compactification with the
/// block merged to one point.
pub fn rank_oracle(d: u32, n: usize, family: &LargeFamily) -> RankTable {
    let mut memo = HashMap::new();
    oracle(d, n, family, &mut memo)
}

type OracleKey = (u32, usize, Vec<u32>);

fn oracle(
    d: u32,
    n: usize,
    family: &LargeFamily,
    memo: &mut HashMap<OracleKey, RankTable>,
) -> RankTable {
    let key = (d, n, family.iter().map(|s| s.bits()).collect::<Vec<_>>());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut ranks = product_ranks(d, n).0;
    let mut processed = LargeFamily::empty(n);
    for &t in canonical_walk(family).steps() {
        let codim = d as usize * (t.len() - 1);
        let (merge, merged) =
            merge_family(&processed, t).expect("canonical walk is superset-first");
        let center = oracle(d, merge.m(), &merged, memo);
        for shift in 1..codim {
            for (k, &r) in center.0.iter().enumerate() {
                ranks[k + shift] += r;
            }
        }
        processed = processed
            .with_member(t)
            .expect("prefix of a walk is upward closed");
    }
    let table = RankTable(ranks);
    memo.insert(key, table.clone());
    table
}
