//! Combinatorics of marked points: subsets of `{1..n}`, weight vectors, the
//! upward-closed family of large sets, superset-first walks through that
//! family, and the relabeling that merges a coincident block of points into a
//! single new point.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of marked points a [`Subset`] can index.
pub const MAX_POINTS: usize = 31;

/// Default cap on the number of large sets for which [`all_walks`] enumerates
/// every linear extension.
pub const DEFAULT_WALK_CAP: usize = 8;

/// A subset of `{1..=31}` stored as a bitmask; bit `i` is point `i`.
///
/// Ordered by cardinality first, then lexicographically on the sorted element
/// lists, which is the canonical order used everywhere for `D` variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_elems<I: IntoIterator<Item = usize>>(elems: I) -> Result<Subset> {
        let mut bits = 0u32;
        for e in elems {
            if e == 0 || e > MAX_POINTS {
                return Err(Error::Argument(format!(
                    "point label {e} outside 1..={MAX_POINTS}"
                )));
            }
            bits |= 1 << e;
        }
        Ok(Subset(bits))
    }

    /// `{1..n}`.
    pub fn full(n: usize) -> Subset {
        assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points");
        Subset(((1u64 << (n + 1)) - 2) as u32)
    }

    pub fn singleton(e: usize) -> Subset {
        assert!((1..=MAX_POINTS).contains(&e));
        Subset(1 << e)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        e <= MAX_POINTS && self.0 & (1 << e) != 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    pub fn elems(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: Subset) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn with(self, e: usize) -> Subset {
        self.union(Subset::singleton(e))
    }

    /// True when every element lies in `{1..n}`.
    pub fn within(self, n: usize) -> bool {
        self.is_subset(Subset::full(n))
    }

    /// Image under a relabeling `perm`, where `perm[i - 1]` is the new label of `i`.
    pub fn permute(self, perm: &[usize]) -> Subset {
        Subset(self.iter().fold(0, |acc, e| acc | (1 << perm[e - 1])))
    }

    /// All subsets of `{1..n}` (including the empty set), in bitmask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n <= MAX_POINTS);
        (0u64..(1u64 << n)).map(|m| Subset((m as u32) << 1))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elems = Vec::<usize>::deserialize(d)?;
        Subset::from_elems(elems).map_err(serde::de::Error::custom)
    }
}

/// `S` and `T` overlap when their intersection is nonempty and a proper
/// subset of both.
pub fn is_overlap(s: Subset, t: Subset) -> bool {
    let i = s.intersection(t);
    !i.is_empty() && i != s && i != t
}

/// A vector of exact rational weights in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    a: Vec<BigRational>,
}

impl Weights {
    pub fn new(a: Vec<BigRational>) -> Result<Weights> {
        if a.is_empty() || a.len() > MAX_POINTS {
            return Err(Error::Argument(format!(
                "need between 1 and {MAX_POINTS} weights, got {}",
                a.len()
            )));
        }
        let one = BigRational::one();
        if let Some(bad) = a.iter().find(|w| **w < BigRational::zero() || **w > one) {
            return Err(Error::Argument(format!("weight {bad} outside [0,1]")));
        }
        Ok(Weights { a })
    }

    /// Parses entries of the form `p/q` or `p`.
    pub fn parse<S: AsRef<str>>(entries: &[S]) -> Result<Weights> {
        let a = entries
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Weights::new(a)
    }

    pub fn all_ones(n: usize) -> Weights {
        Weights {
            a: vec![BigRational::one(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.a
    }

    pub fn is_all_ones(&self) -> bool {
        self.a.iter().all(|w| w.is_one())
    }

    /// Weights relabeled by `perm` (`perm[i - 1]` is the new label of point `i`).
    pub fn permute(&self, perm: &[usize]) -> Weights {
        let mut a = vec![BigRational::zero(); self.a.len()];
        for (i, w) in self.a.iter().enumerate() {
            a[perm[i] - 1] = w.clone();
        }
        Weights { a }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form p/q"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// The upward-closed family of large subsets of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LargeFamily {
    n: usize,
    members: BTreeSet<Subset>,
}

impl LargeFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(n: usize, members: I) -> Result<LargeFamily> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::Argument(format!(
                "number of points {n} outside 1..={MAX_POINTS}"
            )));
        }
        let members: BTreeSet<Subset> = members.into_iter().collect();
        for &s in &members {
            if !s.within(n) {
                return Err(Error::Argument(format!(
                    "{s} is not a subset of {{1..{n}}}"
                )));
            }
            if s.len() < 2 {
                return Err(Error::Argument(format!(
                    "large set {s} has fewer than two points"
                )));
            }
        }
        let fam = LargeFamily { n, members };
        if let Some((s, t)) = fam.upward_closure_violation() {
            return Err(Error::Argument(format!(
                "family is not upward closed: {s} is large but {t} is not"
            )));
        }
        Ok(fam)
    }

    pub fn empty(n: usize) -> LargeFamily {
        LargeFamily {
            n,
            members: BTreeSet::new(),
        }
    }

    /// Every subset with at least two points; the family of `X[n]`.
    pub fn all_subsets(n: usize) -> LargeFamily {
        let members = Subset::all(n).filter(|s| s.len() >= 2).collect();
        LargeFamily { n, members }
    }

    fn upward_closure_violation(&self) -> Option<(Subset, Subset)> {
        for &s in &self.members {
            for e in 1..=self.n {
                let t = s.with(e);
                if t != s && !self.members.contains(&t) {
                    return Some((s, t));
                }
            }
        }
        None
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.contains(&s)
    }

    /// Members in canonical (size, lex) order.
    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    /// Large sets containing `s` (including `s` itself when large).
    pub fn supersets_of(&self, s: Subset) -> impl Iterator<Item = Subset> + '_ {
        self.iter().filter(move |v| s.is_subset(*v))
    }

    pub fn permute(&self, perm: &[usize]) -> LargeFamily {
        LargeFamily {
            n: self.n,
            members: self.members.iter().map(|s| s.permute(perm)).collect(),
        }
    }

    /// Small sets with at least two points all of whose strict supersets are
    /// large; adding any one of them keeps the family upward closed.
    pub fn addable_sets(&self) -> Vec<Subset> {
        Subset::all(self.n)
            .filter(|s| s.len() >= 2 && !self.contains(*s))
            .filter(|s| (1..=self.n).all(|e| s.contains(e) || self.contains(s.with(e))))
            .collect()
    }

    /// The family with one more member. Fails if the result is not upward closed.
    pub fn with_member(&self, s: Subset) -> Result<LargeFamily> {
        LargeFamily::new(self.n, self.iter().chain(std::iter::once(s)))
    }

    pub fn is_all_subsets(&self) -> bool {
        self.members.len() == (1usize << self.n) - self.n - 1
    }
}

/// `{S : |S| >= 2, sum of weights over S > 1}`. Sets summing to exactly one are small.
pub fn large_from_weights(w: &Weights) -> LargeFamily {
    let one = BigRational::one();
    let members = Subset::all(w.n())
        .filter(|s| s.len() >= 2)
        .filter(|s| s.iter().map(|i| &w.values()[i - 1]).sum::<BigRational>() > one)
        .collect();
    LargeFamily { n: w.n(), members }
}

/// An order in which the large sets are blown up; supersets always come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Walk {
    steps: Vec<Subset>,
}

impl Walk {
    pub fn new(family: &LargeFamily, steps: Vec<Subset>) -> Result<Walk> {
        if steps.len() != family.len() {
            return Err(Error::WalkOrder(format!(
                "walk has {} steps but the family has {} members",
                steps.len(),
                family.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (k, &s) in steps.iter().enumerate() {
            if !family.contains(s) {
                return Err(Error::WalkOrder(format!("{s} is not a large set")));
            }
            if !seen.insert(s) {
                return Err(Error::WalkOrder(format!("{s} appears twice")));
            }
            if let Some(&late) = steps[k + 1..].iter().find(|t| s.is_strict_subset(**t)) {
                return Err(Error::WalkOrder(format!(
                    "{s} precedes its superset {late}"
                )));
            }
        }
        Ok(Walk { steps })
    }

    pub fn steps(&self) -> &[Subset] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Decreasing cardinality, ties broken lexicographically.
pub fn canonical_walk(family: &LargeFamily) -> Walk {
    let mut steps: Vec<Subset> = family.iter().collect();
    steps.sort_by_key(|s| (Reverse(s.len()), s.elems()));
    Walk { steps }
}

/// Every superset-first ordering of the family. Refuses families with more
/// than `cap` members.
pub fn all_walks(family: &LargeFamily, cap: usize) -> Result<Vec<Walk>> {
    if family.len() > cap {
        return Err(Error::CapExceeded(format!(
            "enumerating walks of {} large sets exceeds the cap of {cap}",
            family.len()
        )));
    }
    let mut canonical = canonical_walk(family).steps;
    canonical.reverse();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(family.len());
    let mut used = vec![false; canonical.len()];
    extend_walks(&canonical, &mut used, &mut prefix, &mut out);
    Ok(out)
}

fn extend_walks(sets: &[Subset], used: &mut [bool], prefix: &mut Vec<Subset>, out: &mut Vec<Walk>) {
    if prefix.len() == sets.len() {
        out.push(Walk {
            steps: prefix.clone(),
        });
        return;
    }
    // Iterate in canonical order so the output is deterministic.
    for k in (0..sets.len()).rev() {
        if used[k] {
            continue;
        }
        let s = sets[k];
        let blocked = sets
            .iter()
            .zip(used.iter())
            .any(|(t, &u)| !u && s.is_strict_subset(*t));
        if blocked {
            continue;
        }
        used[k] = true;
        prefix.push(s);
        extend_walks(sets, used, prefix, out);
        prefix.pop();
        used[k] = false;
    }
}

/// The relabeling of `{1..n}` obtained by collapsing a block `T` to one point.
///
/// The merged point takes the smallest label of `T`; the surviving labels are
/// then compressed to `1..m` preserving order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Merge {
    n: usize,
    block: Subset,
    /// `labels[i - 1]` is the new label of old point `i`.
    labels: Vec<usize>,
    /// `preimage[j - 1]` is the set of old points sent to new label `j`.
    preimage: Vec<Subset>,
}

impl Merge {
    pub fn new(n: usize, block: Subset) -> Result<Merge> {
        if block.is_empty() || !block.within(n) {
            return Err(Error::Argument(format!(
                "cannot merge {block} inside {{1..{n}}}"
            )));
        }
        let star = block.min().expect("nonempty");
        let mut labels = vec![0; n];
        let mut preimage = Vec::new();
        for i in 1..=n {
            if block.contains(i) && i != star {
                continue;
            }
            preimage.push(if i == star {
                block
            } else {
                Subset::singleton(i)
            });
            labels[i - 1] = preimage.len();
        }
        for i in block.iter() {
            labels[i - 1] = labels[star - 1];
        }
        Ok(Merge {
            n,
            block,
            labels,
            preimage,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points after merging, `n - |T| + 1`.
    pub fn m(&self) -> usize {
        self.preimage.len()
    }

    pub fn block(&self) -> Subset {
        self.block
    }

    /// New label of the merged point.
    pub fn star(&self) -> usize {
        self.labels[self.block.min().expect("nonempty") - 1]
    }

    /// New label of old point `i`.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i - 1]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Replaces the merged point by the block `T`.
    pub fn sigma(&self, merged: Subset) -> Subset {
        merged
            .iter()
            .fold(Subset::EMPTY, |acc, j| acc.union(self.preimage[j - 1]))
    }

    /// Image of an old set that contains `T` or misses it; `None` for sets
    /// that overlap `T` or lie strictly inside it.
    pub fn image(&self, s: Subset) -> Option<Subset> {
        let meet = s.intersection(self.block);
        if meet.is_empty() || meet == self.block {
            Some(Subset(
                s.iter().fold(0, |acc, i| acc | (1 << self.labels[i - 1])),
            ))
        } else {
            None
        }
    }
}

/// The large-set family of the coincidence set where the points of `T`
/// collide, given the sets already blown up.
pub fn merge_family(processed: &LargeFamily, t: Subset) -> Result<(Merge, LargeFamily)> {
    if processed.contains(t) {
        return Err(Error::WalkOrder(format!(
            "{t} is already large; its coincidence set no longer exists"
        )));
    }
    let merge = Merge::new(processed.n(), t)?;
    let members: BTreeSet<Subset> = processed.iter().filter_map(|s| merge.image(s)).collect();
    let family = LargeFamily {
        n: merge.m(),
        members,
    };
    debug_assert!(family.upward_closure_violation().is_none());
    Ok((merge, family))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: &[usize]) -> Subset {
        Subset::from_elems(e.iter().copied()).unwrap()
    }

    fn fam(n: usize, sets: &[&[usize]]) -> LargeFamily {
        LargeFamily::new(n, sets.iter().map(|e| s(e))).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert!(is_overlap(s(&[1, 2]), s(&[2, 3])));
        assert!(!is_overlap(s(&[1, 2]), s(&[1, 2, 3])));
        assert!(!is_overlap(s(&[1, 2]), s(&[3, 4])));
    }

    #[test]
    fn large_sets_from_weights() {
        let w = Weights::parse(&["1", "1", "1"]).unwrap();
        assert_eq!(large_from_weights(&w), LargeFamily::all_subsets(3));

        let w = Weights::parse(&["1", "1/2", "1/2"]).unwrap();
        assert_eq!(
            large_from_weights(&w),
            fam(3, &[&[1, 2], &[1, 3], &[1, 2, 3]])
        );

        let w = Weights::parse(&["0", "0", "0", "0"]).unwrap();
        assert!(large_from_weights(&w).is_empty());
    }

    #[test]
    fn weights_outside_unit_interval_rejected() {
        assert!(Weights::parse(&["3/2", "1"]).is_err());
        assert!(Weights::parse(&["-1/3"]).is_err());
        assert!(Weights::parse(&["1/0"]).is_err());
        assert!(Weights::parse(&["x"]).is_err());
    }

    #[test]
    fn family_must_be_upward_closed() {
        assert!(LargeFamily::new(3, [s(&[1, 2])]).is_err());
        assert!(LargeFamily::new(3, [s(&[1])]).is_err());
        assert!(LargeFamily::new(2, [s(&[1, 3])]).is_err());
    }

    #[test]
    fn canonical_walk_examples() {
        let w = canonical_walk(&LargeFamily::all_subsets(3));
        assert_eq!(
            w.steps(),
            &[s(&[1, 2, 3]), s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]
        );
        assert!(canonical_walk(&LargeFamily::empty(3)).is_empty());
        let f = fam(4, &[&[1, 2], &[1, 2, 3], &[1, 2, 4], &[1, 2, 3, 4]]);
        assert_eq!(
            canonical_walk(&f).steps(),
            &[s(&[1, 2, 3, 4]), s(&[1, 2, 3]), s(&[1, 2, 4]), s(&[1, 2])]
        );
    }

    #[test]
    fn walk_validation() {
        let f = LargeFamily::all_subsets(3);
        assert!(Walk::new(&f, vec![s(&[1, 2]), s(&[1, 2, 3]), s(&[1, 3]), s(&[2, 3])]).is_err());
        assert!(Walk::new(&f, vec![s(&[1, 2, 3]), s(&[1, 2])]).is_err());
        assert!(Walk::new(&f, vec![s(&[1, 2, 3]), s(&[2, 3]), s(&[1, 3]), s(&[1, 2])]).is_ok());
    }

    #[test]
    fn all_walks_examples() {
        let w = all_walks(&fam(3, &[&[1, 2, 3], &[1, 2]]), DEFAULT_WALK_CAP).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].steps(), &[s(&[1, 2, 3]), s(&[1, 2])]);

        let f = fam(
            4,
            &[
                &[1, 2],
                &[3, 4],
                &[1, 2, 3],
                &[1, 2, 4],
                &[1, 3, 4],
                &[2, 3, 4],
                &[1, 2, 3, 4],
            ],
        );
        // {1,2} and {3,4} commute below the triples.
        assert!(all_walks(&f, DEFAULT_WALK_CAP).unwrap().len() > 1);

        let w = all_walks(&LargeFamily::all_subsets(3), DEFAULT_WALK_CAP).unwrap();
        assert_eq!(w.len(), 6);
        assert!(w.iter().all(|walk| walk.steps()[0] == s(&[1, 2, 3])));
        assert_eq!(w[0], canonical_walk(&LargeFamily::all_subsets(3)));

        assert!(matches!(
            all_walks(&LargeFamily::all_subsets(4), DEFAULT_WALK_CAP),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn incomparable_pair_has_two_walks() {
        // {1,2} and {3,4} only, inside a family on 4 points: the supersets
        // must be present for upward closure, so exercise the enumerator
        // directly on an antichain.
        let sets = vec![s(&[3, 4]), s(&[1, 2])];
        let mut out = Vec::new();
        extend_walks(&sets, &mut [false, false], &mut Vec::new(), &mut out);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn merge_examples() {
        let (m, f) = merge_family(&fam(3, &[&[1, 2, 3]]), s(&[1, 2])).unwrap();
        assert_eq!(m.m(), 2);
        assert_eq!(m.star(), 1);
        assert_eq!(f, fam(2, &[&[1, 2]]));
        assert_eq!(m.sigma(s(&[1, 2])), s(&[1, 2, 3]));

        let (m, f) = merge_family(&LargeFamily::empty(3), s(&[1, 2, 3])).unwrap();
        assert_eq!(m.m(), 1);
        assert!(f.is_empty());

        let (m, f) = merge_family(&fam(4, &[&[1, 2, 3, 4]]), s(&[1, 2, 3])).unwrap();
        assert_eq!(m.m(), 2);
        assert_eq!(f, fam(2, &[&[1, 2]]));
    }

    #[test]
    fn merge_relabels_order_preservingly() {
        let m = Merge::new(5, s(&[2, 4])).unwrap();
        assert_eq!(m.labels(), &[1, 2, 3, 2, 4]);
        assert_eq!(m.star(), 2);
        assert_eq!(m.sigma(s(&[2, 3])), s(&[2, 3, 4]));
        assert_eq!(m.image(s(&[1, 2])), None);
        assert_eq!(m.image(s(&[1, 2, 4])), Some(s(&[1, 2])));
        assert_eq!(m.image(s(&[3, 5])), Some(s(&[3, 4])));
    }

    #[test]
    fn merge_rejects_large_block() {
        assert!(matches!(
            merge_family(&fam(3, &[&[1, 2, 3]]), s(&[1, 2, 3])),
            Err(Error::WalkOrder(_))
        ));
    }

    #[test]
    fn addable_sets_of_empty_family() {
        assert_eq!(LargeFamily::empty(3).addable_sets(), vec![s(&[1, 2, 3])]);
        assert!(LargeFamily::all_subsets(3).addable_sets().is_empty());
    }
}
