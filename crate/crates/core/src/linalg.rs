//! Exact rank computations over the rationals, carried out on integer rows
//! without division (every combination step cross-multiplies and the result
//! is reduced to its primitive part).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A sparse integer row, sorted by column, with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow {
    entries: Vec<(u32, BigInt)>,
}

impl SparseRow {
    pub fn new(mut entries: Vec<(u32, BigInt)>) -> SparseRow {
        entries.sort_by_key(|(c, _)| *c);
        let mut out: Vec<(u32, BigInt)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match out.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseRow { entries: out }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, BigInt)] {
        &self.entries
    }

    fn lead(&self) -> Option<&(u32, BigInt)> {
        self.entries.first()
    }

    /// Divides out the content and makes the leading entry positive.
    fn make_primitive(&mut self) {
        let mut g = BigInt::zero();
        for (_, v) in &self.entries {
            g = g.gcd(v);
            if g.is_one() {
                break;
            }
        }
        let flip = self.lead().is_some_and(|(_, v)| v.is_negative());
        if g.is_zero() {
            return;
        }
        if flip {
            g = -g;
        }
        if !g.is_one() {
            for (_, v) in &mut self.entries {
                *v /= &g;
            }
        }
    }

    /// `a * self - b * other`.
    fn combine(&self, a: &BigInt, other: &SparseRow, b: &BigInt) -> SparseRow {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&self.entries, &other.entries);
        while i < x.len() || j < y.len() {
            let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
            let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
            if take_x {
                out.push((x[i].0, a * &x[i].1));
                i += 1;
            } else if take_y {
                out.push((y[j].0, -(b * &y[j].1)));
                j += 1;
            } else {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseRow { entries: out }
    }
}

/// Rows in echelon form keyed by their leading column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: HashMap<u32, SparseRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the pivots until it vanishes or its leading
    /// column is free.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.make_primitive();
        while let Some((col, a)) = row.lead() {
            let Some(pivot) = self.pivots.get(col) else {
                break;
            };
            let b = &pivot.entries[0].1;
            let g = a.gcd(b);
            let (ra, rb) = (b / &g, a / &g);
            row = row.combine(&ra, pivot, &rb);
            row.make_primitive();
        }
        row
    }

    /// Adds a row to the span; returns whether it was independent.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let row = self.reduce(row);
        match row.lead() {
            None => false,
            Some((col, _)) => {
                let col = *col;
                self.pivots.insert(col, row);
                true
            }
        }
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_zero()
    }
}

/// Rank of a sparse integer matrix over the rationals.
pub fn sparse_rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Rank of a dense integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(v: &[i64]) -> SparseRow {
        SparseRow::new(
            v.iter()
                .enumerate()
                .map(|(c, &x)| (c as u32, BigInt::from(x)))
                .collect(),
        )
    }

    fn dense(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        let m: &[&[i64]] = &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]];
        assert_eq!(sparse_rank(m.iter().map(|r| row(r))), 2);
        assert_eq!(bareiss_rank(dense(m)), 2);

        let m: &[&[i64]] = &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]];
        assert_eq!(sparse_rank(m.iter().map(|r| row(r))), 3);
        assert_eq!(bareiss_rank(dense(m)), 3);

        assert_eq!(sparse_rank(Vec::new()), 0);
        assert_eq!(bareiss_rank(dense(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn membership_against_span() {
        let mut e = Echelon::new();
        assert!(e.insert(row(&[1, 1, 0])));
        assert!(e.insert(row(&[0, 2, 2])));
        assert!(!e.insert(row(&[3, 5, 2])));
        assert!(e.contains(row(&[1, -1, -2])));
        assert!(!e.contains(row(&[0, 0, 1])));
    }

    #[test]
    fn duplicate_columns_are_summed() {
        let r = SparseRow::new(vec![(2, 3.into()), (0, 1.into()), (2, (-3).into())]);
        assert_eq!(r.entries(), &[(0, BigInt::from(1))]);
    }

    proptest! {
        #[test]
        fn sparse_and_bareiss_agree(
            m in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 0..8)
        ) {
            let rows: Vec<SparseRow> = m.iter().map(|r| row(r)).collect();
            let d: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            prop_assert_eq!(sparse_rank(rows), bareiss_rank(d));
        }
    }
}
