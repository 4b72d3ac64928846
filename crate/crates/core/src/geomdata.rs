//! Intersection-theoretic input for `X = P^d`: Chern classes of the tangent
//! bundle, diagonal classes and ideals, and the Chern polynomials of
//! diagonals in `X^n`.
//!
//! `c(TP^d) = (1 + h)^{d+1}`, so `c_l(TX) = binom(d+1, l) h^l`; the pullback
//! along the `i`-th projection replaces `h` by `h_i`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;

use crate::error::{Error, Result};
use crate::poly::{ChernPoly, Poly, VarTable};
use crate::setcomb::Subset;

/// Sign convention for the Chern polynomial of a pair diagonal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChernConvention {
    /// `c_ij(t) = sum_{l=1}^{d} (-1)^l pr_i^*(c_{d-l}(TX)) t^l + [Delta_ij]`;
    /// leading coefficient `(-1)^d`, evaluated at `+sum D_V` in the relations.
    #[default]
    Alternating,
    /// The monic polynomial `c_ij(-t)`.
    Monic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseGeometry {
    pub d: u32,
    pub n: usize,
    pub convention: ChernConvention,
}

impl BaseGeometry {
    pub fn new(d: u32, n: usize) -> Result<BaseGeometry> {
        if d == 0 {
            return Err(Error::Argument(
                "projective space must have dimension at least 1".into(),
            ));
        }
        if n == 0 || n > crate::setcomb::MAX_POINTS {
            return Err(Error::Argument(format!(
                "number of points {n} out of range"
            )));
        }
        Ok(BaseGeometry {
            d,
            n,
            convention: ChernConvention::default(),
        })
    }

    pub fn with_convention(self, convention: ChernConvention) -> BaseGeometry {
        BaseGeometry { convention, ..self }
    }

    /// Dimension of `X^n`.
    pub fn top_degree(&self) -> u32 {
        self.d * self.n as u32
    }

    /// Integer coefficient of `h^l` in `c_l(TP^d)`.
    pub fn chern_tx(&self, l: u32) -> BigInt {
        binomial(BigInt::from(self.d + 1), BigInt::from(l))
    }

    fn h(&self, vars: &Arc<VarTable>, i: usize) -> Result<Poly> {
        if i == 0 || i > self.n {
            return Err(Error::Argument(format!(
                "point index {i} outside 1..={}",
                self.n
            )));
        }
        let k = vars
            .point_var(i)
            .ok_or_else(|| Error::Structural(format!("no hyperplane class for point {i}")))?;
        Ok(Poly::var(vars, k))
    }

    /// Generators `h_a - h_m` (`m = min S`) of the kernel of restriction to the diagonal.
    pub fn diagonal_ideal(&self, vars: &Arc<VarTable>, s: Subset) -> Result<Vec<Poly>> {
        if s.len() < 2 {
            return Err(Error::Argument(format!(
                "diagonal ideal of {s} needs at least two points"
            )));
        }
        let m = s.min().expect("nonempty");
        let hm = self.h(vars, m)?;
        s.iter()
            .filter(|&a| a != m)
            .map(|a| Ok(&self.h(vars, a)? - &hm))
            .collect()
    }

    /// `[Delta_ij] = sum_{a+b=d} h_i^a h_j^b`.
    pub fn diagonal_class(&self, vars: &Arc<VarTable>, i: usize, j: usize) -> Result<Poly> {
        if i == j {
            return Err(Error::Argument(format!(
                "diagonal class needs two distinct points, got {i} twice"
            )));
        }
        let hi = self.h(vars, i)?;
        let hj = self.h(vars, j)?;
        let mut out = Poly::zero(vars);
        for a in 0..=self.d {
            out = &out + &(&hi.pow(a) * &hj.pow(self.d - a));
        }
        Ok(out)
    }

    /// Chern polynomial of `Delta_ij`, with every Chern class pulled back
    /// along the `i`-th projection.
    pub fn chern_pair(&self, vars: &Arc<VarTable>, i: usize, j: usize) -> Result<ChernPoly> {
        let hi = self.h(vars, i)?;
        let d = self.d;
        let mut coeffs = vec![self.diagonal_class(vars, i, j)?];
        for l in 1..=d {
            let mut c = hi.pow(d - l).scale(&self.chern_tx(d - l));
            if self.convention == ChernConvention::Alternating && l % 2 == 1 {
                c = -&c;
            }
            coeffs.push(c);
        }
        ChernPoly::new(vars, coeffs, d)
    }

    /// Product of `c_{ab}` over consecutive elements of `S` in increasing order.
    pub fn chern_set(&self, vars: &Arc<VarTable>, s: Subset) -> Result<ChernPoly> {
        if s.len() < 2 {
            return Err(Error::Argument(format!(
                "Chern polynomial of {s} needs at least two points"
            )));
        }
        self.chern_chain(vars, &s.elems())
    }

    /// Product of `c_{ab}` over consecutive entries of an arbitrary ordering
    /// of the points.
    pub fn chern_chain(&self, vars: &Arc<VarTable>, chain: &[usize]) -> Result<ChernPoly> {
        if chain.len() < 2 {
            return Err(Error::Argument("a chain needs at least two points".into()));
        }
        let mut acc = ChernPoly::one(vars);
        for w in chain.windows(2) {
            acc = acc.checked_mul(&self.chern_pair(vars, w[0], w[1])?)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: &[usize]) -> Subset {
        Subset::from_elems(e.iter().copied()).unwrap()
    }

    fn setup(d: u32, n: usize) -> (BaseGeometry, Arc<VarTable>) {
        (
            BaseGeometry::new(d, n).unwrap(),
            VarTable::for_points(n, d, []),
        )
    }

    fn p(v: &Arc<VarTable>, text: &str) -> Poly {
        Poly::parse(v, text).unwrap()
    }

    #[test]
    fn diagonal_ideal_examples() {
        let (g, v) = setup(1, 3);
        assert_eq!(
            g.diagonal_ideal(&v, s(&[1, 2])).unwrap(),
            vec![p(&v, "h2 - h1")]
        );
        assert_eq!(
            g.diagonal_ideal(&v, s(&[1, 2, 3])).unwrap(),
            vec![p(&v, "h2 - h1"), p(&v, "h3 - h1")]
        );
        assert!(g.diagonal_ideal(&v, s(&[2])).is_err());
    }

    #[test]
    fn diagonal_class_examples() {
        let (g, v) = setup(1, 2);
        assert_eq!(g.diagonal_class(&v, 1, 2).unwrap(), p(&v, "h1 + h2"));
        let (g, v) = setup(2, 2);
        assert_eq!(
            g.diagonal_class(&v, 1, 2).unwrap(),
            p(&v, "h1^2 + h1*h2 + h2^2")
        );
        assert!(g.diagonal_class(&v, 1, 1).is_err());
    }

    #[test]
    fn diagonal_self_intersection_is_euler_class() {
        for d in 1..=5 {
            let (g, v) = setup(d, 2);
            let delta = g.diagonal_class(&v, 1, 2).unwrap();
            let h1 = Poly::named(&v, "h1");
            let restricted = delta.substitute(&v, &[h1.clone(), h1.clone()]).unwrap();
            assert_eq!(restricted, h1.pow(d).scale(&BigInt::from(d + 1)));
        }
    }

    #[test]
    fn chern_pair_examples() {
        let (g, v) = setup(1, 2);
        let c = g.chern_pair(&v, 1, 2).unwrap();
        assert_eq!(c.coeffs(), &[p(&v, "h1 + h2"), p(&v, "-1")]);

        let (g, v) = setup(2, 2);
        let c = g.chern_pair(&v, 1, 2).unwrap();
        assert_eq!(
            c.coeffs(),
            &[p(&v, "h1^2 + h1*h2 + h2^2"), p(&v, "-3*h1"), p(&v, "1")]
        );

        for d in 1..=4 {
            let (g, v) = setup(d, 3);
            let c = g.chern_pair(&v, 1, 3).unwrap();
            let sign = if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(c.coeff(d as usize), &Poly::constant(&v, sign));
            assert_eq!(c.coeff(0), &g.diagonal_class(&v, 1, 3).unwrap());
        }
    }

    #[test]
    fn monic_convention_flips_odd_coefficients() {
        let (g, v) = setup(3, 2);
        let alt = g.chern_pair(&v, 1, 2).unwrap();
        let monic = g
            .with_convention(ChernConvention::Monic)
            .chern_pair(&v, 1, 2)
            .unwrap();
        assert_eq!(monic.coeff(3), &Poly::one(&v));
        for l in 0..=3 {
            let expect = if l % 2 == 1 {
                -alt.coeff(l)
            } else {
                alt.coeff(l).clone()
            };
            assert_eq!(monic.coeff(l), &expect);
        }
    }

    #[test]
    fn chern_set_examples() {
        let (g, v) = setup(1, 3);
        assert_eq!(
            g.chern_set(&v, s(&[1, 2])).unwrap(),
            g.chern_pair(&v, 1, 2).unwrap()
        );
        let c = g.chern_set(&v, s(&[1, 2, 3])).unwrap();
        assert_eq!(c.coeff(2), &p(&v, "1"));
        assert_eq!(c.coeff(1), &p(&v, "-(h1 + 2*h2 + h3)"));
        assert_eq!(c.coeff(0), &p(&v, "(h1 + h2)*(h2 + h3)"));

        for d in 1..=3 {
            let (g, v) = setup(d, 4);
            for t in Subset::all(4).filter(|t| t.len() >= 2) {
                assert_eq!(
                    g.chern_set(&v, t).unwrap().degree(),
                    d * (t.len() as u32 - 1)
                );
            }
        }
        assert!(g.chern_set(&v, s(&[1])).is_err());
    }

    #[test]
    fn chern_set_constant_term_is_product_of_diagonals() {
        let (g, v) = setup(2, 3);
        let c = g.chern_set(&v, s(&[1, 2, 3])).unwrap();
        let prod = &g.diagonal_class(&v, 1, 2).unwrap() * &g.diagonal_class(&v, 2, 3).unwrap();
        assert_eq!(c.coeff(0), &prod);
        // Identifying all three points: (3 h^2)^2 = 9 h^4 = 0 on P^2.
        let h1 = Poly::named(&v, "h1");
        let collapsed = c
            .coeff(0)
            .substitute(&v, &[h1.clone(), h1.clone(), h1.clone()])
            .unwrap();
        assert!(collapsed.is_zero());
        assert!(c.coeff(0).is_homogeneous_of(4));
    }
}
