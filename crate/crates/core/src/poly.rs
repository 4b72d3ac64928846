//! Exact multivariate polynomials with integer coefficients over a table of
//! graded variables, some of which are nilpotent.
//!
//! Hyperplane classes `h_i` of `(P^d)^n` carry a cap `d + 1`: any monomial in
//! which `h_i` appears to a power of at least the cap is dropped during
//! normalization. This realizes `h_i^{d+1} = 0` without carrying the relation
//! around explicitly, so the surviving monomials in the `h` variables form a
//! basis of `A((P^d)^n)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::setcomb::Subset;

/// What a variable stands for. Only used for naming and bookkeeping; the
/// arithmetic looks at degree and cap alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Pullback of the hyperplane class from factor `i`.
    Point(usize),
    /// Class of the exceptional divisor over the diagonal of a large set.
    Divisor(Subset),
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub degree: u32,
    /// Exponent at which the variable vanishes, if any.
    pub cap: Option<u32>,
    pub kind: VarKind,
}

impl Variable {
    pub fn new(name: impl Into<String>, degree: u32, cap: Option<u32>) -> Variable {
        Variable {
            name: name.into(),
            degree,
            cap,
            kind: VarKind::Other,
        }
    }

    pub fn point(i: usize, d: u32) -> Variable {
        Variable {
            name: format!("h{i}"),
            degree: 1,
            cap: Some(d + 1),
            kind: VarKind::Point(i),
        }
    }

    pub fn divisor(s: Subset) -> Variable {
        Variable {
            name: divisor_name(s),
            degree: 1,
            cap: None,
            kind: VarKind::Divisor(s),
        }
    }
}

/// Canonical name of the divisor variable for `s`, e.g. `D{1,3}`.
pub fn divisor_name(s: Subset) -> String {
    format!("D{s}")
}

/// An ordered list of uniquely named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarTable {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl VarTable {
    pub fn new(vars: Vec<Variable>) -> Result<VarTable> {
        let mut index = HashMap::with_capacity(vars.len());
        for (k, v) in vars.iter().enumerate() {
            if v.degree == 0 {
                return Err(Error::Structural(format!(
                    "variable {} has degree 0",
                    v.name
                )));
            }
            if !is_valid_name(&v.name) {
                return Err(Error::Structural(format!(
                    "`{}` is not a valid variable name",
                    v.name
                )));
            }
            if index.insert(v.name.clone(), k).is_some() {
                return Err(Error::Structural(format!(
                    "duplicate variable name {}",
                    v.name
                )));
            }
        }
        Ok(VarTable { vars, index })
    }

    /// `h1..hn` with cap `d + 1`, followed by `D_S` for each `S` in order.
    pub fn for_points(
        n: usize,
        d: u32,
        divisors: impl IntoIterator<Item = Subset>,
    ) -> Arc<VarTable> {
        let vars = (1..=n)
            .map(|i| Variable::point(i, d))
            .chain(divisors.into_iter().map(Variable::divisor))
            .collect();
        Arc::new(VarTable::new(vars).expect("canonical names are unique"))
    }

    /// A copy with one more variable appended.
    pub fn extended(&self, var: Variable) -> Result<VarTable> {
        let mut vars = self.vars.clone();
        vars.push(var);
        VarTable::new(vars)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn get(&self, k: usize) -> &Variable {
        &self.vars[k]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn point_var(&self, i: usize) -> Option<usize> {
        self.vars.iter().position(|v| v.kind == VarKind::Point(i))
    }

    pub fn divisor_var(&self, s: Subset) -> Option<usize> {
        self.position(&divisor_name(s))
    }
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    let rest: &str = chars.as_str();
    match rest.find('{') {
        None => rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(open) => {
            rest[..open]
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
                && rest.ends_with('}')
                && rest[open + 1..rest.len() - 1]
                    .chars()
                    .all(|c| c.is_ascii_digit() || c == ',')
        }
    }
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector. Ordered graded-lexicographically, with later variables
/// larger than earlier ones.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn from_exponents(e: Vec<u16>) -> Monomial {
        Monomial(e.into_boxed_slice())
    }

    pub fn var(nvars: usize, k: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Degree with respect to the variable degrees of `vars`.
    pub fn degree(&self, vars: &VarTable) -> u32 {
        self.0
            .iter()
            .zip(vars.vars())
            .map(|(&e, v)| e as u32 * v.degree)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// False when some capped variable reaches its cap.
    pub fn respects_caps(&self, vars: &VarTable) -> bool {
        self.0
            .iter()
            .zip(vars.vars())
            .all(|(&e, v)| v.cap.is_none_or(|c| (e as u32) < c))
    }

    /// Pads with zero exponents for variables appended to the table.
    fn padded(&self, nvars: usize) -> Monomial {
        let mut e = self.0.to_vec();
        e.resize(nvars, 0);
        Monomial(e.into_boxed_slice())
    }

    fn write(&self, vars: &VarTable, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&vars.get(k).name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with integer coefficients over a [`VarTable`], kept in
/// normal form: no zero coefficients and no monomial that violates a cap.
#[derive(Clone)]
pub struct Poly {
    vars: Arc<VarTable>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero(vars: &Arc<VarTable>) -> Poly {
        Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarTable>, c: impl Into<BigInt>) -> Poly {
        Poly::from_terms(vars, [(Monomial::one(vars.len()), c.into())])
    }

    pub fn one(vars: &Arc<VarTable>) -> Poly {
        Poly::constant(vars, 1)
    }

    pub fn var(vars: &Arc<VarTable>, k: usize) -> Poly {
        Poly::from_terms(vars, [(Monomial::var(vars.len(), k), BigInt::one())])
    }

    /// Variable by name. Panics if absent.
    pub fn named(vars: &Arc<VarTable>, name: &str) -> Poly {
        let k = vars
            .position(name)
            .unwrap_or_else(|| panic!("no variable named {name}"));
        Poly::var(vars, k)
    }

    pub fn from_terms(
        vars: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, BigInt)>,
    ) -> Poly {
        let mut p = Poly::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent vector length mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() || !m.respects_caps(&self.vars) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// `Some(k)` when every term has degree `k`; `None` for zero or
    /// inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.degree(&self.vars));
        let first = degs.next()?;
        degs.all(|k| k == first).then_some(first)
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Homogeneous of degree `k`, or zero.
    pub fn is_homogeneous_of(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.degree(&self.vars) == k)
    }

    fn check_table(&self, other: &Poly) -> Result<()> {
        if same_table(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::Structural(
                "polynomials live over different variable tables".into(),
            ))
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_table(other)?;
        let mut out = Poly::zero(&self.vars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Multiplies by a single monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (a, c) in &self.terms {
            out.add_term(a.mul(m), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sign-normalized copy whose leading coefficient is positive.
    pub fn with_positive_lead(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Reinterprets the polynomial over a table that contains every variable
    /// of the current one under the same name. Caps of the new table apply.
    pub fn lift_into(&self, target: &Arc<VarTable>) -> Result<Poly> {
        if same_table(&self.vars, target) {
            return Ok(self.clone());
        }
        let is_prefix = self.vars.len() <= target.len()
            && self
                .vars
                .vars()
                .iter()
                .zip(target.vars())
                .all(|(a, b)| a.name == b.name);
        if is_prefix {
            let terms = self
                .terms
                .iter()
                .map(|(m, c)| (m.padded(target.len()), c.clone()));
            return Ok(Poly::from_terms(target, terms));
        }
        let map = self
            .vars
            .vars()
            .iter()
            .map(|v| {
                target.position(&v.name).ok_or_else(|| {
                    Error::Structural(format!("variable {} missing from target table", v.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u16; target.len()];
            for (k, &x) in m.0.iter().enumerate() {
                e[map[k]] = x;
            }
            (Monomial::from_exponents(e), c.clone())
        });
        Ok(Poly::from_terms(target, terms))
    }

    /// Ring map sending variable `k` to `images[k]`, all over `target`.
    pub fn substitute(&self, target: &Arc<VarTable>, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.vars.len() {
            return Err(Error::Structural(format!(
                "substitution needs {} images, got {}",
                self.vars.len(),
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|p| !same_table(&p.vars, target)) {
            return Err(Error::Structural(format!(
                "image {bad} lives over a different table"
            )));
        }
        let mut powers: HashMap<(usize, u16), Poly> = HashMap::new();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((k, e))
                    .or_insert_with(|| images[k].pow(e as u32));
                term = &term * &*p;
                if term.is_zero() {
                    break;
                }
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Parses the plain-text syntax produced by `Display`.
    pub fn parse(vars: &Arc<VarTable>, text: &str) -> Result<Poly> {
        Parser {
            vars,
            src: text,
            pos: 0,
        }
        .parse()
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares term lists from the leading term down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let is_const = m.0.iter().all(|&e| e == 0);
            if is_const {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                m.write(&self.vars, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

// Operator forms panic on mismatched tables; use the `checked_*` methods when
// the operands come from untrusted places.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs)
            .expect("polynomials over different variable tables")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs)
            .expect("polynomials over different variable tables")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs)
            .expect("polynomials over different variable tables")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Sum of the given variables (zero when empty).
pub fn sum_of_vars(vars: &Arc<VarTable>, ks: impl IntoIterator<Item = usize>) -> Poly {
    let mut out = Poly::zero(vars);
    for k in ks {
        out.add_term(Monomial::var(vars.len(), k), BigInt::one());
    }
    out
}

struct Parser<'a> {
    vars: &'a Arc<VarTable>,
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn parse(mut self) -> Result<Poly> {
        let mut out = Poly::zero(self.vars);
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let term = self.term()?;
            out = &out + &if neg { -&term } else { term };
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(out);
            }
            neg = self.sign().ok_or_else(|| self.err("expected `+` or `-`"))?;
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected a number"))
    }

    fn factor(&mut self) -> Result<Poly> {
        self.skip_ws();
        let base = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let n: BigInt = self.src[start..self.pos].parse().expect("digits");
                Poly::constant(self.vars, n)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                if self.peek() == Some('{') {
                    while let Some(c) = self.bump() {
                        if c == '}' {
                            break;
                        }
                    }
                }
                let name = &self.src[start..self.pos];
                let k = self
                    .vars
                    .position(name)
                    .ok_or_else(|| self.err(&format!("unknown variable `{name}`")))?;
                Poly::var(self.vars, k)
            }
            Some('(') => {
                self.bump();
                let close = self.src[self.pos..]
                    .find(')')
                    .map(|i| self.pos + i)
                    .ok_or_else(|| self.err("unbalanced parenthesis"))?;
                let inner = Poly::parse(self.vars, &self.src[self.pos..close])?;
                self.pos = close + 1;
                inner
            }
            _ => return Err(self.err("expected a factor")),
        };
        self.skip_ws();
        if self.peek() == Some('^') {
            self.bump();
            self.skip_ws();
            let e = self.number()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }
}

/// Sign applied to the formal variable in a reparametrization `t -> ±t + u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn compose(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// A polynomial in a formal variable `t` whose coefficients are classes:
/// `coeffs[l]` multiplies `t^l`, and is homogeneous of degree `degree - l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernPoly {
    coeffs: Vec<Poly>,
    degree: u32,
}

impl ChernPoly {
    pub fn new(vars: &Arc<VarTable>, mut coeffs: Vec<Poly>, degree: u32) -> Result<ChernPoly> {
        if coeffs.len() > degree as usize + 1 {
            let extra_nonzero = coeffs[degree as usize + 1..].iter().any(|c| !c.is_zero());
            if extra_nonzero {
                return Err(Error::Degree(format!(
                    "Chern polynomial of degree {degree} has a nonzero t^{} coefficient",
                    coeffs.len() - 1
                )));
            }
            coeffs.truncate(degree as usize + 1);
        }
        coeffs.resize(degree as usize + 1, Poly::zero(vars));
        for (l, c) in coeffs.iter().enumerate() {
            if !same_table(c.vars(), vars) {
                return Err(Error::Structural(
                    "Chern coefficient over a different table".into(),
                ));
            }
            if !c.is_homogeneous_of(degree - l as u32) {
                return Err(Error::Degree(format!(
                    "coefficient of t^{l} is `{c}`, expected degree {}",
                    degree - l as u32
                )));
            }
        }
        Ok(ChernPoly { coeffs, degree })
    }

    /// The constant polynomial `1`, of degree 0.
    pub fn one(vars: &Arc<VarTable>) -> ChernPoly {
        ChernPoly {
            coeffs: vec![Poly::one(vars)],
            degree: 0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, l: usize) -> &Poly {
        &self.coeffs[l]
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.coeffs[0].vars()
    }

    /// Replaces the coefficient of `t^l`, keeping homogeneity.
    pub fn with_coeff(&self, l: usize, c: Poly) -> Result<ChernPoly> {
        let mut coeffs = self.coeffs.clone();
        coeffs[l] = c;
        ChernPoly::new(self.vars(), coeffs, self.degree)
    }

    /// `sum_l coeffs[l] * s^l`, evaluated by Horner's rule.
    pub fn eval(&self, s: &Poly) -> Result<Poly> {
        if !s.is_homogeneous_of(1) {
            return Err(Error::Degree(format!(
                "substituted class `{s}` is not of degree 1"
            )));
        }
        let mut acc = Poly::zero(self.vars());
        for c in self.coeffs.iter().rev() {
            acc = &acc.checked_mul(s)? + c;
        }
        Ok(acc)
    }

    /// The Chern polynomial `Q(t) = P(sign * t + u)`.
    pub fn shift(&self, u: &Poly, sign: Sign) -> Result<ChernPoly> {
        if !u.is_homogeneous_of(1) {
            return Err(Error::Degree(format!("shift `{u}` is not of degree 1")));
        }
        self.coeffs[0].check_table(u)?;
        let top = self.degree as usize;
        let upow: Vec<Poly> = std::iter::successors(Some(Poly::one(self.vars())), |p| Some(p * u))
            .take(top + 1)
            .collect();
        let mut out = Vec::with_capacity(top + 1);
        for j in 0..=top {
            let mut c = Poly::zero(self.vars());
            for l in j..=top {
                if self.coeffs[l].is_zero() {
                    continue;
                }
                let b = binomial(BigInt::from(l), BigInt::from(j));
                c = &c + &(&self.coeffs[l] * &upow[l - j]).scale(&b);
            }
            if sign == Sign::Minus && j % 2 == 1 {
                c = -&c;
            }
            out.push(c);
        }
        ChernPoly::new(self.vars(), out, self.degree)
    }

    /// Product of Chern polynomials; degrees add.
    pub fn checked_mul(&self, other: &ChernPoly) -> Result<ChernPoly> {
        self.coeffs[0].check_table(&other.coeffs[0])?;
        let mut out = vec![Poly::zero(self.vars()); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        ChernPoly::new(self.vars(), out, self.degree + other.degree)
    }

    pub fn lift_into(&self, target: &Arc<VarTable>) -> Result<ChernPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.lift_into(target))
            .collect::<Result<Vec<_>>>()?;
        ChernPoly::new(target, coeffs, self.degree)
    }

    pub fn substitute(&self, target: &Arc<VarTable>, images: &[Poly]) -> Result<ChernPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.substitute(target, images))
            .collect::<Result<Vec<_>>>()?;
        ChernPoly::new(target, coeffs, self.degree)
    }
}

impl fmt::Display for ChernPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (l, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match l {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{l}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, d: u32) -> Arc<VarTable> {
        VarTable::for_points(n, d, [])
    }

    #[test]
    fn arithmetic_examples() {
        let v = table(2, 2);
        let h1 = Poly::named(&v, "h1");
        let h2 = Poly::named(&v, "h2");
        assert_eq!(&(&h1 + &h2) + &(-&h2), h1);
        assert_eq!(&(&h1 - &h2) * &(&h1 + &h2), &(&h1 * &h1) - &(&h2 * &h2));
        for d in 1..5 {
            let v = table(1, d);
            let h = Poly::named(&v, "h1");
            assert!((&h.pow(d) * &h).is_zero());
            assert!(!h.pow(d).is_zero());
        }
    }

    #[test]
    fn mismatched_tables_are_a_structural_error() {
        let a = Poly::named(&table(2, 1), "h1");
        let b = Poly::named(&table(2, 2), "h1");
        assert!(matches!(a.checked_add(&b), Err(Error::Structural(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::Structural(_))));
    }

    #[test]
    fn display_and_parse() {
        let v = Arc::new(
            VarTable::new(vec![
                Variable::new("h", 1, Some(4)),
                Variable::new("E", 1, None),
            ])
            .unwrap(),
        );
        let p = Poly::parse(&v, "E^2 - 2*h*E + h^2").unwrap();
        assert_eq!(p.to_string(), "E^2 - 2*h*E + h^2");
        assert_eq!(Poly::parse(&v, "E^2 \u{2212} 2*h*E + h^2").unwrap(), p);
        assert_eq!(
            Poly::parse(&v, "-(h + E)^2").unwrap().to_string(),
            "-E^2 - 2*h*E - h^2"
        );
        assert_eq!(Poly::parse(&v, "h^4").unwrap(), Poly::zero(&v));
        assert_eq!(Poly::parse(&v, "3 - 3").unwrap().to_string(), "0");
        assert!(Poly::parse(&v, "x").is_err());
        assert!(Poly::parse(&v, "h +").is_err());

        let w = VarTable::for_points(3, 1, [Subset::from_elems([1, 3]).unwrap()]);
        let q = Poly::parse(&w, "2*h1*D{1,3} - D{1,3}^2").unwrap();
        assert_eq!(q.to_string(), "-D{1,3}^2 + 2*h1*D{1,3}");
    }

    #[test]
    fn chern_eval_examples() {
        let v = table(2, 2);
        let h = Poly::named(&v, "h1");
        let c = Poly::named(&v, "h2");
        let p = ChernPoly::new(&v, vec![c.clone(), Poly::one(&v)], 1).unwrap();
        assert_eq!(p.eval(&Poly::zero(&v)).unwrap(), c);

        // t^2 - 2 h t + h^2 at t = h
        let sq = ChernPoly::new(
            &v,
            vec![h.pow(2), h.scale(&BigInt::from(-2)), Poly::one(&v)],
            2,
        )
        .unwrap();
        assert!(sq.eval(&h).unwrap().is_zero());

        assert!(matches!(sq.eval(&h.pow(2)), Err(Error::Degree(_))));
        assert!(matches!(
            sq.eval(&(&h + &Poly::one(&v))),
            Err(Error::Degree(_))
        ));
    }

    #[test]
    fn chern_shift_examples() {
        let v = Arc::new(
            VarTable::new(vec![
                Variable::new("a", 1, None),
                Variable::new("b", 2, None),
                Variable::new("E", 1, None),
            ])
            .unwrap(),
        );
        let a = Poly::named(&v, "a");
        let b = Poly::named(&v, "b");
        let e = Poly::named(&v, "E");

        let c = ChernPoly::new(&v, vec![a.clone(), Poly::one(&v)], 1).unwrap();
        let q = c.shift(&Poly::zero(&v), Sign::Minus).unwrap();
        assert_eq!(q.coeff(1), &-&Poly::one(&v));
        assert_eq!(q.coeff(0), &a);

        // P(t) = t^2 + a t + b; P(t - E) has constant term E^2 - aE + b.
        let p = ChernPoly::new(&v, vec![b.clone(), a.clone(), Poly::one(&v)], 2).unwrap();
        let q = p.shift(&-&e, Sign::Plus).unwrap();
        assert_eq!(q.coeff(0), &Poly::parse(&v, "E^2 - a*E + b").unwrap());
        assert_eq!(q.coeff(1), &Poly::parse(&v, "a - 2*E").unwrap());
        assert_eq!(q.coeff(2), &Poly::one(&v));
    }

    #[test]
    fn chern_poly_rejects_inhomogeneous_coefficients() {
        let v = table(1, 3);
        let h = Poly::named(&v, "h1");
        assert!(ChernPoly::new(&v, vec![h.clone(), Poly::one(&v)], 2).is_err());
        assert!(ChernPoly::new(&v, vec![h.pow(2), h.clone(), Poly::one(&v)], 2).is_ok());
    }

    #[test]
    fn lift_and_substitute() {
        let v = table(2, 1);
        let w = Arc::new(v.extended(Variable::new("E", 1, None)).unwrap());
        let p = Poly::parse(&v, "h1 + 2*h2").unwrap();
        let lifted = p.lift_into(&w).unwrap();
        assert_eq!(lifted.to_string(), "2*h2 + h1");

        // h1 -> E, h2 -> h1 over w
        let img = p
            .substitute(&w, &[Poly::named(&w, "E"), Poly::named(&w, "h1")])
            .unwrap();
        assert_eq!(img, Poly::parse(&w, "E + 2*h1").unwrap());
        assert!(lifted.lift_into(&v).is_err());
    }

    #[test]
    fn variable_names_validated() {
        assert!(VarTable::new(vec![
            Variable::new("h", 1, None),
            Variable::new("h", 1, None)
        ])
        .is_err());
        assert!(VarTable::new(vec![Variable::new("1h", 1, None)]).is_err());
        assert!(VarTable::new(vec![Variable::new("h", 0, None)]).is_err());
    }
}
