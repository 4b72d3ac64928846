//! Presentations of Chow rings by generators and homogeneous relations.
//!
//! The builders here produce:
//! * the weighted presentation over `A(X^n)[D_S : S large]` with the four
//!   relation families (overlap products, diagonal ideal times `D_S`,
//!   Chern relations, and the excess Chern relations times `D_S`);
//! * the reduced presentation of `X[n]` with only pair Chern relations;
//! * the ideal and Chern polynomial of a coincidence set;
//! * a single blow-up `A(Y)[E] / (J E, P(-E))` and the iterated construction
//!   that blows up the large sets one at a time along a walk.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomdata::BaseGeometry;
use crate::poly::{sum_of_vars, ChernPoly, Poly, Sign, VarKind, VarTable, Variable};
use crate::setcomb::{is_overlap, merge_family, LargeFamily, Merge, Subset, Walk};

/// A graded ring `Q[vars] / (relations)`, with the variable caps acting as
/// additional monomial relations and every class above `top_degree` zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    vars: Arc<VarTable>,
    relations: Vec<Poly>,
    top_degree: u32,
}

impl Presentation {
    /// Checks homogeneity, drops zeros, normalizes signs, deduplicates and sorts.
    pub fn new(vars: Arc<VarTable>, relations: Vec<Poly>, top_degree: u32) -> Result<Presentation> {
        let mut set = BTreeSet::new();
        for r in relations {
            if r.is_zero() {
                continue;
            }
            let r = r.lift_into(&vars)?;
            if r.homogeneous_degree().is_none() {
                return Err(Error::Degree(format!("relation `{r}` is not homogeneous")));
            }
            set.insert(r.with_positive_lead());
        }
        Ok(Presentation {
            vars,
            relations: set.into_iter().collect(),
            top_degree,
        })
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    /// Same ring with the variables reordered (or renamed-by-position) into
    /// `vars`, which must contain every current variable name.
    pub fn reindexed(&self, vars: &Arc<VarTable>) -> Result<Presentation> {
        let rels = self
            .relations
            .iter()
            .map(|r| r.lift_into(vars))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(vars.clone(), rels, self.top_degree)
    }

    /// Plain-text dump: variables with degree and cap, then relations.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "top_degree: {}", self.top_degree).unwrap();
        writeln!(out, "vars:").unwrap();
        for v in self.vars.vars() {
            match v.cap {
                Some(c) => writeln!(out, "{} deg {} cap {}", v.name, v.degree, c).unwrap(),
                None => writeln!(out, "{} deg {}", v.name, v.degree).unwrap(),
            }
        }
        writeln!(out, "rel:").unwrap();
        for r in &self.relations {
            writeln!(out, "{r}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            top_degree: self.top_degree,
            vars: self
                .vars
                .vars()
                .iter()
                .map(|v| VarJson {
                    name: v.name.clone(),
                    degree: v.degree,
                    cap: v.cap,
                })
                .collect(),
            relations: self.relations.iter().map(|r| r.to_string()).collect(),
        }
    }

    /// A Singular script declaring the ring and the ideal (caps included as
    /// explicit generators). Braced divisor names are flattened, `D{1,3}`
    /// becoming `D_1_3`.
    pub fn to_singular(&self) -> String {
        let cas_name = |name: &str| -> String { name.replace(['{', ','], "_").replace('}', "") };
        let mut out = String::new();
        writeln!(out, "// variables:").unwrap();
        for v in self.vars.vars() {
            writeln!(out, "//   {} = {}", cas_name(&v.name), v.name).unwrap();
        }
        let names: Vec<String> = self.vars.vars().iter().map(|v| cas_name(&v.name)).collect();
        let weights: Vec<String> = self
            .vars
            .vars()
            .iter()
            .map(|v| v.degree.to_string())
            .collect();
        writeln!(
            out,
            "ring R = 0, ({}), wp({});",
            names.join(", "),
            weights.join(", ")
        )
        .unwrap();
        let mut gens: Vec<String> = self
            .vars
            .vars()
            .iter()
            .filter_map(|v| v.cap.map(|c| format!("{}^{}", cas_name(&v.name), c)))
            .collect();
        for r in &self.relations {
            let mut text = r.to_string();
            for v in self.vars.vars() {
                if v.name.contains('{') {
                    text = text.replace(&v.name, &cas_name(&v.name));
                }
            }
            gens.push(text);
        }
        writeln!(out, "ideal I =").unwrap();
        for (k, g) in gens.iter().enumerate() {
            let sep = if k + 1 == gens.len() { ";" } else { "," };
            writeln!(out, "  {g}{sep}").unwrap();
        }
        writeln!(out, "// graded ranks up to degree {}:", self.top_degree).unwrap();
        writeln!(out, "ideal G = std(I);").unwrap();
        writeln!(out, "hilb(G, 2);").unwrap();
        out
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VarJson {
    pub name: String,
    pub degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PresentationJson {
    pub top_degree: u32,
    pub vars: Vec<VarJson>,
    pub relations: Vec<String>,
}

/// Relations of a presentation grouped by the family that produced them.
#[derive(Clone, Debug, Default)]
pub struct RelationFamilies {
    /// `D_S D_T` for overlapping `S`, `T`.
    pub overlap: Vec<Poly>,
    /// `g D_S` for `g` in the diagonal ideal of `S`.
    pub diagonal: Vec<Poly>,
    /// `c_S(sum_{V ⊇ S} D_V)`.
    pub chern: Vec<Poly>,
    /// `D_S c_{S'}(sum_{V ⊇ S ∪ S'} D_V)` for `|S ∩ S'| = 1`.
    pub excess: Vec<Poly>,
}

impl RelationFamilies {
    pub fn all(&self) -> impl Iterator<Item = &Poly> {
        self.overlap
            .iter()
            .chain(&self.diagonal)
            .chain(&self.chern)
            .chain(&self.excess)
    }

    pub fn into_presentation(self, vars: Arc<VarTable>, top_degree: u32) -> Result<Presentation> {
        let rels = self.all().cloned().collect();
        Presentation::new(vars, rels, top_degree)
    }
}

fn check_family(g: &BaseGeometry, family: &LargeFamily) -> Result<()> {
    if family.n() != g.n {
        return Err(Error::Argument(format!(
            "family on {} points used with geometry on {} points",
            family.n(),
            g.n
        )));
    }
    Ok(())
}

fn divisor(vars: &Arc<VarTable>, s: Subset) -> Result<Poly> {
    let k = vars
        .divisor_var(s)
        .ok_or_else(|| Error::Structural(format!("no divisor variable for {s}")))?;
    Ok(Poly::var(vars, k))
}

/// `sum of D_V` over large `V` containing `s`.
fn divisor_sum(vars: &Arc<VarTable>, family: &LargeFamily, s: Subset) -> Result<Poly> {
    let ks = family
        .supersets_of(s)
        .map(|v| {
            vars.divisor_var(v)
                .ok_or_else(|| Error::Structural(format!("no divisor variable for {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sum_of_vars(vars, ks))
}

/// The four relation families of the weighted presentation, with the Chern
/// polynomial of each diagonal supplied by `chern`.
pub fn weighted_families<F>(
    g: &BaseGeometry,
    vars: &Arc<VarTable>,
    family: &LargeFamily,
    mut chern: F,
) -> Result<RelationFamilies>
where
    F: FnMut(Subset) -> Result<ChernPoly>,
{
    check_family(g, family)?;
    let large: Vec<Subset> = family.iter().collect();
    let mut out = RelationFamilies::default();
    for (a, &s) in large.iter().enumerate() {
        for &t in &large[a + 1..] {
            if is_overlap(s, t) {
                out.overlap.push(&divisor(vars, s)? * &divisor(vars, t)?);
            }
        }
    }
    for &s in &large {
        let ds = divisor(vars, s)?;
        for j in g.diagonal_ideal(vars, s)? {
            out.diagonal.push(&j * &ds);
        }
    }
    for &s in &large {
        out.chern
            .push(chern(s)?.eval(&divisor_sum(vars, family, s)?)?);
    }
    let everything = Subset::full(g.n);
    for &s in &large {
        let ds = divisor(vars, s)?;
        for i in s.iter() {
            let outside = everything.difference(s);
            for r in Subset::all(g.n).filter(|r| !r.is_empty() && r.is_subset(outside)) {
                let s2 = r.with(i);
                let sum = divisor_sum(vars, family, s.union(s2))?;
                out.excess.push(&ds * &chern(s2)?.eval(&sum)?);
            }
        }
    }
    Ok(out)
}

/// Variables `h_1..h_n` followed by `D_S` for the large sets in canonical order.
pub fn canonical_vars(g: &BaseGeometry, family: &LargeFamily) -> Arc<VarTable> {
    VarTable::for_points(g.n, g.d, family.iter())
}

/// The weighted presentation of `A(X_A[n])` for the given large-set family.
pub fn build_weighted(g: &BaseGeometry, family: &LargeFamily) -> Result<Presentation> {
    let vars = canonical_vars(g, family);
    weighted_families(g, &vars, family, |s| g.chern_set(&vars, s))?
        .into_presentation(vars, g.top_degree())
}

/// The reduced presentation of `A(X[n])`: overlap, diagonal, and pair Chern relations.
pub fn reduced_families(g: &BaseGeometry, vars: &Arc<VarTable>) -> Result<RelationFamilies> {
    let family = LargeFamily::all_subsets(g.n);
    let mut out = RelationFamilies::default();
    let large: Vec<Subset> = family.iter().collect();
    for (a, &s) in large.iter().enumerate() {
        for &t in &large[a + 1..] {
            if is_overlap(s, t) {
                out.overlap.push(&divisor(vars, s)? * &divisor(vars, t)?);
            }
        }
    }
    for &s in &large {
        let ds = divisor(vars, s)?;
        for j in g.diagonal_ideal(vars, s)? {
            out.diagonal.push(&j * &ds);
        }
    }
    for &s in large.iter().filter(|s| s.len() == 2) {
        out.chern.push(
            g.chern_set(vars, s)?
                .eval(&divisor_sum(vars, &family, s)?)?,
        );
    }
    Ok(out)
}

pub fn build_reduced(g: &BaseGeometry) -> Result<Presentation> {
    let vars = canonical_vars(g, &LargeFamily::all_subsets(g.n));
    reduced_families(g, &vars)?.into_presentation(vars, g.top_degree())
}

/// Ideal and Chern polynomial of a coincidence set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoincidenceData {
    pub block: Subset,
    pub ideal_gens: Vec<Poly>,
    pub chern: ChernPoly,
}

/// Coincidence data for the small set `t` in the canonical variables of `family`.
pub fn coincidence_data(
    g: &BaseGeometry,
    family: &LargeFamily,
    t: Subset,
    i: usize,
) -> Result<CoincidenceData> {
    coincidence_data_in(g, &canonical_vars(g, family), family, t, i)
}

/// Coincidence data over an arbitrary table holding `h_1..h_n` and a divisor
/// variable for each member of `family`.
pub fn coincidence_data_in(
    g: &BaseGeometry,
    vars: &Arc<VarTable>,
    family: &LargeFamily,
    t: Subset,
    i: usize,
) -> Result<CoincidenceData> {
    check_family(g, family)?;
    if family.contains(t) {
        return Err(Error::Argument(format!(
            "{t} is large and has no coincidence set"
        )));
    }
    if t.len() < 2 || !t.within(g.n) {
        return Err(Error::Argument(format!(
            "{t} is not a block of at least two points"
        )));
    }
    if !t.contains(i) {
        return Err(Error::Argument(format!("{i} is not an element of {t}")));
    }
    let mut ideal_gens = g.diagonal_ideal(vars, t)?;
    for s in family.iter().filter(|s| is_overlap(*s, t)) {
        ideal_gens.push(divisor(vars, s)?);
    }
    for s in family.iter().filter(|s| t.is_strict_subset(*s)) {
        let s2 = s.difference(t).with(i);
        ideal_gens.push(
            g.chern_set(vars, s2)?
                .eval(&divisor_sum(vars, family, s)?)?,
        );
    }
    let u = divisor_sum(vars, family, t)?;
    let chern = g.chern_set(vars, t)?.shift(&u, Sign::Minus)?;
    Ok(CoincidenceData {
        block: t,
        ideal_gens,
        chern,
    })
}

/// The blow-up formula `A(Y)[E] / (J E, P(-E))`.
pub fn keel_step(
    p: &Presentation,
    ideal: &[Poly],
    chern: &ChernPoly,
    exceptional: Variable,
) -> Result<Presentation> {
    if exceptional.degree != 1 {
        return Err(Error::Structural(
            "the exceptional class must have degree 1".into(),
        ));
    }
    let vars = Arc::new(p.vars.extended(exceptional)?);
    let e = Poly::var(&vars, vars.len() - 1);
    let mut rels: Vec<Poly> = p
        .relations
        .iter()
        .map(|r| r.lift_into(&vars))
        .collect::<Result<_>>()?;
    for j in ideal {
        if !j.is_homogeneous() {
            return Err(Error::Degree(format!(
                "ideal generator `{j}` is not homogeneous"
            )));
        }
        rels.push(&j.lift_into(&vars)? * &e);
    }
    rels.push(chern.lift_into(&vars)?.eval(&-&e)?);
    Presentation::new(vars, rels, p.top_degree)
}

/// Ring map from the ambient ring to the ring of a coincidence set: the
/// points of the block collapse to one, divisors overlapping the block vanish
/// and the others pass to their merged images.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub merge: Merge,
    pub center: Presentation,
    pub center_family: LargeFamily,
    /// Image of each ambient variable, over the center's table.
    pub images: Vec<Poly>,
}

/// Restriction from `X_A[n]` (with family `family`, in table `vars`) to the
/// coincidence set of `t`, together with the center's own presentation.
pub fn coincidence_restriction(
    g: &BaseGeometry,
    vars: &Arc<VarTable>,
    family: &LargeFamily,
    t: Subset,
) -> Result<Restriction> {
    let (merge, center_family) = merge_family(family, t)?;
    let gc = BaseGeometry { n: merge.m(), ..*g };
    let center = build_weighted(&gc, &center_family)?;
    let cv = center.vars().clone();
    let images = vars
        .vars()
        .iter()
        .map(|v| match &v.kind {
            VarKind::Point(a) => Ok(Poly::var(
                &cv,
                cv.point_var(merge.label(*a)).expect("point var"),
            )),
            VarKind::Divisor(s) => match merge.image(*s) {
                None => Ok(Poly::zero(&cv)),
                Some(img) => divisor(&cv, img),
            },
            VarKind::Other => Err(Error::Structural(format!(
                "cannot restrict variable {}",
                v.name
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Restriction {
        merge,
        center,
        center_family,
        images,
    })
}

/// Pulls the Chern relations of the center that involve the merged point
/// back to ambient variables (merged point to `h_{min T}`, other labels to
/// their original points, `D_{S'}` to `D_{sigma(S')}`).
fn transported_center_relations(
    g: &BaseGeometry,
    vars: &Arc<VarTable>,
    restriction: &Restriction,
) -> Result<Vec<Poly>> {
    let merge = &restriction.merge;
    let cv = restriction.center.vars();
    let images = cv
        .vars()
        .iter()
        .map(|v| match &v.kind {
            VarKind::Point(j) => {
                let orig = merge.sigma(Subset::singleton(*j)).min().expect("nonempty");
                Ok(Poly::var(vars, vars.point_var(orig).expect("point var")))
            }
            VarKind::Divisor(s) => divisor(vars, merge.sigma(*s)),
            VarKind::Other => unreachable!("center tables hold only points and divisors"),
        })
        .collect::<Result<Vec<_>>>()?;
    let gc = BaseGeometry { n: merge.m(), ..*g };
    let star = merge.star();
    restriction
        .center_family
        .iter()
        .filter(|s| s.contains(star))
        .map(|s| {
            let c = gc.chern_set(cv, s)?;
            let rel = c.eval(&divisor_sum(cv, &restriction.center_family, s)?)?;
            rel.substitute(vars, &images)
        })
        .collect()
}

/// Re-derives the weighted presentation by blowing up the large sets one at
/// a time along `walk`, each step a [`keel_step`] fed by [`coincidence_data_in`].
pub fn iterated_presentation(
    g: &BaseGeometry,
    family: &LargeFamily,
    walk: &Walk,
) -> Result<Presentation> {
    check_family(g, family)?;
    let walk = Walk::new(family, walk.steps().to_vec())?;
    let mut p = build_weighted(g, &LargeFamily::empty(g.n))?;
    let mut processed = LargeFamily::empty(g.n);
    for &t in walk.steps() {
        let vars = p.vars().clone();
        let i = t.min().expect("nonempty");
        let data = coincidence_data_in(g, &vars, &processed, t, i)?;

        let restriction = coincidence_restriction(g, &vars, &processed, t)?;
        let transported = transported_center_relations(g, &vars, &restriction)?;
        let ours: BTreeSet<&Poly> = data
            .ideal_gens
            .iter()
            .rev()
            .take(transported.len())
            .collect();
        if transported.iter().collect::<BTreeSet<_>>() != ours {
            return Err(Error::Structural(format!(
                "ideal of the coincidence set of {t} does not match the transported center relations"
            )));
        }

        p = keel_step(&p, &data.ideal_gens, &data.chern, Variable::divisor(t))?;
        processed = processed.with_member(t)?;
    }
    p.reindexed(&canonical_vars(g, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcomb::canonical_walk;

    fn s(e: &[usize]) -> Subset {
        Subset::from_elems(e.iter().copied()).unwrap()
    }

    fn fam(n: usize, sets: &[&[usize]]) -> LargeFamily {
        LargeFamily::new(n, sets.iter().map(|e| s(e))).unwrap()
    }

    fn rels(p: &Presentation) -> Vec<String> {
        p.relations().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn weighted_empty_family_has_no_relations() {
        let g = BaseGeometry::new(2, 3).unwrap();
        let p = build_weighted(&g, &LargeFamily::empty(3)).unwrap();
        assert_eq!(p.vars().len(), 3);
        assert!(p.relations().is_empty());
        assert_eq!(p.top_degree(), 6);
    }

    #[test]
    fn weighted_two_points_on_a_line() {
        let g = BaseGeometry::new(1, 2).unwrap();
        let p = build_weighted(&g, &LargeFamily::all_subsets(2)).unwrap();
        assert_eq!(p.vars().len(), 3);
        let v = p.vars();
        let mut expect = vec![
            Poly::parse(v, "(h2 - h1)*D{1,2}")
                .unwrap()
                .with_positive_lead(),
            Poly::parse(v, "-D{1,2} + h1 + h2")
                .unwrap()
                .with_positive_lead(),
        ];
        expect.sort();
        assert_eq!(p.relations(), expect.as_slice());
    }

    #[test]
    fn reduced_coincides_with_weighted_for_two_points() {
        for d in 1..=3 {
            let g = BaseGeometry::new(d, 2).unwrap();
            assert_eq!(
                build_reduced(&g).unwrap(),
                build_weighted(&g, &LargeFamily::all_subsets(2)).unwrap()
            );
        }
    }

    #[test]
    fn reduced_family_counts_for_three_points_on_a_line() {
        let g = BaseGeometry::new(1, 3).unwrap();
        let vars = canonical_vars(&g, &LargeFamily::all_subsets(3));
        let f = reduced_families(&g, &vars).unwrap();
        assert_eq!(vars.len(), 7);
        assert_eq!(f.overlap.len(), 3);
        assert_eq!(f.diagonal.len(), 5);
        assert_eq!(f.chern.len(), 3);
        assert!(f.excess.is_empty());
    }

    #[test]
    fn reduced_families_are_subfamilies_of_weighted() {
        let g = BaseGeometry::new(1, 4).unwrap();
        let all = LargeFamily::all_subsets(4);
        let vars = canonical_vars(&g, &all);
        let f31 = weighted_families(&g, &vars, &all, |s| g.chern_set(&vars, s)).unwrap();
        let f34 = reduced_families(&g, &vars).unwrap();
        let set = |v: &[Poly]| v.iter().cloned().collect::<BTreeSet<_>>();
        assert_eq!(set(&f31.overlap), set(&f34.overlap));
        assert_eq!(set(&f31.diagonal), set(&f34.diagonal));
        assert!(set(&f34.chern).is_subset(&set(&f31.chern)));
        assert_eq!(f34.chern.len(), 6);
    }

    #[test]
    fn coincidence_data_without_large_sets() {
        let g = BaseGeometry::new(1, 2).unwrap();
        let cd = coincidence_data(&g, &LargeFamily::empty(2), s(&[1, 2]), 1).unwrap();
        let v = canonical_vars(&g, &LargeFamily::empty(2));
        assert_eq!(cd.ideal_gens, vec![Poly::parse(&v, "h2 - h1").unwrap()]);
        let c12 = g.chern_pair(&v, 1, 2).unwrap();
        assert_eq!(cd.chern, c12.shift(&Poly::zero(&v), Sign::Minus).unwrap());
        assert_eq!(cd.chern.degree(), 1);
    }

    #[test]
    fn coincidence_data_below_the_triple() {
        let g = BaseGeometry::new(1, 3).unwrap();
        let f = fam(3, &[&[1, 2, 3]]);
        let cd = coincidence_data(&g, &f, s(&[1, 2]), 1).unwrap();
        let v = canonical_vars(&g, &f);
        assert_eq!(
            cd.ideal_gens,
            vec![
                Poly::parse(&v, "h2 - h1").unwrap(),
                Poly::parse(&v, "-D{1,2,3} + h1 + h3").unwrap(),
            ]
        );
        // c_12(-t + D) = t - D + h1 + h2
        assert_eq!(cd.chern.coeff(1), &Poly::one(&v));
        assert_eq!(
            cd.chern.coeff(0),
            &Poly::parse(&v, "-D{1,2,3} + h1 + h2").unwrap()
        );

        assert!(coincidence_data(&g, &f, s(&[1, 2, 3]), 1).is_err());
        assert!(coincidence_data(&g, &f, s(&[1, 2]), 3).is_err());
    }

    #[test]
    fn keel_step_counterexample_ring() {
        let vars = Arc::new(VarTable::new(vec![Variable::new("h", 1, Some(4))]).unwrap());
        let y = Presentation::new(vars.clone(), vec![], 3).unwrap();
        let h = Poly::named(&vars, "h");
        let p = ChernPoly::new(
            &vars,
            vec![h.pow(2), h.scale(&2.into()), Poly::one(&vars)],
            2,
        )
        .unwrap();
        let bl = keel_step(&y, &[h.pow(2)], &p, Variable::new("E", 1, None)).unwrap();
        assert_eq!(rels(&bl), vec!["E^2 - 2*h*E + h^2", "h^2*E"]);

        assert!(matches!(
            keel_step(
                &bl,
                &[],
                &p.lift_into(bl.vars()).unwrap(),
                Variable::new("E", 1, None)
            ),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn iterated_matches_weighted_generators_for_one_blowup() {
        let g = BaseGeometry::new(1, 3).unwrap();
        let f = fam(3, &[&[1, 2, 3]]);
        let it = iterated_presentation(&g, &f, &canonical_walk(&f)).unwrap();
        let direct = build_weighted(&g, &f).unwrap();
        assert_eq!(it.vars(), direct.vars());
        // The single step produces exactly the diagonal and Chern families.
        let v = direct.vars();
        let fams = weighted_families(&g, v, &f, |s| g.chern_set(v, s)).unwrap();
        let expect: BTreeSet<Poly> = fams
            .diagonal
            .iter()
            .chain(&fams.chern)
            .map(|p| p.with_positive_lead())
            .collect();
        assert_eq!(
            it.relations().iter().cloned().collect::<BTreeSet<_>>(),
            expect
        );
    }

    #[test]
    fn iterated_rejects_foreign_walk() {
        let g = BaseGeometry::new(1, 3).unwrap();
        let f = fam(3, &[&[1, 2, 3]]);
        let other = canonical_walk(&LargeFamily::all_subsets(3));
        assert!(matches!(
            iterated_presentation(&g, &f, &other),
            Err(Error::WalkOrder(_))
        ));
    }

    #[test]
    fn dump_format() {
        let g = BaseGeometry::new(1, 2).unwrap();
        let p = build_weighted(&g, &LargeFamily::all_subsets(2)).unwrap();
        let dump = p.dump();
        assert!(dump.starts_with(
            "top_degree: 2\nvars:\nh1 deg 1 cap 2\nh2 deg 1 cap 2\nD{1,2} deg 1\nrel:\n"
        ));
        assert_eq!(dump.lines().count(), 8);
        let cas = p.to_singular();
        assert!(cas.contains("ring R = 0, (h1, h2, D_1_2), wp(1, 1, 1);"));
        assert!(cas.contains("h1^2,"));
        assert!(cas
            .lines()
            .filter(|l| !l.starts_with("//"))
            .all(|l| !l.contains('{')));
    }
}
