//! Free actions of `Z/s × Z/t` on a product of elliptic curves by maps
//! `(w, z) ↦ (uw + c, z + γ̂)`, invariant curve configurations, and the
//! exhaustive searches deciding which singular boundary curves descend to a
//! bielliptic quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bielliptic::{BdfType, NumClass};
use crate::curves::{AbelianProduct, Curve, ProductPoint};
use crate::error::{Error, Result};
use crate::field::{QuadElem, QuadraticField};
use crate::lattice::Lattice;
use crate::scalar::Scalar;
use crate::smith::{abelian_invariants, AbelianInvariants};
use crate::Rational64;

/// Scalar of the searches. Every value met has a denominator dividing 81,
/// and overflow checks are on in all build profiles.
pub type SearchScalar = Rational64;
pub type SearchElement = QuadElem<SearchScalar>;

/// The map `(w, z) ↦ (uw + c, z + g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement<Q> {
    pub u: QuadElem<Q>,
    pub c: QuadElem<Q>,
    pub g: QuadElem<Q>,
}

impl<Q: Scalar> GroupElement<Q> {
    pub fn new(u: QuadElem<Q>, c: QuadElem<Q>, g: QuadElem<Q>) -> Self {
        GroupElement { u, c, g }
    }

    pub fn identity(field: QuadraticField) -> Self {
        GroupElement { u: QuadElem::one(field), c: QuadElem::zero(field), g: QuadElem::zero(field) }
    }

    /// `self ∘ other` as maps of `C²` (no reduction).
    pub fn compose(&self, other: &Self) -> Self {
        GroupElement {
            u: &self.u * &other.u,
            c: &(&self.u * &other.c) + &self.c,
            g: &self.g + &other.g,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let ui = self.u.inv()?;
        let c = -(&ui * &self.c);
        Ok(GroupElement { u: ui, c, g: -&self.g })
    }

    pub fn as_symmetry(&self) -> Symmetry<Q> {
        let f = self.u.field();
        Symmetry { mu: self.u.clone(), t: self.c.clone(), nu: QuadElem::one(f), s: self.g.clone() }
    }
}

fn affine_str<Q: Scalar>(coef: &QuadElem<Q>, var: &str, offset: &QuadElem<Q>) -> String {
    let f = coef.field();
    let lin = if coef == &QuadElem::one(f) {
        var.to_string()
    } else if coef == &-QuadElem::one(f) {
        format!("-{var}")
    } else {
        format!("({coef}){var}")
    };
    if offset.is_zero() {
        lin
    } else {
        format!("{lin} + ({offset})")
    }
}

impl<Q: Scalar> fmt::Display for GroupElement<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = QuadElem::one(self.u.field());
        write!(f, "(w, z) ↦ ({}, {})", affine_str(&self.u, "w", &self.c), affine_str(&one, "z", &self.g))
    }
}

/// The automorphism `(w, z) ↦ (μw + t, νz + s)` of the product, with `μ`, `ν`
/// units preserving the respective lattices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry<Q> {
    pub mu: QuadElem<Q>,
    pub t: QuadElem<Q>,
    pub nu: QuadElem<Q>,
    pub s: QuadElem<Q>,
}

impl<Q: Scalar> Symmetry<Q> {
    pub fn rescale_w(mu: QuadElem<Q>) -> Self {
        let f = mu.field();
        Symmetry { mu, t: QuadElem::zero(f), nu: QuadElem::one(f), s: QuadElem::zero(f) }
    }

    pub fn translation(t: QuadElem<Q>, s: QuadElem<Q>) -> Self {
        let f = t.field();
        Symmetry { mu: QuadElem::one(f), t, nu: QuadElem::one(f), s }
    }

    pub fn is_automorphism_of(&self, surface: &AbelianProduct<Q>) -> bool {
        let keeps = |l: &Lattice<Q>, x: &QuadElem<Q>| {
            x.inv().map(|xi| l.maps_into(x, l) && l.maps_into(&xi, l)).unwrap_or(false)
        };
        keeps(&surface.lw, &self.mu) && keeps(&surface.lz, &self.nu)
    }

    pub fn apply_point(&self, surface: &AbelianProduct<Q>, p: &ProductPoint<Q>) -> Result<ProductPoint<Q>> {
        surface.point(&(&(&self.mu * p.w.value()) + &self.t), &(&(&self.nu * p.z.value()) + &self.s))
    }

    /// Image curve, normalized.
    pub fn apply_curve(&self, surface: &AbelianProduct<Q>, c: &Curve<Q>) -> Result<Curve<Q>> {
        let image = match c {
            Curve::GraphOverZ { slope, offset } => {
                let k = (&self.mu * slope).checked_div(&self.nu)?;
                let off = &(&(&self.mu * offset) + &self.t) - &(&k * &self.s);
                Curve::over_z(k, off)
            }
            Curve::GraphOverW { slope, offset } => {
                let k = (&self.nu * slope).checked_div(&self.mu)?;
                let off = &(&(&self.nu * offset) + &self.s) - &(&k * &self.t);
                Curve::over_w(k, off)
            }
            Curve::WFiber(x) => Curve::WFiber(&(&self.mu * x) + &self.t),
            Curve::ZFiber(x) => Curve::ZFiber(&(&self.nu * x) + &self.s),
        };
        surface.normalize(&image)
    }

    /// `σ e σ⁻¹ = (u, μc + (1 − u)t, νg)`, reduced.
    pub fn conjugate(&self, surface: &AbelianProduct<Q>, e: &GroupElement<Q>) -> Result<GroupElement<Q>> {
        let one = QuadElem::one(e.u.field());
        let c = &(&self.mu * &e.c) + &(&(&one - &e.u) * &self.t);
        let g = &self.nu * &e.g;
        Ok(GroupElement { u: e.u.clone(), c: surface.lw.reduce(&c)?, g: surface.lz.reduce(&g)? })
    }
}

/// Why a set of generators fails to define the declared action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionDefect {
    NotAutomorphism,
    GeneratorOrder,
    NotCommuting,
    GroupOrder,
    NotFree,
}

impl ActionDefect {
    pub fn label(self) -> &'static str {
        match self {
            ActionDefect::NotAutomorphism => "generator-not-automorphism",
            ActionDefect::GeneratorOrder => "generator-order",
            ActionDefect::NotCommuting => "generators-do-not-commute",
            ActionDefect::GroupOrder => "group-order",
            ActionDefect::NotFree => "action-not-free",
        }
    }
}

/// A finite abelian group of maps `(uw + c, z + g)` acting on a product.
#[derive(Clone, Debug)]
pub struct QuotientAction<Q> {
    pub surface: AbelianProduct<Q>,
    pub generators: Vec<GroupElement<Q>>,
    /// `(s, t)`: generator orders are `s` then `t` (a single generator when
    /// `t = 1`), `|G| = st`.
    pub shape: (u32, u32),
    elements: Vec<GroupElement<Q>>,
}

impl<Q: Scalar> QuotientAction<Q> {
    /// Build the group, checking declared orders and commutativity. Freeness
    /// is not required here; see [`QuotientAction::action_is_free`].
    pub fn build(
        surface: AbelianProduct<Q>,
        generators: Vec<GroupElement<Q>>,
        shape: (u32, u32),
    ) -> Result<std::result::Result<Self, ActionDefect>> {
        let declared: Vec<u32> = match (generators.len(), shape) {
            (0, (1, 1)) => vec![],
            (1, (s, 1)) => vec![s],
            (2, (s, t)) => vec![s, t],
            _ => return Err(Error::InvalidConfig("generator count does not match the group shape".into())),
        };
        let mut action = QuotientAction { surface, generators: Vec::new(), shape, elements: Vec::new() };
        let mut gens = Vec::with_capacity(generators.len());
        for g in &generators {
            let sym = Symmetry::rescale_w(g.u.clone());
            if !sym.is_automorphism_of(&action.surface) {
                return Ok(Err(ActionDefect::NotAutomorphism));
            }
            gens.push(action.canonical(g)?);
        }
        for (g, n) in gens.iter().zip(&declared) {
            if action.element_order(g, 64)? != Some(*n) {
                return Ok(Err(ActionDefect::GeneratorOrder));
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if action.multiply(&gens[i], &gens[j])? != action.multiply(&gens[j], &gens[i])? {
                    return Ok(Err(ActionDefect::NotCommuting));
                }
            }
        }
        let target = (shape.0 * shape.1) as usize;
        let id = action.canonical(&GroupElement::identity(action.surface.field()))?;
        let mut seen: BTreeSet<GroupElement<Q>> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = action.multiply(g, &x)?;
                if seen.insert(y.clone()) {
                    if seen.len() > target {
                        return Ok(Err(ActionDefect::GroupOrder));
                    }
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != target {
            return Ok(Err(ActionDefect::GroupOrder));
        }
        action.elements = seen.into_iter().collect();
        action.generators = generators;
        Ok(Ok(action))
    }

    /// Like [`QuotientAction::build`], additionally requiring a free action;
    /// every defect becomes an error.
    pub fn new(surface: AbelianProduct<Q>, generators: Vec<GroupElement<Q>>, shape: (u32, u32)) -> Result<Self> {
        let a = Self::build(surface, generators, shape)?
            .map_err(|d| Error::InvalidConfig(d.label().to_string()))?;
        if !a.action_is_free() {
            return Err(Error::InvalidConfig(ActionDefect::NotFree.label().to_string()));
        }
        Ok(a)
    }

    /// The trivial group.
    pub fn trivial(surface: AbelianProduct<Q>) -> Self {
        let id = GroupElement::identity(surface.field());
        QuotientAction { surface, generators: Vec::new(), shape: (1, 1), elements: vec![id] }
    }

    pub fn canonical(&self, e: &GroupElement<Q>) -> Result<GroupElement<Q>> {
        Ok(GroupElement { u: e.u.clone(), c: self.surface.lw.reduce(&e.c)?, g: self.surface.lz.reduce(&e.g)? })
    }

    pub fn multiply(&self, a: &GroupElement<Q>, b: &GroupElement<Q>) -> Result<GroupElement<Q>> {
        self.canonical(&a.compose(b))
    }

    pub fn is_identity(&self, e: &GroupElement<Q>) -> bool {
        e.u == QuadElem::one(e.u.field()) && self.surface.lw.contains(&e.c) && self.surface.lz.contains(&e.g)
    }

    fn element_order(&self, e: &GroupElement<Q>, bound: u32) -> Result<Option<u32>> {
        let mut x = self.canonical(e)?;
        for n in 1..=bound {
            if self.is_identity(&x) {
                return Ok(Some(n));
            }
            x = self.multiply(e, &x)?;
        }
        Ok(None)
    }

    /// All group elements in canonical form, sorted.
    pub fn elements(&self) -> &[GroupElement<Q>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Does `e` fix a point of the product? For `u ≠ 1` the equation
    /// `(u − 1)w ≡ −c` is always solvable, so only the z-translation matters.
    pub fn has_fixed_point(&self, e: &GroupElement<Q>) -> bool {
        let in_z = self.surface.lz.contains(&e.g);
        if e.u == QuadElem::one(e.u.field()) {
            in_z && self.surface.lw.contains(&e.c)
        } else {
            in_z
        }
    }

    /// The action is free and acts by translations on the second factor
    /// faithfully: every nontrivial element has `g ∉ Λ_z`.
    pub fn action_is_free(&self) -> bool {
        self.elements.iter().all(|e| self.is_identity(e) || !self.surface.lz.contains(&e.g))
    }

    /// No nontrivial element has a fixed point (weaker than
    /// [`QuotientAction::action_is_free`]: pure w-translations pass).
    pub fn fixed_point_free(&self) -> bool {
        self.elements.iter().all(|e| self.is_identity(e) || !self.has_fixed_point(e))
    }

    pub fn curve_image(&self, e: &GroupElement<Q>, c: &Curve<Q>) -> Result<Curve<Q>> {
        e.as_symmetry().apply_curve(&self.surface, c)
    }

    pub fn point_image(&self, e: &GroupElement<Q>, p: &ProductPoint<Q>) -> Result<ProductPoint<Q>> {
        e.as_symmetry().apply_point(&self.surface, p)
    }

    /// Does every element map the set of curves to itself?
    pub fn permutes(&self, curves: &[Curve<Q>]) -> Result<bool> {
        let set: BTreeSet<Curve<Q>> = curves.iter().map(|c| self.surface.normalize(c)).collect::<Result<_>>()?;
        for g in &self.generators {
            for c in &set {
                if !set.contains(&self.curve_image(g, c)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Number of elements mapping `c` to itself.
    pub fn curve_stabilizer_order(&self, c: &Curve<Q>) -> Result<usize> {
        let c = self.surface.normalize(c)?;
        let mut n = 0;
        for e in &self.elements {
            if self.curve_image(e, &c)? == c {
                n += 1;
            }
        }
        Ok(n)
    }

    /// Number of elements with `u·w₀ + c ≡ w₀`: the multiplicity of the fiber
    /// of the quotient map to `E_w/G` through `w₀`.
    pub fn w_stabilizer_order(&self, w0: &QuadElem<Q>) -> usize {
        self.elements
            .iter()
            .filter(|e| self.surface.lw.contains(&(&(&(&e.u * w0) + &e.c) - w0)))
            .count()
    }

    /// `H₁` of the quotient, from the extension presentation of its
    /// fundamental group: lattice translations `e₁, e₂, f₁, f₂`, lifts
    /// `x_j` of the generators, conjugation relations `x e x⁻¹ = u·e`, and
    /// the lifted group relations `x_j^{n_j} = τ`, `[x_i, x_j] = τ'`.
    pub fn first_homology(&self) -> Result<AbelianInvariants> {
        let m = self.generators.len();
        let cols = 4 + m;
        let (lw, lz) = (&self.surface.lw, &self.surface.lz);
        let int_coords = |l: &Lattice<Q>, x: &QuadElem<Q>| -> Result<[i64; 2]> {
            let (a, b) = l.coordinates(x)?;
            match (a.to_int(), b.to_int()) {
                (Some(a), Some(b)) => Ok([a, b]),
                _ => Err(Error::NotContained),
            }
        };
        let translation_row = |e: &GroupElement<Q>, sign: i64, row: &mut Vec<i64>| -> Result<()> {
            let cw = int_coords(lw, &e.c)?;
            let gz = int_coords(lz, &e.g)?;
            row[0] += sign * cw[0];
            row[1] += sign * cw[1];
            row[2] += sign * gz[0];
            row[3] += sign * gz[1];
            Ok(())
        };
        let mut rows = Vec::new();
        let declared = [self.shape.0, self.shape.1];
        for (j, x) in self.generators.iter().enumerate() {
            let (b1, b2) = lw.basis();
            for (k, b) in [b1, b2].into_iter().enumerate() {
                let img = int_coords(lw, &(&x.u * b))?;
                let mut row = vec![0; cols];
                row[0] = img[0];
                row[1] = img[1];
                row[k] -= 1;
                rows.push(row);
            }
            let mut p = GroupElement::identity(lw.field());
            for _ in 0..declared[j] {
                p = x.compose(&p);
            }
            if p.u != QuadElem::one(lw.field()) {
                return Err(Error::InvalidConfig("generator power is not a translation".into()));
            }
            let mut row = vec![0; cols];
            row[4 + j] = declared[j] as i64;
            translation_row(&p, -1, &mut row)?;
            rows.push(row);
        }
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (&self.generators[i], &self.generators[j]);
                let k = a.compose(b).compose(&a.inverse()?).compose(&b.inverse()?);
                let mut row = vec![0; cols];
                translation_row(&k, 1, &mut row)?;
                rows.push(row);
            }
        }
        abelian_invariants(&rows, cols)
    }
}

/// Curves `E₁, …, E_r` on the cover together with the action permuting them.
#[derive(Clone, Debug)]
pub struct UpstairsConfig<Q> {
    pub curves: Vec<Curve<Q>>,
    pub action: QuotientAction<Q>,
}

impl<Q: Scalar> UpstairsConfig<Q> {
    pub fn new(action: QuotientAction<Q>, curves: Vec<Curve<Q>>) -> Result<Self> {
        let curves: Vec<Curve<Q>> = curves.iter().map(|c| action.surface.normalize(c)).collect::<Result<_>>()?;
        let distinct: BTreeSet<&Curve<Q>> = curves.iter().collect();
        if distinct.len() != curves.len() {
            return Err(Error::IdenticalCurves);
        }
        Ok(UpstairsConfig { curves, action })
    }
}

/// Intersection data of an upstairs configuration and its orbits.
#[derive(Clone, Debug)]
pub struct OrbitReport<Q> {
    /// Union of all pairwise intersection points, sorted.
    pub points: Vec<ProductPoint<Q>>,
    /// Orbits, as indices into `points`.
    pub orbits: Vec<Vec<usize>>,
    /// Downstairs singular points, one per orbit.
    pub singular_points: usize,
    pub transitive: bool,
    /// Every pair of curves meets in the same set of points.
    pub pairwise_equal: bool,
    /// Number of curves through each point.
    pub branches: Vec<usize>,
}

/// Serializable digest of an [`OrbitReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub points: Vec<String>,
    pub orbit_sizes: Vec<usize>,
    pub singular_points: usize,
    pub transitive: bool,
    pub pairwise_equal: bool,
    pub branches: Vec<usize>,
}

impl<Q: Scalar> OrbitReport<Q> {
    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            points: self.points.iter().map(|p| p.to_string()).collect(),
            orbit_sizes: self.orbits.iter().map(|o| o.len()).collect(),
            singular_points: self.singular_points,
            transitive: self.transitive,
            pairwise_equal: self.pairwise_equal,
            branches: self.branches.clone(),
        }
    }
}

pub fn orbit_analysis<Q: Scalar>(cfg: &UpstairsConfig<Q>) -> Result<OrbitReport<Q>> {
    let action = &cfg.action;
    let surface = &action.surface;
    if !action.permutes(&cfg.curves)? {
        return Err(Error::InvalidConfig("curves are not permuted by the action".into()));
    }
    let mut pair_sets = Vec::new();
    for i in 0..cfg.curves.len() {
        for j in i + 1..cfg.curves.len() {
            pair_sets.push(surface.intersection_points(&cfg.curves[i], &cfg.curves[j])?);
        }
    }
    let pairwise_equal = pair_sets.windows(2).all(|w| w[0] == w[1]);
    let points: Vec<ProductPoint<Q>> =
        pair_sets.into_iter().flatten().collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<&ProductPoint<Q>, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut orbit_of = vec![usize::MAX; points.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..points.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = BTreeSet::new();
        for e in action.elements() {
            let q = action.point_image(e, &points[start])?;
            let k = *index
                .get(&q)
                .ok_or_else(|| Error::InvalidConfig("intersection points are not permuted by the action".into()))?;
            members.insert(k);
        }
        for &k in &members {
            orbit_of[k] = id;
        }
        orbits.push(members.into_iter().collect());
    }
    let branches = points
        .iter()
        .map(|p| cfg.curves.iter().filter(|c| surface.contains_point(c, p)).count())
        .collect();
    Ok(OrbitReport {
        singular_points: orbits.len(),
        transitive: orbits.len() == 1,
        points,
        orbits,
        pairwise_equal,
        branches,
    })
}

/// The five bielliptic cases handed over by the numerical filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolveCase {
    #[serde(rename = "z3_AB")]
    Z3AB,
    #[serde(rename = "z6_AB")]
    Z6AB,
    #[serde(rename = "z3z3_A3B")]
    Z3Z3A3B,
    #[serde(rename = "z3z3_AB3_coverA")]
    Z3Z3CoverA,
    #[serde(rename = "z3z3_AB3_coverB")]
    Z3Z3CoverB,
}

impl SolveCase {
    pub const ALL: [SolveCase; 5] =
        [SolveCase::Z3AB, SolveCase::Z6AB, SolveCase::Z3Z3A3B, SolveCase::Z3Z3CoverA, SolveCase::Z3Z3CoverB];

    pub fn name(self) -> &'static str {
        match self {
            SolveCase::Z3AB => "z3_AB",
            SolveCase::Z6AB => "z6_AB",
            SolveCase::Z3Z3A3B => "z3z3_A3B",
            SolveCase::Z3Z3CoverA => "z3z3_AB3_coverA",
            SolveCase::Z3Z3CoverB => "z3z3_AB3_coverB",
        }
    }

    pub fn parse(s: &str) -> Option<SolveCase> {
        SolveCase::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn bdf(self) -> BdfType {
        let (s, t) = match self {
            SolveCase::Z3AB => (3, 1),
            SolveCase::Z6AB => (6, 1),
            _ => (3, 3),
        };
        BdfType::by_group(s, t).expect("listed type")
    }

    /// The class of the singular boundary curve.
    pub fn class(self) -> NumClass {
        let (k1, k2) = match self {
            SolveCase::Z3Z3A3B => (1, 3),
            _ => (3, 1),
        };
        NumClass::new(self.bdf(), k1, k2)
    }

    /// `(Λ_w, Λ_z)` of the cover. For `Z/6` the second factor is arbitrary;
    /// the square lattice stands in for it (the refutation never uses it).
    pub fn lattices(self) -> (Lattice<SearchScalar>, Lattice<SearchScalar>) {
        let e = QuadraticField::Eisenstein;
        let std = Lattice::integers(e);
        let three_one = Lattice::new(SearchElement::integer(e, 3), SearchElement::from_ints(e, 1, -1)).expect("lattice");
        let third = Lattice::new(SearchElement::one(e), SearchElement::from_fracs(e, (0, 1), (1, 3))).expect("lattice");
        match self {
            SolveCase::Z3AB | SolveCase::Z6AB => (std.clone(), std),
            SolveCase::Z3Z3A3B => (std, three_one),
            SolveCase::Z3Z3CoverA => (three_one, std),
            SolveCase::Z3Z3CoverB => (std, third),
        }
    }

    pub fn surface(self) -> AbelianProduct<SearchScalar> {
        let (lw, lz) = self.lattices();
        AbelianProduct::new(lw, lz).expect("same field")
    }
}

/// One axis of a search space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterAxis {
    pub name: String,
    pub size: u64,
}

/// A reduction of the search space, with the key of the argument behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub citation: String,
    pub statement: String,
}

fn reduction(citation: &str, statement: &str) -> Reduction {
    Reduction { citation: citation.to_string(), statement: statement.to_string() }
}

/// What was enumerated and why each tuple was dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub case: String,
    pub lattices: [String; 2],
    pub axes: Vec<ParameterAxis>,
    pub reductions: Vec<Reduction>,
    pub predicted_tuples: u64,
    pub tuples_examined: u64,
    pub rejections: BTreeMap<String, u64>,
    pub accepted_tuples: u64,
    /// Pairs `(E, E')` for which `(gE)·(gE') = E·E'` was checked.
    pub invariance_checks: u64,
    pub invariance_violations: u64,
}

impl SearchCertificate {
    pub fn complete(&self) -> bool {
        self.tuples_examined == self.predicted_tuples
            && self.rejections.values().sum::<u64>() + self.accepted_tuples == self.tuples_examined
            && self.invariance_violations == 0
    }
}

/// A solution: the group (as its element set) and the invariant curves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionKey<Q> {
    pub elements: Vec<GroupElement<Q>>,
    pub curves: Vec<Curve<Q>>,
}

impl<Q: Scalar> SolutionKey<Q> {
    fn image(&self, surface: &AbelianProduct<Q>, sym: &Symmetry<Q>) -> Result<Self> {
        let mut elements: Vec<_> = self.elements.iter().map(|e| sym.conjugate(surface, e)).collect::<Result<_>>()?;
        elements.sort();
        let mut curves: Vec<_> = self.curves.iter().map(|c| sym.apply_curve(surface, c)).collect::<Result<_>>()?;
        curves.sort();
        Ok(SolutionKey { elements, curves })
    }
}

/// A verified solution of a case.
#[derive(Clone, Debug)]
pub struct Solution {
    pub key: SolutionKey<SearchScalar>,
    pub action: QuotientAction<SearchScalar>,
    pub orbit: OrbitReport<SearchScalar>,
}

impl Solution {
    pub fn config(&self) -> UpstairsConfig<SearchScalar> {
        UpstairsConfig { curves: self.key.curves.clone(), action: self.action.clone() }
    }
}

/// Serializable view of a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub gamma: Option<String>,
    pub generators: Vec<String>,
    pub curves: Vec<String>,
    pub orbit: OrbitSummary,
}

/// An equivalence class of solutions under the symmetries of the cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionClass {
    pub representative: SolutionSummary,
    /// Solutions found by the search that fall in this class.
    pub members: usize,
    /// Distinct values of γ among the members.
    pub gamma_labels: Vec<String>,
    /// Size of the orbit of the representative under all symmetries used.
    pub orbit_size: usize,
}

/// Outcome of the z6 case: every candidate first curve stabilized by the
/// order-two subgroup `⟨φ³⟩` is a fiber `w = c`, and such curves are pairwise
/// disjoint, so no triple of components can meet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerCertificate {
    pub stabilized: u64,
    pub stabilized_graphs: u64,
    pub fibers_disjoint: bool,
}

/// Everything `solve_case` reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: SolveCase,
    pub group: String,
    pub class: String,
    pub certificate: SearchCertificate,
    pub stabilizer: Option<StabilizerCertificate>,
    pub distinct_solutions: usize,
    pub classes: Vec<SolutionClass>,
    /// γ labels reached from the representative by `ψ₁`, `ψ₂` alone.
    pub psi_orbit: Vec<String>,
    /// Symmetry generators used for the equivalence.
    pub symmetries: Vec<String>,
}

impl CaseResult {
    pub fn refuted(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Full output of a case, with the exact objects.
#[derive(Clone, Debug)]
pub struct CaseSolution {
    pub result: CaseResult,
    pub solutions: Vec<Solution>,
    /// Indices into `solutions`, one list per class, representative first.
    pub classes: Vec<Vec<usize>>,
}

impl CaseSolution {
    pub fn representative(&self, class: usize) -> Option<&Solution> {
        self.classes.get(class).and_then(|c| c.first()).map(|i| &self.solutions[*i])
    }
}

struct Setup {
    surface: AbelianProduct<SearchScalar>,
    slopes: Vec<SearchElement>,
    offsets: Vec<SearchElement>,
    groups: Vec<Vec<GroupElement<SearchScalar>>>,
    shape: (u32, u32),
    axes: Vec<ParameterAxis>,
    reductions: Vec<Reduction>,
    candidates: Candidates,
    /// Generator of the commuting w-translations, for two-generator groups.
    tau: Option<SearchElement>,
}

fn torsion_values(l: &Lattice<SearchScalar>, n: u32) -> Vec<SearchElement> {
    l.torsion_points(n).into_iter().map(|p| p.value().clone()).collect()
}

/// Nonzero classes `c ∈ Λ_w`-cosets with `(1 − u)c ∈ Λ_w`: the w-translations
/// commuting with `w ↦ uw`.
fn commuting_translations(lw: &Lattice<SearchScalar>, u: &SearchElement) -> Result<Vec<SearchElement>> {
    let one = SearchElement::one(u.field());
    let d = &one - u;
    let coarse = lw.scaled(&d.inv()?)?;
    Ok(coarse.coset_representatives(lw)?.into_iter().filter(|c| !c.is_zero()).collect())
}

fn setup(case: SolveCase) -> Result<Setup> {
    let surface = case.surface();
    let e = QuadraticField::Eisenstein;
    let rho = SearchElement::rho();
    let zero = SearchElement::zero(e);
    let one = SearchElement::one(e);
    let slopes: Vec<SearchElement> = e.roots_of_unity();
    let over_w = matches!(case, SolveCase::Z3Z3CoverA | SolveCase::Z3Z3CoverB);
    let offsets = if over_w { torsion_values(&surface.lz, 3) } else { torsion_values(&surface.lw, 3) };
    let gammas = torsion_values(&surface.lz, 3);
    let mut reductions = vec![
        reduction(
            "unit-slope-components",
            "each component is a graph whose slope is a root of unity, as it maps isomorphically to both factors",
        ),
        reduction(
            "second-factor-translation",
            "translations of the second factor commute with the action, so E₁ may be taken through offset 0",
        ),
        reduction(
            "orbit-offsets-torsion",
            "E₂ and E₃ are images of E₁, so their offsets are images of 0 and lie in the 3-torsion",
        ),
        reduction("order-three-translation", "φ³ = 1 forces γ/3 to be a 3-torsion point of the second factor"),
    ];
    let mut axes = vec![ParameterAxis { name: "γ/3".into(), size: gammas.len() as u64 }];
    let mut groups = Vec::new();
    let shape;
    let mut tau = None;
    if case == SolveCase::Z3AB {
        shape = (3, 1);
        for g in &gammas {
            groups.push(vec![GroupElement::new(rho.clone(), zero.clone(), g.clone())]);
        }
    } else {
        shape = (3, 3);
        let ks = commuting_translations(&surface.lw, &rho)?;
        let diag = surface.lw.reduce(&diagonal_step())?;
        tau = ks.iter().find(|k| **k == diag).or(ks.first()).cloned();
        reductions.push(reduction(
            "commuting-translation",
            "the translation part k·c of φ₂ commutes with w ↦ ρw, so (1 − ρ)c ∈ Λ_w",
        ));
        axes.push(ParameterAxis { name: "γ′/3".into(), size: gammas.len() as u64 });
        axes.push(ParameterAxis { name: "k".into(), size: ks.len() as u64 });
        for g in &gammas {
            for g2 in &gammas {
                for k in &ks {
                    groups.push(vec![
                        GroupElement::new(rho.clone(), zero.clone(), g.clone()),
                        GroupElement::new(one.clone(), k.clone(), g2.clone()),
                    ]);
                }
            }
        }
    }
    let n = slopes.len() as u64;
    axes.push(ParameterAxis { name: "slopes α₁, α₂, α₃".into(), size: n * n * n });
    let m = offsets.len() as u64;
    axes.push(ParameterAxis { name: "offsets a₂, a₃".into(), size: m * m });
    let mut raw = Vec::with_capacity(slopes.len() * offsets.len());
    for a in &slopes {
        for o in &offsets {
            raw.push(if over_w { Curve::over_w(a.clone(), o.clone()) } else { Curve::over_z(a.clone(), o.clone()) });
        }
    }
    let candidates = Candidates::new(&surface, raw)?;
    Ok(Setup { surface, slopes, offsets, groups, shape, axes, reductions, candidates, tau })
}

#[derive(Default)]
struct GroupOutcome {
    rejections: BTreeMap<String, u64>,
    accepted: Vec<Solution>,
    accepted_tuples: u64,
    invariance_checks: u64,
    invariance_violations: u64,
}

fn bump(map: &mut BTreeMap<String, u64>, key: &str, by: u64) {
    if by > 0 {
        *map.entry(key.to_string()).or_insert(0) += by;
    }
}

/// The candidate curves of a search with their pairwise intersection
/// numbers.
struct Candidates {
    curves: Vec<Curve<SearchScalar>>,
    index: HashMap<Curve<SearchScalar>, usize>,
    table: Vec<Vec<u64>>,
}

impl Candidates {
    fn new(surface: &AbelianProduct<SearchScalar>, raw: Vec<Curve<SearchScalar>>) -> Result<Self> {
        let curves: Vec<_> = raw.iter().map(|c| surface.normalize(c)).collect::<Result<_>>()?;
        let index: HashMap<_, _> = curves.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        if index.len() != curves.len() {
            return Err(Error::InvalidConfig("candidate curves are not distinct".into()));
        }
        let n = curves.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let k = surface.intersection_number(&curves[i], &curves[j])?;
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        Ok(Candidates { curves, index, table })
    }

    fn permutation(&self, action: &QuotientAction<SearchScalar>, g: &GroupElement<SearchScalar>) -> Result<Vec<Option<usize>>> {
        self.curves.iter().map(|c| Ok(self.index.get(&action.curve_image(g, c)?).copied())).collect()
    }

    /// Compare `E·E'` with `gE·gE'` over all pairs whose images are
    /// candidates; returns `(checks, violations)`.
    fn invariance(&self, perm: &[Option<usize>]) -> (u64, u64) {
        let (mut checks, mut bad) = (0, 0);
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if let (Some(a), Some(b)) = (perm[i], perm[j]) {
                    checks += 1;
                    if a == b || self.table[i][j] != self.table[a][b] {
                        bad += 1;
                    }
                }
            }
        }
        (checks, bad)
    }
}

fn search_group(s: &Setup, gens: &[GroupElement<SearchScalar>]) -> Result<GroupOutcome> {
    let mut out = GroupOutcome::default();
    let ns = s.slopes.len();
    let no = s.offsets.len();
    let per_group = (ns * ns * ns * no * no) as u64;
    let action = match QuotientAction::build(s.surface.clone(), gens.to_vec(), s.shape)? {
        Ok(a) if a.action_is_free() => a,
        Ok(_) => {
            bump(&mut out.rejections, ActionDefect::NotFree.label(), per_group);
            return Ok(out);
        }
        Err(d) => {
            bump(&mut out.rejections, d.label(), per_group);
            return Ok(out);
        }
    };
    let cands = &s.candidates;
    let mut perms: Vec<Vec<Option<usize>>> = Vec::new();
    for g in &action.generators {
        let perm = cands.permutation(&action, g)?;
        let (checks, violations) = cands.invariance(&perm);
        out.invariance_checks += checks;
        out.invariance_violations += violations;
        perms.push(perm);
    }
    let zero_offset = s.offsets.iter().position(|o| o.is_zero()).ok_or(Error::NotContained)?;
    let mut passing = Vec::new();
    let (mut not_distinct, mut not_permuted, mut not_transitive) = (0u64, 0u64, 0u64);
    for s1 in 0..ns {
        let i1 = s1 * no + zero_offset;
        for s2 in 0..ns {
            for o2 in 0..no {
                let i2 = s2 * no + o2;
                for s3 in 0..ns {
                    for o3 in 0..no {
                        let i3 = s3 * no + o3;
                        if i1 == i2 || i1 == i3 || i2 == i3 {
                            not_distinct += 1;
                            continue;
                        }
                        let set = [i1, i2, i3];
                        let invariant = perms
                            .iter()
                            .all(|p| set.iter().all(|&i| p[i].is_some_and(|j| set.contains(&j))));
                        if !invariant {
                            not_permuted += 1;
                            continue;
                        }
                        // the set is invariant, so the orbit of E₁ stays inside it
                        let mut orbit = vec![i1];
                        let mut k = 0;
                        while k < orbit.len() {
                            for p in &perms {
                                if let Some(j) = p[orbit[k]] {
                                    if !orbit.contains(&j) {
                                        orbit.push(j);
                                    }
                                }
                            }
                            k += 1;
                        }
                        if orbit.len() != 3 {
                            not_transitive += 1;
                            continue;
                        }
                        passing.push(set);
                    }
                }
            }
        }
    }
    bump(&mut out.rejections, "curves-not-distinct", not_distinct);
    bump(&mut out.rejections, "not-permuted", not_permuted);
    bump(&mut out.rejections, "not-transitive", not_transitive);
    for set in passing {
        let curves: Vec<Curve<SearchScalar>> = set.iter().map(|&i| s.candidates.curves[i].clone()).collect();
        if action.curve_stabilizer_order(&curves[0])? * 3 != action.order() {
            bump(&mut out.rejections, "stabilizer-order", 1);
            continue;
        }
        let cfg = UpstairsConfig::new(action.clone(), curves)?;
        let orbit = orbit_analysis(&cfg)?;
        let reason = if orbit.points.is_empty() {
            Some("intersection-empty")
        } else if !orbit.pairwise_equal {
            Some("intersections-differ")
        } else if !orbit.transitive {
            Some("multiple-orbits")
        } else {
            None
        };
        if let Some(r) = reason {
            bump(&mut out.rejections, r, 1);
            continue;
        }
        out.accepted_tuples += 1;
        let mut sorted = cfg.curves.clone();
        sorted.sort();
        let key = SolutionKey { elements: action.elements().to_vec(), curves: sorted };
        out.accepted.push(Solution { key, action: action.clone(), orbit });
    }
    Ok(out)
}

/// Symmetries of the cover used to identify solutions: rescaling `w` or `z`
/// by a sixth root of unity when it preserves the lattice, `ψ₁ = (−w, −z)`,
/// `ψ₂ = (w + 2/3, z + 2/3)`, and translations by 3-torsion points.
pub fn symmetry_generators(surface: &AbelianProduct<SearchScalar>) -> Vec<(String, Symmetry<SearchScalar>)> {
    let f = surface.field();
    let zero = SearchElement::zero(f);
    let mut out = Vec::new();
    let zeta = SearchElement::zeta();
    if f == QuadraticField::Eisenstein && Symmetry::rescale_w(zeta.clone()).is_automorphism_of(surface) {
        out.push(("w ↦ ζw".to_string(), Symmetry::rescale_w(zeta.clone())));
    }
    let z_rescale = Symmetry { mu: SearchElement::one(f), t: zero.clone(), nu: zeta, s: zero.clone() };
    if f == QuadraticField::Eisenstein && z_rescale.is_automorphism_of(surface) {
        out.push(("z ↦ ζz".to_string(), z_rescale));
    }
    out.extend(psi_generators(surface));
    let third = SearchScalar::from_frac(1, 3);
    let (w1, w2) = surface.lw.basis();
    for b in [w1, w2] {
        let t = b.scale(&third);
        out.push((format!("w ↦ w + {t}"), Symmetry::translation(t, zero.clone())));
    }
    let (z1, z2) = surface.lz.basis();
    let mut seen = BTreeSet::new();
    for b in [z1, z2, w1, w2] {
        let s = b.scale(&third);
        if seen.insert(s.clone()) {
            out.push((format!("z ↦ z + {s}"), Symmetry::translation(zero.clone(), s)));
        }
    }
    out
}

/// `ψ₁ = (−w, −z)` and `ψ₂ = (w + 2/3, z + 2/3)`.
pub fn psi_generators(surface: &AbelianProduct<SearchScalar>) -> Vec<(String, Symmetry<SearchScalar>)> {
    let f = surface.field();
    let one = SearchElement::one(f);
    let zero = SearchElement::zero(f);
    let two_thirds = SearchElement::from_fracs(f, (2, 3), (0, 1));
    vec![
        ("ψ₁ = (−w, −z)".to_string(), Symmetry { mu: -one.clone(), t: zero.clone(), nu: -one, s: zero }),
        ("ψ₂ = (w + 2/3, z + 2/3)".to_string(), Symmetry::translation(two_thirds.clone(), two_thirds)),
    ]
}

const ORBIT_CAP: usize = 200_000;

fn symmetry_orbit(
    surface: &AbelianProduct<SearchScalar>,
    start: &SolutionKey<SearchScalar>,
    gens: &[Symmetry<SearchScalar>],
) -> Result<HashSet<SolutionKey<SearchScalar>>> {
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(k) = queue.pop_front() {
        for g in gens {
            let next = k.image(surface, g)?;
            if !seen.contains(&next) {
                if seen.len() >= ORBIT_CAP {
                    return Err(Error::Unsupported("symmetry orbit exceeds the search cap".into()));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// `γ = 3γ̂` for the element acting by `w ↦ ρw` with no w-translation.
pub fn gamma_label(key: &SolutionKey<SearchScalar>) -> Option<SearchElement> {
    let rho = SearchElement::rho();
    key.elements
        .iter()
        .find(|e| e.u == rho && e.c.is_zero())
        .map(|e| e.g.scale(&SearchScalar::from_int(3)))
}

fn gamma_coords(surface: &AbelianProduct<SearchScalar>, key: &SolutionKey<SearchScalar>) -> (i64, i64) {
    gamma_label(key)
        .and_then(|g| surface.lz.coordinates(&g).ok())
        .and_then(|(a, b)| Some((a.to_int()?.rem_euclid(3), b.to_int()?.rem_euclid(3))))
        .unwrap_or((i64::MAX, i64::MAX))
}

fn slope_exponent(c: &Curve<SearchScalar>) -> usize {
    let roots: Vec<SearchElement> = QuadraticField::Eisenstein.roots_of_unity();
    match c {
        Curve::GraphOverZ { slope, .. } | Curve::GraphOverW { slope, .. } => {
            roots.iter().position(|r| r == slope).unwrap_or(usize::MAX)
        }
        _ => usize::MAX,
    }
}

fn offset_is_zero(c: &Curve<SearchScalar>) -> bool {
    match c {
        Curve::GraphOverZ { offset, .. } | Curve::GraphOverW { offset, .. } => offset.is_zero(),
        Curve::WFiber(x) | Curve::ZFiber(x) => x.is_zero(),
    }
}

/// Ordering used to pick class representatives: fewest nonzero offsets,
/// then slope exponents, then the coordinates of γ modulo 3, then which
/// curves (taken by slope) pass through the origin, then groups containing
/// the diagonal translation by `(1 − ρ)/3`, then curves.
fn representative_key(
    surface: &AbelianProduct<SearchScalar>,
    sol: &Solution,
) -> (usize, Vec<usize>, (i64, i64), Vec<bool>, bool, Vec<String>) {
    let nonzero = sol.key.curves.iter().filter(|c| !offset_is_zero(c)).count();
    let mut by_slope: Vec<&Curve<SearchScalar>> = sol.key.curves.iter().collect();
    by_slope.sort_by_key(|c| slope_exponent(c));
    let exps = by_slope.iter().map(|c| slope_exponent(c)).collect();
    let offsets = by_slope.iter().map(|c| !offset_is_zero(c)).collect();
    let curves = by_slope.iter().map(|c| c.to_string()).collect();
    let diag = !has_diagonal_step(surface, &sol.key);
    (nonzero, exps, gamma_coords(surface, &sol.key), offsets, diag, curves)
}

fn summarize(sol: &Solution) -> SolutionSummary {
    SolutionSummary {
        gamma: gamma_label(&sol.key).map(|g| g.to_string()),
        generators: sol.action.generators.iter().map(|g| g.to_string()).collect(),
        curves: sol.key.curves.iter().map(|c| c.to_string()).collect(),
        orbit: sol.orbit.summary(),
    }
}

fn z6_case() -> Result<CaseSolution> {
    let case = SolveCase::Z6AB;
    let surface = case.surface();
    let e = QuadraticField::Eisenstein;
    let zeta = SearchElement::zeta();
    let zero = SearchElement::zero(e);
    let gammas = torsion_values(&surface.lz, 6);
    let offsets = torsion_values(&surface.lw, 6);
    let mut slopes = vec![zero.clone()];
    slopes.extend(e.roots_of_unity::<SearchScalar>());
    let axes = vec![
        ParameterAxis { name: "γ/6".into(), size: gammas.len() as u64 },
        ParameterAxis { name: "slope α₁".into(), size: slopes.len() as u64 },
        ParameterAxis { name: "offset a₁".into(), size: offsets.len() as u64 },
    ];
    let reductions = vec![
        reduction(
            "transitive-stabilizer",
            "Z/6 permutes the three components transitively, so ⟨φ³⟩ (order two) stabilizes E₁",
        ),
        reduction("order-six-translation", "φ⁶ = 1 forces γ/6 to be a 6-torsion point of the second factor"),
        reduction("w-fibers-disjoint", "distinct fibers w = c₁, w = c₂ never meet"),
    ];
    let per_group = (slopes.len() * offsets.len()) as u64;
    let mut rejections = BTreeMap::new();
    let mut stabilized = 0u64;
    let mut stabilized_graphs = 0u64;
    let mut invariance_checks = 0u64;
    let mut invariance_violations = 0u64;
    let mut fibers = Vec::new();
    let mut raw = Vec::new();
    for a in &slopes {
        for o in &offsets {
            raw.push(Curve::over_z(a.clone(), o.clone()));
        }
    }
    let cands = Candidates::new(&surface, raw)?;
    for g in &gammas {
        let gen = GroupElement::new(zeta.clone(), zero.clone(), g.clone());
        let action = match QuotientAction::build(surface.clone(), vec![gen.clone()], (6, 1))? {
            Ok(a) if a.action_is_free() => a,
            Ok(_) => {
                bump(&mut rejections, ActionDefect::NotFree.label(), per_group);
                continue;
            }
            Err(d) => {
                bump(&mut rejections, d.label(), per_group);
                continue;
            }
        };
        let cube = action.multiply(&gen, &action.multiply(&gen, &gen)?)?;
        let (checks, violations) = cands.invariance(&cands.permutation(&action, &gen)?);
        invariance_checks += checks;
        invariance_violations += violations;
        for c in &cands.curves {
            if &action.curve_image(&cube, c)? == c {
                stabilized += 1;
                match c {
                    Curve::WFiber(_) => {
                        fibers.push(c.clone());
                        bump(&mut rejections, "stabilized-curve-is-w-fiber", 1);
                    }
                    _ => stabilized_graphs += 1,
                }
            } else {
                bump(&mut rejections, "not-stabilized-by-cube", 1);
            }
        }
    }
    fibers.sort();
    fibers.dedup();
    let mut fibers_disjoint = true;
    for i in 0..fibers.len() {
        for j in i + 1..fibers.len() {
            fibers_disjoint &= surface.intersection_number(&fibers[i], &fibers[j])? == 0;
        }
    }
    let tuples_examined = rejections.values().sum::<u64>() + stabilized_graphs;
    let certificate = SearchCertificate {
        case: case.name().into(),
        lattices: [surface.lw.to_string(), surface.lz.to_string()],
        predicted_tuples: axes.iter().map(|a| a.size).product(),
        axes,
        reductions,
        tuples_examined,
        rejections,
        accepted_tuples: stabilized_graphs,
        invariance_checks,
        invariance_violations,
    };
    let result = CaseResult {
        case,
        group: case.bdf().group_name(),
        class: case.class().to_string(),
        certificate,
        stabilizer: Some(StabilizerCertificate { stabilized, stabilized_graphs, fibers_disjoint }),
        distinct_solutions: 0,
        classes: Vec::new(),
        psi_orbit: Vec::new(),
        symmetries: Vec::new(),
    };
    if stabilized_graphs != 0 || !fibers_disjoint {
        return Err(Error::InvalidConfig("z6 stabilizer argument does not close".into()));
    }
    Ok(CaseSolution { result, solutions: Vec::new(), classes: Vec::new() })
}

/// `(1 − ρ)/3`, the translation step used in the standard form of `φ₂`.
fn diagonal_step() -> SearchElement {
    SearchElement::from_fracs(QuadraticField::Eisenstein, (1, 3), (-1, 3))
}

/// Does the group contain the diagonal translation by `(1 − ρ)/3`?
fn has_diagonal_step(surface: &AbelianProduct<SearchScalar>, key: &SolutionKey<SearchScalar>) -> bool {
    let d = diagonal_step();
    let one = SearchElement::one(d.field());
    key.elements.iter().any(|e| {
        e.u == one && surface.lw.contains(&(&e.c - &d)) && surface.lz.contains(&(&e.g - &d))
    })
}

/// Re-express the group through `φ₁` (acting by `ρ` with no w-translation)
/// and, for two generators, `φ₂` (acting by the translation `τ` on w).
fn with_canonical_generators(mut sol: Solution, tau: Option<&SearchElement>) -> Result<Solution> {
    let a = &sol.action;
    let rho = SearchElement::rho();
    let one = SearchElement::one(rho.field());
    let pick = |u: &SearchElement, c: &SearchElement| -> Result<GroupElement<SearchScalar>> {
        let c = a.surface.lw.reduce(c)?;
        a.elements()
            .iter()
            .find(|e| &e.u == u && e.c == c)
            .cloned()
            .ok_or_else(|| Error::InvalidConfig("group lacks a canonical generator".into()))
    };
    let mut gens = vec![pick(&rho, &SearchElement::zero(rho.field()))?];
    if let Some(t) = tau {
        gens.push(pick(&one, t)?);
    }
    sol.action = QuotientAction::new(a.surface.clone(), gens, a.shape)?;
    Ok(sol)
}

/// Run a case and keep the exact solutions.
pub fn solve_case_detailed(case: SolveCase) -> Result<CaseSolution> {
    if case == SolveCase::Z6AB {
        return z6_case();
    }
    let s = setup(case)?;
    let outcomes: Vec<GroupOutcome> = s.groups.par_iter().map(|g| search_group(&s, g)).collect::<Result<_>>()?;
    let mut rejections = BTreeMap::new();
    let mut accepted_tuples = 0;
    let mut invariance_checks = 0;
    let mut invariance_violations = 0;
    let mut found: BTreeMap<SolutionKey<SearchScalar>, Solution> = BTreeMap::new();
    for o in outcomes {
        for (k, v) in o.rejections {
            bump(&mut rejections, &k, v);
        }
        accepted_tuples += o.accepted_tuples;
        invariance_checks += o.invariance_checks;
        invariance_violations += o.invariance_violations;
        for sol in o.accepted {
            found.entry(sol.key.clone()).or_insert(sol);
        }
    }
    let solutions: Vec<Solution> =
        found.into_values().map(|sol| with_canonical_generators(sol, s.tau.as_ref())).collect::<Result<_>>()?;
    let certificate = SearchCertificate {
        case: case.name().into(),
        lattices: [s.surface.lw.to_string(), s.surface.lz.to_string()],
        predicted_tuples: s.axes.iter().map(|a| a.size).product(),
        axes: s.axes.clone(),
        reductions: s.reductions.clone(),
        tuples_examined: rejections.values().sum::<u64>() + accepted_tuples,
        rejections,
        accepted_tuples,
        invariance_checks,
        invariance_violations,
    };

    let sym = symmetry_generators(&s.surface);
    let gens: Vec<Symmetry<SearchScalar>> = sym.iter().map(|(_, g)| g.clone()).collect();
    let index: HashMap<&SolutionKey<SearchScalar>, usize> = solutions.iter().enumerate().map(|(i, x)| (&x.key, i)).collect();
    let mut class_of = vec![usize::MAX; solutions.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut orbit_sizes = Vec::new();
    for i in 0..solutions.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let orbit = symmetry_orbit(&s.surface, &solutions[i].key, &gens)?;
        let mut members: Vec<usize> = orbit.iter().filter_map(|k| index.get(k).copied()).collect();
        for &m in &members {
            class_of[m] = classes.len();
        }
        members.sort_by_key(|&m| representative_key(&s.surface, &solutions[m]));
        classes.push(members);
        orbit_sizes.push(orbit.len());
    }
    let psi: Vec<Symmetry<SearchScalar>> = psi_generators(&s.surface).into_iter().map(|(_, g)| g).collect();
    let psi_orbit = match classes.first() {
        Some(c) => {
            let orbit = symmetry_orbit(&s.surface, &solutions[c[0]].key, &psi)?;
            let labels: BTreeSet<SearchElement> = orbit.iter().filter_map(gamma_label).collect();
            labels.into_iter().map(|g| g.to_string()).collect()
        }
        None => Vec::new(),
    };
    let class_summaries = classes
        .iter()
        .zip(&orbit_sizes)
        .map(|(members, size)| {
            let labels: BTreeSet<SearchElement> = members.iter().filter_map(|&m| gamma_label(&solutions[m].key)).collect();
            SolutionClass {
                representative: summarize(&solutions[members[0]]),
                members: members.len(),
                gamma_labels: labels.into_iter().map(|g| g.to_string()).collect(),
                orbit_size: *size,
            }
        })
        .collect();
    let result = CaseResult {
        case,
        group: case.bdf().group_name(),
        class: case.class().to_string(),
        certificate,
        stabilizer: None,
        distinct_solutions: solutions.len(),
        classes: class_summaries,
        psi_orbit,
        symmetries: sym.into_iter().map(|(n, _)| n).collect(),
    };
    Ok(CaseSolution { result, solutions, classes })
}

pub fn solve_case(case: SolveCase) -> Result<CaseResult> {
    solve_case_detailed(case).map(|c| c.result)
}

/// A smooth elliptic curve completing the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCompletion {
    pub kind: CompletionKind,
    pub class: NumClass,
    pub class_name: String,
    pub multiple_fiber: bool,
    pub dot_with_singular: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompletionKind {
    /// A fiber of the Albanese map (class `B`).
    AlbaneseFiber,
    /// A fiber of the map to `E_w/G ≅ P¹` through the singular point.
    RationalFiber,
}

/// Classes with self-intersection zero meeting the singular curve `C₂` with
/// intersection `r = 3`, realized by the fibers through its singular point.
/// The fiber of the map to `P¹` through `p = (w₀, z₀)` is `(1/m)A` where `m`
/// is the stabilizer order of `w₀`; the Albanese fiber is `B`.
pub fn second_component_choices(case: SolveCase, sol: &Solution) -> Result<Vec<BoundaryCompletion>> {
    let bdf = case.bdf();
    let c2 = case.class();
    let r = 3;
    let p = sol.orbit.points.first().ok_or_else(|| Error::InvalidConfig("no singular point".into()))?;
    let stab = sol.action.w_stabilizer_order(p.w.value()) as i64;
    let geometric_a = NumClass::new(bdf, bdf.s / stab, 0);
    let geometric_b = NumClass::new(bdf, 0, bdf.t);
    let mut out = Vec::new();
    for m in 1..=bdf.order() * r {
        for (cls, kind) in [(NumClass::new(bdf, m, 0), CompletionKind::RationalFiber), (NumClass::new(bdf, 0, m), CompletionKind::AlbaneseFiber)] {
            if cls.self_intersection() != 0 || cls.dot(&c2) != r {
                continue;
            }
            let expected = match kind {
                CompletionKind::RationalFiber => geometric_a,
                CompletionKind::AlbaneseFiber => geometric_b,
            };
            if cls != expected {
                return Err(Error::InvalidConfig(format!("class {cls} is not realized by the fiber through p")));
            }
            out.push(BoundaryCompletion {
                kind,
                class: cls,
                class_name: cls.to_string(),
                multiple_fiber: kind == CompletionKind::RationalFiber && stab > 1,
                dot_with_singular: cls.dot(&c2),
            });
        }
    }
    out.sort_by_key(|b| b.kind);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> QuadraticField {
        QuadraticField::Eisenstein
    }

    fn fe(a: (i64, i64), b: (i64, i64)) -> SearchElement {
        SearchElement::from_fracs(e(), a, b)
    }

    fn one_minus_rho_over(n: i64) -> SearchElement {
        fe((1, n), (-1, n))
    }

    #[test]
    fn freeness_fixtures() {
        let s = SolveCase::Z3AB.surface();
        let phi = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), one_minus_rho_over(3));
        let a = QuotientAction::build(s.clone(), vec![phi], (3, 1)).unwrap().unwrap();
        assert!(a.action_is_free());
        assert!(a.fixed_point_free());
        let phi0 = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), SearchElement::zero(e()));
        let a = QuotientAction::build(s.clone(), vec![phi0], (3, 1)).unwrap().unwrap();
        assert!(!a.action_is_free());
        assert!(QuotientAction::trivial(s).action_is_free());
    }

    #[test]
    fn pure_w_translation_is_fixed_point_free_but_not_bielliptic() {
        let s = SolveCase::Z3AB.surface();
        let t = GroupElement::new(SearchElement::one(e()), one_minus_rho_over(3), SearchElement::zero(e()));
        let a = QuotientAction::build(s, vec![t], (3, 1)).unwrap().unwrap();
        assert!(a.fixed_point_free());
        assert!(!a.action_is_free());
    }

    #[test]
    fn curve_image_fixture() {
        let s = SolveCase::Z3AB.surface();
        let phi = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), one_minus_rho_over(3));
        let a = QuotientAction::build(s.clone(), vec![phi.clone()], (3, 1)).unwrap().unwrap();
        let diag = Curve::over_z(SearchElement::one(e()), SearchElement::zero(e()));
        let img = a.curve_image(&phi, &diag).unwrap();
        let expected = Curve::over_z(SearchElement::rho(), -one_minus_rho_over(3));
        assert!(s.same_curve(&img, &expected).unwrap());
        let id = GroupElement::identity(e());
        assert_eq!(a.curve_image(&id, &diag).unwrap(), diag);
    }

    #[test]
    fn translation_shifts_graph_over_w() {
        let s = SolveCase::Z3Z3CoverB.surface();
        let k = one_minus_rho_over(3);
        let gp = fe((1, 3), (0, 1));
        let phi2 = GroupElement::new(SearchElement::one(e()), k.clone(), gp.clone());
        let a = QuotientAction::trivial(s.clone());
        let diag = Curve::over_w(SearchElement::one(e()), SearchElement::zero(e()));
        let img = a.curve_image(&phi2, &diag).unwrap();
        let expected = Curve::over_w(SearchElement::one(e()), &gp - &k);
        assert!(s.same_curve(&img, &expected).unwrap());
    }

    #[test]
    fn homology_of_known_quotients() {
        let s = SolveCase::Z3AB.surface();
        assert_eq!(QuotientAction::trivial(s.clone()).first_homology().unwrap(), AbelianInvariants::free(4));
        let phi = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), one_minus_rho_over(3));
        let a = QuotientAction::new(s, vec![phi], (3, 1)).unwrap();
        assert_eq!(a.first_homology().unwrap(), AbelianInvariants::new(2, vec![3]));
        let s = SolveCase::Z3Z3A3B.surface();
        let phi1 = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), SearchElement::one(e()));
        let phi2 = GroupElement::new(SearchElement::one(e()), one_minus_rho_over(3), one_minus_rho_over(3));
        let a = QuotientAction::new(s, vec![phi1, phi2], (3, 3)).unwrap();
        assert_eq!(a.first_homology().unwrap(), AbelianInvariants::free(2));
    }

    fn point(s: &AbelianProduct<SearchScalar>, w: SearchElement, z: SearchElement) -> ProductPoint<SearchScalar> {
        s.point(&w, &z).unwrap()
    }

    #[test]
    fn z3_final_configuration_orbit() {
        let cfg = crate::registry::z3_configuration().unwrap();
        let r = orbit_analysis(&cfg).unwrap();
        let s = &cfg.action.surface;
        let two_thirds = fe((2, 3), (0, 1));
        let two_rho = fe((0, 1), (2, 3));
        let one_rho = fe((1, 3), (1, 3));
        let mut expected = vec![
            point(s, two_thirds.clone(), two_thirds),
            point(s, two_rho.clone(), two_rho),
            point(s, one_rho.clone(), one_rho),
        ];
        expected.sort();
        assert_eq!(r.points, expected);
        assert!(r.transitive && r.pairwise_equal);
        assert_eq!(r.singular_points, 1);
        assert_eq!(r.branches, vec![3, 3, 3]);
    }

    #[test]
    fn z3z3_orbits_for_gamma_three_and_one_minus_rho() {
        let cfg = crate::registry::z3z3_configuration().unwrap();
        let r = orbit_analysis(&cfg).unwrap();
        assert_eq!((r.points.len(), r.orbits.len()), (9, 1));
        assert!(r.points.contains(&cfg.action.surface.origin()));

        // γ = 1 − ρ with φ₂ the diagonal translation by (1 − ρ)/3
        let s = SolveCase::Z3Z3A3B.surface();
        let t = one_minus_rho_over(3);
        let rho = SearchElement::rho();
        let phi1 = GroupElement::new(rho.clone(), SearchElement::zero(e()), t.clone());
        let phi2 = GroupElement::new(SearchElement::one(e()), t.clone(), t.clone());
        let a = QuotientAction::build(s, vec![phi1, phi2], (3, 3)).unwrap().unwrap();
        assert!(!a.action_is_free());
        let curves = vec![
            Curve::over_z(SearchElement::one(e()), SearchElement::zero(e())),
            Curve::over_z(rho.clone(), -t.clone()),
            Curve::over_z(&rho * &rho, -t.scale(&SearchScalar::from_integer(2))),
        ];
        let cfg = UpstairsConfig::new(a, curves).unwrap();
        let r = orbit_analysis(&cfg).unwrap();
        assert_eq!((r.points.len(), r.orbits.len(), r.singular_points), (9, 3, 3));
        assert!(!r.transitive);
    }

    #[test]
    fn orbit_analysis_rejects_unpermuted_curves() {
        let cfg = crate::registry::z3_configuration().unwrap();
        let bad = UpstairsConfig::new(cfg.action.clone(), cfg.curves[..2].to_vec()).unwrap();
        assert!(orbit_analysis(&bad).is_err());
    }

    #[test]
    fn psi_one_swaps_the_two_z3_gammas() {
        let cfg = crate::registry::z3_configuration().unwrap();
        let s = &cfg.action.surface;
        let mut curves = cfg.curves.clone();
        curves.sort();
        let key = SolutionKey { elements: cfg.action.elements().to_vec(), curves };
        let psi1 = &psi_generators(s)[0].1;
        let image = key.image(s, psi1).unwrap();
        let g = gamma_label(&key).unwrap();
        let g2 = gamma_label(&image).unwrap();
        let three_lz = s.lz.scaled(&SearchElement::integer(e(), 3)).unwrap();
        assert!(three_lz.contains(&(&g2 + &g)));
        assert!(!three_lz.contains(&(&g2 - &g)));
    }

    #[test]
    fn commuting_translations_generate_order_three() {
        let (std, three_one) = SolveCase::Z3Z3A3B.lattices();
        assert_eq!(commuting_translations(&std, &SearchElement::rho()).unwrap().len(), 2);
        assert_eq!(commuting_translations(&three_one, &SearchElement::rho()).unwrap().len(), 2);
    }
}
