//! Translates of elliptic subgroups on a product of two elliptic curves
//! `(C/Λ_w) × (C/Λ_z)`, their intersections, and the search for good
//! configurations: four such curves meeting pairwise once, all at one point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{QuadElem, QuadraticField};
use crate::lattice::{Lattice, LatticePoint};
use crate::scalar::Scalar;

/// An elliptic curve in the product, in one of four shapes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve<Q> {
    /// `w = αz + a`.
    GraphOverZ { slope: QuadElem<Q>, offset: QuadElem<Q> },
    /// `z = βw + b`.
    GraphOverW { slope: QuadElem<Q>, offset: QuadElem<Q> },
    /// `w = c`.
    WFiber(QuadElem<Q>),
    /// `z = c`.
    ZFiber(QuadElem<Q>),
}

impl<Q: Scalar> Curve<Q> {
    pub fn over_z(slope: QuadElem<Q>, offset: QuadElem<Q>) -> Self {
        Curve::GraphOverZ { slope, offset }
    }

    pub fn over_w(slope: QuadElem<Q>, offset: QuadElem<Q>) -> Self {
        Curve::GraphOverW { slope, offset }
    }

    fn field(&self) -> QuadraticField {
        match self {
            Curve::GraphOverZ { slope, .. } | Curve::GraphOverW { slope, .. } => slope.field(),
            Curve::WFiber(c) | Curve::ZFiber(c) => c.field(),
        }
    }
}

impl<Q: Scalar> fmt::Display for Curve<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn affine<Q: Scalar>(f: &mut fmt::Formatter<'_>, lhs: &str, var: &str, s: &QuadElem<Q>, o: &QuadElem<Q>) -> fmt::Result {
            let lin = if s == &QuadElem::one(s.field()) {
                var.to_string()
            } else if s == &-QuadElem::one(s.field()) {
                format!("-{var}")
            } else {
                format!("({s}){var}")
            };
            if o.is_zero() {
                write!(f, "{lhs} = {lin}")
            } else {
                write!(f, "{lhs} = {lin} + ({o})")
            }
        }
        match self {
            Curve::GraphOverZ { slope, offset } => affine(f, "w", "z", slope, offset),
            Curve::GraphOverW { slope, offset } => affine(f, "z", "w", slope, offset),
            Curve::WFiber(c) => write!(f, "w = {c}"),
            Curve::ZFiber(c) => write!(f, "z = {c}"),
        }
    }
}

/// A point `(w, z)` of the product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductPoint<Q> {
    pub w: LatticePoint<Q>,
    pub z: LatticePoint<Q>,
}

impl<Q: Scalar> fmt::Display for ProductPoint<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.w, self.z)
    }
}

/// The abelian surface `(C/Λ_w) × (C/Λ_z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianProduct<Q> {
    pub lw: Lattice<Q>,
    pub lz: Lattice<Q>,
}

/// Solutions `x ∈ C/src` of `δx ≡ t (mod dst)`, given `δ·src ⊆ dst`, `δ ≠ 0`.
/// They form a coset of `δ⁻¹dst / src`.
fn solve_linear<Q: Scalar>(
    delta: &QuadElem<Q>,
    t: &QuadElem<Q>,
    src: &Lattice<Q>,
    dst: &Lattice<Q>,
) -> Result<Vec<LatticePoint<Q>>> {
    let inv = delta.inv()?;
    let x0 = &inv * t;
    let coarse = dst.scaled(&inv)?;
    let reps = coarse.coset_representatives(src)?;
    let mut out: Vec<_> = reps
        .iter()
        .map(|r| src.point(&(&x0 + r)))
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// Number of solutions of the same congruence, by the index `[dst : δ·src]`.
fn count_linear<Q: Scalar>(delta: &QuadElem<Q>, src: &Lattice<Q>, dst: &Lattice<Q>) -> Result<u64> {
    dst.index_of(&src.scaled(delta)?)
}

enum Meeting<Q> {
    Identical,
    Empty,
    /// Solve `δx ≡ t` with `x` in the w-torus (`true`) or the z-torus.
    Solve { delta: QuadElem<Q>, t: QuadElem<Q>, over_w: bool },
    Single(QuadElem<Q>, QuadElem<Q>),
}

impl<Q: Scalar> AbelianProduct<Q> {
    pub fn new(lw: Lattice<Q>, lz: Lattice<Q>) -> Result<Self> {
        if lw.field() != lz.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(AbelianProduct { lw, lz })
    }

    /// `E × E` for one lattice.
    pub fn square(l: &Lattice<Q>) -> Self {
        AbelianProduct { lw: l.clone(), lz: l.clone() }
    }

    pub fn field(&self) -> QuadraticField {
        self.lw.field()
    }

    pub fn point(&self, w: &QuadElem<Q>, z: &QuadElem<Q>) -> Result<ProductPoint<Q>> {
        Ok(ProductPoint { w: self.lw.point(w)?, z: self.lz.point(z)? })
    }

    pub fn origin(&self) -> ProductPoint<Q> {
        ProductPoint { w: LatticePoint::origin(&self.lw), z: LatticePoint::origin(&self.lz) }
    }

    /// The homomorphism condition: `αΛ_z ⊆ Λ_w` for graphs over z, and
    /// symmetrically for graphs over w.
    pub fn well_defined(&self, c: &Curve<Q>) -> bool {
        if c.field() != self.field() {
            return false;
        }
        match c {
            Curve::GraphOverZ { slope, offset } => {
                offset.field() == self.field() && self.lz.maps_into(slope, &self.lw)
            }
            Curve::GraphOverW { slope, offset } => {
                offset.field() == self.field() && self.lw.maps_into(slope, &self.lz)
            }
            Curve::WFiber(_) | Curve::ZFiber(_) => true,
        }
    }

    /// Canonical form: zero slopes become fibers, graphs over w with an
    /// isomorphic slope become graphs over z, offsets are reduced.
    pub fn normalize(&self, c: &Curve<Q>) -> Result<Curve<Q>> {
        if !self.well_defined(c) {
            return Err(Error::CurveNotWellDefined);
        }
        Ok(match c {
            Curve::GraphOverZ { slope, offset } if slope.is_zero() => Curve::WFiber(self.lw.reduce(offset)?),
            Curve::GraphOverW { slope, offset } if slope.is_zero() => Curve::ZFiber(self.lz.reduce(offset)?),
            Curve::GraphOverZ { slope, offset } => Curve::GraphOverZ {
                slope: slope.clone(),
                offset: self.lw.reduce(offset)?,
            },
            Curve::GraphOverW { slope, offset } => {
                let inv = slope.inv()?;
                if self.lz.maps_into(&inv, &self.lw) {
                    Curve::GraphOverZ { offset: self.lw.reduce(&-(&inv * offset))?, slope: inv }
                } else {
                    Curve::GraphOverW { slope: slope.clone(), offset: self.lz.reduce(offset)? }
                }
            }
            Curve::WFiber(c) => Curve::WFiber(self.lw.reduce(c)?),
            Curve::ZFiber(c) => Curve::ZFiber(self.lz.reduce(c)?),
        })
    }

    pub fn same_curve(&self, a: &Curve<Q>, b: &Curve<Q>) -> Result<bool> {
        Ok(self.normalize(a)? == self.normalize(b)?)
    }

    /// Does the point lie on the curve?
    pub fn contains_point(&self, c: &Curve<Q>, p: &ProductPoint<Q>) -> bool {
        let (w, z) = (p.w.value(), p.z.value());
        match c {
            Curve::GraphOverZ { slope, offset } => self.lw.contains(&(w - &(&(slope * z) + offset))),
            Curve::GraphOverW { slope, offset } => self.lz.contains(&(z - &(&(slope * w) + offset))),
            Curve::WFiber(c) => self.lw.contains(&(w - c)),
            Curve::ZFiber(c) => self.lz.contains(&(z - c)),
        }
    }

    fn meeting(&self, a: &Curve<Q>, b: &Curve<Q>) -> Result<Meeting<Q>> {
        use Curve::*;
        let a = self.normalize(a)?;
        let b = self.normalize(b)?;
        if a == b {
            return Ok(Meeting::Identical);
        }
        let parallel = |d: QuadElem<Q>, l: &Lattice<Q>| {
            if l.contains(&d) {
                Meeting::Identical
            } else {
                Meeting::Empty
            }
        };
        Ok(match (&a, &b) {
            (GraphOverZ { slope: s1, offset: o1 }, GraphOverZ { slope: s2, offset: o2 }) => {
                if s1 == s2 {
                    parallel(o1 - o2, &self.lw)
                } else {
                    Meeting::Solve { delta: s1 - s2, t: o2 - o1, over_w: false }
                }
            }
            (GraphOverW { slope: s1, offset: o1 }, GraphOverW { slope: s2, offset: o2 }) => {
                if s1 == s2 {
                    parallel(o1 - o2, &self.lz)
                } else {
                    Meeting::Solve { delta: s1 - s2, t: o2 - o1, over_w: true }
                }
            }
            (GraphOverZ { slope: al, offset: a0 }, GraphOverW { slope: be, offset: b0 })
            | (GraphOverW { slope: be, offset: b0 }, GraphOverZ { slope: al, offset: a0 }) => {
                let mu = &QuadElem::one(self.field()) - &(al * be);
                let t = a0 + &(al * b0);
                if mu.is_zero() {
                    parallel(t, &self.lw)
                } else {
                    Meeting::Solve { delta: mu, t, over_w: true }
                }
            }
            (GraphOverZ { slope, offset }, WFiber(c)) | (WFiber(c), GraphOverZ { slope, offset }) => {
                Meeting::Solve { delta: slope.clone(), t: c - offset, over_w: false }
            }
            (GraphOverZ { slope, offset }, ZFiber(c)) | (ZFiber(c), GraphOverZ { slope, offset }) => {
                Meeting::Single(&(slope * c) + offset, c.clone())
            }
            (GraphOverW { slope, offset }, ZFiber(c)) | (ZFiber(c), GraphOverW { slope, offset }) => {
                Meeting::Solve { delta: slope.clone(), t: c - offset, over_w: true }
            }
            (GraphOverW { slope, offset }, WFiber(c)) | (WFiber(c), GraphOverW { slope, offset }) => {
                Meeting::Single(c.clone(), &(slope * c) + offset)
            }
            (WFiber(c1), WFiber(c2)) => parallel(c1 - c2, &self.lw),
            (ZFiber(c1), ZFiber(c2)) => parallel(c1 - c2, &self.lz),
            (WFiber(w), ZFiber(z)) | (ZFiber(z), WFiber(w)) => Meeting::Single(w.clone(), z.clone()),
        })
    }

    /// Intersection number of two distinct curves, computed as a lattice
    /// index (never by listing points).
    pub fn intersection_number(&self, a: &Curve<Q>, b: &Curve<Q>) -> Result<u64> {
        match self.meeting(a, b)? {
            Meeting::Identical => Err(Error::IdenticalCurves),
            Meeting::Empty => Ok(0),
            Meeting::Single(..) => Ok(1),
            Meeting::Solve { delta, over_w, .. } => {
                let (src, dst) = self.solve_lattices(a, b, over_w)?;
                count_linear(&delta, src, dst)
            }
        }
    }

    fn solve_lattices(&self, a: &Curve<Q>, b: &Curve<Q>, over_w: bool) -> Result<(&Lattice<Q>, &Lattice<Q>)> {
        // The congruence lives in the torus of the fiber/graph target.
        let a = self.normalize(a)?;
        let b = self.normalize(b)?;
        let mixed = matches!(
            (&a, &b),
            (Curve::GraphOverZ { .. }, Curve::GraphOverW { .. }) | (Curve::GraphOverW { .. }, Curve::GraphOverZ { .. })
        );
        Ok(match (over_w, mixed) {
            (true, true) => (&self.lw, &self.lw),
            (true, false) => (&self.lw, &self.lz),
            (false, _) => (&self.lz, &self.lw),
        })
    }

    /// The common points of two distinct curves, sorted.
    pub fn intersection_points(&self, a: &Curve<Q>, b: &Curve<Q>) -> Result<Vec<ProductPoint<Q>>> {
        match self.meeting(a, b)? {
            Meeting::Identical => Err(Error::IdenticalCurves),
            Meeting::Empty => Ok(Vec::new()),
            Meeting::Single(w, z) => Ok(vec![self.point(&w, &z)?]),
            Meeting::Solve { delta, t, over_w } => {
                let (src, dst) = self.solve_lattices(a, b, over_w)?;
                let xs = solve_linear(&delta, &t, src, dst)?;
                let (na, nb) = (self.normalize(a)?, self.normalize(b)?);
                let mut out = Vec::with_capacity(xs.len());
                for x in xs {
                    let p = self.complete_point(&na, &nb, x.value(), over_w)?;
                    out.push(p);
                }
                out.sort();
                Ok(out)
            }
        }
    }

    /// Given one coordinate of an intersection point, recover the other from
    /// whichever curve is a graph over the solved coordinate (or a fiber).
    fn complete_point(&self, a: &Curve<Q>, b: &Curve<Q>, x: &QuadElem<Q>, over_w: bool) -> Result<ProductPoint<Q>> {
        for c in [a, b] {
            match (c, over_w) {
                (Curve::GraphOverZ { slope, offset }, false) => return self.point(&(&(slope * x) + offset), x),
                (Curve::GraphOverW { slope, offset }, true) => return self.point(x, &(&(slope * x) + offset)),
                (Curve::ZFiber(z), true) => return self.point(x, z),
                (Curve::WFiber(w), false) => return self.point(w, x),
                _ => {}
            }
        }
        Err(Error::Unsupported("no curve determines the remaining coordinate".into()))
    }

    /// Translate a curve by the point `(p, q)`.
    pub fn translate(&self, c: &Curve<Q>, p: &QuadElem<Q>, q: &QuadElem<Q>) -> Result<Curve<Q>> {
        let moved = match c {
            Curve::GraphOverZ { slope, offset } => Curve::over_z(slope.clone(), &(offset + p) - &(slope * q)),
            Curve::GraphOverW { slope, offset } => Curve::over_w(slope.clone(), &(offset + q) - &(slope * p)),
            Curve::WFiber(c) => Curve::WFiber(c + p),
            Curve::ZFiber(c) => Curve::ZFiber(c + q),
        };
        self.normalize(&moved)
    }
}

/// The three kinds of lattice the good-configuration search runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeChoice {
    Eisenstein,
    Gaussian,
    /// A lattice without complex multiplication. Only its unit group {±1}
    /// matters; `Z[1, 2i]` stands in for it in exact computations.
    Generic,
}

impl LatticeChoice {
    pub const ALL: [LatticeChoice; 3] = [LatticeChoice::Generic, LatticeChoice::Gaussian, LatticeChoice::Eisenstein];

    pub fn name(self) -> &'static str {
        match self {
            LatticeChoice::Eisenstein => "eisenstein",
            LatticeChoice::Gaussian => "gaussian",
            LatticeChoice::Generic => "generic",
        }
    }

    pub fn lattice<Q: Scalar>(self) -> Lattice<Q> {
        match self {
            LatticeChoice::Eisenstein => Lattice::integers(QuadraticField::Eisenstein),
            LatticeChoice::Gaussian => Lattice::integers(QuadraticField::Gaussian),
            LatticeChoice::Generic => Lattice::new(
                QuadElem::one(QuadraticField::Gaussian),
                QuadElem::from_ints(QuadraticField::Gaussian, 0, 2),
            )
            .expect("full rank"),
        }
    }

    /// All α with αΛ = Λ, as consecutive powers of a generator.
    pub fn unit_slopes<Q: Scalar>(self) -> Vec<QuadElem<Q>> {
        match self {
            LatticeChoice::Generic => {
                let f = QuadraticField::Gaussian;
                vec![QuadElem::one(f), -QuadElem::one(f)]
            }
            _ => self.lattice::<Q>().unit_multipliers(),
        }
    }
}

/// Four curves through the origin: `w = 0`, `z = 0`, `w = α₁z`, `w = α₂z`,
/// with the slopes recorded by their exponents in the unit list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodConfiguration {
    pub slope_exponents: (usize, usize),
    pub curves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationClass {
    pub representative: GoodConfiguration,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodConfigReport {
    pub lattice: LatticeChoice,
    pub unit_slopes: Vec<String>,
    pub pairs_examined: usize,
    pub configurations: Vec<GoodConfiguration>,
    pub classes: Vec<ConfigurationClass>,
}

/// The configuration `{w = 0, z = 0, w = α₁z, w = α₂z}`.
pub fn star_configuration<Q: Scalar>(a1: &QuadElem<Q>, a2: &QuadElem<Q>) -> Vec<Curve<Q>> {
    let f = a1.field();
    let zero = QuadElem::zero(f);
    vec![
        Curve::WFiber(zero.clone()),
        Curve::ZFiber(zero.clone()),
        Curve::over_z(a1.clone(), zero.clone()),
        Curve::over_z(a2.clone(), zero),
    ]
}

/// Is the configuration good: pairwise intersection numbers all 1, and every
/// pair meeting only at the origin?
pub fn is_good<Q: Scalar>(surface: &AbelianProduct<Q>, curves: &[Curve<Q>]) -> Result<bool> {
    let origin = surface.origin();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            if surface.intersection_number(&curves[i], &curves[j])? != 1 {
                return Ok(false);
            }
            if surface.intersection_points(&curves[i], &curves[j])? != vec![origin.clone()] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Equivalence on unordered slope-exponent pairs generated by rescaling
/// `w` by a unit (exponent shift) and swapping the coordinates (which
/// exchanges `w = 0` and `z = 0` and inverts the slopes).
fn configuration_classes(pairs: &[(usize, usize)], order: usize) -> Vec<Vec<(usize, usize)>> {
    let norm = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let members: BTreeSet<_> = pairs.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    for &start in &members {
        if seen.contains(&start) {
            continue;
        }
        let mut class = BTreeSet::new();
        let mut stack = vec![start];
        while let Some((a, b)) = stack.pop() {
            if !members.contains(&(a, b)) || !class.insert((a, b)) {
                continue;
            }
            stack.push(norm((a + 1) % order, (b + 1) % order));
            stack.push(norm((order - a) % order, (order - b) % order));
        }
        seen.extend(class.iter().copied());
        classes.push(class.into_iter().collect());
    }
    classes
}

/// Enumerate all good configurations of the standard shape on `E × E`.
pub fn good_configuration_search<Q: Scalar>(choice: LatticeChoice) -> Result<GoodConfigReport> {
    let lattice = choice.lattice::<Q>();
    let surface = AbelianProduct::square(&lattice);
    let units = choice.unit_slopes::<Q>();
    let pairs: Vec<(usize, usize)> =
        (0..units.len()).flat_map(|i| (i + 1..units.len()).map(move |j| (i, j))).collect();
    let verdicts: Vec<Result<bool>> = pairs
        .par_iter()
        .map(|&(i, j)| is_good(&surface, &star_configuration(&units[i], &units[j])))
        .collect();
    let mut good = Vec::new();
    for (pair, verdict) in pairs.iter().zip(verdicts) {
        if verdict? {
            good.push(*pair);
        }
    }
    let render = |(i, j): (usize, usize)| GoodConfiguration {
        slope_exponents: (i, j),
        curves: star_configuration(&units[i], &units[j]).iter().map(|c| c.to_string()).collect(),
    };
    let classes = configuration_classes(&good, units.len())
        .into_iter()
        .map(|members| ConfigurationClass { representative: render(members[0]), size: members.len() })
        .collect();
    Ok(GoodConfigReport {
        lattice: choice,
        unit_slopes: units.iter().map(|u| u.to_string()).collect(),
        pairs_examined: pairs.len(),
        configurations: good.into_iter().map(render).collect(),
        classes,
    })
}

/// Intersection-number matrix of a list of curves (diagonal left at zero).
pub fn intersection_matrix<Q: Scalar>(surface: &AbelianProduct<Q>, curves: &[Curve<Q>]) -> Result<BTreeMap<(usize, usize), u64>> {
    let mut out = BTreeMap::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            out.insert((i, j), surface.intersection_number(&curves[i], &curves[j])?);
        }
    }
    Ok(out)
}
