//! Numerical classes on bielliptic surfaces and the filters that decide
//! which classes can carry the singular boundary curve.
//!
//! For `G = Z/s × Z/t`, `Num(Y)` has basis `(1/s)A, (1/t)B` with `A² = B² = 0`
//! and `A·B = |G|`. A class `(k₁/s)A + (k₂/t)B` therefore has self-intersection
//! `2k₁k₂`, degree `C·B = k₁|G|/s` on the Albanese fiber and `C·A = k₂|G|/t`
//! on the other fiber.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::QuadraticField;
use crate::geography::{boundary_profiles, multiplicity_for, singularity_solutions};
use crate::scalar::Scalar;
use crate::Rational;

/// One of the seven group types of bielliptic surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BdfType {
    pub id: u8,
    pub s: i64,
    pub t: i64,
    /// Field the first factor must have complex multiplication by, if any.
    pub cm_field: Option<QuadraticField>,
}

pub const BDF_TYPES: [BdfType; 7] = [
    BdfType { id: 1, s: 2, t: 1, cm_field: None },
    BdfType { id: 2, s: 2, t: 2, cm_field: None },
    BdfType { id: 3, s: 4, t: 1, cm_field: Some(QuadraticField::Gaussian) },
    BdfType { id: 4, s: 4, t: 2, cm_field: Some(QuadraticField::Gaussian) },
    BdfType { id: 5, s: 3, t: 1, cm_field: Some(QuadraticField::Eisenstein) },
    BdfType { id: 6, s: 3, t: 3, cm_field: Some(QuadraticField::Eisenstein) },
    BdfType { id: 7, s: 6, t: 1, cm_field: Some(QuadraticField::Eisenstein) },
];

impl BdfType {
    pub fn by_group(s: i64, t: i64) -> Option<BdfType> {
        BDF_TYPES.iter().copied().find(|b| b.s == s && b.t == t)
    }

    pub fn order(&self) -> i64 {
        self.s * self.t
    }

    pub fn group_name(&self) -> String {
        if self.t == 1 {
            format!("Z/{}", self.s)
        } else {
            format!("Z/{} x Z/{}", self.s, self.t)
        }
    }

    /// Action of the generators on the first factor.
    pub fn action_description(&self) -> &'static str {
        match self.id {
            1 => "x -> -x",
            2 => "x -> -x, x -> x + (2-torsion point)",
            3 => "x -> ix",
            4 => "x -> ix, x -> x + (1+i)/2",
            5 => "x -> ρx",
            6 => "x -> ρx, x -> x + (1-ρ)/3",
            _ => "x -> ζx",
        }
    }
}

impl fmt::Display for BdfType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.group_name())
    }
}

/// The class `(k₁/s)A + (k₂/t)B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NumClass {
    pub k1: i64,
    pub k2: i64,
    pub bdf: BdfType,
}

impl NumClass {
    pub fn new(bdf: BdfType, k1: i64, k2: i64) -> Self {
        NumClass { k1, k2, bdf }
    }

    pub fn self_intersection(&self) -> i64 {
        2 * self.k1 * self.k2
    }

    /// `C·C'` for two classes on the same surface: `k₁k₂' + k₂k₁'`.
    pub fn dot(&self, other: &NumClass) -> i64 {
        self.k1 * other.k2 + self.k2 * other.k1
    }

    /// `(C·A, C·B)`.
    pub fn fiber_degrees(&self) -> (i64, i64) {
        let g = self.bdf.order();
        (self.k2 * g / self.bdf.t, self.k1 * g / self.bdf.s)
    }

    /// Coefficients `(a, b)` with `C = aA + bB`.
    pub fn coefficients(&self) -> (Rational, Rational) {
        (Rational::from_frac(self.k1, self.bdf.s), Rational::from_frac(self.k2, self.bdf.t))
    }
}

impl fmt::Display for NumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.coefficients();
        let term = |c: &Rational, x: &str| -> String {
            if c.is_zero() {
                String::new()
            } else if c.is_one() {
                x.to_string()
            } else {
                format!("({c}){x}")
            }
        };
        let (ta, tb) = (term(&a, "A"), term(&b, "B"));
        match (ta.is_empty(), tb.is_empty()) {
            (true, true) => f.write_str("0"),
            (false, true) => f.write_str(&ta),
            (true, false) => f.write_str(&tb),
            (false, false) => write!(f, "{ta} + {tb}"),
        }
    }
}

/// `C·B = k₁|G|/s` and `C·A = k₂|G|/t`.
pub fn fiber_degrees(c: &NumClass) -> (i64, i64) {
    c.fiber_degrees()
}

pub fn class_self_intersection(c: &NumClass) -> i64 {
    c.self_intersection()
}

/// All `(k₁, k₂)` with `k₁, k₂ ≥ 1` and `2k₁k₂ = c_sq`.
pub fn enumerate_candidates(bdf: BdfType, c_sq: i64) -> Vec<NumClass> {
    if c_sq <= 0 || c_sq % 2 != 0 {
        return Vec::new();
    }
    let m = c_sq / 2;
    (1..=m).filter(|k1| m % k1 == 0).map(|k1| NumClass::new(bdf, k1, m / k1)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspCase {
    One,
    Two,
}

/// A boundary shape left by the log-geography constraints on a bielliptic
/// surface blown up once: the singular curve's `C²` and multiplicity `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryCase {
    pub cusps: CuspCase,
    pub r: i64,
    pub c_sq: i64,
}

impl BoundaryCase {
    /// Boundary self-intersections: the singular curve's strict transform
    /// first, then the partner component for two cusps.
    pub fn profile(&self) -> Vec<i64> {
        let d = self.c_sq - self.r * self.r;
        match self.cusps {
            CuspCase::One => vec![d],
            CuspCase::Two => vec![d, -4 - d],
        }
    }
}

/// Profiles with one or two components (Picard number three allows at most
/// two cusps) whose components with `D² ≤ −2` come from the singularity
/// list; the single remaining `D² = −1` component of a two-cusp profile is a
/// smooth elliptic curve with `C² = 0`.
pub fn admissible_cases() -> Vec<BoundaryCase> {
    let data = singularity_solutions(6);
    let mut out = Vec::new();
    for profile in boundary_profiles(4) {
        if profile.len() > 2 {
            continue;
        }
        let singular: Vec<_> = profile.iter().filter(|d| **d <= -2).collect();
        let Some(&&d) = singular.first() else { continue };
        let Some(datum) = data.iter().find(|s| s.d_selfint == d) else { continue };
        let cusps = if profile.len() == 1 { CuspCase::One } else { CuspCase::Two };
        out.push(BoundaryCase { cusps, r: datum.r, c_sq: datum.c_selfint() });
    }
    out.sort_by_key(|c| (c.cusps, -c.r));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterId {
    /// `r | |G|`.
    F1,
    /// `C·B ≥ r`, strict for one cusp.
    F2,
    /// `C·A ≥ r`, strict for one cusp.
    F3,
    /// Two nodal curves of `C² = 2` must meet with `C₁·C₂ = 4`.
    F4,
    /// `r | C·B` and `r | C·A`.
    F5,
}

impl FilterId {
    pub const ALL: [FilterId; 5] = [FilterId::F1, FilterId::F2, FilterId::F3, FilterId::F4, FilterId::F5];

    /// Key into the citation registry.
    pub fn citation(self) -> &'static str {
        match self {
            FilterId::F1 => "components-divide-group-order",
            FilterId::F2 => "albanese-fiber-bound",
            FilterId::F3 => "rational-fiber-bound",
            FilterId::F4 => "nodal-pair-intersection",
            FilterId::F5 => "components-equal-fiber-degree",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FilterId::F1 => "the multiplicity r divides |G|",
            FilterId::F2 => "degree on the Albanese fiber C·B is at least r (strictly, with one cusp)",
            FilterId::F3 => "degree on the other fiber C·A is at least r (strictly, with one cusp)",
            FilterId::F4 => "two curves with a double point each meet with C1·C2 = 4",
            FilterId::F5 => "r divides both fiber degrees",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterResult {
    pub filter: FilterId,
    pub citation: String,
    pub applicable: bool,
    pub passed: bool,
    /// Passed a fiber bound with equality, which is only allowed with two cusps.
    pub equality: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub class: NumClass,
    pub r: i64,
    pub cusps: CuspCase,
    pub results: Vec<FilterResult>,
    pub survives_numerics: bool,
    /// First failing filter.
    pub deciding: Option<FilterId>,
}

impl FilterVerdict {
    pub fn result(&self, f: FilterId) -> &FilterResult {
        self.results.iter().find(|r| r.filter == f).expect("every filter is recorded")
    }

    pub fn equality_cases(&self) -> Vec<FilterId> {
        self.results.iter().filter(|r| r.equality).map(|r| r.filter).collect()
    }
}

/// Apply all five filters, recording each one even after a failure.
pub fn run_filters(c: &NumClass, r: i64, cusps: CuspCase) -> FilterVerdict {
    let g = c.bdf.order();
    let (ca, cb) = c.fiber_degrees();
    let strict = cusps == CuspCase::One;
    let mk = |filter: FilterId, applicable: bool, passed: bool, equality: bool, detail: String| FilterResult {
        filter,
        citation: filter.citation().to_string(),
        applicable,
        passed,
        equality,
        detail,
    };
    let bound = |filter: FilterId, deg: i64, label: &str| {
        let passed = if strict { deg > r } else { deg >= r };
        let rel = if strict { ">" } else { ">=" };
        mk(filter, true, passed, passed && deg == r, format!("{label} = {deg} {rel} {r}: {passed}"))
    };
    let mut results = vec![
        mk(FilterId::F1, true, g % r == 0, false, format!("{r} | {g}: {}", g % r == 0)),
        bound(FilterId::F2, cb, "C·B"),
        bound(FilterId::F3, ca, "C·A"),
    ];
    if cusps == CuspCase::Two && r == 2 {
        let partners = enumerate_candidates(c.bdf, c.self_intersection());
        let dots: Vec<i64> = partners.iter().map(|p| c.dot(p)).collect();
        let passed = dots.contains(&(r * r));
        results.push(mk(
            FilterId::F4,
            true,
            passed,
            false,
            format!("C1·C2 over partner classes = {dots:?}, required {}", r * r),
        ));
    } else {
        results.push(mk(FilterId::F4, false, true, false, "not a pair of double points".to_string()));
    }
    let f5 = cb % r == 0 && ca % r == 0;
    results.push(mk(FilterId::F5, true, f5, false, format!("{r} | C·B = {cb} and {r} | C·A = {ca}: {f5}")));
    let deciding = results.iter().find(|x| !x.passed).map(|x| x.filter);
    FilterVerdict { class: *c, r, cusps, survives_numerics: deciding.is_none(), deciding, results }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub bdf: BdfType,
    pub case: BoundaryCase,
    pub verdicts: Vec<FilterVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationCensus {
    pub rows: Vec<CensusRow>,
    pub survivors: Vec<NumClass>,
}

/// Every type against every admissible boundary case.
pub fn elimination_census() -> EliminationCensus {
    let cases = admissible_cases();
    let rows: Vec<CensusRow> = BDF_TYPES
        .par_iter()
        .flat_map_iter(|bdf| {
            cases.iter().map(move |case| CensusRow {
                bdf: *bdf,
                case: *case,
                verdicts: enumerate_candidates(*bdf, case.c_sq)
                    .iter()
                    .map(|c| run_filters(c, case.r, case.cusps))
                    .collect(),
            })
        })
        .collect();
    let survivors = rows
        .iter()
        .flat_map(|row| row.verdicts.iter().filter(|v| v.survives_numerics).map(|v| v.class))
        .collect();
    EliminationCensus { rows, survivors }
}

/// A linear map on `Num(Y) ⊗ Q` given by the images of `A` and `B` as
/// coefficient pairs over `(A, B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    pub a_image: (Rational, Rational),
    pub b_image: (Rational, Rational),
}

impl ClassMap {
    pub fn identity() -> Self {
        ClassMap {
            a_image: (Rational::one(), Rational::zero()),
            b_image: (Rational::zero(), Rational::one()),
        }
    }

    /// The unique map with `from[i] ↦ to[i]`, for two independent sources.
    pub fn forced(from: [&NumClass; 2], to: [&NumClass; 2]) -> Result<ClassMap> {
        let (p, q) = (from[0].coefficients(), from[1].coefficients());
        let det = p.0.clone() * q.1.clone() - p.1.clone() * q.0.clone();
        if det.is_zero() {
            return Err(Error::NotInvertible);
        }
        // A = (q.1·P − p.1·Q)/det and B = (p.0·Q − q.0·P)/det.
        let (u, v) = (to[0].coefficients(), to[1].coefficients());
        let comb = |x: &Rational, y: &Rational| {
            (
                (x.clone() * u.0.clone() + y.clone() * v.0.clone()) / det.clone(),
                (x.clone() * u.1.clone() + y.clone() * v.1.clone()) / det.clone(),
            )
        };
        Ok(ClassMap { a_image: comb(&q.1, &-p.1.clone()), b_image: comb(&-q.0.clone(), &p.0) })
    }

    /// Images of the lattice basis `(1/s)A, (1/t)B` in basis coordinates.
    pub fn basis_images(&self, bdf: BdfType) -> [(Rational, Rational); 2] {
        let s = Rational::from_int(bdf.s);
        let t = Rational::from_int(bdf.t);
        // xA + yB = (xs)(1/s)A + (yt)(1/t)B.
        let coords = |(x, y): &(Rational, Rational), scale: &Rational| {
            (x.clone() * s.clone() / scale.clone(), y.clone() * t.clone() / scale.clone())
        };
        [coords(&self.a_image, &s), coords(&self.b_image, &t)]
    }
}

/// Does the assignment extend to an automorphism of the lattice `Num(Y)`?
/// Integrality of the basis images is the decisive condition.
pub fn numerical_automorphism_exists(bdf: BdfType, map: &ClassMap) -> bool {
    map.basis_images(bdf).iter().all(|(x, y)| x.is_int() && y.is_int())
}

/// Check that `r` comes from the singularity quadratic for the given `C²`.
pub fn multiplicity_consistent(c_sq: i64, r: i64) -> bool {
    c_sq % 2 == 0 && multiplicity_for(c_sq / 2) == Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: i64, t: i64) -> BdfType {
        BdfType::by_group(s, t).unwrap()
    }

    #[test]
    fn self_intersection_and_degrees() {
        let z3 = ty(3, 1);
        assert_eq!(NumClass::new(z3, 0, 5).self_intersection(), 0);
        assert_eq!(NumClass::new(z3, 1, 1).self_intersection(), 2);
        assert_eq!(NumClass::new(z3, 3, 1).self_intersection(), 6);
        assert_eq!(NumClass::new(z3, 3, 1).fiber_degrees(), (3, 3));
        assert_eq!(NumClass::new(ty(3, 3), 1, 3).fiber_degrees(), (9, 3));
        assert_eq!(NumClass::new(ty(4, 2), 3, 2).fiber_degrees().1, 6);
    }

    #[test]
    fn candidate_lists() {
        let k = |c: Vec<NumClass>| c.iter().map(|x| (x.k1, x.k2)).collect::<Vec<_>>();
        assert_eq!(k(enumerate_candidates(ty(2, 1), 2)), vec![(1, 1)]);
        assert_eq!(k(enumerate_candidates(ty(4, 1), 12)), vec![(1, 6), (2, 3), (3, 2), (6, 1)]);
        assert_eq!(k(enumerate_candidates(ty(3, 1), 6)), vec![(1, 3), (3, 1)]);
    }

    #[test]
    fn admissible_cases_come_from_geography() {
        let cases: Vec<_> = admissible_cases().iter().map(|c| (c.cusps, c.r, c.c_sq)).collect();
        assert_eq!(cases, vec![(CuspCase::One, 4, 12), (CuspCase::Two, 3, 6), (CuspCase::Two, 2, 2)]);
        let profiles: Vec<_> = admissible_cases().iter().map(|c| c.profile()).collect();
        assert_eq!(profiles, vec![vec![-4], vec![-3, -1], vec![-2, -2]]);
        assert!(multiplicity_consistent(6, 3));
    }

    #[test]
    fn filter_fixtures() {
        let v = run_filters(&NumClass::new(ty(2, 1), 3, 1), 3, CuspCase::Two);
        assert_eq!(v.deciding, Some(FilterId::F1));
        let v = run_filters(&NumClass::new(ty(4, 1), 6, 1), 4, CuspCase::One);
        assert_eq!(v.deciding, Some(FilterId::F3));
        let v = run_filters(&NumClass::new(ty(4, 2), 3, 2), 4, CuspCase::One);
        assert!(v.result(FilterId::F1).passed && v.result(FilterId::F2).passed && v.result(FilterId::F3).passed);
        assert_eq!(v.deciding, Some(FilterId::F5));
        let v = run_filters(&NumClass::new(ty(3, 1), 3, 1), 3, CuspCase::Two);
        assert!(v.survives_numerics);
        assert_eq!(v.equality_cases(), vec![FilterId::F2, FilterId::F3]);
    }

    #[test]
    fn automorphism_fixtures() {
        let z3 = ty(3, 1);
        assert!(numerical_automorphism_exists(z3, &ClassMap::identity()));
        let a = NumClass::new(z3, 3, 0);
        let b = NumClass::new(z3, 0, 1);
        let c2 = NumClass::new(z3, 3, 1);
        let swap = ClassMap::forced([&a, &c2], [&b, &c2]).unwrap();
        assert_eq!(swap.a_image, (Rational::zero(), Rational::one()));
        assert!(!numerical_automorphism_exists(z3, &swap));

        let z33 = ty(3, 3);
        let a3 = NumClass::new(z33, 1, 0);
        let b = NumClass::new(z33, 0, 3);
        let c2 = NumClass::new(z33, 1, 3);
        let m = ClassMap::forced([&a3, &c2], [&b, &c2]).unwrap();
        assert_eq!(m.b_image, (Rational::from_frac(1, 3), Rational::zero()));
        assert!(!numerical_automorphism_exists(z33, &m));
    }

    #[test]
    fn census_survivors() {
        let census = elimination_census();
        let mut got: Vec<_> = census.survivors.iter().map(|c| (c.bdf.s, c.bdf.t, c.k1, c.k2)).collect();
        got.sort();
        assert_eq!(got, vec![(3, 1, 3, 1), (3, 3, 1, 3), (3, 3, 3, 1), (6, 1, 3, 1)]);
    }
}
