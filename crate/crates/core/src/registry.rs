//! The five smooth toroidal compactifications of Euler number one, each
//! rebuilt from its cover and validated.

use serde::{Deserialize, Serialize};

use crate::bielliptic::{numerical_automorphism_exists, BdfType, ClassMap, NumClass};
use crate::curves::{is_good, intersection_matrix, AbelianProduct, Curve};
use crate::error::{Error, Result};
use crate::field::QuadraticField;
use crate::geography::{multiplicity_for, MinimalType, SurfacePair};
use crate::lattice::Lattice;
use crate::quotient::{
    orbit_analysis, second_component_choices, CompletionKind, GroupElement, QuotientAction, SearchElement,
    SearchScalar, SolveCase, Solution, SolutionKey, UpstairsConfig,
};
use crate::smith::AbelianInvariants;

/// One boundary curve: its image `C` on the minimal model and its strict
/// transform after blowing up the special point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub name: String,
    pub description: String,
    /// Numerical class on a bielliptic minimal model.
    pub class: Option<String>,
    pub self_intersection: i64,
    /// Multiplicity of `C` at the blown-up point.
    pub multiplicity: i64,
    pub strict_transform: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub id: u8,
    pub surface: String,
    pub minimal: MinimalType,
    pub lattices: [String; 2],
    pub action: Vec<String>,
    pub upstairs_curves: Vec<String>,
    pub blown_up_point: String,
    pub boundary: Vec<BoundaryCurve>,
    pub cusp_profile: Vec<i64>,
    pub h1: AbelianInvariants,
    pub log_chern: (i64, i64),
    pub saturated: bool,
}

/// How two records were told apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distinction {
    pub first: u8,
    pub second: u8,
    pub reason: String,
}

fn e() -> QuadraticField {
    QuadraticField::Eisenstein
}

fn fe(a: (i64, i64), b: (i64, i64)) -> SearchElement {
    SearchElement::from_fracs(e(), a, b)
}

fn profile_of(boundary: &[BoundaryCurve]) -> Vec<i64> {
    let mut p: Vec<i64> = boundary.iter().map(|b| b.strict_transform).collect();
    p.sort_unstable();
    p
}

fn finish(
    id: u8,
    surface: String,
    minimal: MinimalType,
    action: &QuotientAction<SearchScalar>,
    upstairs: &[Curve<SearchScalar>],
    point: String,
    boundary: Vec<BoundaryCurve>,
) -> Result<ExampleRecord> {
    let cusp_profile = profile_of(&boundary);
    let pair = SurfacePair::new(minimal.clone(), 1, cusp_profile.clone())?;
    let log_chern = pair.log_chern_numbers()?;
    Ok(ExampleRecord {
        id,
        surface,
        minimal,
        lattices: [action.surface.lw.to_string(), action.surface.lz.to_string()],
        action: action.generators.iter().map(|g| g.to_string()).collect(),
        upstairs_curves: upstairs.iter().map(|c| c.to_string()).collect(),
        blown_up_point: point,
        boundary,
        cusp_profile,
        h1: action.first_homology()?,
        log_chern,
        saturated: pair.is_saturated()?,
    })
}

/// `E_ρ × E_ρ` with the four curves `w = 0`, `z = 0`, `w = z`, `w = ζz`
/// through the origin, blown up there.
fn abelian_example() -> Result<ExampleRecord> {
    let l = Lattice::integers(e());
    let surface = AbelianProduct::square(&l);
    let zero = SearchElement::zero(e());
    let curves = vec![
        Curve::WFiber(zero.clone()),
        Curve::ZFiber(zero.clone()),
        Curve::over_z(SearchElement::one(e()), zero.clone()),
        Curve::over_z(SearchElement::zeta(), zero.clone()),
    ];
    if !is_good(&surface, &curves)? {
        return Err(Error::InvalidConfig("the four curves are not a good configuration".into()));
    }
    let matrix = intersection_matrix(&surface, &curves)?;
    if matrix.values().any(|v| *v != 1) {
        return Err(Error::InvalidConfig("curves do not meet pairwise once".into()));
    }
    let action = QuotientAction::trivial(surface.clone());
    let boundary = curves
        .iter()
        .enumerate()
        .map(|(i, c)| BoundaryCurve {
            name: format!("C{}", i + 1),
            description: c.to_string(),
            class: None,
            self_intersection: 0,
            multiplicity: 1,
            strict_transform: -1,
        })
        .collect();
    finish(1, "E_ρ × E_ρ".into(), MinimalType::Abelian, &action, &curves, surface.origin().to_string(), boundary)
}

/// The Z/3 action `φ(w, z) = (ρw, z + (1 − ρ)/3)` on `E_ρ × E_ρ` and its
/// invariant curves `w = z`, `w = ρz − (1 − ρ)/3`, `w = ρ²z − 2(1 − ρ)/3`.
pub fn z3_configuration() -> Result<UpstairsConfig<SearchScalar>> {
    let surface = SolveCase::Z3AB.surface();
    let t = fe((1, 3), (-1, 3));
    let phi = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), t.clone());
    let action = QuotientAction::new(surface, vec![phi], (3, 1))?;
    let rho = SearchElement::rho();
    let curves = vec![
        Curve::over_z(SearchElement::one(e()), SearchElement::zero(e())),
        Curve::over_z(rho.clone(), -t.clone()),
        Curve::over_z(&rho * &rho, -t.scale(&SearchScalar::from_integer(2))),
    ];
    UpstairsConfig::new(action, curves)
}

/// The `(Z/3)²` action on `E_ρ × E_{1−ρ}` by `φ₁(w, z) = (ρw, z + 1)` and
/// `φ₂(w, z) = (w + (1 − ρ)/3, z + (1 − ρ)/3)` with the curves `w = ρ^j z`.
pub fn z3z3_configuration() -> Result<UpstairsConfig<SearchScalar>> {
    let surface = SolveCase::Z3Z3A3B.surface();
    let t = fe((1, 3), (-1, 3));
    let phi1 = GroupElement::new(SearchElement::rho(), SearchElement::zero(e()), SearchElement::one(e()));
    let phi2 = GroupElement::new(SearchElement::one(e()), t.clone(), t);
    let action = QuotientAction::new(surface, vec![phi1, phi2], (3, 3))?;
    let rho = SearchElement::rho();
    let zero = SearchElement::zero(e());
    let curves = vec![
        Curve::over_z(SearchElement::one(e()), zero.clone()),
        Curve::over_z(rho.clone(), zero.clone()),
        Curve::over_z(&rho * &rho, zero),
    ];
    UpstairsConfig::new(action, curves)
}

/// The two records on the bielliptic quotient of `cfg`, one per choice of
/// the smooth component.
fn bielliptic_examples(first_id: u8, case: SolveCase, cfg: UpstairsConfig<SearchScalar>) -> Result<Vec<ExampleRecord>> {
    let orbit = orbit_analysis(&cfg)?;
    if !(orbit.transitive && orbit.pairwise_equal) {
        return Err(Error::InvalidConfig("the singular curve has more than one singular point".into()));
    }
    let r = orbit.branches[0] as i64;
    let c2 = case.class();
    let c2_sq = c2.self_intersection();
    if orbit.branches.iter().any(|b| *b as i64 != r) || multiplicity_for(c2_sq / 2) != Some(r) {
        return Err(Error::InvalidConfig("singular multiplicity does not match C²".into()));
    }
    let mut sorted = cfg.curves.clone();
    sorted.sort();
    let sol = Solution {
        key: SolutionKey { elements: cfg.action.elements().to_vec(), curves: sorted },
        action: cfg.action.clone(),
        orbit,
    };
    let bdf = case.bdf();
    let point = sol.orbit.points[0].to_string();
    let surface_name = format!("(E_ρ × E_ρ)/({})", bdf.group_name());
    let surface_name = if case == SolveCase::Z3Z3A3B { format!("(E_ρ × E_{{1−ρ}})/({})", bdf.group_name()) } else { surface_name };
    let mut out = Vec::new();
    for (k, completion) in second_component_choices(case, &sol)?.into_iter().enumerate() {
        let c1 = completion.class;
        // the two components meet only at p, where C₁ is smooth
        if c1.dot(&c2) != r {
            return Err(Error::InvalidConfig("the smooth component does not meet C₂ only at p".into()));
        }
        let description = match completion.kind {
            CompletionKind::AlbaneseFiber => "fiber of the Albanese map through p".to_string(),
            CompletionKind::RationalFiber if completion.multiple_fiber => {
                "support of the multiple fiber of the map to P¹ through p".to_string()
            }
            CompletionKind::RationalFiber => "fiber of the map to P¹ through p".to_string(),
        };
        let boundary = vec![
            BoundaryCurve {
                name: "C1".into(),
                description,
                class: Some(c1.to_string()),
                self_intersection: c1.self_intersection(),
                multiplicity: 1,
                strict_transform: c1.self_intersection() - 1,
            },
            BoundaryCurve {
                name: "C2".into(),
                description: "image of E₁ ∪ E₂ ∪ E₃".into(),
                class: Some(c2.to_string()),
                self_intersection: c2_sq,
                multiplicity: r,
                strict_transform: c2_sq - r * r,
            },
        ];
        out.push(finish(
            first_id + k as u8,
            surface_name.clone(),
            MinimalType::Bielliptic { s: bdf.s as u32, t: bdf.t as u32 },
            &cfg.action,
            &cfg.curves,
            point.clone(),
            boundary,
        )?);
    }
    Ok(out)
}

/// The five validated records.
pub fn example_registry() -> Result<Vec<ExampleRecord>> {
    let mut out = vec![abelian_example()?];
    out.extend(bielliptic_examples(2, SolveCase::Z3AB, z3_configuration()?)?);
    out.extend(bielliptic_examples(4, SolveCase::Z3Z3A3B, z3z3_configuration()?)?);
    for r in &out {
        if r.log_chern != (3, 1) || !r.saturated {
            return Err(Error::InvalidConfig(format!("example {} is not saturated", r.id)));
        }
    }
    Ok(out)
}

fn class_of(r: &ExampleRecord, name: &str) -> Option<NumClass> {
    let bdf = match r.minimal {
        MinimalType::Bielliptic { s, t } => BdfType::by_group(s as i64, t as i64)?,
        _ => return None,
    };
    let b = r.boundary.iter().find(|b| b.name == name)?;
    let (k1, k2) = match b.class.as_deref()? {
        "B" => (0, bdf.t),
        "A" => (bdf.s, 0),
        "(1/3)A" => (1, 0),
        "A + B" => (bdf.s, bdf.t),
        "(1/3)A + B" => (1, bdf.t),
        _ => return None,
    };
    Some(NumClass::new(bdf, k1, k2))
}

/// Tell every pair of records apart: by first homology, or, on the same
/// bielliptic surface, by showing that no automorphism of `Num` takes one
/// boundary to the other.
pub fn distinctness(records: &[ExampleRecord]) -> Result<Vec<Distinction>> {
    let mut out = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            let (a, b) = (&records[i], &records[j]);
            let reason = if a.h1 != b.h1 {
                format!("H₁ = {} vs {}", a.h1, b.h1)
            } else if a.minimal == b.minimal {
                let (a1, a2, b1, b2) = match (class_of(a, "C1"), class_of(a, "C2"), class_of(b, "C1"), class_of(b, "C2")) {
                    (Some(w), Some(x), Some(y), Some(z)) => (w, x, y, z),
                    _ => return Err(Error::InvalidConfig("boundary classes are not recorded".into())),
                };
                let map = ClassMap::forced([&a1, &a2], [&b1, &b2])?;
                if numerical_automorphism_exists(a1.bdf, &map) {
                    return Err(Error::InvalidConfig(format!("examples {} and {} are not told apart", a.id, b.id)));
                }
                format!("no automorphism of Num sends {a1}, {a2} to {b1}, {b2}")
            } else {
                return Err(Error::InvalidConfig(format!("examples {} and {} are not told apart", a.id, b.id)));
            };
            out.push(Distinction { first: a.id, second: b.id, reason });
        }
    }
    Ok(out)
}
