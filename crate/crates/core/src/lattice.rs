//! Rank-2 lattices inside an imaginary quadratic field and points of the
//! complex tori they define.
//!
//! A lattice is stored through its Hermite basis `(ω₁, ω₂)`: `ω₁` is the
//! positive rational generating `Λ ∩ Q`, and `ω₂ = x + yλ` has the smallest
//! positive λ-coefficient with `0 ≤ x < ω₁`. Two lattices are equal as sets
//! exactly when their stored bases agree.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{QuadElem, QuadraticField};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice<Q> {
    w1: QuadElem<Q>,
    w2: QuadElem<Q>,
}

/// Extended Euclid over the rationals: returns `(g, s, t)` with
/// `g = s·x + t·y ≥ 0` generating `xZ + yZ`.
fn rational_xgcd<Q: Scalar>(x: &Q, y: &Q) -> (Q, Q, Q) {
    let (mut r0, mut r1) = (x.clone(), y.clone());
    let (mut s0, mut s1) = (Q::one(), Q::zero());
    let (mut t0, mut t1) = (Q::zero(), Q::one());
    while !r1.is_zero() {
        let q = (r0.clone() / r1.clone()).floor_val();
        let r2 = r0 - q.clone() * r1.clone();
        let s2 = s0 - q.clone() * s1.clone();
        let t2 = t0 - q * t1.clone();
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl<Q: Scalar> Lattice<Q> {
    /// The lattice `Zω₁ + Zω₂`. Fails unless the two generators are
    /// R-linearly independent and live in the same field.
    pub fn new(w1: QuadElem<Q>, w2: QuadElem<Q>) -> Result<Self> {
        if w1.field() != w2.field() {
            return Err(Error::FieldMismatch);
        }
        let field = w1.field();
        let (x1, y1) = (w1.re_part().clone(), w1.lambda_part().clone());
        let (x2, y2) = (w2.re_part().clone(), w2.lambda_part().clone());
        let det = x1.clone() * y2.clone() - x2.clone() * y1.clone();
        if det.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let (g, s, t) = rational_xgcd(&y1, &y2);
        let vx = s * x1.clone() + t * x2.clone();
        let real = ((y2.clone() * x1 - y1.clone() * x2) / g.clone()).abs();
        let vx = vx.clone() - (vx / real.clone()).floor_val() * real.clone();
        Ok(Lattice {
            w1: QuadElem::new(field, real, Q::zero()),
            w2: QuadElem::new(field, vx, g),
        })
    }

    /// The ring of integers Z[1, λ] of `field`.
    pub fn integers(field: QuadraticField) -> Self {
        Lattice::new(QuadElem::one(field), QuadElem::generator(field)).expect("Z[1, λ] has full rank")
    }

    pub fn field(&self) -> QuadraticField {
        self.w1.field()
    }

    pub fn basis(&self) -> (&QuadElem<Q>, &QuadElem<Q>) {
        (&self.w1, &self.w2)
    }

    /// Covolume in (1, λ)-coordinates; positive by construction.
    fn covolume(&self) -> Q {
        self.w1.re_part().clone() * self.w2.lambda_part().clone()
    }

    /// Coordinates `(m, n)` with `x = m·ω₁ + n·ω₂`.
    pub fn coordinates(&self, x: &QuadElem<Q>) -> Result<(Q, Q)> {
        if x.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        let n = x.lambda_part().clone() / self.w2.lambda_part().clone();
        let m = (x.re_part().clone() - n.clone() * self.w2.re_part().clone()) / self.w1.re_part().clone();
        Ok((m, n))
    }

    fn combine(&self, m: &Q, n: &Q) -> QuadElem<Q> {
        &self.w1.scale(m) + &self.w2.scale(n)
    }

    pub fn contains(&self, x: &QuadElem<Q>) -> bool {
        match self.coordinates(x) {
            Ok((m, n)) => m.is_int() && n.is_int(),
            Err(_) => false,
        }
    }

    /// True when `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &Lattice<Q>) -> bool {
        other.contains(&self.w1) && other.contains(&self.w2)
    }

    /// The representative of `x + Λ` whose coordinates lie in `[0, 1)²`.
    pub fn reduce(&self, x: &QuadElem<Q>) -> Result<QuadElem<Q>> {
        let (m, n) = self.coordinates(x)?;
        Ok(self.combine(&m.fract_val(), &n.fract_val()))
    }

    pub fn point(&self, x: &QuadElem<Q>) -> Result<LatticePoint<Q>> {
        Ok(LatticePoint { value: self.reduce(x)?, lattice: self.clone() })
    }

    /// `[self : sub]`, failing when `sub ⊄ self`.
    pub fn index_of(&self, sub: &Lattice<Q>) -> Result<u64> {
        if sub.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        if !sub.is_sublattice_of(self) {
            return Err(Error::NotContained);
        }
        let ratio = sub.covolume() / self.covolume();
        ratio
            .to_int()
            .and_then(|v| u64::try_from(v).ok())
            .ok_or(Error::NotContained)
    }

    /// `αΛ` for nonzero α.
    pub fn scaled(&self, alpha: &QuadElem<Q>) -> Result<Lattice<Q>> {
        if alpha.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        if alpha.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        Lattice::new(alpha * &self.w1, alpha * &self.w2)
    }

    /// Does multiplication by α map Λ into `target`?
    pub fn maps_into(&self, alpha: &QuadElem<Q>, target: &Lattice<Q>) -> bool {
        alpha.field() == self.field()
            && target.contains(&(alpha * &self.w1))
            && target.contains(&(alpha * &self.w2))
    }

    /// Roots of unity u of the field with uΛ = Λ, in the order of
    /// [`QuadraticField::roots_of_unity`].
    pub fn unit_multipliers(&self) -> Vec<QuadElem<Q>> {
        self.field()
            .roots_of_unity()
            .into_iter()
            .filter(|u| self.maps_into(u, self))
            .collect()
    }

    /// The `n²` points of `(1/n)Λ / Λ`, ordered by their coordinates.
    pub fn torsion_points(&self, n: u32) -> Vec<LatticePoint<Q>> {
        let n = n.max(1);
        let mut out = Vec::with_capacity((n * n) as usize);
        for i in 0..n {
            for j in 0..n {
                let m = Q::from_frac(i as i64, n as i64);
                let k = Q::from_frac(j as i64, n as i64);
                out.push(LatticePoint { value: self.combine(&m, &k), lattice: self.clone() });
            }
        }
        out
    }

    /// One representative in `self` of every coset of `sub ⊆ self`, each
    /// reduced modulo `sub`.
    pub fn coset_representatives(&self, sub: &Lattice<Q>) -> Result<Vec<QuadElem<Q>>> {
        let d = self.index_of(sub)? as i64;
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(d as usize);
        for i in 0..d {
            for j in 0..d {
                let x = self.combine(&Q::from_int(i), &Q::from_int(j));
                let r = sub.reduce(&x)?;
                if seen.insert(r.clone()) {
                    out.push(r);
                }
            }
        }
        Ok(out)
    }
}

impl<Q: Scalar> fmt::Display for Lattice<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[{}, {}]", self.w1, self.w2)
    }
}

/// A point of C/Λ stored by its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint<Q> {
    value: QuadElem<Q>,
    lattice: Lattice<Q>,
}

impl<Q: Scalar> LatticePoint<Q> {
    pub fn origin(lattice: &Lattice<Q>) -> Self {
        LatticePoint { value: QuadElem::zero(lattice.field()), lattice: lattice.clone() }
    }

    pub fn value(&self) -> &QuadElem<Q> {
        &self.value
    }

    pub fn lattice(&self) -> &Lattice<Q> {
        &self.lattice
    }

    pub fn is_origin(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &LatticePoint<Q>) -> Result<LatticePoint<Q>> {
        if self.lattice != other.lattice {
            return Err(Error::NotContained);
        }
        self.lattice.point(&(&self.value + &other.value))
    }

    pub fn neg(&self) -> LatticePoint<Q> {
        self.lattice.point(&-&self.value).expect("same field")
    }

    /// Least n ≥ 1 with n·x ∈ Λ, if it is at most `bound`.
    pub fn order(&self, bound: u32) -> Option<u32> {
        (1..=bound).find(|n| self.lattice.contains(&self.value.scale(&Q::from_int(*n as i64))))
    }
}

impl<Q: Scalar> fmt::Display for LatticePoint<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Exact textual form used in reports: the two rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExactValue {
    pub field: QuadraticField,
    pub re: String,
    pub lambda: String,
    pub display: String,
}

impl ExactValue {
    pub fn of<Q: Scalar>(x: &QuadElem<Q>) -> Self {
        let [re, lambda] = x.to_strings();
        ExactValue { field: x.field(), re, lambda, display: x.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactLattice, FieldElement};

    const E: QuadraticField = QuadraticField::Eisenstein;
    const G: QuadraticField = QuadraticField::Gaussian;

    fn el(f: QuadraticField, a: i64, b: i64) -> FieldElement {
        FieldElement::from_ints(f, a, b)
    }

    fn z3_1mr() -> ExactLattice {
        ExactLattice::new(el(E, 3, 0), el(E, 1, -1)).unwrap()
    }

    #[test]
    fn hermite_basis_is_canonical() {
        let a = ExactLattice::new(el(E, 1, -1), el(E, 3, 0)).unwrap();
        assert_eq!(a, z3_1mr());
        assert_eq!(a.basis().0, &el(E, 3, 0));
        assert_eq!(a.basis().1, &el(E, 2, 1));
        let b = ExactLattice::new(el(E, 1, 1), el(E, 0, 1)).unwrap();
        assert_eq!(b, ExactLattice::integers(E));
    }

    #[test]
    fn degenerate_basis_is_rejected() {
        assert_eq!(ExactLattice::new(el(G, 1, 0), el(G, 2, 0)), Err(Error::DegenerateLattice));
        assert_eq!(ExactLattice::new(el(G, 1, 0), el(E, 0, 1)), Err(Error::FieldMismatch));
    }

    #[test]
    fn containment_fixtures() {
        let l = z3_1mr();
        assert!(l.contains(&FieldElement::zero(E)));
        assert!(l.contains(&el(E, 1, -1)));
        assert!(!l.contains(&el(E, 1, 0)));
    }

    #[test]
    fn index_fixtures() {
        let zr = ExactLattice::integers(E);
        assert_eq!(zr.index_of(&zr).unwrap(), 1);
        assert_eq!(zr.index_of(&z3_1mr()).unwrap(), 3);
        assert_eq!(z3_1mr(), zr.scaled(&el(E, 1, -1)).unwrap());
        let zi = ExactLattice::integers(G);
        assert_eq!(zi.index_of(&zi.scaled(&el(G, 2, 0)).unwrap()).unwrap(), 4);
        assert_eq!(z3_1mr().index_of(&zr), Err(Error::NotContained));
    }

    #[test]
    fn torsion_fixtures() {
        let zi = ExactLattice::integers(G);
        assert_eq!(zi.torsion_points(1), vec![LatticePoint::origin(&zi)]);
        let two: Vec<_> = zi.torsion_points(2).iter().map(|p| p.value().clone()).collect();
        let half = |a, b| FieldElement::from_fracs(G, (a, 2), (b, 2));
        assert_eq!(two, vec![half(0, 0), half(0, 1), half(1, 0), half(1, 1)]);
        assert_eq!(ExactLattice::integers(E).torsion_points(3).len(), 9);
    }

    #[test]
    fn canonical_rep_fixtures() {
        let zr = ExactLattice::integers(E);
        let two_thirds = FieldElement::from_fracs(E, (2, 3), (0, 1));
        let x = &two_thirds + &el(E, 1, -1);
        assert_eq!(zr.point(&x).unwrap(), zr.point(&two_thirds).unwrap());
        assert!(zr.point(&el(E, 5, -7)).unwrap().is_origin());
        let rho = FieldElement::rho();
        let y = (&FieldElement::one(E) - &(&rho * &rho)).scale(&crate::Rational::from_frac(1, 3));
        assert!(zr.contains(&y.scale(&crate::Rational::from_int(3))));
        assert!(!zr.contains(&y));
        assert_eq!(zr.point(&y).unwrap().order(10), Some(3));
    }

    #[test]
    fn unit_multipliers_of_standard_lattices() {
        assert_eq!(ExactLattice::integers(E).unit_multipliers().len(), 6);
        assert_eq!(ExactLattice::integers(G).unit_multipliers().len(), 4);
        assert_eq!(z3_1mr().unit_multipliers().len(), 6);
        let rho_third = ExactLattice::new(el(E, 1, 0), FieldElement::from_fracs(E, (0, 1), (1, 3))).unwrap();
        assert_eq!(rho_third.unit_multipliers().len(), 2);
        let two_i = ExactLattice::new(el(G, 1, 0), el(G, 0, 2)).unwrap();
        assert_eq!(two_i.unit_multipliers(), vec![el(G, 1, 0), el(G, -1, 0)]);
    }

    #[test]
    fn coset_representatives_count_matches_index() {
        let zr = ExactLattice::integers(E);
        let sub = zr.scaled(&el(E, 2, 1)).unwrap();
        let reps = zr.coset_representatives(&sub).unwrap();
        assert_eq!(reps.len() as u64, zr.index_of(&sub).unwrap());
        assert_eq!(reps.len(), 3);
    }
}
