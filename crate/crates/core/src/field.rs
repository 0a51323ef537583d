//! Exact arithmetic in the imaginary quadratic fields Q(ρ) and Q(i).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two imaginary quadratic fields that carry every lattice in the census.
///
/// Each field is presented as Q(λ) with λ² = pλ + q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadraticField {
    /// λ = ρ, a primitive cube root of unity: ρ² = −ρ − 1.
    Eisenstein,
    /// λ = i: i² = −1.
    Gaussian,
}

impl QuadraticField {
    /// The pair (p, q) with λ² = pλ + q.
    pub const fn relation(self) -> (i64, i64) {
        match self {
            QuadraticField::Eisenstein => (-1, -1),
            QuadraticField::Gaussian => (0, -1),
        }
    }

    pub const fn discriminant(self) -> i64 {
        let (p, q) = self.relation();
        p * p + 4 * q
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            QuadraticField::Eisenstein => "ρ",
            QuadraticField::Gaussian => "i",
        }
    }

    /// All roots of unity of the field, as consecutive powers of a primitive
    /// one: ζ⁰..ζ⁵ with ζ = 1 + ρ, or i⁰..i³.
    pub fn roots_of_unity<Q: Scalar>(self) -> Vec<QuadElem<Q>> {
        let generator = match self {
            QuadraticField::Eisenstein => QuadElem::from_ints(self, 1, 1),
            QuadraticField::Gaussian => QuadElem::from_ints(self, 0, 1),
        };
        let order = match self {
            QuadraticField::Eisenstein => 6,
            QuadraticField::Gaussian => 4,
        };
        let mut out = Vec::with_capacity(order);
        let mut power = QuadElem::one(self);
        for _ in 0..order {
            out.push(power.clone());
            power = &power * &generator;
        }
        out
    }
}

/// The element `a + bλ` of a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadElem<Q> {
    a: Q,
    b: Q,
    field: QuadraticField,
}

impl<Q: Scalar> QuadElem<Q> {
    pub fn new(field: QuadraticField, a: Q, b: Q) -> Self {
        QuadElem { a, b, field }
    }

    pub fn from_ints(field: QuadraticField, a: i64, b: i64) -> Self {
        QuadElem::new(field, Q::from_int(a), Q::from_int(b))
    }

    /// `(a_num/a_den) + (b_num/b_den)λ`.
    pub fn from_fracs(field: QuadraticField, a: (i64, i64), b: (i64, i64)) -> Self {
        QuadElem::new(field, Q::from_frac(a.0, a.1), Q::from_frac(b.0, b.1))
    }

    pub fn zero(field: QuadraticField) -> Self {
        QuadElem::from_ints(field, 0, 0)
    }

    pub fn one(field: QuadraticField) -> Self {
        QuadElem::from_ints(field, 1, 0)
    }

    pub fn integer(field: QuadraticField, n: i64) -> Self {
        QuadElem::from_ints(field, n, 0)
    }

    /// The field generator λ.
    pub fn generator(field: QuadraticField) -> Self {
        QuadElem::from_ints(field, 0, 1)
    }

    /// ρ = e^{2πi/3}.
    pub fn rho() -> Self {
        QuadElem::generator(QuadraticField::Eisenstein)
    }

    /// ζ = e^{πi/3} = 1 + ρ.
    pub fn zeta() -> Self {
        QuadElem::from_ints(QuadraticField::Eisenstein, 1, 1)
    }

    pub fn i() -> Self {
        QuadElem::generator(QuadraticField::Gaussian)
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    /// Rational coefficient of 1.
    pub fn re_part(&self) -> &Q {
        &self.a
    }

    /// Rational coefficient of λ.
    pub fn lambda_part(&self) -> &Q {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True when both coefficients are integers, i.e. the element lies in Z[λ].
    pub fn is_integral(&self) -> bool {
        self.a.is_int() && self.b.is_int()
    }

    pub fn scale(&self, c: &Q) -> Self {
        QuadElem::new(self.field, self.a.clone() * c.clone(), self.b.clone() * c.clone())
    }

    /// Complex conjugate: λ̄ = p − λ.
    pub fn conj(&self) -> Self {
        let (p, _) = self.field.relation();
        QuadElem::new(
            self.field,
            self.a.clone() + self.b.clone() * Q::from_int(p),
            -self.b.clone(),
        )
    }

    /// N(a + bλ) = (a + bλ)(a + bλ̄) = a² + pab − qb².
    pub fn norm(&self) -> Q {
        let (p, q) = self.field.relation();
        self.a.clone() * self.a.clone() + Q::from_int(p) * self.a.clone() * self.b.clone()
            - Q::from_int(q) * self.b.clone() * self.b.clone()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conj();
        Ok(QuadElem::new(self.field, c.a / n.clone(), c.b / n))
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self + rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self * rhs)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self * &rhs.inv()?)
    }

    /// `self^n` for any integer `n`; negative powers need a nonzero base.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut out = QuadElem::one(self.field);
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    fn same_field(&self, rhs: &Self) -> Result<()> {
        if self.field == rhs.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Exact textual form of the two coefficients.
    pub fn to_strings(&self) -> [String; 2] {
        [self.a.to_string(), self.b.to_string()]
    }
}

fn assert_same(x: QuadraticField, y: QuadraticField) {
    assert_eq!(x, y, "mixed-field arithmetic is not supported");
}

impl<'a, Q: Scalar> Add<&'a QuadElem<Q>> for &'a QuadElem<Q> {
    type Output = QuadElem<Q>;
    fn add(self, rhs: &'a QuadElem<Q>) -> QuadElem<Q> {
        assert_same(self.field, rhs.field);
        QuadElem::new(self.field, self.a.clone() + rhs.a.clone(), self.b.clone() + rhs.b.clone())
    }
}

impl<'a, Q: Scalar> Sub<&'a QuadElem<Q>> for &'a QuadElem<Q> {
    type Output = QuadElem<Q>;
    fn sub(self, rhs: &'a QuadElem<Q>) -> QuadElem<Q> {
        assert_same(self.field, rhs.field);
        QuadElem::new(self.field, self.a.clone() - rhs.a.clone(), self.b.clone() - rhs.b.clone())
    }
}

impl<'a, Q: Scalar> Mul<&'a QuadElem<Q>> for &'a QuadElem<Q> {
    type Output = QuadElem<Q>;
    fn mul(self, rhs: &'a QuadElem<Q>) -> QuadElem<Q> {
        assert_same(self.field, rhs.field);
        let (p, q) = self.field.relation();
        let bd = self.b.clone() * rhs.b.clone();
        let a = self.a.clone() * rhs.a.clone() + bd.clone() * Q::from_int(q);
        let b = self.a.clone() * rhs.b.clone() + self.b.clone() * rhs.a.clone() + bd * Q::from_int(p);
        QuadElem::new(self.field, a, b)
    }
}

impl<Q: Scalar> Neg for &QuadElem<Q> {
    type Output = QuadElem<Q>;
    fn neg(self) -> QuadElem<Q> {
        QuadElem::new(self.field, -self.a.clone(), -self.b.clone())
    }
}

impl<Q: Scalar> Neg for QuadElem<Q> {
    type Output = QuadElem<Q>;
    fn neg(self) -> QuadElem<Q> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<Q: Scalar> $tr<QuadElem<Q>> for QuadElem<Q> {
            type Output = QuadElem<Q>;
            fn $method(self, rhs: QuadElem<Q>) -> QuadElem<Q> {
                (&self).$method(&rhs)
            }
        }
        impl<'a, Q: Scalar> $tr<&'a QuadElem<Q>> for QuadElem<Q> {
            type Output = QuadElem<Q>;
            fn $method(self, rhs: &'a QuadElem<Q>) -> QuadElem<Q> {
                (&self).$method(rhs)
            }
        }
        impl<'a, Q: Scalar> $tr<QuadElem<Q>> for &'a QuadElem<Q> {
            type Output = QuadElem<Q>;
            fn $method(self, rhs: QuadElem<Q>) -> QuadElem<Q> {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<Q: Scalar> fmt::Display for QuadElem<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.field.symbol();
        let coeff = |c: &Q| -> String {
            if c.is_one() {
                String::new()
            } else if c.is_int() {
                c.to_string()
            } else {
                format!("({c})")
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) if self.b.is_negative() => write!(f, "-{}{sym}", coeff(&self.b.abs())),
            (true, false) => write!(f, "{}{sym}", coeff(&self.b)),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "{} {sign} {}{sym}", self.a, coeff(&self.b.abs()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{FieldElement, Rational, Rational64};

    const E: QuadraticField = QuadraticField::Eisenstein;
    const G: QuadraticField = QuadraticField::Gaussian;

    #[test]
    fn zeta_squared_is_rho() {
        let z = FieldElement::zeta();
        assert_eq!(&z * &z, FieldElement::from_ints(E, 0, 1));
    }

    #[test]
    fn zeta_minus_one_is_rho() {
        let z = FieldElement::zeta();
        assert_eq!(&z - &FieldElement::one(E), FieldElement::rho());
    }

    #[test]
    fn norm_of_zero_is_zero_and_division_by_zero_fails() {
        assert!(FieldElement::zero(G).norm() == Rational::from_int(0));
        assert_eq!(FieldElement::one(G).checked_div(&FieldElement::zero(G)), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        assert_eq!(FieldElement::rho().checked_add(&FieldElement::i()), Err(Error::FieldMismatch));
    }

    #[test]
    fn roots_of_unity_have_norm_one_and_close_up() {
        for field in [E, G] {
            let roots = field.roots_of_unity::<Rational64>();
            let n = roots.len() as i64;
            for r in &roots {
                assert_eq!(r.norm(), Rational64::from_int(1));
                assert_eq!(r.pow(n).unwrap(), QuadElem::one(field));
            }
        }
    }

    #[test]
    fn conjugate_of_rho_is_rho_squared() {
        let r = FieldElement::rho();
        assert_eq!(r.conj(), &r * &r);
        assert_eq!(FieldElement::i().conj(), -FieldElement::i());
    }

    #[test]
    fn display_is_exact() {
        let x = FieldElement::from_fracs(E, (1, 3), (-1, 3));
        assert_eq!(x.to_string(), "1/3 - (1/3)ρ");
        assert_eq!(FieldElement::zeta().to_string(), "1 + ρ");
        assert_eq!((-FieldElement::i()).to_string(), "-i");
    }
}
