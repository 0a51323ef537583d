//! Exact verification engine for the census of smooth toroidal
//! compactifications of Euler number one.
//!
//! The algebra is generic over an exact rational [`Scalar`]. Searches whose
//! denominators stay bounded use machine-word rationals with overflow
//! checks; everything else uses the arbitrary-precision aliases below.

pub mod bielliptic;
pub mod census;
pub mod curves;
pub mod error;
pub mod field;
pub mod fpgroup;
pub mod geography;
pub mod lattice;
pub mod picard;
pub mod quotient;
pub mod registry;
pub mod scalar;
pub mod smith;

pub use error::{Error, Result};
pub use field::{QuadElem, QuadraticField};
pub use lattice::{ExactValue, Lattice, LatticePoint};
pub use scalar::Scalar;

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
/// Machine-word rationals, for callers that know their denominators are small.
pub type Rational64 = num_rational::Rational64;

pub type FieldElement = QuadElem<Rational>;
pub type FieldElement64 = QuadElem<Rational64>;
pub type ExactLattice = Lattice<Rational>;
pub type ExactPoint = LatticePoint<Rational>;
