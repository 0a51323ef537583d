//! Exact 3×3 matrices over Q(ρ): the generators `P`, `Q`, `R` of the Picard
//! modular group, the Hermitian form they preserve, and the rotation-free
//! parabolic checks on the cusp subgroups.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::QuadraticField;
use crate::fpgroup::{ParabolicSubgroup, Presentation, Word};
use crate::{FieldElement, Rational};

fn e() -> QuadraticField {
    QuadraticField::Eisenstein
}

fn zero() -> FieldElement {
    FieldElement::zero(e())
}

fn one() -> FieldElement {
    FieldElement::one(e())
}

/// A 3×3 matrix over Q(ρ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix3 {
    m: [[FieldElement; 3]; 3],
}

impl Matrix3 {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        Matrix3 { m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    /// Entries `a + bρ` given as `(a, b)`.
    pub fn from_ints(rows: [[(i64, i64); 3]; 3]) -> Self {
        Matrix3::from_fn(|i, j| FieldElement::from_ints(e(), rows[i][j].0, rows[i][j].1))
    }

    pub fn identity() -> Self {
        Matrix3::scalar(&one())
    }

    pub fn scalar(s: &FieldElement) -> Self {
        Matrix3::from_fn(|i, j| if i == j { s.clone() } else { zero() })
    }

    pub fn diagonal(d: [FieldElement; 3]) -> Self {
        Matrix3::from_fn(|i, j| if i == j { d[i].clone() } else { zero() })
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.m[i][j]
    }

    pub fn mul(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| {
            (0..3).fold(zero(), |acc, k| &acc + &(&self.m[i][k] * &o.m[k][j]))
        })
    }

    pub fn add(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| &self.m[i][j] + &o.m[i][j])
    }

    pub fn sub(&self, o: &Matrix3) -> Matrix3 {
        Matrix3::from_fn(|i, j| &self.m[i][j] - &o.m[i][j])
    }

    pub fn scale(&self, s: &FieldElement) -> Matrix3 {
        Matrix3::from_fn(|i, j| s * &self.m[i][j])
    }

    pub fn conj_transpose(&self) -> Matrix3 {
        Matrix3::from_fn(|i, j| self.m[j][i].conj())
    }

    pub fn trace(&self) -> FieldElement {
        &(&self.m[0][0] + &self.m[1][1]) + &self.m[2][2]
    }

    fn minor2(&self, r: [usize; 2], c: [usize; 2]) -> FieldElement {
        &(&self.m[r[0]][c[0]] * &self.m[r[1]][c[1]]) - &(&self.m[r[0]][c[1]] * &self.m[r[1]][c[0]])
    }

    pub fn det(&self) -> FieldElement {
        let a = &self.m[0][0] * &self.minor2([1, 2], [1, 2]);
        let b = &self.m[0][1] * &self.minor2([1, 2], [0, 2]);
        let c = &self.m[0][2] * &self.minor2([1, 2], [0, 1]);
        &(&a - &b) + &c
    }

    pub fn adjugate(&self) -> Matrix3 {
        let others = |k: usize| -> [usize; 2] {
            match k {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            }
        };
        Matrix3::from_fn(|i, j| {
            let cof = self.minor2(others(j), others(i));
            if (i + j) % 2 == 0 {
                cof
            } else {
                -cof
            }
        })
    }

    /// Inverse over the field, as adjugate over determinant.
    pub fn inverse(&self) -> Result<Matrix3> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(self.adjugate().scale(&d.inv()?))
    }

    /// Whether the matrix lies in GL₃ of the ring of integers: integral
    /// entries and a unit determinant.
    pub fn is_ring_invertible(&self) -> bool {
        let integral = self.m.iter().flatten().all(|x| x.is_integral());
        let d = self.det();
        integral && d.is_integral() && d.norm().is_one()
    }

    pub fn pow(&self, n: i64) -> Result<Matrix3> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Matrix3::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix3::identity()
    }

    /// The scalar `s` with `self = s·I`, if any.
    pub fn scalar_value(&self) -> Option<FieldElement> {
        let s = self.m[0][0].clone();
        (*self == Matrix3::scalar(&s)).then_some(s)
    }

    /// `(tr, σ₂, det)`: the characteristic polynomial is
    /// `x³ − tr·x² + σ₂·x − det`.
    pub fn char_poly(&self) -> [FieldElement; 3] {
        let s2 = &(&self.minor2([0, 1], [0, 1]) + &self.minor2([0, 2], [0, 2])) + &self.minor2([1, 2], [1, 2]);
        [self.trace(), s2, self.det()]
    }

    pub fn rows_strings(&self) -> Vec<Vec<String>> {
        self.m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

impl fmt::Display for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows_strings().iter().map(|r| format!("({})", r.join(", "))).collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    P,
    Q,
    R,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::P, Generator::Q, Generator::R];
}

/// `R` is the anti-diagonal `(1, −1, 1)`; `P` and `Q` are upper triangular.
pub fn generator_matrix(g: Generator) -> Matrix3 {
    match g {
        Generator::P => Matrix3::from_ints([[(1, 0), (1, 0), (0, 1)], [(0, 0), (0, 1), (0, -1)], [(0, 0), (0, 0), (1, 0)]]),
        Generator::Q => Matrix3::from_ints([[(1, 0), (1, 0), (0, 1)], [(0, 0), (-1, 0), (1, 0)], [(0, 0), (0, 0), (1, 0)]]),
        Generator::R => Matrix3::from_ints([[(0, 0), (0, 0), (1, 0)], [(0, 0), (-1, 0), (0, 0)], [(1, 0), (0, 0), (0, 0)]]),
    }
}

/// Names of the word alphabet: generator `0` is `P`, `1` is `Q`, `2` is `R`.
pub const ALPHABET: [&str; 3] = ["P", "Q", "R"];

/// Exact product of the generator matrices along `w`.
pub fn evaluate_word(w: &Word) -> Result<Matrix3> {
    let mats: Vec<Matrix3> = Generator::ALL.iter().map(|g| generator_matrix(*g)).collect();
    let invs = mats.iter().map(|m| m.inverse()).collect::<Result<Vec<_>>>()?;
    let mut out = Matrix3::identity();
    for l in w.letters() {
        let g = l.unsigned_abs() as usize - 1;
        if g >= mats.len() {
            return Err(Error::InvalidConfig(format!("letter {l} is outside the alphabet P, Q, R")));
        }
        out = out.mul(if *l > 0 { &mats[g] } else { &invs[g] });
    }
    Ok(out)
}

/// A Hermitian matrix `J` (so `J* = J`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    pub j: Matrix3,
}

fn real_part(x: &FieldElement) -> Result<Rational> {
    if x.lambda_part().is_zero() {
        Ok(x.re_part().clone())
    } else {
        Err(Error::InvalidConfig(format!("{x} is not real")))
    }
}

fn sign_changes(seq: &[Rational]) -> usize {
    let signs: Vec<bool> = seq.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

impl HermitianForm {
    pub fn new(j: Matrix3) -> Result<Self> {
        if j.conj_transpose() != j {
            return Err(Error::InvalidConfig("matrix is not Hermitian".into()));
        }
        Ok(HermitianForm { j })
    }

    /// `M* J M = J`.
    pub fn preserved_by(&self, m: &Matrix3) -> bool {
        m.conj_transpose().mul(&self.j).mul(m) == self.j
    }

    /// `T* J T`, the same form in the basis given by the columns of `T`.
    pub fn congruent(&self, t: &Matrix3) -> HermitianForm {
        HermitianForm { j: t.conj_transpose().mul(&self.j).mul(t) }
    }

    /// Leading principal minors `D₁, D₂, D₃`, which are real.
    pub fn leading_minors(&self) -> Result<[Rational; 3]> {
        let d1 = real_part(self.j.entry(0, 0))?;
        let d2 = real_part(&self.j.minor2([0, 1], [0, 1]))?;
        let d3 = real_part(&self.j.det())?;
        Ok([d1, d2, d3])
    }

    /// `(positive, negative)` eigenvalue counts from Descartes' rule applied
    /// to the characteristic polynomial, which is exact because every root
    /// is real. Requires a nondegenerate form.
    pub fn signature_by_char_poly(&self) -> Result<(usize, usize)> {
        let [t, s2, d] = self.j.char_poly();
        let (t, s2, d) = (real_part(&t)?, real_part(&s2)?, real_part(&d)?);
        if d.is_zero() {
            return Err(Error::InvalidConfig("degenerate form".into()));
        }
        let pos = sign_changes(&[Rational::one(), -t.clone(), s2.clone(), -d.clone()]);
        let neg = sign_changes(&[-Rational::one(), -t, -s2, -d]);
        Ok((pos, neg))
    }
}

/// Signature read off leading principal minors after a congruence that makes
/// all of them nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureCertificate {
    /// Rows of the basis change `T`.
    pub congruence: Vec<Vec<String>>,
    /// `D₁, D₂, D₃` of `T* J T`.
    pub minors: Vec<String>,
    pub signature: (usize, usize),
    /// Signature from the characteristic polynomial of `J` itself.
    pub char_poly_signature: (usize, usize),
}

/// Result of solving `M* J M = J` for `M ∈ {R, P, Q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantForm {
    pub form: HermitianForm,
    pub solution_dimension: usize,
    pub certificate: SignatureCertificate,
}

/// Row-reduces `rows` (each of length `cols`) and returns a basis of the
/// null space.
fn null_space(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..cols {
                    let v = rows[r][k].clone() * f.clone();
                    rows[i][k] = rows[i][k].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}

/// Hermitian matrix with real diagonal `v[0..3]` and upper entries
/// `v[3] + v[4]ρ`, `v[5] + v[6]ρ`, `v[7] + v[8]ρ` at (0,1), (0,2), (1,2).
fn hermitian_from(v: &[Rational]) -> Matrix3 {
    let q = |a: &Rational, b: &Rational| FieldElement::new(e(), a.clone(), b.clone());
    let z = Rational::zero();
    let h01 = q(&v[3], &v[4]);
    let h02 = q(&v[5], &v[6]);
    let h12 = q(&v[7], &v[8]);
    Matrix3 {
        m: [
            [q(&v[0], &z), h01.clone(), h02.clone()],
            [h01.conj(), q(&v[1], &z), h12.clone()],
            [h02.conj(), h12.conj(), q(&v[2], &z)],
        ],
    }
}

/// Scales a rational vector to coprime integers.
fn primitive(v: &[Rational]) -> Vec<Rational> {
    let den = v.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x.clone() * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    let g = if g.is_zero() { num_bigint::BigInt::one() } else { g };
    ints.into_iter().map(|x| Rational::from_integer(x / g.clone())).collect()
}

/// Basis changes tried, in order, to make every leading minor nonzero.
fn congruence_candidates() -> Vec<Matrix3> {
    let mut out = vec![Matrix3::identity()];
    let coeffs = [one(), FieldElement::rho()];
    let mut shears = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for c in &coeffs {
                shears.push(Matrix3::from_fn(|a, b| {
                    if a == b {
                        one()
                    } else if a == i && b == j {
                        c.clone()
                    } else {
                        zero()
                    }
                }));
            }
        }
    }
    out.extend(shears.iter().cloned());
    for s in &shears {
        for t in &shears {
            out.push(s.mul(t));
        }
    }
    out
}

fn certify_signature(form: &HermitianForm) -> Result<SignatureCertificate> {
    let char_poly_signature = form.signature_by_char_poly()?;
    for t in congruence_candidates() {
        let g = form.congruent(&t);
        let minors = g.leading_minors()?;
        if minors.iter().any(|m| m.is_zero()) {
            continue;
        }
        let negative = sign_changes(&[Rational::one(), minors[0].clone(), minors[1].clone(), minors[2].clone()]);
        return Ok(SignatureCertificate {
            congruence: t.rows_strings(),
            minors: minors.iter().map(|m| m.to_string()).collect(),
            signature: (3 - negative, negative),
            char_poly_signature,
        });
    }
    Err(Error::Unsupported("no congruence with nonzero leading minors found".into()))
}

/// Solves the conjugate-linear system `M* J M = J` for `M ∈ {R, P, Q}` over
/// the nine real coordinates of a Hermitian `J`. The solution space must be
/// one-dimensional; the returned generator is primitive and scaled to have
/// signature (2,1).
pub fn derive_invariant_form() -> Result<InvariantForm> {
    let gens: Vec<Matrix3> = [Generator::R, Generator::P, Generator::Q].iter().map(|g| generator_matrix(*g)).collect();
    let basis: Vec<Matrix3> = (0..9)
        .map(|k| {
            let v: Vec<Rational> = (0..9).map(|i| if i == k { Rational::one() } else { Rational::zero() }).collect();
            hermitian_from(&v)
        })
        .collect();
    let mut rows = Vec::new();
    for m in &gens {
        let images: Vec<Matrix3> = basis.iter().map(|j| m.conj_transpose().mul(j).mul(m).sub(j)).collect();
        for i in 0..3 {
            for j in 0..3 {
                rows.push(images.iter().map(|im| im.entry(i, j).re_part().clone()).collect());
                rows.push(images.iter().map(|im| im.entry(i, j).lambda_part().clone()).collect());
            }
        }
    }
    let kernel = null_space(rows, 9);
    if kernel.len() != 1 {
        return Err(Error::FormDimension(kernel.len()));
    }
    let v = primitive(&kernel[0]);
    let mut form = HermitianForm::new(hermitian_from(&v))?;
    let mut certificate = certify_signature(&form)?;
    if certificate.signature == (1, 2) {
        form = HermitianForm::new(form.j.scale(&-one()))?;
        certificate = certify_signature(&form)?;
    }
    Ok(InvariantForm { form, solution_dimension: 1, certificate })
}

/// A sixth root of unity `ω = ζᵏ` with `ωM` unipotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unipotency {
    pub omega_power: u8,
    pub omega: String,
}

/// Whether some `ωM`, `ω` a sixth root of unity, satisfies `(ωM − I)³ = 0`.
pub fn is_unipotent(m: &Matrix3) -> Option<Unipotency> {
    let units = e().roots_of_unity::<Rational>();
    let id = Matrix3::identity();
    units.iter().enumerate().find_map(|(k, w)| {
        let n = m.scale(w).sub(&id);
        let n3 = n.mul(&n).mul(&n);
        (n3 == Matrix3::from_fn(|_, _| zero())).then(|| Unipotency { omega_power: k as u8, omega: w.to_string() })
    })
}

/// The same test through the characteristic polynomial `(x − 1)³`.
pub fn is_unipotent_by_char_poly(m: &Matrix3) -> Option<u8> {
    let units = e().roots_of_unity::<Rational>();
    let three = FieldElement::integer(e(), 3);
    units.iter().enumerate().find_map(|(k, w)| {
        let [t, s2, d] = m.scale(w).char_poly();
        (t == three && s2 == three && d == one()).then_some(k as u8)
    })
}

/// A relator of `Δ` evaluated on the generator matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorScalar {
    pub word: String,
    /// `s` with the product equal to `s·I`, if it is scalar.
    pub scalar: Option<String>,
    /// The scalar is a unit of the ring of integers.
    pub unit: bool,
}

pub fn relator_scalars() -> Result<Vec<RelatorScalar>> {
    let delta = Presentation::delta();
    delta
        .relators()
        .iter()
        .map(|r| {
            let s = evaluate_word(r)?.scalar_value();
            let unit = s.as_ref().is_some_and(|s| s.is_integral() && s.norm().is_one());
            Ok(RelatorScalar { word: delta.format_word(r), scalar: s.map(|s| s.to_string()), unit })
        })
        .collect()
}

/// Words `a`, `b`, `c` in a subgroup whose matrices satisfy the `N_k`
/// relations `[a, c]`, `[b, c]`, `[a, b]c⁻ᵏ` up to the recorded scalars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilWitness {
    pub a: String,
    pub b: String,
    pub c: String,
    pub k: i64,
    pub scalars: Vec<String>,
}

fn signed(w: &Word, sign: i64) -> Word {
    w.pow(sign)
}

/// Reduced words of length at most two over the subgroup generators and
/// their inverses, shortest first.
fn short_words(gens: &[Word]) -> Vec<Word> {
    let mut letters = Vec::new();
    for g in gens {
        letters.push(g.clone());
        letters.push(g.inverse());
    }
    let mut out: Vec<Word> = letters.clone();
    for (i, x) in letters.iter().enumerate() {
        for (j, y) in letters.iter().enumerate() {
            if i ^ 1 != j {
                out.push(x.concat(y));
            }
        }
    }
    out
}

/// Bounded search for a [`NilWitness`]: `a`, `b` run over ordered pairs of
/// distinct listed generators with signs, `c` over `[a, b]` and the short
/// words in the generators. Witnesses with `[a, b]` or `c` scalar are
/// skipped, since they satisfy the relations vacuously.
pub fn nil_relation_witness(subgroup: ParabolicSubgroup, k: i64) -> Result<Option<NilWitness>> {
    let delta = Presentation::delta();
    let gens = subgroup.spec().generators;
    let scalar_of = |w: &Word| -> Result<Option<FieldElement>> { Ok(evaluate_word(w)?.scalar_value()) };
    for i in 0..gens.len() {
        for j in 0..gens.len() {
            if i == j {
                continue;
            }
            for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let a = signed(&gens[i], sa);
                let b = signed(&gens[j], sb);
                let ab = Word::commutator(&a, &b);
                if scalar_of(&ab)?.is_some() {
                    continue;
                }
                let mut cs = vec![ab.clone()];
                cs.extend(short_words(&gens));
                for c in cs {
                    if scalar_of(&c)?.is_some() {
                        continue;
                    }
                    let rels = [Word::commutator(&a, &c), Word::commutator(&b, &c), ab.concat(&c.pow(-k))];
                    let mut scalars = Vec::new();
                    for r in &rels {
                        match scalar_of(r)? {
                            Some(s) => scalars.push(s.to_string()),
                            None => break,
                        }
                    }
                    if scalars.len() == 3 {
                        return Ok(Some(NilWitness {
                            a: delta.format_word(&a),
                            b: delta.format_word(&b),
                            c: delta.format_word(&c),
                            k,
                            scalars,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRow {
    pub word: String,
    pub matrix: Vec<Vec<String>>,
    pub unipotent: Option<Unipotency>,
    /// The characteristic-polynomial criterion gives the same verdict.
    pub criteria_agree: bool,
    pub preserves_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupMatrixReport {
    pub subgroup: ParabolicSubgroup,
    pub generators: Vec<GeneratorRow>,
    pub witness: Option<NilWitness>,
}

impl SubgroupMatrixReport {
    pub fn holds(&self) -> bool {
        self.witness.is_some()
            && self.generators.iter().all(|g| g.unipotent.is_some() && g.criteria_agree && g.preserves_form)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicReport {
    pub form: Vec<Vec<String>>,
    pub solution_dimension: usize,
    pub signature: SignatureCertificate,
    pub relators: Vec<RelatorScalar>,
    pub subgroups: Vec<SubgroupMatrixReport>,
}

impl ParabolicReport {
    pub fn holds(&self) -> bool {
        self.solution_dimension == 1
            && self.signature.signature == (2, 1)
            && self.signature.char_poly_signature == (2, 1)
            && self.relators.iter().all(|r| r.unit)
            && self.subgroups.iter().all(|s| s.holds())
    }
}

/// Evaluates every listed generator of the four cusp subgroups, certifies
/// unipotency up to a unit and finds `N_k` relation witnesses.
pub fn parabolic_generator_report() -> Result<ParabolicReport> {
    let inv = derive_invariant_form()?;
    let delta = Presentation::delta();
    let mut subgroups = Vec::new();
    for s in ParabolicSubgroup::ALL {
        let generators = s
            .spec()
            .generators
            .iter()
            .map(|w| {
                let m = evaluate_word(w)?;
                let unipotent = is_unipotent(&m);
                let by_poly = is_unipotent_by_char_poly(&m);
                Ok(GeneratorRow {
                    word: delta.format_word(w),
                    matrix: m.rows_strings(),
                    criteria_agree: unipotent.as_ref().map(|u| u.omega_power) == by_poly,
                    unipotent,
                    preserves_form: inv.form.preserved_by(&m),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        subgroups.push(SubgroupMatrixReport { subgroup: s, generators, witness: nil_relation_witness(s, s.nil_k())? });
    }
    Ok(ParabolicReport {
        form: inv.form.j.rows_strings(),
        solution_dimension: inv.solution_dimension,
        signature: inv.certificate,
        relators: relator_scalars()?,
        subgroups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::parse_word;

    fn word(s: &str) -> Word {
        parse_word(s, &ALPHABET).unwrap()
    }

    #[test]
    fn generator_fixtures() {
        let r = generator_matrix(Generator::R);
        assert!(r.mul(&r).is_identity());
        assert_eq!(generator_matrix(Generator::Q).det(), FieldElement::integer(e(), -1));
        assert_eq!(generator_matrix(Generator::P).det(), FieldElement::rho());
        for g in Generator::ALL {
            let m = generator_matrix(g);
            assert!(m.is_ring_invertible());
            assert!(m.mul(&m.inverse().unwrap()).is_identity());
        }
    }

    #[test]
    fn empty_word_is_identity() {
        assert!(evaluate_word(&Word::identity()).unwrap().is_identity());
    }

    #[test]
    fn relators_are_unit_scalars() {
        let rs = relator_scalars().unwrap();
        assert_eq!(rs.len(), 2);
        assert!(rs.iter().all(|r| r.scalar.is_some() && r.unit), "{rs:?}");
        // P³ and Q² differ by the recorded scalar
        let p3 = evaluate_word(&word("P^3")).unwrap();
        let q2 = evaluate_word(&word("Q^2")).unwrap();
        let s = evaluate_word(&word("P^3Q^-2")).unwrap().scalar_value().unwrap();
        assert_eq!(p3, q2.scale(&s));
    }

    #[test]
    fn form_is_invariant_and_lorentzian() {
        let inv = derive_invariant_form().unwrap();
        for g in Generator::ALL {
            assert!(inv.form.preserved_by(&generator_matrix(g)));
        }
        assert_eq!(inv.certificate.signature, (2, 1));
        assert_eq!(inv.certificate.char_poly_signature, (2, 1));
    }

    #[test]
    fn unipotency_fixtures() {
        assert_eq!(is_unipotent(&Matrix3::identity()).unwrap().omega_power, 0);
        let d = Matrix3::diagonal([FieldElement::rho(), one(), one()]);
        assert!(is_unipotent(&d).is_none());
        assert!(is_unipotent_by_char_poly(&d).is_none());
        assert!(is_unipotent(&evaluate_word(&word("[Q,P]")).unwrap()).is_some());
        // a unit multiple of a unipotent matrix is still accepted
        let m = evaluate_word(&word("[Q,P]")).unwrap().scale(&FieldElement::rho());
        assert!(is_unipotent(&m).is_some());
    }

    #[test]
    fn signature_of_standard_forms() {
        let f = HermitianForm::new(Matrix3::from_ints([[(0, 0), (0, 0), (1, 0)], [(0, 0), (1, 0), (0, 0)], [(1, 0), (0, 0), (0, 0)]]))
            .unwrap();
        assert_eq!(certify_signature(&f).unwrap().signature, (2, 1));
        let g = HermitianForm::new(Matrix3::diagonal([one(), -one(), -one()])).unwrap();
        assert_eq!(certify_signature(&g).unwrap().signature, (1, 2));
        assert_eq!(g.signature_by_char_poly().unwrap(), (1, 2));
    }

    #[test]
    fn report_holds() {
        let r = parabolic_generator_report().unwrap();
        assert!(r.holds(), "{r:#?}");
    }
}
