//! Logarithmic Chern numbers of a blown-up minimal surface with an elliptic
//! boundary, the Noether congruence, boundary profiles, the singularity
//! quadratic `r² − r − 2n = 0`, and the theta obstruction on abelian surfaces.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal models with known Chern numbers, plus markers for the classes
/// where only Euler-number bookkeeping is available.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalType {
    Abelian,
    /// Bielliptic with group `Z/s × Z/t`.
    Bielliptic { s: u32, t: u32 },
    K3,
    Enriques,
    /// General type with the given Chern numbers of the minimal model.
    GeneralType { c1_sq: i64, c2: i64 },
    /// A ruled surface over a curve of genus `g`.
    Ruled { genus: u32 },
}

impl MinimalType {
    /// `(c₁², c₂)` of the minimal model when it is determined by the type.
    pub fn chern_numbers(&self) -> Option<(i64, i64)> {
        match self {
            MinimalType::Abelian | MinimalType::Bielliptic { .. } => Some((0, 0)),
            MinimalType::K3 => Some((0, 24)),
            MinimalType::Enriques => Some((0, 12)),
            MinimalType::GeneralType { c1_sq, c2 } => Some((*c1_sq, *c2)),
            MinimalType::Ruled { .. } => None,
        }
    }

    /// Euler number of the minimal model.
    pub fn euler_number(&self) -> i64 {
        match self {
            MinimalType::Ruled { genus } => 4 * (1 - *genus as i64),
            other => other.chern_numbers().map(|(_, c2)| c2).unwrap_or(0),
        }
    }
}

/// A minimal surface blown up `k` times, with boundary curves of the given
/// self-intersections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfacePair {
    pub minimal: MinimalType,
    pub blowups: u32,
    pub boundary: Vec<i64>,
}

impl SurfacePair {
    pub fn new(minimal: MinimalType, blowups: u32, boundary: Vec<i64>) -> Result<Self> {
        if boundary.iter().any(|d| *d >= 0) {
            return Err(Error::InvalidConfig("boundary self-intersections must be negative".into()));
        }
        Ok(SurfacePair { minimal, blowups, boundary })
    }

    /// `c̄₂ = c₂(X) − χ(D) = c₂(X)` for an elliptic boundary.
    pub fn log_c2(&self) -> i64 {
        self.minimal.euler_number() + self.blowups as i64
    }

    /// `c̄₁² = (K_X + D)² = K_X² + 2K_X·D + D²`, and by adjunction on elliptic
    /// components `K_X·D_i = −D_i²`, so `c̄₁² = K_X² − ΣD_i²`.
    pub fn log_c1_sq(&self) -> Result<i64> {
        let (c1_sq, _) = self.minimal.chern_numbers().ok_or_else(|| {
            Error::Unsupported(format!("c̄₁² is not determined for {:?}", self.minimal))
        })?;
        Ok(c1_sq - self.blowups as i64 - self.boundary.iter().sum::<i64>())
    }

    pub fn log_chern_numbers(&self) -> Result<(i64, i64)> {
        Ok((self.log_c1_sq()?, self.log_c2()))
    }

    /// `c̄₁² = 3c̄₂`.
    pub fn is_saturated(&self) -> Result<bool> {
        let (a, b) = self.log_chern_numbers()?;
        Ok(a == 3 * b)
    }
}

/// `c₁² + c₂ ≡ 0 (mod 12)`.
pub fn noether_filter(c1_sq: i64, c2: i64) -> bool {
    (c1_sq + c2).rem_euclid(12) == 0
}

/// All multisets of negative integers whose negated sum is `total`, each
/// sorted ascending (most negative first).
pub fn boundary_profiles(total: u32) -> Vec<Vec<i64>> {
    fn go(rest: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<i64>>) {
        if rest == 0 {
            out.push(prefix.iter().map(|p| -(*p as i64)).collect());
            return;
        }
        for part in (1..=rest.min(max_part)).rev() {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if total > 0 {
        go(total, total, &mut Vec::new(), &mut out);
    }
    out
}

/// A solution of `r² − r − 2n = 0`: a blowdown image `C` with `C² = 2n`
/// and an ordinary point of multiplicity `r`, whose strict transform `D`
/// has `D² = 2n − r²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SingularityDatum {
    pub n: i64,
    pub r: i64,
    pub d_selfint: i64,
}

impl SingularityDatum {
    pub fn c_selfint(&self) -> i64 {
        2 * self.n
    }

    /// Outside the admissible range `D² ≥ −4`.
    pub fn out_of_range(&self) -> bool {
        self.d_selfint < -4
    }

    /// `2p_a(D) − 2 = 2p_a(C) − 2 − r(r − 1)` with `p_a(D) = 1`,
    /// `p_a(C) = 1 + n`.
    pub fn genus_identity_holds(&self) -> bool {
        let pa_c = 1 + self.n;
        0 == 2 * pa_c - 2 - self.r * (self.r - 1)
    }
}

/// Integer square root when `m` is a perfect square.
fn exact_sqrt(m: i64) -> Option<i64> {
    if m < 0 {
        return None;
    }
    let r = m.sqrt();
    (r * r == m).then_some(r)
}

/// Positive integer root of `r² − r − 2n = 0`.
pub fn multiplicity_for(n: i64) -> Option<i64> {
    let disc = exact_sqrt(1 + 8 * n)?;
    ((1 + disc) % 2 == 0).then_some((1 + disc) / 2)
}

/// All data with `1 ≤ n ≤ max_n`, including out-of-range ones (flagged by
/// [`SingularityDatum::out_of_range`]).
pub fn singularity_solutions(max_n: i64) -> Vec<SingularityDatum> {
    (1..=max_n)
        .filter_map(|n| multiplicity_for(n).map(|r| SingularityDatum { n, r, d_selfint: 2 * n - r * r }))
        .collect()
}

/// True when a curve with `C² = c_sq` and a point of multiplicity `r` cannot
/// exist on an abelian surface: `C² < r(r − 1) + 1`.
pub fn theta_obstruction(c_sq: i64, r: i64) -> bool {
    c_sq < r * (r - 1) + 1
}

/// Verdict on one boundary profile of an abelian minimal model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileVerdict {
    pub profile: Vec<i64>,
    /// Singularity data required by the components with `D² ≤ −2`.
    pub required: Vec<SingularityDatum>,
    pub survives: bool,
    pub reason: String,
}

/// Run the abelian pipeline over every profile with `−ΣD_i² = 4`: a
/// component with `D² = −1` is the exceptional curve's partner (a smooth
/// elliptic curve through the blown-up point); a component with `D² ≤ −2`
/// must come from a singular curve whose datum lies on the singularity list
/// and is then tested against the theta obstruction.
pub fn abelian_profile_pipeline() -> Vec<ProfileVerdict> {
    let list = singularity_solutions(6);
    boundary_profiles(4)
        .into_iter()
        .map(|profile| {
            let mut required = Vec::new();
            let mut survives = true;
            let mut reasons = Vec::new();
            for d in profile.iter().filter(|d| **d <= -2) {
                match list.iter().find(|s| s.d_selfint == *d) {
                    Some(datum) => {
                        required.push(*datum);
                        if theta_obstruction(datum.c_selfint(), datum.r) {
                            survives = false;
                            reasons.push(format!(
                                "D² = {d} needs C² = {} with multiplicity {}, forbidden on an abelian surface",
                                datum.c_selfint(),
                                datum.r
                            ));
                        }
                    }
                    None => {
                        survives = false;
                        reasons.push(format!("D² = {d} has no admissible singularity datum"));
                    }
                }
            }
            let reason = if survives { "all components smooth through the blown-up point".to_string() } else { reasons.join("; ") };
            ProfileVerdict { profile, required, survives, reason }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_chern_fixtures() {
        let p = SurfacePair::new(MinimalType::Abelian, 0, vec![]).unwrap();
        assert_eq!(p.log_chern_numbers().unwrap(), (0, 0));
        let p = SurfacePair::new(MinimalType::Abelian, 1, vec![-1, -1, -1, -1]).unwrap();
        assert_eq!(p.log_chern_numbers().unwrap(), (3, 1));
        let p = SurfacePair::new(MinimalType::Bielliptic { s: 3, t: 1 }, 1, vec![-1, -3]).unwrap();
        assert_eq!(p.log_chern_numbers().unwrap(), (3, 1));
    }

    #[test]
    fn ruled_marker_only_supports_euler_bookkeeping() {
        let p = SurfacePair::new(MinimalType::Ruled { genus: 1 }, 1, vec![-1]).unwrap();
        assert_eq!(p.log_c2(), 1);
        assert!(matches!(p.log_c1_sq(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn noether_fixtures() {
        assert!(noether_filter(0, 0));
        assert!(!noether_filter(1, 1));
        assert!(!noether_filter(2, 1));
        assert!(noether_filter(9, 3));
    }

    #[test]
    fn profile_fixtures() {
        assert_eq!(boundary_profiles(1), vec![vec![-1]]);
        assert_eq!(boundary_profiles(2), vec![vec![-2], vec![-1, -1]]);
        assert_eq!(
            boundary_profiles(4),
            vec![vec![-4], vec![-3, -1], vec![-2, -2], vec![-2, -1, -1], vec![-1, -1, -1, -1]]
        );
    }

    #[test]
    fn singularity_fixtures() {
        let six: Vec<_> = singularity_solutions(6).iter().map(|s| (s.n, s.r, s.d_selfint)).collect();
        assert_eq!(six, vec![(1, 2, -2), (3, 3, -3), (6, 4, -4)]);
        assert_eq!(multiplicity_for(2), None);
        let ten = singularity_solutions(10);
        let last = ten.last().unwrap();
        assert_eq!((last.n, last.r, last.d_selfint), (10, 5, -5));
        assert!(last.out_of_range());
    }

    #[test]
    fn theta_fixtures() {
        assert!(theta_obstruction(2, 2));
        assert!(theta_obstruction(6, 3));
        assert!(theta_obstruction(12, 4));
        assert!(!theta_obstruction(7, 3));
    }

    #[test]
    fn only_four_simple_cusps_survive_on_abelian() {
        let survivors: Vec<_> = abelian_profile_pipeline().into_iter().filter(|v| v.survives).map(|v| v.profile).collect();
        assert_eq!(survivors, vec![vec![-1, -1, -1, -1]]);
    }
}
