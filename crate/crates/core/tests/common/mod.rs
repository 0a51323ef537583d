//! Oracles shared by the integration tests. They use plain integer
//! arithmetic only, never the library.

#![allow(dead_code)]

use toroidal_core::QuadraticField;

fn det(m: &[Vec<i128>]) -> i128 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
        s.push(last);
        s
    })).collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Invariants from determinantal divisors: `d_k` is the gcd of all `k × k`
/// minors and the invariant factors are `d_k / d_{k−1}`.
pub fn minors_oracle(m: &[Vec<i64>], cols: usize) -> (usize, Vec<u64>) {
    let m: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let mut prev = 1i128;
    let mut factors = Vec::new();
    for k in 1..=m.len().min(cols) {
        let mut d = 0;
        for rows in subsets(m.len(), k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rows.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                d = gcd(d, det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        factors.push((d / prev) as u64);
        prev = d;
    }
    let rank = cols - factors.len();
    (rank, factors.into_iter().filter(|f| *f > 1).collect())
}

/// Ring of integers arithmetic on coordinate pairs `a + bλ`.
fn ring_mul(f: QuadraticField, (a, b): (i64, i64), (c, d): (i64, i64)) -> (i64, i64) {
    match f {
        QuadraticField::Eisenstein => (a * c - b * d, a * d + b * c - b * d),
        QuadraticField::Gaussian => (a * c - b * d, a * d + b * c),
    }
}

fn ring_conj(f: QuadraticField, (a, b): (i64, i64)) -> (i64, i64) {
    match f {
        QuadraticField::Eisenstein => (a - b, -b),
        QuadraticField::Gaussian => (a, -b),
    }
}

pub fn ring_norm(f: QuadraticField, x: (i64, i64)) -> i64 {
    ring_mul(f, x, ring_conj(f, x)).0
}

/// `x ∈ αO` iff `x·ᾱ ∈ N(α)O`.
fn in_ideal(f: QuadraticField, alpha: (i64, i64), x: (i64, i64)) -> bool {
    let n = ring_norm(f, alpha);
    let (p, q) = ring_mul(f, x, ring_conj(f, alpha));
    p % n == 0 && q % n == 0
}

/// Greedy enumeration of the cosets of `αO` among `a + bλ`, `0 ≤ a, b < N(α)`.
pub fn brute_index(f: QuadraticField, alpha: (i64, i64)) -> usize {
    let n = ring_norm(f, alpha);
    let mut reps: Vec<(i64, i64)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if !reps.iter().any(|r| in_ideal(f, alpha, (a - r.0, b - r.1))) {
                reps.push((a, b));
            }
        }
    }
    reps.len()
}
