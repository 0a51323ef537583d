//! Smith normal form of integer matrices and the abelian invariants of a
//! presentation matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z^rank ⊕ Z/d₁ ⊕ … ⊕ Z/d_k` with `1 < d₁ | d₂ | … | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianInvariants { rank, torsion: Vec::new() }
    }

    pub fn new(rank: usize, torsion: Vec<u64>) -> Self {
        AbelianInvariants { rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

fn overflow() -> Error {
    Error::Unsupported("integer overflow in Smith normal form".into())
}

fn checked_row_op(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<()> {
    for j in 0..m[dst].len() {
        let v = m[src][j].checked_mul(q).and_then(|x| m[dst][j].checked_sub(x)).ok_or_else(overflow)?;
        m[dst][j] = v;
    }
    Ok(())
}

fn checked_col_op(m: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<()> {
    for row in m.iter_mut() {
        let v = row[src].checked_mul(q).and_then(|x| row[dst].checked_sub(x)).ok_or_else(overflow)?;
        row[dst] = v;
    }
    Ok(())
}

/// Diagonal entries `d₁ | d₂ | …` (nonnegative, zeros last) of the Smith
/// normal form of an `rows × cols` integer matrix. The number of entries is
/// `min(rows, cols)`.
pub fn smith_diagonal(matrix: &[Vec<i64>], cols: usize) -> Result<Vec<i128>> {
    if matrix.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidConfig("ragged relation matrix".into()));
    }
    let mut m: Vec<Vec<i128>> = matrix.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let rows = m.len();
    let n = rows.min(cols);
    for t in 0..n {
        // pivot: smallest nonzero absolute value in the remaining block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(m, n);
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                checked_row_op(&mut m, i, t, q)?;
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                checked_col_op(&mut m, j, t, q)?;
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the rest of the block by the pivot
            let p = m[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        m[t][j] = m[t][j].checked_add(m[i][j]).ok_or_else(overflow)?;
                    }
                }
                None => break,
            }
        }
    }
    finish(m, n)
}

fn finish(m: Vec<Vec<i128>>, n: usize) -> Result<Vec<i128>> {
    let mut d: Vec<i128> = (0..n).map(|i| m[i][i].abs()).collect();
    // zeros (if any) are already trailing except when the pivot search ended early
    let (mut nz, z): (Vec<i128>, Vec<i128>) = d.drain(..).partition(|x| *x != 0);
    nz.sort_unstable();
    nz.extend(z);
    Ok(nz)
}

/// Abelian group with `cols` generators and the given relation rows.
pub fn abelian_invariants(relations: &[Vec<i64>], cols: usize) -> Result<AbelianInvariants> {
    let d = smith_diagonal(relations, cols)?;
    let nonzero: Vec<i128> = d.iter().copied().filter(|x| *x != 0).collect();
    let rank = cols - nonzero.len();
    let torsion = nonzero
        .into_iter()
        .filter(|x| *x > 1)
        .map(|x| u64::try_from(x).map_err(|_| overflow()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AbelianInvariants { rank, torsion })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fixtures() {
        assert_eq!(smith_diagonal(&[vec![2, 4], vec![6, 8]], 2).unwrap(), vec![2, 4]);
        assert_eq!(smith_diagonal(&[vec![2, 0], vec![0, 3]], 2).unwrap(), vec![1, 6]);
        assert_eq!(abelian_invariants(&[vec![6, 0]], 2).unwrap(), AbelianInvariants::new(1, vec![6]));
        assert_eq!(abelian_invariants(&[], 3).unwrap(), AbelianInvariants::free(3));
        assert_eq!(abelian_invariants(&[vec![1, -1], vec![-1, 1]], 2).unwrap(), AbelianInvariants::free(1));
    }

    #[test]
    fn display() {
        assert_eq!(AbelianInvariants::new(2, vec![3]).to_string(), "Z^2 + Z/3");
        assert_eq!(AbelianInvariants::new(0, vec![6]).to_string(), "Z/6");
        assert_eq!(AbelianInvariants::free(0).to_string(), "0");
    }
}
