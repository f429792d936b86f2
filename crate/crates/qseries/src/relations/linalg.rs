//! Exact integer nullspace computation.
//!
//! Fraction-free Gaussian elimination: pivots are the first nonzero entry in
//! column order, cross-multiplication keeps everything integral, and each
//! reduced row is divided by its content to hold the entries down. Results
//! are deterministic given the row and column order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::rat::{normalize_sign, primitive_integer_vector, Rat};

/// Basis of the right nullspace of the integer matrix `rows` (each of length
/// `cols`), as primitive integer vectors with positive leading sign, one per
/// free column in ascending column order.
pub(crate) fn integer_nullspace(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let (upper, lower) = rows.split_at_mut(rank + 1);
        let pivot = &upper[rank];
        let p = pivot[col].clone();
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let c = row[col].clone();
            for j in 0..cols {
                row[j] = &row[j] * &p - &pivot[j] * &c;
            }
            reduce_content(row);
        }
        pivots.push((rank, col));
        rank += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        // Back-substitute in rationals, then clear denominators.
        let mut x = vec![Rat::zero(); cols];
        x[free] = Rat::from_integer(BigInt::from(1));
        for &(r, c) in pivots.iter().rev() {
            let mut acc = Rat::zero();
            for j in c + 1..cols {
                if !rows[r][j].is_zero() {
                    acc += Rat::from_integer(rows[r][j].clone()) * &x[j];
                }
            }
            x[c] = -acc / Rat::from_integer(rows[r][c].clone());
        }
        let mut v = primitive_integer_vector(&x);
        normalize_sign(&mut v);
        basis.push(v);
    }
    basis
}

fn reduce_content(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_positive() && g != BigInt::from(1) {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Clear denominators in a rational row, returning the primitive integer row.
pub(crate) fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    primitive_integer_vector(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn identity_has_trivial_nullspace() {
        let rows = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(integer_nullspace(rows, 3).is_empty());
    }

    #[test]
    fn rank_one_matrix() {
        // [[1,2],[1,2]] has nullspace spanned by (2,-1).
        let rows = m(&[&[1, 2], &[1, 2]]);
        let basis = integer_nullspace(rows, 2);
        assert_eq!(basis, vec![vec![BigInt::from(2), BigInt::from(-1)]]);
    }

    #[test]
    fn two_dimensional_nullspace_is_primitive_and_sign_normalized() {
        // x + y + z + w = 0, x - y + z - w = 0  => z, w free.
        let rows = m(&[&[1, 1, 1, 1], &[1, -1, 1, -1]]);
        let basis = integer_nullspace(rows, 4);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let first = v.iter().find(|x| !x.is_zero()).unwrap();
            assert!(first.is_positive());
        }
        // Each basis vector satisfies both equations.
        for v in &basis {
            let s1: BigInt = v.iter().sum();
            assert!(s1.is_zero());
            let s2 = &v[0] - &v[1] + &v[2] - &v[3];
            assert!(s2.is_zero());
        }
    }

    #[test]
    fn deterministic_given_order() {
        let rows = m(&[&[2, 4, 6], &[1, 2, 3], &[0, 0, 0]]);
        let a = integer_nullspace(rows.clone(), 3);
        let b = integer_nullspace(rows, 3);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }
}
