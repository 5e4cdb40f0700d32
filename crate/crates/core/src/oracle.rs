//! Slow reference implementations used to cross-check the fast routines.

use itertools::Itertools;
use num_traits::Zero;

use crate::exterior::permutation_sign;
use crate::matrix::Matrix;
use crate::pure::LambdaTable;
use crate::scalar::{Rational, Scalar};

/// Every perfect matching of `indices`, each as a list of pairs.
pub fn perfect_matchings(indices: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = indices.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for (k, &partner) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
        for mut m in perfect_matchings(&remaining) {
            m.insert(0, (first, partner));
            out.push(m);
        }
    }
    out
}

/// Hafnian by listing all perfect matchings.
pub fn matching_hafnian<S: Scalar>(table: &LambdaTable<S>, indices: &[usize]) -> S {
    perfect_matchings(indices)
        .iter()
        .map(|m| m.iter().fold(S::one(), |acc, &(i, j)| acc * table.get(i, j).clone()))
        .fold(S::zero(), |acc, x| acc + x)
}

/// Hafnian as `Σ_σ Π λ_{σ(2k),σ(2k+1)} / (2^n n!)` over all permutations.
pub fn permutation_hafnian<S: Scalar>(table: &LambdaTable<S>, indices: &[usize]) -> S {
    let m = indices.len();
    let n = m / 2;
    let mut acc = S::zero();
    for perm in indices.iter().copied().permutations(m) {
        acc = acc + (0..n).fold(S::one(), |p, k| p * table.get(perm[2 * k], perm[2 * k + 1]).clone());
    }
    let norm: i64 = (1i64 << n) * (1..=n as i64).product::<i64>();
    acc / S::from_i64(norm)
}

/// Elementary symmetric polynomial by summing over all `k`-subsets.
pub fn subset_elementary_symmetric<S: Scalar>(k: usize, values: &[S]) -> S {
    values
        .iter()
        .combinations(k)
        .map(|c| c.into_iter().fold(S::one(), |acc, x| acc * x.clone()))
        .fold(S::zero(), |acc, x| acc + x)
}

/// Determinant by the Leibniz expansion.
pub fn leibniz_determinant<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.nrows();
    (0..n)
        .permutations(n)
        .map(|p| {
            let term = (0..n).fold(S::one(), |acc, i| acc * m[(i, p[i])].clone());
            if permutation_sign(&p) > 0 {
                term
            } else {
                -term
            }
        })
        .fold(S::zero(), |acc, x| acc + x)
}

/// Rank by Gaussian elimination over the rationals with any nonzero pivot.
pub fn gauss_rank(m: &Matrix<Rational>) -> usize {
    let mut rows = m.rows_vec();
    let ncols = m.ncols();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone() / p.clone();
            let pivot_row = rows[rank].clone();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = x.clone() - y.clone() * f.clone();
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rank_binary, rank_rational};
    use crate::pure::{elementary_symmetric, hafnian, incidence_matrix};

    type Q = Rational;

    #[test]
    fn matching_counts() {
        for (m, count) in [(0, 1), (2, 1), (4, 3), (6, 15), (8, 105)] {
            assert_eq!(perfect_matchings(&(0..m).collect::<Vec<_>>()).len(), count);
        }
    }

    #[test]
    fn hafnian_oracles_agree() {
        let t = LambdaTable::from_fn(6, |i, j| Q::from_i64((i * 7 + j * 3) as i64 % 5 - 2));
        for ix in [vec![0, 1], vec![0, 2, 3, 5], (0..6).collect()] {
            let fast = hafnian(&t, &ix).unwrap();
            assert_eq!(matching_hafnian(&t, &ix), fast);
            assert_eq!(permutation_hafnian(&t, &ix), fast);
        }
    }

    #[test]
    fn elementary_symmetric_oracle() {
        let v: Vec<Q> = [3, -1, 4, 1, -5, 9].iter().map(|&x| Q::from_i64(x)).collect();
        for k in 0..=6 {
            assert_eq!(subset_elementary_symmetric(k, &v), elementary_symmetric(k, &v).unwrap());
        }
    }

    #[test]
    fn determinant_and_rank_oracles() {
        let m = Matrix::from_fn(4, 4, |i, j| Q::from_i64(((i + 1) * (j + 2) % 7) as i64 - 3));
        assert_eq!(leibniz_determinant(&m), m.determinant().unwrap());
        let a = incidence_matrix(6, 3, 1).unwrap();
        let q = Matrix::from_fn(a.len(), a[0].len(), |i, j| Q::from_i64(a[i][j] as i64));
        assert_eq!(gauss_rank(&q), rank_binary(&a));
        assert_eq!(gauss_rank(&q), rank_rational(&q));
    }
}
