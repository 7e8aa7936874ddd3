//! Integer and rational matrix routines: Hermite and Smith normal forms,
//! rank, determinants and exact linear solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn axpy_row(m: &mut IntMatrix, target: usize, q: &BigInt, source: usize) {
    if q.is_zero() {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(&src) {
        *t -= q * s;
    }
}

fn axpy_col(m: &mut IntMatrix, target: usize, q: &BigInt, source: usize) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Canonical row Hermite normal form: zero rows dropped, pivots positive,
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut a: IntMatrix = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return a;
    }
    let n = a[0].len();
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let mut found = false;
        loop {
            let best = (r..m)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()));
            let Some(p) = best else { break };
            found = true;
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..m {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                axpy_row(&mut a, i, &q, r);
                if !a[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            axpy_row(&mut a, i, &q, r);
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Smith form `U·A·V = diag(d₁, …, d_r, 0, …)` with `d₁ | d₂ | …`; only the
/// column transform `V` is tracked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub column_transform: IntMatrix,
    pub columns: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn smith(rows: &[Vec<BigInt>], columns: usize) -> Smith {
    let mut a: IntMatrix = rows.to_vec();
    let m = a.len();
    let n = columns;
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            for i in t + 1..m {
                let q = a[i][t].div_floor(&a[t][t]);
                axpy_row(&mut a, i, &q, t);
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                axpy_col(&mut a, j, &q, t);
                axpy_col(&mut v, j, &q, t);
            }
            let row_left = (t + 1..m).find(|&i| !a[i][t].is_zero());
            let col_left = (t + 1..n).find(|&j| !a[t][j].is_zero());
            if let Some(i) = row_left {
                a.swap(t, i);
                continue;
            }
            if let Some(j) = col_left {
                swap_cols(&mut a, t, j);
                swap_cols(&mut v, t, j);
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            if let Some(i) = bad {
                let row = a[i].clone();
                for (x, y) in a[t].iter_mut().zip(&row) {
                    *x += y;
                }
                continue;
            }
            break;
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| a[i][i].abs()).collect();
    Smith { diagonal, column_transform: v, columns: n }
}

pub fn mat_vec_row(x: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let n = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = vec![BigInt::zero(); n];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
}

/// Row-echelon rank over Q.
pub fn rank_rational(rows: &RatMatrix) -> usize {
    let mut a = rows.clone();
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] / &a[r][col];
            let src = a[r].clone();
            for (x, s) in a[i].iter_mut().zip(&src) {
                *x -= &f * s;
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn inverse_rational(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            let src = a[col].clone();
            for (x, s) in a[i].iter_mut().zip(&src) {
                *x -= &f * s;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `x · M` for a row vector `x`.
pub fn rat_vec_mat(x: &[Rational], m: &RatMatrix) -> Vec<Rational> {
    let n = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = vec![Rational::zero(); n];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        from_i64(rows)
    }

    #[test]
    fn hnf_of_gcd_pair() {
        assert_eq!(hnf(&m(&[vec![2], vec![3]])), m(&[vec![1]]));
        assert!(hnf(&m(&[vec![0, 0]])).is_empty());
    }

    #[test]
    fn hnf_reduces_above_pivots() {
        let h = hnf(&m(&[vec![1, 1], vec![1, -1]]));
        assert_eq!(h, m(&[vec![1, 1], vec![0, 2]]));
    }

    #[test]
    fn smith_small() {
        let s = smith(&m(&[vec![2, 0], vec![0, 3]]), 2);
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let s = smith(&m(&[vec![12]]), 1);
        assert_eq!(s.diagonal, vec![BigInt::from(12)]);
        let s = smith(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&m(&[vec![2, 1], vec![7, 4]])), BigInt::from(1));
        assert_eq!(determinant(&m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]])), BigInt::from(-2));
        assert_eq!(determinant(&m(&[vec![1, 2], vec![2, 4]])), BigInt::from(0));
    }

    fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..10, c), r).prop_map(|v| from_i64(&v))
        })
    }

    proptest! {
        #[test]
        fn hnf_is_idempotent_and_order_free(a in arb_matrix()) {
            let h = hnf(&a);
            prop_assert_eq!(hnf(&h), h.clone());
            let mut rev = a.clone();
            rev.reverse();
            prop_assert_eq!(hnf(&rev), h);
        }

        #[test]
        fn smith_transform_is_unimodular_and_diagonalizes(a in arb_matrix()) {
            let n = a[0].len();
            let s = smith(&a, n);
            prop_assert_eq!(determinant(&s.column_transform).abs(), BigInt::one());
            for w in s.diagonal.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            // the rows of A·V span the same lattice as the diagonal rows
            let av: IntMatrix = a.iter().map(|r| mat_vec_row(r, &s.column_transform)).collect();
            let mut diag = vec![vec![BigInt::zero(); n]; s.rank()];
            for (i, d) in s.diagonal.iter().enumerate() {
                diag[i][i] = d.clone();
            }
            prop_assert_eq!(hnf(&av), hnf(&diag));
            prop_assert_eq!(s.rank(), rank_rational(&to_rational(&a)));
        }
    }
}
