//! Smith normal form over a Euclidean domain (used for Z and Z[i]).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense row-major matrix.
pub type Matrix<T> = Vec<Vec<T>>;

pub trait EuclideanDomain:
    Copy + PartialEq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn euclidean_norm(&self) -> u128;
    /// Division with remainder of smaller Euclidean norm. `other` must be nonzero.
    fn div_rem(&self, other: &Self) -> (Self, Self);
    /// Unit u making `u * self` the canonical associate.
    fn normalizing_unit(&self) -> Self;
    /// Inverse of a unit.
    fn unit_inverse(&self) -> Self;
}

impl EuclideanDomain for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn euclidean_norm(&self) -> u128 {
        self.unsigned_abs()
    }
    fn div_rem(&self, other: &Self) -> (Self, Self) {
        (self.div_euclid(*other), self.rem_euclid(*other))
    }
    fn normalizing_unit(&self) -> Self {
        if *self < 0 {
            -1
        } else {
            1
        }
    }
    fn unit_inverse(&self) -> Self {
        *self
    }
}

/// `u * m * v = d` with `d` diagonal, d_1 | d_2 | ..., and `u`, `v`
/// invertible; `u_inv`, `v_inv` are their inverses, so `m = u_inv * d * v_inv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snf<T> {
    pub d: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub v_inv: Matrix<T>,
}

impl<T: EuclideanDomain> Snf<T> {
    /// The diagonal entries d_1 | d_2 | ... (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<T> {
        let n = self.d.len().min(self.d.first().map_or(0, Vec::len));
        (0..n).map(|i| self.d[i][i]).collect()
    }

    /// Row transform P with `m = P * d * Q`.
    pub fn row_ops(&self) -> &Matrix<T> {
        &self.u_inv
    }

    /// Column transform Q with `m = P * d * Q`.
    pub fn col_ops(&self) -> &Matrix<T> {
        &self.v_inv
    }
}

pub fn identity<T: EuclideanDomain>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn mat_mul<T: EuclideanDomain>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(T::zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + row[k] * b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

struct Work<T> {
    a: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
    v_inv: Matrix<T>,
}

impl<T: EuclideanDomain> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: T) {
        for k in 0..self.a[0].len() {
            let t = self.a[j][k];
            self.a[i][k] = self.a[i][k] + c * t;
        }
        for k in 0..self.u.len() {
            let t = self.u[j][k];
            self.u[i][k] = self.u[i][k] + c * t;
        }
        for row in &mut self.u_inv {
            row[j] = row[j] - c * row[i];
        }
    }

    /// col_j += c * col_i
    fn add_col(&mut self, j: usize, i: usize, c: T) {
        for row in &mut self.a {
            row[j] = row[j] + c * row[i];
        }
        for row in &mut self.v {
            row[j] = row[j] + c * row[i];
        }
        let n = self.v_inv[0].len();
        for k in 0..n {
            let t = self.v_inv[j][k];
            self.v_inv[i][k] = self.v_inv[i][k] - c * t;
        }
    }

    fn scale_row(&mut self, i: usize, unit: T) {
        let inv = unit.unit_inverse();
        for x in &mut self.a[i] {
            *x = *x * unit;
        }
        for x in &mut self.u[i] {
            *x = *x * unit;
        }
        for row in &mut self.u_inv {
            row[i] = row[i] * inv;
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, u128)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() {
                    let n = x.euclidean_norm();
                    if best.map_or(true, |(_, _, b)| n < b) {
                        best = Some((i, j, n));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form. The pivot is always the entry of least Euclidean norm,
/// which guarantees termination.
pub fn smith_normal_form<T: EuclideanDomain>(m: &Matrix<T>) -> Snf<T> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut w = Work {
        a: m.clone(),
        u: identity(rows),
        u_inv: identity(rows),
        v: identity(cols),
        v_inv: identity(cols),
    };
    if rows == 0 || cols == 0 {
        return Snf {
            d: w.a,
            u: w.u,
            v: w.v,
            u_inv: w.u_inv,
            v_inv: w.v_inv,
        };
    }
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = w.min_entry(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            let pivot = w.a[t][t];
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let (q, r) = w.a[i][t].div_rem(&pivot);
                    w.add_row(i, t, -q);
                    dirty |= !r.is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let (q, r) = w.a[t][j].div_rem(&pivot);
                    w.add_col(j, t, -q);
                    dirty |= !r.is_zero();
                }
            }
            if dirty {
                // a remainder of smaller norm appeared in row or column t
                let (i, j) = w.min_entry_in_cross(t);
                w.swap_rows(t, i);
                w.swap_cols(t, j);
                continue;
            }
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !w.a[i][j].div_rem(&pivot).1.is_zero())
            });
            match offender {
                Some(i) => w.add_row(t, i, T::one()),
                None => break,
            }
        }
        let unit = w.a[t][t].normalizing_unit();
        w.scale_row(t, unit);
    }
    Snf {
        d: w.a,
        u: w.u,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
    }
}

impl<T: EuclideanDomain> Work<T> {
    /// Least-norm nonzero entry in row t or column t (from index t on).
    fn min_entry_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t, self.a[t][t].euclidean_norm());
        for i in t..self.a.len() {
            let x = self.a[i][t];
            if !x.is_zero() && x.euclidean_norm() < best.2 {
                best = (i, t, x.euclidean_norm());
            }
        }
        for j in t..self.a[0].len() {
            let x = self.a[t][j];
            if !x.is_zero() && x.euclidean_norm() < best.2 {
                best = (t, j, x.euclidean_norm());
            }
        }
        (best.0, best.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{GaussianInt, ONE_PLUS_I};
    use proptest::prelude::*;

    fn check<T: EuclideanDomain>(m: &Matrix<T>) -> Snf<T> {
        let s = smith_normal_form(m);
        let rows = m.len();
        let cols = m[0].len();
        assert_eq!(mat_mul(&mat_mul(&s.u, m), &s.v), s.d);
        assert_eq!(mat_mul(&mat_mul(s.row_ops(), &s.d), s.col_ops()), *m);
        assert_eq!(mat_mul(&s.u, &s.u_inv), identity(rows));
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(cols));
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    assert!(s.d[i][j].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].div_rem(&w[0]).1.is_zero(), "{:?} does not divide {:?}", w[0], w[1]);
            }
        }
        for d in &diag {
            assert_eq!(d.normalizing_unit(), T::one());
        }
        s
    }

    #[test]
    fn integer_examples() {
        let id: Matrix<i128> = identity(2);
        assert_eq!(check(&id).d, id);
        let s = check(&vec![vec![4i128, 0], vec![0, 6]]);
        assert_eq!(s.diagonal(), vec![2, 12]);
        let s = check(&vec![vec![2i128, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        let s = check(&vec![vec![0i128, 0], vec![0, 0], vec![3, 0]]);
        assert_eq!(s.diagonal(), vec![3, 0]);
    }

    #[test]
    fn gaussian_examples() {
        let z = ONE_PLUS_I.pow(3);
        let s = check(&vec![vec![z]]);
        assert_eq!(s.diagonal(), vec![z.canonical()]);
        let m = vec![
            vec![GaussianInt::new(2, 0), GaussianInt::new(1, 1)],
            vec![GaussianInt::new(0, 3), GaussianInt::new(4, -1)],
        ];
        check(&m);
    }

    proptest! {
        #[test]
        fn integer_snf_invariants(entries in prop::collection::vec(-30i128..30, 12), rows in 1usize..5) {
            let cols = 12 / rows.max(1);
            let m: Matrix<i128> = (0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect();
            let s = check(&m);
            // fixed point
            let again = smith_normal_form(&s.d);
            prop_assert_eq!(again.d, s.d);
        }

        #[test]
        fn gaussian_snf_invariants(entries in prop::collection::vec((-9i128..9, -9i128..9), 9)) {
            let m: Matrix<GaussianInt> = (0..3)
                .map(|i| (0..3).map(|j| GaussianInt::new(entries[3 * i + j].0, entries[3 * i + j].1)).collect())
                .collect();
            let s = check(&m);
            let again = smith_normal_form(&s.d);
            prop_assert_eq!(again.d, s.d);
        }
    }
}
