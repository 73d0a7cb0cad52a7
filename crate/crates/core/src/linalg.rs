//! Dense integer matrices: products, determinants, unimodular inverses and
//! Smith normal form with column transforms.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// A dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[i64]>::to_vec).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * k).collect() }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i128 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| self[(i, j)] as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Ratio<i128>>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| Ratio::from_integer(self[(i, j)] as i128)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&i| a[i][col] != Ratio::from_integer(0)) else {
                continue;
            };
            a.swap(piv, rank);
            let p = a[rank][col];
            for i in 0..self.rows {
                if i != rank && a[i][col] != Ratio::from_integer(0) {
                    let f = a[i][col] / p;
                    for j in col..self.cols {
                        let t = a[rank][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse of a unimodular matrix, `None` if the determinant is not ±1.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.is_square() || self.det().abs() != 1 {
            return None;
        }
        let n = self.rows;
        let zero = Ratio::from_integer(0i128);
        let mut a: Vec<Vec<Ratio<i128>>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            Ratio::from_integer(self[(i, j)] as i128)
                        } else {
                            Ratio::from_integer((j - n == i) as i128)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&i| a[i][col] != zero)?;
            a.swap(piv, col);
            let p = a[col][col];
            for x in a[col].iter_mut() {
                *x /= p;
            }
            for i in 0..n {
                if i != col && a[i][col] != zero {
                    let f = a[i][col];
                    for j in 0..2 * n {
                        let t = a[col][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = a[i][n + j];
                if !x.is_integer() {
                    return None;
                }
                out[(i, j)] = i64::try_from(x.to_integer()).ok()?;
            }
        }
        Some(out)
    }

    /// Smallest `k ≥ 1` with `self^k = I`, searching up to `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let id = IntMatrix::identity(self.rows);
        let mut p = self.clone();
        for k in 1..=bound {
            if p == id {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }

    pub fn pow(&self, k: usize) -> IntMatrix {
        let mut out = IntMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `U·A·V = diag(d_1, …, d_n)` of a square matrix, keeping
/// the column transform `V` and its inverse. Diagonal entries are
/// non-negative and each divides the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<i128>,
    pub v: Vec<Vec<i128>>,
    pub v_inv: Vec<Vec<i128>>,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    assert!(m.is_square(), "smith form implemented for square matrices");
    let n = m.rows();
    let mut a: Vec<Vec<i128>> = m.to_rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut v_inv = v.clone();

    // column operation helpers keep V and V^{-1} in sync
    fn swap_cols(a: &mut [Vec<i128>], v: &mut [Vec<i128>], v_inv: &mut [Vec<i128>], i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        v_inv.swap(i, j);
    }
    // col_i += k * col_j
    fn add_col(a: &mut [Vec<i128>], v: &mut [Vec<i128>], v_inv: &mut [Vec<i128>], i: usize, j: usize, k: i128) {
        for row in a.iter_mut() {
            row[i] += k * row[j];
        }
        for row in v.iter_mut() {
            row[i] += k * row[j];
        }
        let ri = v_inv[i].clone();
        for (x, y) in v_inv[j].iter_mut().zip(ri) {
            *x -= k * y;
        }
    }

    for t in 0..n {
        loop {
            // pivot: smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(pi, t);
            if pj != t {
                swap_cols(&mut a, &mut v, &mut v_inv, pj, t);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..n {
                let f = a[i][t] / p;
                if f != 0 {
                    let rt = a[t].clone();
                    for (x, y) in a[i].iter_mut().zip(rt) {
                        *x -= f * y;
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let f = a[t][j] / p;
                if f != 0 {
                    add_col(&mut a, &mut v, &mut v_inv, j, t, -f);
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    let ri = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(ri) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for row in a.iter_mut() {
                row[t] = -row[t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
            for x in v_inv[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    SmithForm { diagonal: (0..n).map(|i| a[i][i]).collect(), v, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.det(), 1);
        let inv = m.inverse_unimodular().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = IntMatrix::from_rows(&[vec![2, 4], vec![1, 2]]);
        assert_eq!(sing.det(), 0);
        assert_eq!(sing.rank(), 1);
        assert!(IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).inverse_unimodular().is_none());
    }

    #[test]
    fn smith_of_cycle_matrix() {
        // q·P - I for the 3-cycle P and q = 2 has invariant factors 1, 1, 7
        let p = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let a = p.scale(2).sub(&IntMatrix::identity(3));
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, vec![1, 1, 7]);
        assert_eq!(a.det().abs(), 7);
    }

    #[test]
    fn smith_transforms_are_inverse() {
        let a = IntMatrix::from_rows(&[vec![4, 6, 2], vec![2, -8, 10], vec![0, 3, 9]]);
        let s = smith_normal_form(&a);
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let x: i128 = (0..n).map(|k| s.v[i][k] * s.v_inv[k][j]).sum();
                assert_eq!(x, (i == j) as i128);
            }
        }
        let prod: i128 = s.diagonal.iter().product();
        assert_eq!(prod, a.det().abs());
        for w in s.diagonal.windows(2) {
            assert!(w[0] == 0 || w[1] % w[0] == 0);
        }
    }
}
