//! Linear algebra over a prime field `F_p`.

/// Row-reduces `rows` in place to reduced echelon form; returns pivot columns.
pub fn row_reduce(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] % p != 0) else {
            continue;
        };
        rows.swap(piv, r);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                let (top, rest) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, p).len()
}

/// Basis of the right kernel `{x : M x = 0}` of a matrix given by rows.
pub fn kernel(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = (p - row[f] % p) % p;
            }
            v
        })
        .collect()
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::mod_pow(a % p, p - 2, p)
}

/// Expresses vectors in a fixed basis by solving linear systems.
#[derive(Clone, Debug)]
pub struct Coordinates {
    p: u64,
    dim: usize,
    // reduced echelon form of [basis^T | I]
    echelon: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    ambient: usize,
}

impl Coordinates {
    /// `basis` must be linearly independent.
    pub fn new(basis: &[Vec<u64>], p: u64) -> Self {
        let dim = basis.len();
        let ambient = basis.first().map_or(0, Vec::len);
        // rows of the augmented matrix: coordinate index i of ambient space,
        // columns: basis vectors then an identity block
        let mut aug: Vec<Vec<u64>> = (0..ambient)
            .map(|i| {
                let mut row: Vec<u64> = basis.iter().map(|b| b[i] % p).collect();
                row.extend((0..ambient).map(|j| (i == j) as u64));
                row
            })
            .collect();
        let pivots = row_reduce(&mut aug, p);
        assert!(pivots.iter().take(dim).enumerate().all(|(i, &c)| i == c), "basis is dependent");
        Coordinates { p, dim, echelon: aug, pivots, ambient }
    }

    /// Coordinates of `v`, or `None` if `v` is outside the span.
    pub fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        // apply the recorded row operations: each echelon row is a combination
        // (given by its identity block) of ambient coordinates
        let mut out = vec![0u64; self.dim];
        for (row, &pc) in self.echelon.iter().zip(&self.pivots) {
            let val = row[self.dim..]
                .iter()
                .zip(v)
                .fold(0u64, |acc, (a, b)| (acc + a * (b % p)) % p);
            if pc < self.dim {
                out[pc] = val;
            } else if val != 0 {
                return None;
            }
        }
        // rows with pivots outside the basis block that were not produced
        // (rank deficiency of the identity block) cannot occur
        debug_assert!(self.pivots.len() <= self.ambient);
        Some(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_dimension() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let k = kernel(&m, 3, 2);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![1, 1, 1]);
    }

    #[test]
    fn coordinates_round_trip() {
        let p = 5;
        let basis = vec![vec![1, 2, 0, 1], vec![0, 1, 3, 4]];
        let coords = Coordinates::new(&basis, p);
        let v: Vec<u64> = (0..4).map(|i| (3 * basis[0][i] + 2 * basis[1][i]) % p).collect();
        assert_eq!(coords.solve(&v), Some(vec![3, 2]));
        assert_eq!(coords.solve(&[1, 0, 0, 0]), None);
    }
}
