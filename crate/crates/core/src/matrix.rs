//! Exact rational matrices, kernels and polynomial determinants.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Rational;

/// Sparse rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = ExactMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for ((i, j), v) in &self.entries {
            d[*i][*j] = v.clone();
        }
        d
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Rational::zero(); self.rows];
        for ((i, j), a) in &self.entries {
            out[*i] += a * &v[*j];
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self.to_dense()).1.len()
    }
}

/// Reduced row echelon form; returns the reduced rows and pivot columns.
pub fn rref(mut a: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Kernel basis: one vector per non-pivot column, with a 1 in that column.
pub fn nullspace(m: &ExactMatrix) -> Vec<Vec<Rational>> {
    let cols = m.cols();
    let (red, pivots) = rref(m.to_dense());
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Determinant of a square grid of polynomials by memoised cofactor expansion.
pub fn poly_determinant(grid: &[Vec<Poly>]) -> Poly {
    let n = grid.len();
    assert!(grid.iter().all(|r| r.len() == n), "matrix must be square");
    assert!(n <= 16, "cofactor expansion limited to 16x16");
    let nvars = grid
        .iter()
        .flatten()
        .next()
        .map_or(0, |p| p.nvars());
    if n == 0 {
        return Poly::one(nvars);
    }
    // minors[mask]: determinant of the last |mask| rows restricted to the columns in mask
    let mut minors: Vec<Option<Poly>> = vec![None; 1 << n];
    minors[0] = Some(Poly::one(nvars));
    let mut masks: Vec<usize> = (1..(1usize << n)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = Poly::zero(nvars);
        let mut pos = 0;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let entry = &grid[row][j];
            if !entry.is_zero() {
                let sub = minors[mask & !(1 << j)].as_ref().unwrap();
                if !sub.is_zero() {
                    let t = entry * sub;
                    acc = if pos % 2 == 0 { &acc + &t } else { &acc - &t };
                }
            }
            pos += 1;
        }
        minors[mask] = Some(acc);
    }
    minors[(1 << n) - 1].take().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(nullspace(&ExactMatrix::identity(3)).is_empty());
        assert_eq!(nullspace(&ExactMatrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn determinants() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let z = Poly::zero(2);
        let d = poly_determinant(&[vec![x.clone(), z.clone()], vec![z, y.clone()]]);
        assert_eq!(d, &x * &y);
        let d = poly_determinant(&[vec![x.clone(), y.clone()], vec![x, y]]);
        assert!(d.is_zero());
        let c = |v| Poly::constant(2, rat(v));
        let d = poly_determinant(&[
            vec![c(2), c(0), c(1)],
            vec![c(1), c(3), c(2)],
            vec![c(1), c(1), c(2)],
        ]);
        assert_eq!(d.as_constant(), Some(rat(6)));
    }
}
