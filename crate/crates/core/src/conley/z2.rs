//! Dense matrices over Z2.
//!
//! The decompositions handled here have at most a few dozen generators, so a
//! byte per entry keeps the code obvious.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

/// An element of Z2. `One` is the isomorphism between one-dimensional spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Z2 {
    Zero,
    One,
}

impl Z2 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Z2::One
        } else {
            Z2::Zero
        }
    }

    pub fn is_one(self) -> bool {
        self == Z2::One
    }
}

impl From<Z2> for u8 {
    fn from(v: Z2) -> u8 {
        v as u8
    }
}

impl TryFrom<u8> for Z2 {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(Z2::Zero),
            1 => Ok(Z2::One),
            _ => Err(format!("{v} is not an element of Z2")),
        }
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, rhs: Z2) -> Z2 {
        Z2::from_bool(self != rhs)
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        Z2::from_bool(self.is_one() && rhs.is_one())
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Z2::Zero => f.write_str("0"),
            Z2::One => f.write_str("iso"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % 2 == 1);
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

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&b| !b)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows)
            .flat_map(move |r| (0..self.cols).map(move |c| (r, c)))
            .filter(move |&(r, c)| self.get(r, c))
    }

    pub fn mul(&self, rhs: &Z2Matrix) -> Z2Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in Z2 product");
        let mut out = Z2Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if !self.get(i, k) {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs.get(k, j) {
                        let idx = i * out.cols + j;
                        out.data[idx] ^= true;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Z2Matrix) -> Z2Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Z2Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Z2Matrix {
        let mut out = Z2Matrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(row, p);
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_row_into(row, r);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for c in 0..self.cols {
            let v = self.data[src * self.cols + c];
            self.data[dst * self.cols + c] ^= v;
        }
    }

    /// Basis of the null space `{v : A v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![false; self.cols];
                v[f] = true;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = m.get(r, f);
                }
                v
            })
            .collect()
    }

    /// One solution of `A x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Z2Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.row_reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }

    pub fn apply(&self, v: &[bool]) -> Vec<bool> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| self.get(r, c) && v[c]).count() % 2 == 1)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_tables() {
        assert_eq!(Z2::One + Z2::One, Z2::Zero);
        assert_eq!(Z2::One + Z2::Zero, Z2::One);
        assert_eq!(Z2::One * Z2::One, Z2::One);
        assert_eq!(Z2::One * Z2::Zero, Z2::Zero);
    }

    #[test]
    fn rank_and_kernel() {
        let m = Z2Matrix::from_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], vec![true, true, true]);
        assert!(m.apply(&ker[0]).iter().all(|&b| !b));
        assert_eq!(Z2Matrix::identity(4).rank(), 4);
        assert_eq!(Z2Matrix::zeros(3, 2).rank(), 0);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Z2Matrix::from_rows(&[&[1, 1], &[1, 1]]);
        assert!(m.solve(&[true, false]).is_none());
        let x = m.solve(&[true, true]).unwrap();
        assert_eq!(m.apply(&x), vec![true, true]);
    }

    #[test]
    fn product_squares_nilpotent() {
        let d = Z2Matrix::from_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let d2 = d.mul(&d);
        assert_eq!(d2.nonzero_entries().collect::<Vec<_>>(), vec![(0, 2)]);
        assert!(d2.mul(&d).is_zero());
    }
}
