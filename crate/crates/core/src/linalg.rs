//! Exact linear algebra over `F_q`.
//!
//! Elimination pivots on the first nonzero entry in column order. Over `F_2`
//! rows are packed into `u64` words; other fields use byte rows and the
//! base-field tables.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{BaseField, Fq};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fq>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Fq>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fq>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let data: Vec<Fq> = rows.into_iter().flatten().collect();
        Self::new(nrows, cols, data)
    }

    pub fn random<R: Rng + ?Sized>(f: &BaseField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let q = f.order();
        Self::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(0..q) as Fq).collect())
    }

    /// Uniform invertible matrix by rejection, with its inverse.
    pub fn random_invertible<R: Rng + ?Sized>(f: &BaseField, n: usize, rng: &mut R) -> (Self, Self) {
        loop {
            let m = Self::random(f, n, n, rng);
            if let Ok(inv) = m.inverse(f) {
                return (m, inv);
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fq] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fq) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fq> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, f: &BaseField, v: &[Fq]) -> Vec<Fq> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn mul(&self, f: &BaseField, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn rank(&self, f: &BaseField) -> usize {
        let mut m = self.clone();
        rref(f, &mut m).len()
    }

    pub fn inverse(&self, f: &BaseField) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::SingularMatrix);
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = rref(f, &mut aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(inv)
    }
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(f: &BaseField, m: &mut Matrix) -> Vec<usize> {
    if f.order() == 2 {
        let mut bits = BitMatrix::from_matrix(m);
        let pivots = bits.rref();
        *m = bits.to_matrix();
        return pivots;
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m.get(i, c) != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m.get(r, c)).unwrap();
        for j in c..cols {
            let v = f.mul(m.get(r, j), inv);
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c);
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{ v : M v = 0 }`; its size is `cols - rank`.
pub fn nullspace(f: &BaseField, m: &Matrix) -> Vec<Vec<Fq>> {
    let mut reduced = m.clone();
    let pivots = rref(f, &mut reduced);
    kernel_from_rref(f, &reduced, &pivots, m.cols)
}

fn kernel_from_rref(f: &BaseField, reduced: &Matrix, pivots: &[usize], cols: usize) -> Vec<Vec<Fq>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(reduced.get(row, free));
            }
            v
        })
        .collect()
}

/// `matrix * s = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Fq>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    NoSolution,
    Solution { particular: Vec<Fq>, nullspace: Vec<Vec<Fq>> },
}

impl SolveOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, SolveOutcome::Solution { .. })
    }

    /// Uniform element of the solution set.
    pub fn sample<R: Rng + ?Sized>(&self, f: &BaseField, rng: &mut R) -> Option<Vec<Fq>> {
        let SolveOutcome::Solution { particular, nullspace } = self else {
            return None;
        };
        let mut s = particular.clone();
        for v in nullspace {
            let c = rng.gen_range(0..f.order()) as Fq;
            if c != 0 {
                for (x, &y) in s.iter_mut().zip(v) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
        }
        Some(s)
    }

    /// Every solution, provided there are at most `limit` of them.
    pub fn enumerate(&self, f: &BaseField, limit: u128) -> Result<Vec<Vec<Fq>>> {
        let SolveOutcome::Solution { particular, nullspace } = self else {
            return Ok(Vec::new());
        };
        let q = f.order() as u128;
        let count = q
            .checked_pow(nullspace.len() as u32)
            .filter(|&c| c <= limit)
            .ok_or(Error::SolutionSpaceTooLarge(nullspace.len()))?;
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let mut s = particular.clone();
            let mut rest = idx;
            for v in nullspace {
                let c = (rest % q) as Fq;
                rest /= q;
                if c != 0 {
                    for (x, &y) in s.iter_mut().zip(v) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
            }
            out.push(s);
        }
        Ok(out)
    }
}

/// Gaussian elimination on `[matrix | rhs]`. Free variables are set to zero
/// in the particular solution.
pub fn solve_linear(f: &BaseField, sys: &LinearSystem) -> SolveOutcome {
    let (rows, cols) = (sys.matrix.rows, sys.matrix.cols);
    assert_eq!(sys.rhs.len(), rows, "right-hand side has wrong length");
    let mut aug = Matrix::zeros(rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            aug.set(i, j, sys.matrix.get(i, j));
        }
        aug.set(i, cols, sys.rhs[i]);
    }
    let pivots = rref(f, &mut aug);
    if pivots.last() == Some(&cols) {
        return SolveOutcome::NoSolution;
    }
    let mut particular = vec![0; cols];
    for (row, &pc) in pivots.iter().enumerate() {
        particular[pc] = aug.get(row, cols);
    }
    let nullspace = kernel_from_rref(f, &aug, &pivots, cols);
    SolveOutcome::Solution { particular, nullspace }
}

/// Dense `F_2` matrix with rows packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let mut b = Self::zeros(m.rows, m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m.get(i, j) & 1 == 1 {
                    b.set(i, j, true);
                }
            }
        }
        b
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j) as Fq);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize, from_word: usize) {
        let w = self.words;
        for k in from_word..w {
            let v = self.data[src * w + k];
            self.data[dst * w + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let w = self.words;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            if p != r {
                self.swap_rows(p, r);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i, c / 64);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}
