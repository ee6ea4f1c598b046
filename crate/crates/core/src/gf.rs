//! Prime field arithmetic and dense matrices over F_p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus {0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic context for F_p. Values are represented as `u32` in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u64) -> Result<Self, GfError> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(Field { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + self.p as u64 - b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }
}

/// A single element of F_p carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    p: u32,
}

impl FieldElement {
    pub fn new(value: i64, p: u64) -> Result<Self, GfError> {
        let f = Field::new(p)?;
        Ok(FieldElement { value: f.reduce(value), p: f.p() })
    }

    pub(crate) fn from_field(f: Field, value: u32) -> Self {
        FieldElement { value: value % f.p(), p: f.p() }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn field(self) -> Field {
        Field { p: self.p }
    }

    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| FieldElement { value: self.field().inv(self.value), p: self.p })
    }

    fn check(self, other: Self) {
        assert_eq!(self.p, other.p, "field element modulus mismatch");
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: Self) -> Self {
        self.check(o);
        FieldElement { value: self.field().add(self.value, o.value), p: self.p }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: Self) -> Self {
        self.check(o);
        FieldElement { value: self.field().sub(self.value, o.value), p: self.p }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: Self) -> Self {
        self.check(o);
        FieldElement { value: self.field().mul(self.value, o.value), p: self.p }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> Self {
        FieldElement { value: self.field().neg(self.value), p: self.p }
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over F_{} ({}x{})", self.field.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GfError::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % field.p);
            }
        }
        Matrix { field, rows, cols, data }
    }

    /// Column matrix from a vector.
    pub fn column(field: Field, v: &[u32]) -> Self {
        Self::from_fn(field, v.len(), 1, |r, _| v[r])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn modulus(&self) -> u32 {
        self.field.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn element(&self, r: usize, c: usize) -> FieldElement {
        FieldElement::from_field(self.field, self.get(r, c))
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn check_field(&self, other: &Matrix) -> Result<(), GfError> {
        if self.field != other.field {
            return Err(GfError::ModulusMismatch(self.field.p, other.field.p));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, GfError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(GfError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let p = f.p as u64;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * other.get(k, c) as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = v as u32;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, GfError> {
        if v.len() != self.cols {
            return Err(GfError::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, GfError> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(GfError::Dimension("shape mismatch in add".into()));
        }
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { field: f, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, GfError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(GfError::Dimension("row count mismatch in hstack".into()));
        }
        Ok(Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        }))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, GfError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(GfError::Dimension("column count mismatch in vstack".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form. Pivots are taken as the first nonzero entry
    /// scanning columns left to right, rows top to bottom.
    pub fn rref(&self) -> Rref {
        if self.field.p == 2 {
            self.rref_gf2()
        } else {
            self.rref_generic()
        }
    }

    /// Field-generic elimination; also used to cross-check the packed F_2 path.
    pub fn rref_generic(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(r) = (prow..m.rows).find(|&r| m.get(r, c) != 0) else { continue };
            m.swap_rows(prow, r);
            let inv = f.inv(m.get(prow, c));
            for k in c..m.cols {
                let v = f.mul(m.get(prow, k), inv);
                m.set(prow, k, v);
            }
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let factor = m.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in c..m.cols {
                    let v = f.sub(m.get(r, k), f.mul(factor, m.get(prow, k)));
                    m.data[r * m.cols + k] = v;
                }
            }
            pivots.push(c);
            prow += 1;
        }
        let rank = pivots.len();
        Rref { matrix: m, pivots, rank }
    }

    fn rref_gf2(&self) -> Rref {
        let mut bits = BitRows::from_matrix(self);
        let pivots = bits.eliminate();
        let rank = pivots.len();
        Rref { matrix: bits.to_matrix(self.field), pivots, rank }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Columns form a basis of the right null space. Free variables are set to
    /// unit vectors in increasing order.
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field;
        let Rref { matrix: r, pivots, .. } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, j, f.neg(r.get(i, fc)));
            }
        }
        k
    }

    /// Some solution of `self * x = b` with free variables set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, GfError> {
        if b.len() != self.rows {
            return Err(GfError::Dimension(format!("right-hand side has {} entries, expected {}", b.len(), self.rows)));
        }
        let aug = self.hstack(&Matrix::column(self.field, b))?;
        let Rref { matrix: r, pivots, .. } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n)).ok()?;
        let Rref { matrix: r, pivots, .. } = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        Some(Matrix::from_fn(self.field, n, n, |i, j| r.get(i, n + j)))
    }
}

/// Rows of an F_2 matrix packed into 64-bit words.
struct BitRows {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn from_matrix(m: &Matrix) -> Self {
        let words = m.cols.div_ceil(64);
        let mut data = vec![0u64; m.rows * words];
        for r in 0..m.rows {
            for c in 0..m.cols {
                if m.get(r, c) & 1 == 1 {
                    data[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        BitRows { rows: m.rows, cols: m.cols, words, data }
    }

    #[inline]
    fn bit(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn eliminate(&mut self) -> Vec<usize> {
        let w = self.words;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..self.cols {
            if prow == self.rows {
                break;
            }
            let Some(r) = (prow..self.rows).find(|&r| self.bit(r, c)) else { continue };
            if r != prow {
                for k in 0..w {
                    self.data.swap(r * w + k, prow * w + k);
                }
            }
            let start = c / 64;
            for r in 0..self.rows {
                if r != prow && self.bit(r, c) {
                    for k in start..w {
                        let v = self.data[prow * w + k];
                        self.data[r * w + k] ^= v;
                    }
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    fn to_matrix(&self, field: Field) -> Matrix {
        Matrix::from_fn(field, self.rows, self.cols, |r, c| self.bit(r, c) as u32)
    }
}
