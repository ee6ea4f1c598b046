//! Smith normal form over Euclidean domains, with the elementary operations
//! that realize it.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::laurent::{FpPoly, LaurentPoly, PolyMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmithError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("expected a one-variable matrix, got {0} variables")]
    NotUnivariate(usize),
    #[error("Smith form failed verification: {0}")]
    Verification(String),
}

/// Commutative ring operations needed to replay elementary operations.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
}

pub trait EuclideanDomain: Ring {
    type Size: Ord;
    /// Euclidean size of a nonzero element.
    fn size(&self) -> Self::Size;
    fn div_rem_e(&self, d: &Self) -> (Self, Self);
    /// Unit `u` such that `u * self` is normalized (positive or monic).
    fn normal_unit(&self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl EuclideanDomain for BigInt {
    type Size = BigUint;
    fn size(&self) -> BigUint {
        self.magnitude().clone()
    }
    fn div_rem_e(&self, d: &Self) -> (Self, Self) {
        // Remainder of least absolute value.
        let (q, r) = self.div_mod_floor(d);
        let twice: BigInt = &r * 2;
        if twice.abs() > d.abs() {
            (q + 1, r - d)
        } else {
            (q, r)
        }
    }
    fn normal_unit(&self) -> Self {
        if self.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

impl Ring for FpPoly {
    fn zero_like(&self) -> Self {
        FpPoly::zero(self.field())
    }
    fn one_like(&self) -> Self {
        FpPoly::one(self.field())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

impl EuclideanDomain for FpPoly {
    type Size = usize;
    fn size(&self) -> usize {
        self.degree().unwrap_or(0)
    }
    fn div_rem_e(&self, d: &Self) -> (Self, Self) {
        self.div_rem(d)
    }
    fn normal_unit(&self) -> Self {
        if self.is_zero() {
            return self.one_like();
        }
        FpPoly::constant(self.field(), self.field().inv(self.lead()) as i64)
    }
    fn is_unit(&self) -> bool {
        self.degree() == Some(0)
    }
}

impl Ring for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero(self.field(), self.nvars())
    }
    fn one_like(&self) -> Self {
        LaurentPoly::one(self.field(), self.nvars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

/// Dense matrix over a ring, carrying a zero element so empty shapes work.
#[derive(Clone, PartialEq)]
pub struct EMatrix<T: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    zero: T,
}

impl<T: Ring> fmt::Debug for EMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Ring> EMatrix<T> {
    pub fn zeros(zero: T, rows: usize, cols: usize) -> Self {
        EMatrix { rows, cols, data: vec![zero.clone(); rows * cols], zero }
    }

    pub fn identity(zero: T, n: usize) -> Self {
        let mut m = Self::zeros(zero, n, n);
        for i in 0..n {
            m.set(i, i, m.zero.one_like());
        }
        m
    }

    pub fn from_rows(zero: T, rows: Vec<Vec<T>>) -> Result<Self, SmithError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SmithError::Shape("ragged rows".into()));
        }
        let nrows = rows.len();
        Ok(EMatrix { rows: nrows, cols, data: rows.into_iter().flatten().collect(), zero })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn zero(&self) -> &T {
        &self.zero
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SmithError> {
        if self.cols != o.rows {
            return Err(SmithError::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out = Self::zeros(self.zero.clone(), self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = self.zero.clone();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero_elem() && !b.is_zero_elem() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero_elem()))
    }

    pub fn apply_row_op(&mut self, op: &ElemOp<T>) {
        match op {
            ElemOp::Swap(i, j) => {
                for c in 0..self.cols {
                    self.data.swap(i * self.cols + c, j * self.cols + c);
                }
            }
            ElemOp::AddMultiple { src, dst, factor } => {
                for c in 0..self.cols {
                    let v = self.get(*src, c);
                    if !v.is_zero_elem() {
                        let nv = self.get(*dst, c).plus(&factor.times(v));
                        self.set(*dst, c, nv);
                    }
                }
            }
            ElemOp::Scale { index, unit } => {
                for c in 0..self.cols {
                    let nv = unit.times(self.get(*index, c));
                    self.set(*index, c, nv);
                }
            }
        }
    }

    pub fn apply_col_op(&mut self, op: &ElemOp<T>) {
        match op {
            ElemOp::Swap(i, j) => {
                for r in 0..self.rows {
                    self.data.swap(r * self.cols + i, r * self.cols + j);
                }
            }
            ElemOp::AddMultiple { src, dst, factor } => {
                for r in 0..self.rows {
                    let v = self.get(r, *src);
                    if !v.is_zero_elem() {
                        let nv = self.get(r, *dst).plus(&v.times(factor));
                        self.set(r, *dst, nv);
                    }
                }
            }
            ElemOp::Scale { index, unit } => {
                for r in 0..self.rows {
                    let nv = self.get(r, *index).times(unit);
                    self.set(r, *index, nv);
                }
            }
        }
    }

    pub fn map<U: Ring>(&self, zero: U, f: impl Fn(&T) -> U) -> EMatrix<U> {
        EMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect(), zero }
    }
}

/// Elementary operation. On rows `AddMultiple` means `row dst += factor * row src`;
/// on columns `col dst += col src * factor`.
#[derive(Clone, Debug, PartialEq)]
pub enum ElemOp<T> {
    Swap(usize, usize),
    AddMultiple { src: usize, dst: usize, factor: T },
    Scale { index: usize, unit: T },
}

impl<T: Ring> ElemOp<T> {
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> ElemOp<U> {
        match self {
            ElemOp::Swap(i, j) => ElemOp::Swap(*i, *j),
            ElemOp::AddMultiple { src, dst, factor } => ElemOp::AddMultiple { src: *src, dst: *dst, factor: f(factor) },
            ElemOp::Scale { index, unit } => ElemOp::Scale { index: *index, unit: f(unit) },
        }
    }
}

/// `a * m * b = diagonal`, with `divisors` the nonzero diagonal entries.
#[derive(Clone, Debug)]
pub struct SnfResult<T: Ring> {
    pub a: EMatrix<T>,
    pub b: EMatrix<T>,
    pub diagonal: EMatrix<T>,
    pub divisors: Vec<T>,
    pub row_ops: Vec<ElemOp<T>>,
    pub col_ops: Vec<ElemOp<T>>,
}

struct Reduction<T: Ring> {
    m: EMatrix<T>,
    row_ops: Vec<ElemOp<T>>,
    col_ops: Vec<ElemOp<T>>,
}

impl<T: EuclideanDomain> Reduction<T> {
    fn row(&mut self, op: ElemOp<T>) {
        self.m.apply_row_op(&op);
        self.row_ops.push(op);
    }

    fn col(&mut self, op: ElemOp<T>) {
        self.m.apply_col_op(&op);
        self.col_ops.push(op);
    }

    /// Nonzero entry of minimal size in the trailing block, leftmost then topmost.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for j in t..self.m.cols {
            for i in t..self.m.rows {
                let v = self.m.get(i, j);
                if v.is_zero_elem() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.size() < self.m.get(bi, bj).size()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn bring_to(&mut self, t: usize, (i, j): (usize, usize)) {
        if i != t {
            self.row(ElemOp::Swap(t, i));
        }
        if j != t {
            self.col(ElemOp::Swap(t, j));
        }
    }

    fn run(&mut self) {
        let (rows, cols) = (self.m.rows, self.m.cols);
        for t in 0..rows.min(cols) {
            let Some(start) = self.min_entry(t) else { break };
            self.bring_to(t, start);
            loop {
                let pivot = self.m.get(t, t).clone();
                let mut dirty = false;
                for i in t + 1..rows {
                    let v = self.m.get(i, t).clone();
                    if v.is_zero_elem() {
                        continue;
                    }
                    let (q, r) = v.div_rem_e(&pivot);
                    if !q.is_zero_elem() {
                        self.row(ElemOp::AddMultiple { src: t, dst: i, factor: q.zero_like().minus(&q) });
                    }
                    dirty |= !r.is_zero_elem();
                }
                for j in t + 1..cols {
                    let v = self.m.get(t, j).clone();
                    if v.is_zero_elem() {
                        continue;
                    }
                    let (q, r) = v.div_rem_e(&pivot);
                    if !q.is_zero_elem() {
                        self.col(ElemOp::AddMultiple { src: t, dst: j, factor: q.zero_like().minus(&q) });
                    }
                    dirty |= !r.is_zero_elem();
                }
                if dirty {
                    let next = self.min_entry(t).expect("pivot block is nonzero");
                    self.bring_to(t, next);
                    continue;
                }
                let bad = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| {
                        let v = self.m.get(i, j);
                        !v.is_zero_elem() && !v.div_rem_e(&pivot).1.is_zero_elem()
                    })
                });
                match bad {
                    Some(i) => {
                        let one = pivot.one_like();
                        self.row(ElemOp::AddMultiple { src: i, dst: t, factor: one });
                    }
                    None => break,
                }
            }
            let u = self.m.get(t, t).normal_unit();
            if !u.minus(&u.one_like()).is_zero_elem() {
                self.row(ElemOp::Scale { index: t, unit: u });
            }
        }
    }
}

fn replay<T: Ring>(zero: &T, n: usize, ops: &[ElemOp<T>], rows: bool) -> EMatrix<T> {
    let mut m = EMatrix::identity(zero.clone(), n);
    for op in ops {
        if rows {
            m.apply_row_op(op);
        } else {
            m.apply_col_op(op);
        }
    }
    m
}

fn finish<T: Ring>(input: &EMatrix<T>, row_ops: Vec<ElemOp<T>>, col_ops: Vec<ElemOp<T>>) -> Result<SnfResult<T>, SmithError> {
    let a = replay(&input.zero, input.rows, &row_ops, true);
    let b = replay(&input.zero, input.cols, &col_ops, false);
    let diagonal = a.mul(input)?.mul(&b)?;
    if !diagonal.is_diagonal() {
        return Err(SmithError::Verification("product is not diagonal".into()));
    }
    let divisors = (0..input.rows.min(input.cols))
        .map(|i| diagonal.get(i, i).clone())
        .take_while(|d| !d.is_zero_elem())
        .collect();
    Ok(SnfResult { a, b, diagonal, divisors, row_ops, col_ops })
}

pub fn smith_normal_form<T: EuclideanDomain>(m: &EMatrix<T>) -> Result<SnfResult<T>, SmithError> {
    let mut red = Reduction { m: m.clone(), row_ops: Vec::new(), col_ops: Vec::new() };
    red.run();
    let res = finish(m, red.row_ops, red.col_ops)?;
    if res.diagonal != red.m {
        return Err(SmithError::Verification("replayed operations disagree with the reduction".into()));
    }
    for w in res.divisors.windows(2) {
        if !w[1].div_rem_e(&w[0]).1.is_zero_elem() {
            return Err(SmithError::Verification("divisibility chain broken".into()));
        }
    }
    Ok(res)
}

/// Normalized greatest common divisor.
pub fn gcd<T: EuclideanDomain>(a: &T, b: &T) -> T {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero_elem() {
        let r = a.div_rem_e(&b).1;
        a = b;
        b = r;
    }
    a.normal_unit().times(&a)
}

/// Fraction-free determinant.
pub fn determinant<T: EuclideanDomain>(m: &EMatrix<T>) -> T {
    let n = m.rows;
    let mut a = m.clone();
    let mut sign_flip = false;
    let mut prev = m.zero.one_like();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero_elem()) else { return m.zero.clone() };
        if p != k {
            a.apply_row_op(&ElemOp::Swap(p, k));
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.get(i, j).times(a.get(k, k)).minus(&a.get(i, k).times(a.get(k, j)));
                a.set(i, j, num.div_rem_e(&prev).0);
            }
            a.set(i, k, m.zero.clone());
        }
        prev = a.get(k, k).clone();
    }
    let d = if n == 0 { m.zero.one_like() } else { a.get(n - 1, n - 1).clone() };
    if sign_flip {
        d.zero_like().minus(&d)
    } else {
        d
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Generators of the determinantal ideals `I_1 .. I_{s_max}`.
pub fn determinantal_ideals<T: EuclideanDomain>(m: &EMatrix<T>, s_max: usize) -> Result<Vec<T>, SmithError> {
    if s_max > m.rows.min(m.cols) {
        return Err(SmithError::Shape(format!("s_max {s_max} exceeds matrix size")));
    }
    let mut out = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        let mut g = m.zero.clone();
        for rs in combinations(m.rows, s) {
            for cs in combinations(m.cols, s) {
                let mut minor = EMatrix::zeros(m.zero.clone(), s, s);
                for (i, &r) in rs.iter().enumerate() {
                    for (j, &c) in cs.iter().enumerate() {
                        minor.set(i, j, m.get(r, c).clone());
                    }
                }
                g = gcd(&g, &determinant(&minor));
            }
        }
        out.push(g);
    }
    Ok(out)
}

/// Cokernel `Z^rows / im m` as cyclic torsion orders plus a free rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn abelian_group_decomposition(m: &EMatrix<BigInt>) -> Result<AbelianGroup, SmithError> {
    let snf = smith_normal_form(m)?;
    let torsion = snf.divisors.iter().filter(|d| !d.is_one()).cloned().collect();
    Ok(AbelianGroup { torsion, free_rank: m.rows - snf.divisors.len() })
}

/// Smith form over `F_p[x^{±1}]`.
#[derive(Clone, Debug)]
pub struct LaurentSnf {
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub diagonal: PolyMatrix,
    /// Nonzero diagonal entries, lowest exponent zero and monic.
    pub divisors: Vec<LaurentPoly>,
    pub row_ops: Vec<ElemOp<LaurentPoly>>,
    pub col_ops: Vec<ElemOp<LaurentPoly>>,
}

fn to_ematrix(m: &PolyMatrix) -> EMatrix<LaurentPoly> {
    let zero = m.zero_poly();
    let mut out = EMatrix::zeros(zero, m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j).clone());
        }
    }
    out
}

fn to_polymatrix(m: &EMatrix<LaurentPoly>) -> PolyMatrix {
    let z = m.zero();
    PolyMatrix::from_fn(z.field(), z.nvars(), m.rows(), m.cols(), |i, j| m.get(i, j).clone())
}

fn monomial(field: crate::gf::Field, k: i64) -> LaurentPoly {
    LaurentPoly::monomial(field, vec![k], 1)
}

pub fn laurent_smith_normal_form(m: &PolyMatrix) -> Result<LaurentSnf, SmithError> {
    if m.nvars() != 1 {
        return Err(SmithError::NotUnivariate(m.nvars()));
    }
    let field = m.field();
    let lm = to_ematrix(m);
    let mut row_ops: Vec<ElemOp<LaurentPoly>> = Vec::new();
    let mut shifted = lm.clone();
    for i in 0..m.rows() {
        let low = (0..m.cols()).filter_map(|j| m.get(i, j).exponent_bounds()).map(|(lo, _)| lo[0]).min();
        if let Some(k) = low.filter(|&k| k != 0) {
            let op = ElemOp::Scale { index: i, unit: monomial(field, -k) };
            shifted.apply_row_op(&op);
            row_ops.push(op);
        }
    }
    let pm = shifted.map(FpPoly::zero(field), |p| FpPoly::from_laurent(p).expect("nonnegative exponents"));
    let snf = smith_normal_form(&pm)?;
    row_ops.extend(snf.row_ops.iter().map(|op| op.map(FpPoly::to_laurent)));
    let mut col_ops: Vec<ElemOp<LaurentPoly>> = snf.col_ops.iter().map(|op| op.map(FpPoly::to_laurent)).collect();
    for (j, d) in snf.divisors.iter().enumerate() {
        if let Some(k) = d.low_degree().filter(|&k| k > 0) {
            col_ops.push(ElemOp::Scale { index: j, unit: monomial(field, -(k as i64)) });
        }
    }
    let res = finish(&lm, row_ops, col_ops)?;
    Ok(LaurentSnf {
        a: to_polymatrix(&res.a),
        b: to_polymatrix(&res.b),
        diagonal: to_polymatrix(&res.diagonal),
        divisors: res.divisors,
        row_ops: res.row_ops,
        col_ops: res.col_ops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::laurent::{coarse_grain, parse_poly, CodeDefinition};

    fn ints(rows: &[&[i64]]) -> EMatrix<BigInt> {
        EMatrix::from_rows(BigInt::zero(), rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn integer_examples() {
        let m = ints(&[&[2, 4], &[6, 8]]);
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.divisors, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(determinantal_ideals(&m, 2).unwrap(), vec![BigInt::from(2), BigInt::from(8)]);
        let id = ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(smith_normal_form(&id).unwrap().divisors.iter().all(|d| d.is_one()));
    }

    #[test]
    fn abelian_groups() {
        let g = abelian_group_decomposition(&ints(&[&[6]])).unwrap();
        assert_eq!(g.to_string(), "Z/6");
        let g = abelian_group_decomposition(&ints(&[&[2], &[0]])).unwrap();
        assert_eq!(g.to_string(), "Z/2 + Z");
        let g = abelian_group_decomposition(&ints(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(g.to_string(), "Z^2");
    }

    #[test]
    fn companion_expansion_divisors() {
        let f = Field::new(2).unwrap();
        let s = PolyMatrix::column(f, 1, vec![parse_poly(f, 1, "1 + x + x^2").unwrap(), LaurentPoly::zero(f, 1)]);
        let cg = coarse_grain(&CodeDefinition::new(s, 1).unwrap(), &[3]).unwrap();
        let snf = laurent_smith_normal_form(&cg.sigma_x()).unwrap();
        let got: Vec<String> = snf.divisors.iter().map(|d| d.to_string()).collect();
        assert_eq!(got, vec!["1", "1 + x", "1 + x"]);
    }
}
