//! Laurent polynomials over F_p in D variables, matrices of them, and the
//! module-theoretic description of translation-invariant codes.

mod code;
pub mod groebner;
mod parse;
mod univariate;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gf::{Field, GfError, Matrix};

pub use code::{
    check_isotropy, coarse_grain, coarse_index_map, exactness_check, excitation_map, instantiate_torus,
    CodeDefinition,
};
pub use groebner::{module_kernel, module_member, ModuleBasis};
pub use parse::{parse_poly, ParseError};
pub use univariate::FpPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Code(#[from] crate::codeanalysis::CodeError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ring mismatch: {0}")]
    Ring(String),
    #[error("stabilizer map is not isotropic: columns {} and {} do not commute", .0 + 1, .1 + 1)]
    NotIsotropic(usize, usize),
    #[error("Groebner operations support at most 3 variables, got {0}")]
    TooManyVariables(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Exponent vector.
pub type Exponent = Vec<i64>;

/// A Laurent polynomial with coefficients in F_p; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Exponent, u32>,
}

/// Order used for printing: by total absolute degree, then descending lex.
fn display_order(a: &Exponent, b: &Exponent) -> Ordering {
    let ga: i64 = a.iter().map(|e| e.abs()).sum();
    let gb: i64 = b.iter().map(|e| e.abs()).sum();
    ga.cmp(&gb).then_with(|| b.cmp(a))
}

pub(crate) fn var_name(nvars: usize, i: usize) -> String {
    if nvars <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl LaurentPoly {
    pub fn zero(field: Field, nvars: usize) -> Self {
        LaurentPoly { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, nvars: usize, c: i64) -> Self {
        Self::monomial(field, vec![0; nvars], c)
    }

    pub fn one(field: Field, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    pub fn monomial(field: Field, exp: Exponent, c: i64) -> Self {
        let nvars = exp.len();
        let mut p = Self::zero(field, nvars);
        let c = field.reduce(c);
        if c != 0 {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `x_i`.
    pub fn var(field: Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(field, e, 1)
    }

    pub fn from_terms(field: Field, nvars: usize, terms: impl IntoIterator<Item = (Exponent, i64)>) -> Self {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, field.reduce(c));
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&vec![0; self.nvars]) == Some(&1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[i64]) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(&vec![0; self.nvars])
    }

    /// A single nonzero term `c x^e`, i.e. a unit of the ring.
    pub fn as_unit(&self) -> Option<(Exponent, u32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, &c)| (e.clone(), c))
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: u32) {
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Self) {
        assert!(
            self.field == other.field && self.nvars == other.nvars,
            "Laurent polynomials over different rings"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, s: u32) -> Self {
        let f = self.field;
        let s = s % f.p();
        if s == 0 {
            return Self::zero(f, self.nvars);
        }
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), f.mul(c, s))).collect();
        LaurentPoly { field: f, nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let f = self.field;
        let mut out = Self::zero(f, self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(ca, cb));
            }
        }
        out
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c))
            .collect();
        LaurentPoly { field: self.field, nvars: self.nvars, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.field, self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Negates every exponent vector.
    pub fn antipode(&self) -> Self {
        let terms = self.terms.iter().map(|(e, &c)| (e.iter().map(|a| -a).collect(), c)).collect();
        LaurentPoly { field: self.field, nvars: self.nvars, terms }
    }

    /// Value at `x_1 = ... = x_D = 1`.
    pub fn eval_ones(&self) -> u32 {
        let f = self.field;
        self.terms.values().fold(0, |acc, &c| f.add(acc, c))
    }

    /// Applies an exponent map `e -> g(e)` to every term.
    pub fn map_exponents(&self, nvars: usize, mut g: impl FnMut(&[i64]) -> Exponent) -> Self {
        let mut out = Self::zero(self.field, nvars);
        for (e, &c) in &self.terms {
            out.add_term(g(e), c);
        }
        out
    }

    /// Componentwise minimum and maximum exponents, if nonzero.
    pub fn exponent_bounds(&self) -> Option<(Exponent, Exponent)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.clone(), first.clone());
        for e in it {
            for i in 0..self.nvars {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        Some((lo, hi))
    }

    /// Spread `max exponent − min exponent` summed over variables; the size
    /// used for Euclidean-style reductions in one variable.
    pub fn spread(&self) -> Option<i64> {
        self.exponent_bounds().map(|(lo, hi)| hi.iter().zip(&lo).map(|(h, l)| h - l).sum())
    }

    pub fn is_self_conjugate(&self) -> bool {
        *self == self.antipode()
    }

    pub fn parse(field: Field, nvars: usize, s: &str) -> Result<Self, ParseError> {
        parse_poly(field, nvars, s)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| display_order(a, b));
        for (k, e) in keys.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let c = self.terms[e];
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, &a)| {
                    let v = var_name(self.nvars, i);
                    if a == 1 {
                        v
                    } else {
                        format!("{v}^{a}")
                    }
                })
                .collect();
            match (c, factors.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", factors.join("*"))?,
                (_, false) => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Coefficient of 1 in `Σ antipode(v_i) w_i`.
pub fn dot_product(v: &[LaurentPoly], w: &[LaurentPoly]) -> Result<u32, LaurentError> {
    if v.len() != w.len() {
        return Err(LaurentError::Shape(format!("vectors of length {} and {}", v.len(), w.len())));
    }
    let Some(first) = v.first() else { return Ok(0) };
    let f = first.field;
    let mut acc = 0;
    for (a, b) in v.iter().zip(w) {
        for (e, &ca) in &a.terms {
            if let Some(&cb) = b.terms.get(e) {
                acc = f.add(acc, f.mul(ca, cb));
            }
        }
    }
    Ok(acc)
}

/// Dense matrix of Laurent polynomials over a common ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    field: Field,
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl PolyMatrix {
    pub fn zeros(field: Field, nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { field, nvars, rows, cols, entries: vec![LaurentPoly::zero(field, nvars); rows * cols] }
    }

    pub fn identity(field: Field, nvars: usize, n: usize) -> Self {
        let mut m = Self::zeros(field, nvars, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(field, nvars));
        }
        m
    }

    pub fn from_rows(field: Field, nvars: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self, LaurentError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LaurentError::Shape("ragged rows".into()));
        }
        if rows.iter().flatten().any(|p| p.field != field || p.nvars != nvars) {
            return Err(LaurentError::Ring("entries over different rings".into()));
        }
        let nrows = rows.len();
        Ok(PolyMatrix { field, nvars, rows: nrows, cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Parses a grid of expression strings.
    pub fn parse(field: Field, nvars: usize, rows: &[Vec<String>]) -> Result<Self, LaurentError> {
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, s)| parse_poly(field, nvars, s).map_err(|e| e.at_entry(r, c)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(field, nvars, parsed)
    }

    pub fn from_fn(
        field: Field,
        nvars: usize,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        PolyMatrix { field, nvars, rows, cols, entries }
    }

    /// Column vector.
    pub fn column(field: Field, nvars: usize, v: Vec<LaurentPoly>) -> Self {
        let rows = v.len();
        PolyMatrix { field, nvars, rows, cols: 1, entries: v }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LaurentPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn col(&self, c: usize) -> Vec<LaurentPoly> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<LaurentPoly> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn zero_poly(&self) -> LaurentPoly {
        LaurentPoly::zero(self.field, self.nvars)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.nvars, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Antipode of the transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.field, self.nvars, self.cols, self.rows, |r, c| self.get(c, r).antipode())
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        let entries: Vec<LaurentPoly> = self.entries.iter().map(f).collect();
        let nvars = entries.first().map_or(self.nvars, |p| p.nvars);
        PolyMatrix { field: self.field, nvars, rows: self.rows, cols: self.cols, entries }
    }

    fn check_ring(&self, other: &Self) -> Result<(), LaurentError> {
        if self.field != other.field || self.nvars != other.nvars {
            return Err(LaurentError::Ring("matrices over different rings".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(LaurentError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.field, self.nvars, self.rows, other.cols, |r, c| {
            let mut acc = LaurentPoly::zero(self.field, self.nvars);
            for k in 0..self.cols {
                let a = self.get(r, k);
                let b = other.get(k, c);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LaurentError::Shape("shape mismatch in add".into()));
        }
        Ok(Self::from_fn(self.field, self.nvars, self.rows, self.cols, |r, c| self.get(r, c).add(other.get(r, c))))
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(LaurentError::Shape("row count mismatch in hstack".into()));
        }
        Ok(Self::from_fn(self.field, self.nvars, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(LaurentError::Shape("column count mismatch in vstack".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(PolyMatrix { field: self.field, nvars: self.nvars, rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(self.field, self.nvars, rows.len(), self.cols, |r, c| self.get(rows[r], c).clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.field, self.nvars, self.rows, cols.len(), |r, c| self.get(r, cols[c]).clone())
    }

    /// Evaluation at `x_1 = ... = x_D = 1`.
    pub fn eval_ones(&self) -> Matrix {
        Matrix::from_fn(self.field, self.rows, self.cols, |r, c| self.get(r, c).eval_ones())
    }

    /// The matrix `[[0, I], [-I, 0]]` of size 2q.
    pub fn lambda(field: Field, nvars: usize, q: usize) -> Self {
        Self::from_fn(field, nvars, 2 * q, 2 * q, |r, c| {
            if r < q && c == r + q {
                LaurentPoly::one(field, nvars)
            } else if r >= q && c + q == r {
                LaurentPoly::constant(field, nvars, -1)
            } else {
                LaurentPoly::zero(field, nvars)
            }
        })
    }

    /// The F_p matrix of the induced map on the torus `Z_{L_1} x ... x Z_{L_D}`.
    /// Row index `site * rows + r`, column index `site * cols + c`, sites in
    /// mixed radix `a_1 + L_1 (a_2 + L_2 (...))`.
    pub fn instantiate(&self, dims: &[usize]) -> Result<Matrix, LaurentError> {
        if dims.len() != self.nvars {
            return Err(LaurentError::Shape(format!("{} torus dimensions for {} variables", dims.len(), self.nvars)));
        }
        if dims.contains(&0) {
            return Err(LaurentError::Invalid("torus dimensions must be positive".into()));
        }
        let f = self.field;
        let sites: usize = dims.iter().product();
        let mut m = Matrix::zeros(f, sites * self.rows, sites * self.cols);
        for s_in in 0..sites {
            let coords = site_coords(s_in, dims);
            for r in 0..self.rows {
                for c in 0..self.cols {
                    for (e, coef) in self.get(r, c).terms() {
                        let shifted: Vec<i64> = coords.iter().zip(e).map(|(&a, &b)| a as i64 + b).collect();
                        let s_out = site_index(&shifted, dims);
                        let (i, j) = (s_out * self.rows + r, s_in * self.cols + c);
                        let v = f.add(m.get(i, j), coef);
                        m.set(i, j, v);
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Mixed-radix coordinates of a site index.
pub fn site_coords(mut s: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&l| {
            let a = s % l;
            s /= l;
            a
        })
        .collect()
}

/// Mixed-radix site index of (possibly out-of-range) coordinates, reduced periodically.
pub fn site_index(coords: &[i64], dims: &[usize]) -> usize {
    let mut idx = 0usize;
    for (&a, &l) in coords.iter().zip(dims).rev() {
        idx = idx * l + a.rem_euclid(l as i64) as usize;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    #[test]
    fn antipode_examples() {
        let f = f2();
        assert!(LaurentPoly::one(f, 2).antipode().is_one());
        let p = parse_poly(f, 2, "x + y^2").unwrap();
        assert_eq!(p.antipode(), parse_poly(f, 2, "x^-1 + y^-2").unwrap());
    }

    #[test]
    fn dot_product_examples() {
        let f = f2();
        let one = vec![LaurentPoly::one(f, 2)];
        assert_eq!(dot_product(&one, &one).unwrap(), 1);
        let x = vec![LaurentPoly::var(f, 2, 0)];
        let y = vec![LaurentPoly::var(f, 2, 1)];
        assert_eq!(dot_product(&x, &x).unwrap(), 1);
        assert_eq!(dot_product(&x, &y).unwrap(), 0);
        assert!(dot_product(&x, &[]).is_err());
    }

    #[test]
    fn canonical_display() {
        let f = f2();
        let p = parse_poly(f, 2, "x*y^-1 + x + 1").unwrap();
        assert_eq!(p.to_string(), "1 + x + x*y^-1");
        let f3 = Field::new(3).unwrap();
        assert_eq!(parse_poly(f3, 1, "-x + 1").unwrap().to_string(), "1 + 2*x");
        assert_eq!(LaurentPoly::zero(f, 1).to_string(), "0");
    }

    #[test]
    fn instantiate_shift() {
        let f = f2();
        let m = PolyMatrix::from_rows(f, 1, vec![vec![LaurentPoly::var(f, 1, 0)]]).unwrap();
        let inst = m.instantiate(&[3]).unwrap();
        // x sends site 0 to site 1.
        assert_eq!(inst.get(1, 0), 1);
        assert_eq!(inst.get(0, 2), 1);
    }
}
