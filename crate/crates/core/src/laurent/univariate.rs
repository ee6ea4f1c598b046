use std::fmt;

use super::LaurentPoly;
use crate::gf::Field;

/// Dense univariate polynomial over F_p, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    field: Field,
    coeffs: Vec<u32>,
}

impl FpPoly {
    pub fn zero(field: Field) -> Self {
        FpPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(field: Field, c: i64) -> Self {
        Self::from_coeffs(field, vec![field.reduce(c)])
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field, 1)
    }

    /// `c x^k`.
    pub fn monomial(field: Field, k: usize, c: i64) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = field.reduce(c);
        Self::from_coeffs(field, v)
    }

    pub fn from_coeffs(field: Field, coeffs: Vec<u32>) -> Self {
        let mut p = FpPoly { field, coeffs: coeffs.into_iter().map(|c| c % field.p()).collect() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_coeffs(f, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, s: u32) -> Self {
        let f = self.field;
        Self::from_coeffs(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut v = vec![0u32; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(f, v)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.field);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let f = self.field;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = f.inv(d.lead());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let mut q = vec![0u32; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], inv);
            if c == 0 {
                continue;
            }
            q[k - dd] = c;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                r[k - dd + i] = f.sub(r[k - dd + i], f.mul(c, dc));
            }
        }
        (Self::from_coeffs(f, q), Self::from_coeffs(f, r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lead()))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn divides(&self, o: &Self) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.div_rem(self).1.is_zero()
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Lowest power of x with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    /// Converts a one-variable Laurent polynomial with nonnegative exponents.
    pub fn from_laurent(p: &LaurentPoly) -> Option<Self> {
        if p.nvars() != 1 {
            return None;
        }
        let f = p.field();
        let mut v = Vec::new();
        for (e, c) in p.terms() {
            let k = usize::try_from(e[0]).ok()?;
            if v.len() <= k {
                v.resize(k + 1, 0);
            }
            v[k] = c;
        }
        Some(Self::from_coeffs(f, v))
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.field,
            1,
            self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (vec![k as i64], c as i64)),
        )
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_laurent())
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let f = Field::new(2).unwrap();
        // x^3 - 1 = (x - 1)(x^2 + x + 1)
        let a = FpPoly::from_coeffs(f, vec![1, 0, 0, 1]);
        let b = FpPoly::from_coeffs(f, vec![1, 1, 1]);
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, FpPoly::from_coeffs(f, vec![1, 1]));
        assert_eq!(a.gcd(&b), b);
        let f5 = Field::new(5).unwrap();
        let c = FpPoly::from_coeffs(f5, vec![2, 3]);
        assert_eq!(c.gcd(&c.scale(3)).lead(), 1);
    }
}
