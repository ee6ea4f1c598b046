//! Polynomial expression grammar:
//! `expr := term (('+'|'-') term)*`, `term := coeff? ('*'? var ('^' int)?)*`.

use std::fmt;

use thiserror::Error;

use super::{var_name, LaurentPoly};
use crate::gf::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// Matrix entry (row, column), 0-based, when parsing a grid.
    pub entry: Option<(usize, usize)>,
}

impl ParseError {
    pub fn at_entry(mut self, row: usize, col: usize) -> Self {
        self.entry = Some((row, col));
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((r, c)) = self.entry {
            write!(f, "entry ({}, {}): ", r + 1, c + 1)?;
        }
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    field: Field,
    nvars: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(field: Field, nvars: usize, src: &'a str) -> Self {
        let mut chars = Vec::new();
        let (mut line, mut col) = (1, 1);
        for ch in src.chars() {
            if ch == '\n' {
                line += 1;
                col = 1;
                continue;
            }
            if !ch.is_whitespace() {
                chars.push((line, col, ch));
            }
            col += 1;
        }
        Parser { chars, pos: 0, field, nvars, src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.2)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = match self.chars.get(self.pos) {
            Some(&(l, c, _)) => (l, c),
            None => {
                let lines = self.src.split('\n').collect::<Vec<_>>();
                (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1)
            }
        };
        ParseError { line, column, message: message.into(), entry: None }
    }

    fn number(&mut self) -> Result<Option<u64>, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(ch) = self.peek().filter(char::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(ch.to_digit(10).unwrap_or(0) as u64))
                .ok_or_else(|| self.err("integer too large"))?;
            self.pos += 1;
        }
        Ok((self.pos > start).then_some(value))
    }

    fn variable(&mut self) -> Result<Option<usize>, ParseError> {
        let Some(ch) = self.peek() else { return Ok(None) };
        if self.nvars <= 3 {
            let idx = match ch {
                'x' => 0,
                'y' => 1,
                'z' => 2,
                _ => return Ok(None),
            };
            if idx >= self.nvars {
                return Err(self.err(format!("variable '{ch}' not available with {} variables", self.nvars)));
            }
            self.pos += 1;
            Ok(Some(idx))
        } else {
            if ch != 'x' {
                return Ok(None);
            }
            self.pos += 1;
            let at = self.pos;
            let Some(k) = self.number()? else {
                return Err(self.err(format!("expected variable index, one of x1..x{}", self.nvars)));
            };
            if k == 0 || k as usize > self.nvars {
                self.pos = at;
                return Err(self.err(format!("variable x{k} out of range 1..{}", self.nvars)));
            }
            Ok(Some(k as usize - 1))
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = self.peek() == Some('(');
        if paren {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let Some(v) = self.number()? else { return Err(self.err("expected integer exponent")) };
        let v = i64::try_from(v).map_err(|_| self.err("exponent too large"))?;
        if paren {
            if self.peek() != Some(')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(if neg { -v } else { v })
    }

    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let start = self.pos;
        let coeff = self.number()?;
        let mut exp = vec![0i64; self.nvars];
        let mut any_var = false;
        loop {
            let save = self.pos;
            let star = self.peek() == Some('*');
            if star {
                self.pos += 1;
            }
            match self.variable()? {
                Some(i) => {
                    any_var = true;
                    let e = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    exp[i] = exp[i].checked_add(e).ok_or_else(|| self.err("exponent overflow"))?;
                }
                None => {
                    if star {
                        return Err(self.err(format!("expected a variable ({})", self.var_list())));
                    }
                    self.pos = save;
                    break;
                }
            }
        }
        if coeff.is_none() && !any_var {
            self.pos = start;
            return Err(match self.peek() {
                Some(ch) => self.err(format!("unexpected character '{ch}'")),
                None => self.err("unexpected end of input"),
            });
        }
        let c = coeff.map_or(1, |c| (c % self.field.p() as u64) as i64);
        Ok(LaurentPoly::monomial(self.field, exp, c))
    }

    fn var_list(&self) -> String {
        (0..self.nvars.min(3)).map(|i| var_name(self.nvars, i)).collect::<Vec<_>>().join(", ")
            + if self.nvars > 3 { ", ..." } else { "" }
    }

    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = LaurentPoly::zero(self.field, self.nvars);
        let mut sign = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                None => return Ok(acc),
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                Some(ch) => return Err(self.err(format!("unexpected character '{ch}'"))),
            }
            self.pos += 1;
        }
    }
}

/// Parses an expression in `nvars` variables, reducing coefficients mod p.
pub fn parse_poly(field: Field, nvars: usize, src: &str) -> Result<LaurentPoly, ParseError> {
    Parser::new(field, nvars, src).expr()
}
