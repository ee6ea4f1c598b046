//! Translation-invariant Clifford moves on stabilizer maps and the
//! classification of one-dimensional codes into Ising copies.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf::Field;
use crate::laurent::{coarse_grain, CodeDefinition, FpPoly, LaurentError, LaurentPoly, PolyMatrix};
use crate::pauli::Move;
use crate::smith::{laurent_smith_normal_form, ElemOp, SmithError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Smith(#[from] SmithError),
    #[error("expected a {expected}-dimensional code, got dimension {got}")]
    Dimension { expected: usize, got: usize },
    #[error("polynomial {0} vanishes at x = 0")]
    ZeroConstantTerm(String),
    #[error("inconclusive within bound: {0}")]
    Inconclusive(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A translation-invariant move on a stabilizer map. Row moves act on the
/// 2q components, column moves re-choose generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeMove {
    /// A single-cell move applied identically in every cell.
    Cell(Move),
    /// `X_j += m X_i`, `Z_i -= conj(m) Z_j`.
    CxPoly { control: usize, target: usize, m: LaurentPoly },
    /// For `i != j`: `Z_j += m X_i`, `Z_i += conj(m) X_j`; for `i == j`: `Z_i += m X_i` with `m` self-conjugate.
    CzPoly { i: usize, j: usize, m: LaurentPoly },
    /// Multiplies both components of a qudit by a monomial.
    Translate { qudit: usize, shift: Vec<i64> },
    CoarseGrain { b: Vec<usize> },
    /// Exponent substitution `e -> M e` by an integer matrix of determinant ±1, row-major.
    Redefine { matrix: Vec<Vec<i64>> },
    /// `col dst += col src * f`.
    ColAdd { src: usize, dst: usize, f: LaurentPoly },
    ColSwap(usize, usize),
    ColScale { col: usize, unit: LaurentPoly },
    /// Removes a decoupled block: qudits `a`, `b` and generators `i`, `j`.
    Split { qudits: [usize; 2], gens: [usize; 2] },
}

impl LatticeMove {
    fn check_qudit(i: usize, q: usize) -> Result<(), ClassifyError> {
        if i >= q {
            return Err(ClassifyError::InvalidMove(format!("qudit {} out of range for {q}", i + 1)));
        }
        Ok(())
    }

    fn check_col(i: usize, t: usize) -> Result<(), ClassifyError> {
        if i >= t {
            return Err(ClassifyError::InvalidMove(format!("column {} out of range for {t}", i + 1)));
        }
        Ok(())
    }

    /// Applies the move to `sigma` with `q` qudits per cell, returning the new map and `q`.
    pub fn apply(&self, q: usize, sigma: &PolyMatrix) -> Result<(usize, PolyMatrix), ClassifyError> {
        let field = sigma.field();
        let mut s = sigma.clone();
        match self {
            LatticeMove::Cell(mv) => {
                mv.validate(field, q).map_err(|e| ClassifyError::InvalidMove(e.to_string()))?;
                match *mv {
                    Move::Hadamard(i) => {
                        let (x, z) = (s.row(i), s.row(q + i));
                        set_row(&mut s, i, z);
                        set_row(&mut s, q + i, x.iter().map(LaurentPoly::neg).collect());
                    }
                    Move::Phase(i, a) => row_axpy(&mut s, q + i, i, &constant(sigma, a)),
                    Move::Rescale(i, a) => {
                        scale_row(&mut s, i, &constant(sigma, a));
                        scale_row(&mut s, q + i, &constant(sigma, field.inv(a)));
                    }
                    Move::Cnot(i, j, a) => {
                        row_axpy(&mut s, j, i, &constant(sigma, a));
                        row_axpy(&mut s, q + i, q + j, &constant(sigma, field.neg(a)));
                    }
                }
            }
            LatticeMove::CxPoly { control, target, m } => {
                Self::check_qudit(*control, q)?;
                Self::check_qudit(*target, q)?;
                if control == target {
                    return Err(ClassifyError::InvalidMove("CNOT with control equal to target".into()));
                }
                row_axpy(&mut s, *target, *control, m);
                row_axpy(&mut s, q + control, q + target, &m.antipode().neg());
            }
            LatticeMove::CzPoly { i, j, m } => {
                Self::check_qudit(*i, q)?;
                Self::check_qudit(*j, q)?;
                if i == j {
                    if !m.is_self_conjugate() {
                        return Err(ClassifyError::InvalidMove(format!("CZ polynomial {m} is not self-conjugate")));
                    }
                    row_axpy(&mut s, q + i, *i, m);
                } else {
                    row_axpy(&mut s, q + j, *i, m);
                    row_axpy(&mut s, q + i, *j, &m.antipode());
                }
            }
            LatticeMove::Translate { qudit, shift } => {
                Self::check_qudit(*qudit, q)?;
                if shift.len() != sigma.nvars() {
                    return Err(ClassifyError::InvalidMove("translation of the wrong dimension".into()));
                }
                let mono = LaurentPoly::monomial(field, shift.clone(), 1);
                scale_row(&mut s, *qudit, &mono);
                scale_row(&mut s, q + qudit, &mono);
            }
            LatticeMove::CoarseGrain { b } => {
                let code = CodeDefinition::new(s, q)?;
                let cg = coarse_grain(&code, b)?;
                return Ok((cg.q(), cg.sigma().clone()));
            }
            LatticeMove::Redefine { matrix } => {
                let d = sigma.nvars();
                if matrix.len() != d || matrix.iter().any(|r| r.len() != d) || !unimodular(matrix) {
                    return Err(ClassifyError::InvalidMove("redefinition must be a unimodular integer matrix".into()));
                }
                s = s.map(|p| {
                    p.map_exponents(d, |e| matrix.iter().map(|row| row.iter().zip(e).map(|(a, b)| a * b).sum()).collect())
                });
            }
            LatticeMove::ColAdd { src, dst, f } => {
                Self::check_col(*src, s.cols())?;
                Self::check_col(*dst, s.cols())?;
                if src == dst {
                    return Err(ClassifyError::InvalidMove("column added to itself".into()));
                }
                for r in 0..s.rows() {
                    let v = s.get(r, *dst).add(&s.get(r, *src).mul(f));
                    s.set(r, *dst, v);
                }
            }
            LatticeMove::ColSwap(a, b) => {
                Self::check_col(*a, s.cols())?;
                Self::check_col(*b, s.cols())?;
                for r in 0..s.rows() {
                    let (u, v) = (s.get(r, *a).clone(), s.get(r, *b).clone());
                    s.set(r, *a, v);
                    s.set(r, *b, u);
                }
            }
            LatticeMove::ColScale { col, unit } => {
                Self::check_col(*col, s.cols())?;
                if unit.as_unit().is_none() {
                    return Err(ClassifyError::InvalidMove(format!("{unit} is not a unit")));
                }
                for r in 0..s.rows() {
                    let v = s.get(r, *col).mul(unit);
                    s.set(r, *col, v);
                }
            }
            LatticeMove::Split { qudits, gens } => {
                let (rows, cols) = split_indices(q, s.cols(), qudits, gens)?;
                for r in 0..s.rows() {
                    for c in 0..s.cols() {
                        if rows.contains(&r) != cols.contains(&c) && !s.get(r, c).is_zero() {
                            return Err(ClassifyError::InvalidMove("split block is not decoupled".into()));
                        }
                    }
                }
                let keep_r: Vec<usize> = (0..s.rows()).filter(|r| !rows.contains(r)).collect();
                let keep_c: Vec<usize> = (0..s.cols()).filter(|c| !cols.contains(c)).collect();
                return Ok((q - 2, s.select_rows(&keep_r).select_cols(&keep_c)));
            }
        }
        Ok((q, s))
    }

    pub fn is_row_move(&self) -> bool {
        !matches!(
            self,
            LatticeMove::ColAdd { .. }
                | LatticeMove::ColSwap(..)
                | LatticeMove::ColScale { .. }
                | LatticeMove::CoarseGrain { .. }
                | LatticeMove::Split { .. }
        )
    }

    /// The block removed by a `Split` move, as a stabilizer map on two qudits.
    pub fn split_block(&self, q: usize, sigma: &PolyMatrix) -> Result<Option<PolyMatrix>, ClassifyError> {
        let LatticeMove::Split { qudits, gens } = self else { return Ok(None) };
        let (rows, cols) = split_indices(q, sigma.cols(), qudits, gens)?;
        Ok(Some(sigma.select_rows(&rows).select_cols(&cols)))
    }

    /// Matrix `T` of a row move with `sigma -> T sigma`, for `q` qudits.
    pub fn row_matrix(&self, field: Field, nvars: usize, q: usize) -> Result<Option<PolyMatrix>, ClassifyError> {
        if !self.is_row_move() || matches!(self, LatticeMove::Redefine { .. }) {
            return Ok(None);
        }
        Ok(Some(self.apply(q, &PolyMatrix::identity(field, nvars, 2 * q))?.1))
    }
}

fn split_indices(
    q: usize,
    t: usize,
    qudits: &[usize; 2],
    gens: &[usize; 2],
) -> Result<(Vec<usize>, Vec<usize>), ClassifyError> {
    let [a, b] = *qudits;
    let [i, j] = *gens;
    if a == b || i == j || a.max(b) >= q || i.max(j) >= t {
        return Err(ClassifyError::InvalidMove("split indices out of range".into()));
    }
    Ok((vec![a, b, q + a, q + b], vec![i, j]))
}

fn unimodular(m: &[Vec<i64>]) -> bool {
    match m.len() {
        0 => true,
        1 => m[0][0].abs() == 1,
        2 => (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() == 1,
        _ => {
            let d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            m.len() == 3 && d.abs() == 1
        }
    }
}

fn constant(sigma: &PolyMatrix, a: u32) -> LaurentPoly {
    LaurentPoly::constant(sigma.field(), sigma.nvars(), a as i64)
}

fn set_row(s: &mut PolyMatrix, r: usize, v: Vec<LaurentPoly>) {
    for (c, p) in v.into_iter().enumerate() {
        s.set(r, c, p);
    }
}

fn row_axpy(s: &mut PolyMatrix, dst: usize, src: usize, m: &LaurentPoly) {
    if m.is_zero() {
        return;
    }
    for c in 0..s.cols() {
        let v = s.get(src, c);
        if !v.is_zero() {
            let nv = s.get(dst, c).add(&m.mul(v));
            s.set(dst, c, nv);
        }
    }
}

fn scale_row(s: &mut PolyMatrix, r: usize, m: &LaurentPoly) {
    for c in 0..s.cols() {
        let nv = s.get(r, c).mul(m);
        s.set(r, c, nv);
    }
}

fn join_ints<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for LatticeMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeMove::Cell(m) => write!(f, "{m}"),
            LatticeMove::CxPoly { control, target, m } => write!(f, "CXpoly {} {} {m}", control + 1, target + 1),
            LatticeMove::CzPoly { i, j, m } => write!(f, "CZpoly {} {} {m}", i + 1, j + 1),
            LatticeMove::Translate { qudit, shift } => write!(f, "T {} {}", qudit + 1, join_ints(shift)),
            LatticeMove::CoarseGrain { b } => write!(f, "CG {}", join_ints(b)),
            LatticeMove::Redefine { matrix } => write!(f, "VAR {}", join_ints(&matrix.concat())),
            LatticeMove::ColAdd { src, dst, f: g } => write!(f, "COLADD {} {} {g}", src + 1, dst + 1),
            LatticeMove::ColSwap(a, b) => write!(f, "COLSWAP {} {}", a + 1, b + 1),
            LatticeMove::ColScale { col, unit } => write!(f, "COLSCALE {} {unit}", col + 1),
            LatticeMove::Split { qudits, gens } => {
                write!(f, "SPLIT {} {} {} {}", qudits[0] + 1, qudits[1] + 1, gens[0] + 1, gens[1] + 1)
            }
        }
    }
}

/// Ordered moves, applied first to last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeGateScript {
    moves: Vec<LatticeMove>,
}

impl LatticeGateScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, m: LatticeMove) {
        self.moves.push(m);
    }

    pub fn extend(&mut self, other: &LatticeGateScript) {
        self.moves.extend(other.moves.iter().cloned());
    }

    pub fn moves(&self) -> &[LatticeMove] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Replays the script on a stabilizer map with `q` qudits per cell.
    pub fn apply(&self, q: usize, sigma: &PolyMatrix) -> Result<(usize, PolyMatrix), ClassifyError> {
        let (mut q, mut s) = (q, sigma.clone());
        for m in &self.moves {
            (q, s) = m.apply(q, &s)?;
        }
        Ok((q, s))
    }

    pub fn lines(&self) -> Vec<String> {
        self.moves.iter().map(|m| m.to_string()).collect()
    }
}

impl fmt::Display for LatticeGateScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl Serialize for LatticeGateScript {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.lines().serialize(s)
    }
}

/// Euclidean division of one-variable Laurent polynomials: `e = q f + r`
/// with the spread of `r` below that of `f`.
pub fn laurent_div_rem(e: &LaurentPoly, f: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    let field = e.field();
    let (Some((le, _)), Some((lf, _))) = (e.exponent_bounds(), f.exponent_bounds()) else {
        return (LaurentPoly::zero(field, 1), e.clone());
    };
    let (a, b) = (le[0], lf[0]);
    let ep = FpPoly::from_laurent(&e.shift(&[-a])).expect("shifted to nonnegative");
    let fp = FpPoly::from_laurent(&f.shift(&[-b])).expect("shifted to nonnegative");
    let (qp, rp) = ep.div_rem(&fp);
    (qp.to_laurent().shift(&[a - b]), rp.to_laurent().shift(&[a]))
}

fn spread(p: &LaurentPoly) -> i64 {
    p.spread().unwrap_or(i64::MAX)
}

/// Unit `u` such that `u p` has lowest exponent zero and leading coefficient one.
pub fn normalizing_unit(p: &LaurentPoly) -> LaurentPoly {
    let field = p.field();
    let Some((lo, hi)) = p.exponent_bounds() else { return LaurentPoly::one(field, p.nvars()) };
    let lead = p.coeff(&hi);
    LaurentPoly::monomial(field, lo.iter().map(|a| -a).collect(), field.inv(lead) as i64)
}

struct Diagonalizer {
    q: usize,
    sigma: PolyMatrix,
    script: LatticeGateScript,
}

impl Diagonalizer {
    fn emit(&mut self, m: LatticeMove) -> Result<(), ClassifyError> {
        (self.q, self.sigma) = m.apply(self.q, &self.sigma)?;
        self.script.push(m);
        Ok(())
    }

    fn field(&self) -> Field {
        self.sigma.field()
    }

    fn swap_qudits(&mut self, a: usize, b: usize) -> Result<(), ClassifyError> {
        let f = self.field();
        let m1 = f.neg(1);
        self.emit(LatticeMove::Cell(Move::Cnot(a, b, 1)))?;
        self.emit(LatticeMove::Cell(Move::Cnot(b, a, m1)))?;
        self.emit(LatticeMove::Cell(Move::Cnot(a, b, 1)))?;
        if f.p() != 2 {
            self.emit(LatticeMove::Cell(Move::Rescale(a, m1)))?;
        }
        Ok(())
    }

    /// Minimal-spread nonzero entry among qudits and columns `>= k`;
    /// columns left to right, X rows before Z rows.
    fn min_entry(&self, k: usize) -> Option<(usize, usize)> {
        let q = self.q;
        let rows: Vec<usize> = (k..q).chain(q + k..2 * q).collect();
        let mut best: Option<(usize, usize, i64)> = None;
        for c in k..self.sigma.cols() {
            for &r in &rows {
                let v = self.sigma.get(r, c);
                if v.is_zero() {
                    continue;
                }
                let s = spread(v);
                if best.is_none_or(|(_, _, bs)| s < bs) {
                    best = Some((r, c, s));
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    fn bring_to_pivot(&mut self, k: usize, (r, c): (usize, usize)) -> Result<(), ClassifyError> {
        let q = self.q;
        let qudit = if r >= q { r - q } else { r };
        if r >= q {
            self.emit(LatticeMove::Cell(Move::Hadamard(qudit)))?;
        }
        if qudit != k {
            self.swap_qudits(qudit, k)?;
        }
        if c != k {
            self.emit(LatticeMove::ColSwap(k, c))?;
        }
        Ok(())
    }

    /// One pass of clearing around the pivot at `(X_k, k)`; returns false
    /// when a smaller remainder appeared and pivot selection must restart.
    fn clear_pass(&mut self, k: usize) -> Result<bool, ClassifyError> {
        let q = self.q;
        let f = self.sigma.get(k, k).clone();
        for j in k + 1..q {
            let e = self.sigma.get(j, k).clone();
            if e.is_zero() {
                continue;
            }
            let (quo, rem) = laurent_div_rem(&e, &f);
            self.emit(LatticeMove::CxPoly { control: k, target: j, m: quo.neg() })?;
            if !rem.is_zero() {
                return Ok(false);
            }
        }
        for j in k + 1..q {
            let e = self.sigma.get(q + j, k).clone();
            if e.is_zero() {
                continue;
            }
            let (quo, rem) = laurent_div_rem(&e, &f);
            self.emit(LatticeMove::CzPoly { i: k, j, m: quo.neg() })?;
            if !rem.is_zero() {
                return Ok(false);
            }
        }
        loop {
            let g = self.sigma.get(q + k, k).clone();
            if g.is_zero() {
                break;
            }
            if spread(&g) < spread(&f) {
                return Ok(false);
            }
            let field = self.field();
            let (lf, hf) = f.exponent_bounds().unwrap();
            let (lg, hg) = g.exponent_bounds().unwrap();
            let (alpha, gamma) = (f.coeff(&lf), g.coeff(&lg));
            let ratio = field.mul(gamma, field.inv(alpha));
            let h = if spread(&g) == spread(&f) {
                LaurentPoly::constant(field, 1, ratio as i64)
            } else {
                LaurentPoly::from_terms(
                    field,
                    1,
                    [(vec![lg[0] - lf[0]], ratio as i64), (vec![hg[0] - hf[0]], ratio as i64)],
                )
            };
            let before = spread(&g);
            self.emit(LatticeMove::CzPoly { i: k, j: k, m: h.neg() })?;
            let after = self.sigma.get(q + k, k);
            if !after.is_zero() && spread(after) >= before {
                return Err(ClassifyError::Internal(format!("CZ step failed to reduce {g} against {f}")));
            }
        }
        for c in k + 1..self.sigma.cols() {
            let e = self.sigma.get(k, c).clone();
            if e.is_zero() {
                continue;
            }
            let (quo, rem) = laurent_div_rem(&e, &f);
            self.emit(LatticeMove::ColAdd { src: k, dst: c, f: quo.neg() })?;
            if !rem.is_zero() {
                return Ok(false);
            }
        }
        if (0..self.sigma.cols()).any(|c| !self.sigma.get(q + k, c).is_zero()) {
            return Err(ClassifyError::Internal("isotropy violated: Z row of the pivot qudit is nonzero".into()));
        }
        Ok(true)
    }

    /// Finds an entry in the trailing block not divisible by the pivot and
    /// adds its qudit onto the pivot qudit.
    fn enforce_divisibility(&mut self, k: usize) -> Result<bool, ClassifyError> {
        let q = self.q;
        let f = self.sigma.get(k, k).clone();
        for c in k + 1..self.sigma.cols() {
            for r in (k + 1..q).chain(q + k + 1..2 * q) {
                let e = self.sigma.get(r, c);
                if e.is_zero() || laurent_div_rem(e, &f).1.is_zero() {
                    continue;
                }
                let qudit = if r >= q { r - q } else { r };
                if r >= q {
                    self.emit(LatticeMove::Cell(Move::Hadamard(qudit)))?;
                }
                self.emit(LatticeMove::Cell(Move::Cnot(qudit, k, 1)))?;
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn run(&mut self) -> Result<(), ClassifyError> {
        for k in 0..self.q {
            let Some(start) = self.min_entry(k) else { break };
            self.bring_to_pivot(k, start)?;
            loop {
                if self.clear_pass(k)? && self.enforce_divisibility(k)? {
                    break;
                }
                let next = self.min_entry(k).ok_or_else(|| ClassifyError::Internal("pivot block vanished".into()))?;
                self.bring_to_pivot(k, next)?;
            }
            let u = normalizing_unit(self.sigma.get(k, k));
            if !u.is_one() {
                self.emit(LatticeMove::ColScale { col: k, unit: u })?;
            }
        }
        Ok(())
    }
}

/// Result of the diagonalization: `script` turns the input map into
/// `[diag(diagonal); 0]` padded with zero columns.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub script: LatticeGateScript,
    pub diagonal: Vec<LaurentPoly>,
    pub sigma: PolyMatrix,
}

pub fn diagonalize_1d(code: &CodeDefinition) -> Result<Diagonalization, ClassifyError> {
    if code.nvars() != 1 {
        return Err(ClassifyError::Dimension { expected: 1, got: code.nvars() });
    }
    let mut d = Diagonalizer { q: code.q(), sigma: code.sigma().clone(), script: LatticeGateScript::new() };
    d.run()?;
    let q = d.q;
    let diagonal: Vec<LaurentPoly> =
        (0..q).map(|i| if i < d.sigma.cols() { d.sigma.get(i, i).clone() } else { LaurentPoly::zero(code.field(), 1) }).collect();
    for r in 0..2 * q {
        for c in 0..d.sigma.cols() {
            if !(r == c || d.sigma.get(r, c).is_zero()) {
                return Err(ClassifyError::Internal("diagonalization left an off-diagonal entry".into()));
            }
        }
    }
    for w in diagonal.windows(2) {
        if !w[0].is_zero() && !laurent_div_rem(&w[1], &w[0]).1.is_zero() {
            return Err(ClassifyError::Internal("diagonal divisibility chain broken".into()));
        }
    }
    Ok(Diagonalization { script: d.script, diagonal, sigma: d.sigma })
}

/// Smallest `n <= n_max` with `f | x^n - 1`.
pub fn cyclotomic_multiple(f: &FpPoly, n_max: usize) -> Result<Option<usize>, ClassifyError> {
    if f.coeff(0) == 0 {
        return Err(ClassifyError::ZeroConstantTerm(f.to_string()));
    }
    let field = f.field();
    let one = FpPoly::one(field);
    let x = FpPoly::monomial(field, 1, 1);
    let mut power = one.div_rem(f).1;
    for n in 1..=n_max {
        power = power.mul(&x).div_rem(f).1;
        if power == one.div_rem(f).1 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn serialize_polys<S: Serializer>(v: &[LaurentPoly], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().serialize(s)
}

pub(crate) fn serialize_matrix<S: Serializer>(m: &PolyMatrix, s: S) -> Result<S::Ok, S::Error> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|p| p.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct OneDReport {
    /// Diagonal of the preclassified map, one entry per qudit.
    #[serde(serialize_with = "serialize_polys")]
    pub diagonal: Vec<LaurentPoly>,
    pub ising_copies: usize,
    pub trivial_qudits: usize,
    /// Qudits per coarse cell that carry no stabilizer at all.
    pub free_qudits: usize,
    pub b: usize,
    pub witness: LatticeGateScript,
    #[serde(serialize_with = "serialize_matrix")]
    pub normal_form: PolyMatrix,
}

pub const DEFAULT_N_MAX: usize = 64;

pub fn classify_1d(code: &CodeDefinition, n_max: usize) -> Result<OneDReport, ClassifyError> {
    let field = code.field();
    let diag = diagonalize_1d(code)?;
    let mut b = 1;
    for d in diag.diagonal.iter().filter(|d| !d.is_zero()) {
        let fp = FpPoly::from_laurent(d).ok_or_else(|| ClassifyError::Internal("unnormalized diagonal".into()))?;
        match cyclotomic_multiple(&fp, n_max)? {
            Some(n) => b = lcm(b, n),
            None => {
                return Err(ClassifyError::Inconclusive(format!("{d} divides no x^n - 1 with n <= {n_max}")));
            }
        }
    }
    let mut witness = diag.script.clone();
    let (mut q, mut sigma) = (code.q(), diag.sigma.clone());
    if b > 1 {
        let m = LatticeMove::CoarseGrain { b: vec![b] };
        (q, sigma) = m.apply(q, &sigma)?;
        witness.push(m);
    }
    let xblock = sigma.select_rows(&(0..q).collect::<Vec<_>>());
    let snf = laurent_smith_normal_form(&xblock)?;
    let mut d = Diagonalizer { q, sigma, script: LatticeGateScript::new() };
    for op in &snf.row_ops {
        match op {
            ElemOp::Swap(i, j) => d.swap_qudits(*i, *j)?,
            ElemOp::AddMultiple { src, dst, factor } => {
                d.emit(LatticeMove::CxPoly { control: *src, target: *dst, m: factor.clone() })?
            }
            ElemOp::Scale { index, unit } => {
                let (e, c) = unit.as_unit().ok_or_else(|| ClassifyError::Internal("row scale by non-unit".into()))?;
                if e[0] != 0 {
                    d.emit(LatticeMove::Translate { qudit: *index, shift: e })?;
                }
                if c != 1 {
                    d.emit(LatticeMove::Cell(Move::Rescale(*index, c)))?;
                }
            }
        }
    }
    for op in &snf.col_ops {
        d.emit(match op {
            ElemOp::Swap(i, j) => LatticeMove::ColSwap(*i, *j),
            ElemOp::AddMultiple { src, dst, factor } => LatticeMove::ColAdd { src: *src, dst: *dst, f: factor.clone() },
            ElemOp::Scale { index, unit } => LatticeMove::ColScale { col: *index, unit: unit.clone() },
        })?;
    }
    witness.extend(&d.script);
    let normal_form = d.sigma;
    let (rq, replayed) = witness.apply(code.q(), code.sigma())?;
    if rq != q || replayed != normal_form {
        return Err(ClassifyError::Internal("witness replay does not reproduce the normal form".into()));
    }
    let x_minus_one = LaurentPoly::binomial_minus_one(field, 1, 0, 1);
    let mut ising = 0;
    let mut trivial = 0;
    for div in &snf.divisors {
        if div.is_one() {
            trivial += 1;
        } else if *div == x_minus_one {
            ising += 1;
        } else {
            return Err(ClassifyError::Internal(format!("unexpected elementary divisor {div}")));
        }
    }
    let free = q - snf.divisors.len();
    let expected: i64 = diag.diagonal.iter().filter_map(|d| d.spread()).sum();
    if ising as i64 != expected {
        return Err(ClassifyError::Internal(format!("{ising} Ising copies but diagonal degree {expected}")));
    }
    Ok(OneDReport {
        diagonal: diag.diagonal,
        ising_copies: ising,
        trivial_qudits: trivial,
        free_qudits: free,
        b,
        witness,
        normal_form,
    })
}
