//! Phaseless Pauli operators on n qudits as vectors in F_p^{2n}, the
//! symplectic form, and Clifford gate scripts.
//!
//! All stabilizers are taken with eigenvalue +1; signs and phases are not
//! tracked. Qudit indices are 0-based in the API and 1-based in script text.

use std::fmt;

use thiserror::Error;

use crate::gf::{Field, FieldElement, GfError, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("operand mismatch: {0}")]
    Mismatch(String),
    #[error("qudit index {index} out of range for {n} qudits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("generators {} and {} do not commute", .0 + 1, .1 + 1)]
    NotIsotropic(usize, usize),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("script parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A Pauli operator modulo phase: `coords = (x_1..x_n, z_1..z_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliVector {
    field: Field,
    n: usize,
    coords: Vec<u32>,
}

impl PauliVector {
    pub fn new(field: Field, n: usize, coords: Vec<u32>) -> Result<Self, PauliError> {
        if coords.len() != 2 * n {
            return Err(PauliError::Mismatch(format!("expected {} coordinates, got {}", 2 * n, coords.len())));
        }
        let coords = coords.into_iter().map(|c| c % field.p()).collect();
        Ok(PauliVector { field, n, coords })
    }

    pub fn from_xz(field: Field, x: &[u32], z: &[u32]) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::Mismatch("x and z parts differ in length".into()));
        }
        let mut coords = x.to_vec();
        coords.extend_from_slice(z);
        Self::new(field, x.len(), coords)
    }

    pub fn identity(field: Field, n: usize) -> Self {
        PauliVector { field, n, coords: vec![0; 2 * n] }
    }

    /// Single-qudit X on qudit `i`.
    pub fn x(field: Field, n: usize, i: usize) -> Self {
        let mut v = Self::identity(field, n);
        v.coords[i] = 1;
        v
    }

    /// Single-qudit Z on qudit `i`.
    pub fn z(field: Field, n: usize, i: usize) -> Self {
        let mut v = Self::identity(field, n);
        v.coords[n + i] = 1;
        v
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn x_part(&self) -> &[u32] {
        &self.coords[..self.n]
    }

    pub fn z_part(&self) -> &[u32] {
        &self.coords[self.n..]
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Number of qudits acted on nontrivially.
    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&i| self.coords[i] != 0 || self.coords[self.n + i] != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.coords[i] != 0 || self.coords[self.n + i] != 0).collect()
    }

    pub fn add(&self, other: &PauliVector) -> PauliVector {
        let f = self.field;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.add(a, b)).collect();
        PauliVector { field: f, n: self.n, coords }
    }

    pub fn scale(&self, s: u32) -> PauliVector {
        let f = self.field;
        PauliVector { field: f, n: self.n, coords: self.coords.iter().map(|&a| f.mul(a, s)).collect() }
    }
}

fn check_pair(u: &PauliVector, v: &PauliVector) -> Result<(), PauliError> {
    if u.field != v.field {
        return Err(GfError::ModulusMismatch(u.field.p(), v.field.p()).into());
    }
    if u.n != v.n {
        return Err(PauliError::Mismatch(format!("{} vs {} qudits", u.n, v.n)));
    }
    Ok(())
}

fn omega(f: Field, n: usize, u: &[u32], v: &[u32]) -> u32 {
    let mut m = 0;
    for i in 0..n {
        m = f.add(m, f.mul(u[i], v[n + i]));
        m = f.sub(m, f.mul(u[n + i], v[i]));
    }
    m
}

/// `m = x·z' − z·x'` for `u = (x|z)`, `v = (x'|z')`.
pub fn symplectic_product(u: &PauliVector, v: &PauliVector) -> Result<FieldElement, PauliError> {
    check_pair(u, v)?;
    Ok(FieldElement::new(omega(u.field, u.n, &u.coords, &v.coords) as i64, u.field.p() as u64)?)
}

/// First anticommuting pair, if any.
fn first_noncommuting(gens: &[PauliVector]) -> Result<Option<(usize, usize)>, PauliError> {
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !symplectic_product(&gens[i], &gens[j])?.is_zero() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

pub fn is_isotropic(gens: &[PauliVector]) -> Result<bool, PauliError> {
    Ok(first_noncommuting(gens)?.is_none())
}

/// The matrix `[[0, I], [-I, 0]]` of size 2n.
pub fn lambda(field: Field, n: usize) -> Matrix {
    Matrix::from_fn(field, 2 * n, 2 * n, |r, c| {
        if r < n && c == r + n {
            1
        } else if r >= n && c + n == r {
            field.neg(1)
        } else {
            0
        }
    })
}

pub fn is_symplectic(a: &Matrix) -> bool {
    if a.rows() != a.cols() || !a.rows().is_multiple_of(2) {
        return false;
    }
    let l = lambda(a.field(), a.rows() / 2);
    a.transpose().mul(&l).and_then(|m| m.mul(a)).map(|m| m == l).unwrap_or(false)
}

/// Generator matrix with one generator per row.
pub fn generator_matrix(field: Field, n: usize, gens: &[PauliVector]) -> Matrix {
    Matrix::from_fn(field, gens.len(), 2 * n, |r, c| gens[r].coords[c])
}

/// Elementary symplectic move acting on column vectors `(x; z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// `x_i <- z_i`, `z_i <- -x_i`.
    Hadamard(usize),
    /// `z_i <- z_i + a x_i`.
    Phase(usize, u32),
    /// `x_i <- a x_i`, `z_i <- a^{-1} z_i`.
    Rescale(usize, u32),
    /// Control `i`, target `j`: `x_j <- x_j + a x_i`, `z_i <- z_i - a z_j`.
    Cnot(usize, usize, u32),
}

impl Move {
    fn qudits(&self) -> Vec<usize> {
        match *self {
            Move::Hadamard(i) | Move::Phase(i, _) | Move::Rescale(i, _) => vec![i],
            Move::Cnot(i, j, _) => vec![i, j],
        }
    }

    pub(crate) fn validate(&self, field: Field, n: usize) -> Result<(), PauliError> {
        for i in self.qudits() {
            if i >= n {
                return Err(PauliError::IndexOutOfRange { index: i, n });
            }
        }
        match *self {
            Move::Rescale(_, a) if a % field.p() == 0 => Err(PauliError::InvalidMove("rescale by zero".into())),
            Move::Cnot(i, j, _) if i == j => Err(PauliError::InvalidMove("CNOT with control equal to target".into())),
            _ => Ok(()),
        }
    }

    /// Applies the move to a length-2n coordinate slice in place.
    pub fn apply_in_place(&self, field: Field, n: usize, v: &mut [u32]) {
        let f = field;
        match *self {
            Move::Hadamard(i) => {
                let (x, z) = (v[i], v[n + i]);
                v[i] = z;
                v[n + i] = f.neg(x);
            }
            Move::Phase(i, a) => v[n + i] = f.add(v[n + i], f.mul(a, v[i])),
            Move::Rescale(i, a) => {
                v[i] = f.mul(v[i], a);
                v[n + i] = f.mul(v[n + i], f.inv(a));
            }
            Move::Cnot(i, j, a) => {
                v[j] = f.add(v[j], f.mul(a, v[i]));
                v[n + i] = f.sub(v[n + i], f.mul(a, v[n + j]));
            }
        }
    }

    /// Moves whose composition is the inverse of this one.
    pub fn inverse(&self, field: Field) -> Vec<Move> {
        let f = field;
        match *self {
            Move::Hadamard(i) => {
                if f.p() == 2 {
                    vec![Move::Hadamard(i)]
                } else {
                    vec![Move::Hadamard(i), Move::Rescale(i, f.neg(1))]
                }
            }
            Move::Phase(i, a) => vec![Move::Phase(i, f.neg(a))],
            Move::Rescale(i, a) => vec![Move::Rescale(i, f.inv(a))],
            Move::Cnot(i, j, a) => vec![Move::Cnot(i, j, f.neg(a))],
        }
    }

    /// Matrix of the move on F_p^{2n}.
    pub fn matrix(&self, field: Field, n: usize) -> Matrix {
        let mut m = Matrix::identity(field, 2 * n);
        for c in 0..2 * n {
            let mut col = m.col(c);
            self.apply_in_place(field, n, &mut col);
            for (r, v) in col.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    fn remap(&self, map: &[usize]) -> Move {
        match *self {
            Move::Hadamard(i) => Move::Hadamard(map[i]),
            Move::Phase(i, a) => Move::Phase(map[i], a),
            Move::Rescale(i, a) => Move::Rescale(map[i], a),
            Move::Cnot(i, j, a) => Move::Cnot(map[i], map[j], a),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Hadamard(i) => write!(f, "H {}", i + 1),
            Move::Phase(i, a) => write!(f, "S {} {}", i + 1, a),
            Move::Rescale(i, a) => write!(f, "R {} {}", i + 1, a),
            Move::Cnot(i, j, a) => write!(f, "CX {} {} {}", i + 1, j + 1, a),
        }
    }
}

/// An ordered list of moves on n qudits, applied first to last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateScript {
    field: Field,
    n: usize,
    moves: Vec<Move>,
}

impl GateScript {
    pub fn new(field: Field, n: usize) -> Self {
        GateScript { field, n, moves: Vec::new() }
    }

    pub fn from_moves(field: Field, n: usize, moves: Vec<Move>) -> Result<Self, PauliError> {
        let mut s = Self::new(field, n);
        for m in moves {
            s.push(m)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, m: Move) -> Result<(), PauliError> {
        m.validate(self.field, self.n)?;
        let m = match m {
            Move::Phase(i, a) => Move::Phase(i, a % self.field.p()),
            Move::Rescale(i, a) => Move::Rescale(i, a % self.field.p()),
            Move::Cnot(i, j, a) => Move::Cnot(i, j, a % self.field.p()),
            h => h,
        };
        self.moves.push(m);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateScript) -> Result<(), PauliError> {
        for &m in &other.moves {
            self.push(m)?;
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn apply(&self, v: &PauliVector) -> Result<PauliVector, PauliError> {
        if v.field != self.field || v.n != self.n {
            return Err(PauliError::Mismatch("script and vector live on different spaces".into()));
        }
        let mut coords = v.coords.clone();
        for m in &self.moves {
            m.apply_in_place(self.field, self.n, &mut coords);
        }
        Ok(PauliVector { field: self.field, n: self.n, coords })
    }

    /// The product `M_k ... M_1` of the move matrices.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::identity(self.field, 2 * self.n);
        let cols: Vec<Vec<u32>> = (0..2 * self.n)
            .map(|c| {
                let mut col = m.col(c);
                for mv in &self.moves {
                    mv.apply_in_place(self.field, self.n, &mut col);
                }
                col
            })
            .collect();
        for (c, col) in cols.into_iter().enumerate() {
            for (r, v) in col.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn inverse(&self) -> GateScript {
        let moves = self.moves.iter().rev().flat_map(|m| m.inverse(self.field)).collect();
        GateScript { field: self.field, n: self.n, moves }
    }

    /// Re-indexes the script into a larger register: local qudit `i` becomes `map[i]`.
    pub fn embed(&self, n_total: usize, map: &[usize]) -> Result<GateScript, PauliError> {
        GateScript::from_moves(self.field, n_total, self.moves.iter().map(|m| m.remap(map)).collect())
    }

    /// Parses the line format (`H 1`, `S 1 a`, `R 1 a`, `CX i j a`, 1-based).
    pub fn parse(field: Field, n: usize, text: &str) -> Result<GateScript, PauliError> {
        let mut s = GateScript::new(field, n);
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| PauliError::Parse { line: ln + 1, msg: msg.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let nums: Vec<i64> = toks[1..]
                .iter()
                .map(|t| t.parse::<i64>().map_err(|_| err(&format!("bad number '{t}'"))))
                .collect::<Result<_, _>>()?;
            let idx = |k: usize| -> Result<usize, PauliError> {
                let v = nums[k];
                if v < 1 {
                    return Err(err("qudit indices are 1-based"));
                }
                Ok(v as usize - 1)
            };
            let arity = |k: usize| if nums.len() == k { Ok(()) } else { Err(err("wrong number of arguments")) };
            let mv = match toks[0] {
                "H" => {
                    arity(1)?;
                    Move::Hadamard(idx(0)?)
                }
                "S" => {
                    arity(2)?;
                    Move::Phase(idx(0)?, field.reduce(nums[1]))
                }
                "R" => {
                    arity(2)?;
                    Move::Rescale(idx(0)?, field.reduce(nums[1]))
                }
                "CX" => {
                    arity(3)?;
                    Move::Cnot(idx(0)?, idx(1)?, field.reduce(nums[2]))
                }
                other => return Err(err(&format!("unknown move '{other}'"))),
            };
            s.push(mv).map_err(|e| err(&e.to_string()))?;
        }
        Ok(s)
    }
}

impl fmt::Display for GateScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

pub fn apply_script(script: &GateScript, v: &PauliVector) -> Result<PauliVector, PauliError> {
    script.apply(v)
}

/// Records moves and applies them to a set of tracked vectors.
struct Reducer<'a> {
    field: Field,
    n: usize,
    moves: Vec<Move>,
    vecs: &'a mut [Vec<u32>],
}

impl Reducer<'_> {
    fn emit(&mut self, m: Move) {
        for v in self.vecs.iter_mut() {
            m.apply_in_place(self.field, self.n, v);
        }
        self.moves.push(m);
    }

    /// Maps tracked vector `k`, supported on qudits `>= t`, onto `e_t`
    /// using moves on qudits `>= t` only.
    fn send_to_x(&mut self, k: usize, t: usize) {
        let (f, n) = (self.field, self.n);
        if (t..n).all(|j| self.vecs[k][j] == 0) {
            let j = (t..n).find(|&j| self.vecs[k][n + j] != 0).expect("nonzero vector");
            self.emit(Move::Hadamard(j));
        }
        let j = (t..n).find(|&j| self.vecs[k][j] != 0).expect("nonzero x-part");
        if j != t {
            self.emit(Move::Cnot(j, t, 1));
        }
        let xt = self.vecs[k][t];
        if xt != 1 {
            self.emit(Move::Rescale(t, f.inv(xt)));
        }
        for j in t + 1..n {
            let xj = self.vecs[k][j];
            if xj != 0 {
                self.emit(Move::Cnot(t, j, f.neg(xj)));
            }
        }
        for j in t + 1..n {
            if self.vecs[k][n + j] != 0 {
                self.emit(Move::Hadamard(j));
                let xj = self.vecs[k][j];
                self.emit(Move::Cnot(t, j, f.neg(xj)));
            }
        }
        let zt = self.vecs[k][n + t];
        if zt != 0 {
            self.emit(Move::Phase(t, f.neg(zt)));
        }
    }

    /// Maps tracked vector `k` (with `z_t = 1`, supported on qudits `>= t`)
    /// onto `f_t` while fixing `e_t`.
    fn send_to_z(&mut self, k: usize, t: usize) {
        let (f, n) = (self.field, self.n);
        for j in t + 1..n {
            let zj = self.vecs[k][n + j];
            if zj != 0 {
                self.emit(Move::Cnot(j, t, zj));
            }
            if self.vecs[k][j] != 0 {
                self.emit(Move::Hadamard(j));
                let zj = self.vecs[k][n + j];
                self.emit(Move::Cnot(j, t, zj));
            }
        }
        let xt = self.vecs[k][t];
        if xt != 0 {
            // H^{-1} S(a) H realizes x_t <- x_t - a z_t.
            self.emit(Move::Hadamard(t));
            self.emit(Move::Phase(t, xt));
            self.emit(Move::Hadamard(t));
            if f.p() != 2 {
                self.emit(Move::Rescale(t, f.neg(1)));
            }
        }
    }
}

/// Finds a script mapping the span of isotropic `gens` onto `span{e_1..e_s}`.
pub fn canonicalize_isotropic(field: Field, n: usize, gens: &[PauliVector]) -> Result<(GateScript, usize), PauliError> {
    for g in gens {
        if g.field != field || g.n != n {
            return Err(PauliError::Mismatch("generator on a different space".into()));
        }
    }
    if let Some((i, j)) = first_noncommuting(gens)? {
        return Err(PauliError::NotIsotropic(i, j));
    }
    let r = generator_matrix(field, n, gens).rref();
    let mut vecs: Vec<Vec<u32>> = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
    let s = vecs.len();
    let mut red = Reducer { field, n, moves: Vec::new(), vecs: &mut vecs };
    for t in 0..s {
        red.send_to_x(t, t);
        for k in t + 1..s {
            let c = red.vecs[k][t];
            if c != 0 {
                for idx in 0..2 * n {
                    let e = red.vecs[t][idx];
                    red.vecs[k][idx] = field.sub(red.vecs[k][idx], field.mul(c, e));
                }
            }
        }
    }
    let script = GateScript::from_moves(field, n, red.moves)?;
    Ok((script, s))
}

/// Writes a symplectic matrix as a product of elementary moves.
pub fn decompose_symplectic(a: &Matrix) -> Result<GateScript, PauliError> {
    if !is_symplectic(a) {
        return Err(PauliError::NotSymplectic);
    }
    let field = a.field();
    let n = a.rows() / 2;
    // Reducing A^{-1} to the identity yields the moves of A in application order.
    let inv = a.inverse().ok_or(PauliError::NotSymplectic)?;
    let mut cols: Vec<Vec<u32>> = (0..2 * n).map(|c| inv.col(c)).collect();
    let mut red = Reducer { field, n, moves: Vec::new(), vecs: &mut cols };
    for t in 0..n {
        red.send_to_x(t, t);
        red.send_to_z(n + t, t);
    }
    let script = GateScript::from_moves(field, n, red.moves)?;
    if &script.matrix() != a {
        return Err(PauliError::NotSymplectic);
    }
    Ok(script)
}
