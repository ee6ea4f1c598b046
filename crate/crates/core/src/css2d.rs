//! Two-dimensional CSS codes: torsion of the excitation cokernel and
//! constructive extraction of toric-code blocks.

use serde::Serialize;

use crate::classify1d::{ClassifyError, LatticeGateScript, LatticeMove};
use crate::codeanalysis::logical_qubits;
use crate::gf::{Field, Matrix};
use crate::laurent::{
    coarse_grain, excitation_map, exactness_check, instantiate_torus, module_kernel, module_member, CodeDefinition,
    LaurentPoly, ModuleBasis, PolyMatrix,
};
use crate::pauli::Move;

pub const DEFAULT_B_MAX: usize = 8;
const CHECK_SIZES: [usize; 3] = [2, 3, 5];
const MAX_ROUNDS: usize = 64;
const SIMPLIFY_MAX_QUDITS: usize = 8;
const SIMPLIFY_STEPS: usize = 256;
const LOOKAHEAD_MAX_QUDITS: usize = 4;

/// A two-dimensional translation-invariant code whose generators are each
/// purely X-type or purely Z-type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    code: CodeDefinition,
}

impl CssCode {
    pub fn new(code: CodeDefinition) -> Result<Self, ClassifyError> {
        if code.nvars() != 2 {
            return Err(ClassifyError::Dimension { expected: 2, got: code.nvars() });
        }
        if !code.is_css() {
            return Err(ClassifyError::InvalidMove("code has a generator mixing X and Z components".into()));
        }
        Ok(CssCode { code })
    }

    pub fn code(&self) -> &CodeDefinition {
        &self.code
    }

    pub fn into_code(self) -> CodeDefinition {
        self.code
    }
}

fn coarse(code: &CodeDefinition, b: usize) -> Result<CodeDefinition, ClassifyError> {
    if b == 1 {
        return Ok(code.clone());
    }
    Ok(coarse_grain(code, &[b, b])?)
}

fn is_empty(code: &CodeDefinition) -> bool {
    code.q() == 0 && code.num_generators() == 0
}

fn check_injective(code: &CodeDefinition) -> Result<(), ClassifyError> {
    if module_kernel(code.sigma())?.cols() != 0 {
        return Err(ClassifyError::InvalidMove("stabilizer map has a nonzero kernel".into()));
    }
    Ok(())
}

fn check_exact(code: &CodeDefinition) -> Result<(), ClassifyError> {
    if !exactness_check(code)? {
        return Err(ClassifyError::InvalidMove("code is not exact".into()));
    }
    Ok(())
}

/// Simplifies by invertible moves, then checks exactness and injectivity.
fn prepare(code: &CodeDefinition) -> Result<(LatticeGateScript, CodeDefinition), ClassifyError> {
    if is_empty(code) {
        return Ok((LatticeGateScript::new(), code.clone()));
    }
    let mut ex = Extractor::new(code);
    ex.simplify()?;
    let simple = ex.code()?;
    check_exact(&simple)?;
    check_injective(&simple)?;
    Ok((ex.script, simple))
}

/// Whether `x - 1` and `y - 1` annihilate the cokernel of the conjugate
/// stabilizer map, after coarse-graining by `b` in both directions.
fn annihilated(code: &CodeDefinition) -> Result<bool, ClassifyError> {
    let (field, t) = (code.field(), code.num_generators());
    let basis = ModuleBasis::without_cofactors(&code.sigma().dagger())?;
    let xm = LaurentPoly::binomial_minus_one(field, 2, 0, 1);
    let ym = LaurentPoly::binomial_minus_one(field, 2, 1, 1);
    for i in 0..t {
        let unit = |p: &LaurentPoly| {
            let mut v = vec![LaurentPoly::zero(field, 2); t];
            v[i] = p.clone();
            v
        };
        if basis.contains(&unit(&LaurentPoly::one(field, 2)))? {
            continue;
        }
        if !(basis.contains(&unit(&xm))? && basis.contains(&unit(&ym))?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the annihilator condition for the code coarse-grained by `b x b`.
/// Requires an exact code with injective stabilizer map.
pub fn annihilator_condition(code: &CssCode, b: usize) -> Result<bool, ClassifyError> {
    if b == 0 {
        return Err(ClassifyError::InvalidMove("coarse-graining factor must be positive".into()));
    }
    let (_, simple) = prepare(code.code())?;
    annihilated(&coarse(&simple, b)?)
}

/// Smallest `b <= b_max` satisfying the annihilator condition.
pub fn annihilator_factor(code: &CssCode, b_max: usize) -> Result<usize, ClassifyError> {
    let (_, simple) = prepare(code.code())?;
    if is_empty(&simple) {
        return Ok(1);
    }
    search_factor(&simple, b_max)
}

fn search_factor(code: &CodeDefinition, b_max: usize) -> Result<usize, ClassifyError> {
    for b in 1..=b_max {
        if annihilated(&coarse(code, b)?)? {
            return Ok(b);
        }
    }
    Err(ClassifyError::Inconclusive(format!("annihilator condition fails for every b <= {b_max}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Torsion {
    pub dimension: usize,
    pub b: usize,
    /// Logical qudit counts of the coarse code on `L x L` tori.
    pub torus_checks: Vec<(usize, usize)>,
}

/// Dimension of the cokernel of the conjugate stabilizer map, cross-checked
/// against finite tori of the coarse-grained code.
pub fn torsion_dimension(code: &CssCode, b_max: usize) -> Result<Torsion, ClassifyError> {
    let (_, simple) = prepare(code.code())?;
    torsion_of_checked(&simple, b_max)
}

/// Torsion of a code already known to be exact with injective stabilizer map.
fn torsion_of_checked(code: &CodeDefinition, b_max: usize) -> Result<Torsion, ClassifyError> {
    if is_empty(code) {
        return Ok(Torsion { dimension: 0, b: 1, torus_checks: CHECK_SIZES.iter().map(|&l| (l, 0)).collect() });
    }
    let b = search_factor(code, b_max)?;
    let cg = coarse(code, b)?;
    let dimension = ModuleBasis::without_cofactors(&cg.sigma().dagger())?
        .quotient_dimension()
        .ok_or_else(|| ClassifyError::Internal("cokernel is not finite-dimensional".into()))?;
    let mut torus_checks = Vec::new();
    for l in CHECK_SIZES {
        let k = logical_qubits(&instantiate_torus(&cg, &[l, l])?);
        if k != dimension {
            return Err(ClassifyError::Internal(format!(
                "cokernel dimension {dimension} but {k} logical qudits on the {l}x{l} torus"
            )));
        }
        torus_checks.push((l, k));
    }
    Ok(Torsion { dimension, b, torus_checks })
}

/// Betti numbers of the `L x L` torus over F_2 from its cellular chain complex.
pub fn torus_homology(l: usize) -> Result<(usize, usize, usize), ClassifyError> {
    let f = Field::new(2).expect("2 is prime");
    let p = |s: &str| LaurentPoly::parse(f, 2, s).expect("valid literal");
    let d1 = PolyMatrix::from_rows(f, 2, vec![vec![p("x - 1"), p("y - 1")]])?.instantiate(&[l, l])?;
    let d2 = PolyMatrix::from_rows(f, 2, vec![vec![p("y - 1")], vec![p("-x + 1")]])?.instantiate(&[l, l])?;
    if !d1.mul(&d2).map_err(|e| ClassifyError::Internal(e.to_string()))?.is_zero() {
        return Err(ClassifyError::Internal("boundary of a boundary is nonzero".into()));
    }
    let n = l * l;
    let (r1, r2) = (d1.rank(), d2.rank());
    Ok((n - r1, 2 * n - r1 - r2, n - r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    X,
    Z,
}

/// Mutable state of an extraction, always a valid stabilizer map.
struct Extractor {
    q: usize,
    sigma: PolyMatrix,
    script: LatticeGateScript,
    b: usize,
}

fn poly(field: Field, terms: &[([i64; 2], i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(field, 2, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
}

fn exact_div(u: &LaurentPoly, d: &LaurentPoly) -> Result<Option<LaurentPoly>, ClassifyError> {
    if u.is_zero() {
        return Ok(Some(u.clone()));
    }
    if let Some((e, c)) = d.as_unit() {
        let inv = LaurentPoly::monomial(d.field(), e.iter().map(|a| -a).collect(), d.field().inv(c) as i64);
        return Ok(Some(u.mul(&inv)));
    }
    let gens = PolyMatrix::from_rows(d.field(), d.nvars(), vec![vec![d.clone()]])?;
    Ok(module_member(std::slice::from_ref(u), &gens)?.map(|mut v| v.remove(0)))
}

fn cost(sigma: &PolyMatrix) -> (i64, usize) {
    let mut spread = 0;
    let mut terms = 0;
    for g in 0..sigma.cols() {
        let mut lo = [i64::MAX; 2];
        let mut hi = [i64::MIN; 2];
        for p in sigma.col(g) {
            terms += p.num_terms();
            if let Some((l, h)) = p.exponent_bounds() {
                for v in 0..2 {
                    lo[v] = lo[v].min(l[v]);
                    hi[v] = hi[v].max(h[v]);
                }
            }
        }
        if lo[0] != i64::MAX {
            spread = spread.max(hi[0] - lo[0]).max(hi[1] - lo[1]);
        }
    }
    (spread, terms)
}

fn unit_inverse(u: &LaurentPoly) -> LaurentPoly {
    let (e, c) = u.as_unit().expect("unit");
    LaurentPoly::monomial(u.field(), e.iter().map(|a| -a).collect(), u.field().inv(c) as i64)
}

impl Extractor {
    fn new(code: &CodeDefinition) -> Self {
        Extractor { q: code.q(), sigma: code.sigma().clone(), script: LatticeGateScript::new(), b: 1 }
    }

    fn field(&self) -> Field {
        self.sigma.field()
    }

    fn emit(&mut self, m: LatticeMove) -> Result<(), ClassifyError> {
        if let LatticeMove::CoarseGrain { b } = &m {
            self.b *= b[0];
        }
        (self.q, self.sigma) = m.apply(self.q, &self.sigma)?;
        self.script.push(m);
        Ok(())
    }

    fn code(&self) -> Result<CodeDefinition, ClassifyError> {
        Ok(CodeDefinition::new(self.sigma.clone(), self.q)?)
    }

    fn eps(&self) -> Result<PolyMatrix, ClassifyError> {
        Ok(excitation_map(&self.code()?))
    }

    fn kind(&self, g: usize) -> Kind {
        if (0..self.q).all(|r| self.sigma.get(r, g).is_zero()) {
            Kind::Z
        } else {
            Kind::X
        }
    }

    fn gens_of(&self, k: Kind) -> Vec<usize> {
        (0..self.sigma.cols()).filter(|&g| self.kind(g) == k).collect()
    }

    /// Excitation row `dst += g * row src`.
    fn row_add(&mut self, src: usize, dst: usize, g: &LaurentPoly) -> Result<(), ClassifyError> {
        if g.is_zero() {
            return Ok(());
        }
        self.emit(LatticeMove::ColAdd { src, dst, f: g.antipode() })
    }

    fn row_scale(&mut self, row: usize, u: &LaurentPoly) -> Result<(), ClassifyError> {
        if u.is_one() {
            return Ok(());
        }
        self.emit(LatticeMove::ColScale { col: row, unit: u.antipode() })
    }

    /// Excitation left column `c += f * left column t`.
    fn left_add(&mut self, c: usize, t: usize, f: &LaurentPoly) -> Result<(), ClassifyError> {
        if f.is_zero() {
            return Ok(());
        }
        self.emit(LatticeMove::CxPoly { control: c, target: t, m: f.neg() })
    }

    /// Excitation right column `t += g * right column c`.
    fn right_add(&mut self, t: usize, c: usize, g: &LaurentPoly) -> Result<(), ClassifyError> {
        if g.is_zero() {
            return Ok(());
        }
        self.emit(LatticeMove::CxPoly { control: c, target: t, m: g.antipode() })
    }

    /// Multiplies excitation left column `k` by the constant `c`.
    fn left_scale(&mut self, k: usize, c: u32) -> Result<(), ClassifyError> {
        if c == 1 {
            return Ok(());
        }
        self.emit(LatticeMove::Cell(Move::Rescale(k, self.field().inv(c))))
    }

    fn global_hadamard(&mut self) -> Result<(), ClassifyError> {
        for k in 0..self.q {
            self.emit(LatticeMove::Cell(Move::Hadamard(k)))?;
        }
        Ok(())
    }

    /// Shifts every excitation row to nonnegative exponents with minimum zero;
    /// returns the largest exponent left.
    fn normalize_rows(&mut self) -> Result<i64, ClassifyError> {
        let field = self.field();
        let eps = self.eps()?;
        let mut top = 0;
        for g in 0..eps.rows() {
            let mut lo = [i64::MAX; 2];
            let mut hi = [i64::MIN; 2];
            for p in eps.row(g) {
                if let Some((l, h)) = p.exponent_bounds() {
                    for v in 0..2 {
                        lo[v] = lo[v].min(l[v]);
                        hi[v] = hi[v].max(h[v]);
                    }
                }
            }
            if lo[0] == i64::MAX {
                continue;
            }
            top = top.max(hi[0] - lo[0]).max(hi[1] - lo[1]);
            self.row_scale(g, &poly(field, &[([-lo[0], -lo[1]], 1)]))?;
        }
        Ok(top)
    }

    /// Greedy descent on (largest generator spread, number of terms) using
    /// monomial CNOTs, same-type generator additions and translations.
    fn simplify(&mut self) -> Result<(), ClassifyError> {
        if self.q > SIMPLIFY_MAX_QUDITS {
            return Ok(());
        }
        let field = self.field();
        let coeffs: Vec<u32> = if field.p() == 2 { vec![1] } else { vec![1, field.neg(1)] };
        let mut monos = Vec::new();
        for c in &coeffs {
            for ex in -2..=2 {
                for ey in -2..=2 {
                    monos.push(poly(field, &[([ex, ey], *c as i64)]));
                }
            }
        }
        let mut current = cost(&self.sigma);
        for _ in 0..SIMPLIFY_STEPS {
            let candidates = self.simplify_candidates(&monos, self.q, &self.sigma);
            let mut best: Option<((i64, usize), Vec<LatticeMove>)> = None;
            let mut children = Vec::new();
            for m in candidates {
                let (q2, s) = m.apply(self.q, &self.sigma)?;
                let c = cost(&s);
                if c < best.as_ref().map_or(current, |(bc, _)| *bc) {
                    best = Some((c, vec![m.clone()]));
                }
                children.push((m, q2, s));
            }
            if best.is_none() && current.0 > 1 && self.q <= LOOKAHEAD_MAX_QUDITS {
                for (m1, q2, s1) in &children {
                    for m2 in self.simplify_candidates(&monos, *q2, s1) {
                        let (_, s2) = m2.apply(*q2, s1)?;
                        let c = cost(&s2);
                        if c < best.as_ref().map_or(current, |(bc, _)| *bc) {
                            best = Some((c, vec![m1.clone(), m2]));
                        }
                    }
                }
            }
            let Some((c, moves)) = best else { break };
            for m in moves {
                self.emit(m)?;
            }
            current = c;
        }
        Ok(())
    }

    fn simplify_candidates(&self, monos: &[LaurentPoly], q: usize, sigma: &PolyMatrix) -> Vec<LatticeMove> {
        let t = sigma.cols();
        let kind = |g: usize| (0..q).all(|r| sigma.get(r, g).is_zero());
        let mut out = Vec::new();
        for c in 0..q {
            for tg in (0..q).filter(|&tg| tg != c) {
                for m in monos {
                    out.push(LatticeMove::CxPoly { control: c, target: tg, m: m.clone() });
                }
            }
        }
        for src in 0..t {
            for dst in (0..t).filter(|&d| d != src && kind(d) == kind(src)) {
                for m in monos {
                    out.push(LatticeMove::ColAdd { src, dst, f: m.clone() });
                }
            }
        }
        for qudit in 0..q {
            for sx in -1..=1 {
                for sy in -1..=1 {
                    if (sx, sy) != (0, 0) {
                        out.push(LatticeMove::Translate { qudit, shift: vec![sx, sy] });
                    }
                }
            }
        }
        out
    }

    fn stall(&self, what: &str) -> ClassifyError {
        let eps = self.eps().map(|e| format!("{e:?}")).unwrap_or_default();
        ClassifyError::Internal(format!("toric extraction stalled: {what}; excitation map {eps}"))
    }

    /// Reduces the evaluation at `x = y = 1` of the rows of one kind to
    /// reduced echelon form by constant row operations.
    fn echelon_at_one(&mut self, kind: Kind) -> Result<(), ClassifyError> {
        let field = self.field();
        let q = self.q;
        let rows = self.gens_of(kind);
        let offset = if kind == Kind::Z { 0 } else { q };
        let mut next = 0;
        for col in 0..q {
            let eps = self.eps()?;
            let m = eps.eval_ones();
            let Some(&piv) = rows[next..].iter().find(|&&r| m.get(r, offset + col) != 0) else { continue };
            let target = rows[next];
            if piv != target {
                self.emit(LatticeMove::ColSwap(piv, target))?;
            }
            let m = self.eps()?.eval_ones();
            let inv = field.inv(m.get(target, offset + col));
            self.row_scale(target, &LaurentPoly::constant(field, 2, inv as i64))?;
            let m = self.eps()?.eval_ones();
            for &r in &rows {
                let c = m.get(r, offset + col);
                if r != target && c != 0 {
                    self.row_add(target, r, &LaurentPoly::constant(field, 2, field.neg(c) as i64))?;
                }
            }
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Ok(())
    }

    /// A Z-type excitation row whose entries all vanish at `x = y = 1`.
    fn torsion_row(&mut self) -> Result<Option<usize>, ClassifyError> {
        for _ in 0..2 {
            self.echelon_at_one(Kind::Z)?;
            let eps = self.eps()?;
            let m = eps.eval_ones();
            let found = self.gens_of(Kind::Z).into_iter().find(|&g| (0..self.q).all(|k| m.get(g, k) == 0));
            if found.is_some() {
                return Ok(found);
            }
            self.global_hadamard()?;
        }
        Ok(None)
    }

    /// Brings row `i` (degree at most one, entries in the augmentation ideal)
    /// to `x - 1` at `a`, `y - 1` at `b`, zero elsewhere.
    fn two_entry_form(&mut self, i: usize) -> Result<(usize, usize), ClassifyError> {
        let field = self.field();
        let q = self.q;
        let eps = self.eps()?;
        for k in 0..q {
            if let Some((lo, _)) = eps.get(i, k).exponent_bounds() {
                if lo.iter().any(|&e| e != 0) {
                    self.emit(LatticeMove::Translate { qudit: k, shift: lo })?;
                }
            }
        }
        let eps = self.eps()?;
        let mut coef = vec![[0u32; 3]; q];
        for (k, c) in coef.iter_mut().enumerate() {
            let p = eps.get(i, k);
            for (e, v) in p.terms() {
                match (e[0], e[1]) {
                    (0, 0) => {}
                    (1, 0) => c[0] = v,
                    (0, 1) => c[1] = v,
                    (1, 1) => c[2] = v,
                    _ => return Err(self.stall("torsion row is not of degree one")),
                }
            }
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        for s in 0..3 {
            let Some(k) = (0..q).find(|k| coef[*k][s] != 0 && pivots.iter().all(|(pk, _)| pk != k)) else { continue };
            let inv = field.inv(coef[k][s]);
            self.left_scale(k, inv)?;
            coef[k] = coef[k].map(|v| field.mul(v, inv));
            for other in 0..q {
                let c = coef[other][s];
                if other != k && c != 0 {
                    self.emit(LatticeMove::Cell(Move::Cnot(other, k, c)))?;
                    let row = coef[k];
                    for (t, v) in coef[other].iter_mut().enumerate() {
                        *v = field.sub(*v, field.mul(c, row[t]));
                    }
                }
            }
            pivots.push((k, s));
        }
        let rows: Vec<[u32; 3]> = pivots.iter().map(|(k, _)| coef[*k]).collect();
        let slots: Vec<usize> = pivots.iter().map(|(_, s)| *s).collect();
        let pure = rows.iter().zip(&slots).all(|(r, &s)| (0..3).all(|t| t == s || r[t] == 0));
        let one = LaurentPoly::one(field, 2);
        match (slots.as_slice(), pure) {
            ([0, 1, 2], _) => {
                let (a, b, c) = (pivots[0].0, pivots[1].0, pivots[2].0);
                let y = poly(field, &[([0, 1], 1)]);
                self.left_add(c, a, &y.neg())?;
                self.left_add(c, b, &one.neg())?;
                Ok((a, b))
            }
            ([0, 1], true) => Ok((pivots[0].0, pivots[1].0)),
            ([0, 2], true) => {
                self.emit(LatticeMove::Redefine { matrix: vec![vec![1, -1], vec![0, 1]] })?;
                Ok((pivots[0].0, pivots[1].0))
            }
            ([1, 2], true) => {
                self.emit(LatticeMove::Redefine { matrix: vec![vec![1, 0], vec![-1, 1]] })?;
                Ok((pivots[1].0, pivots[0].0))
            }
            _ => Err(self.stall("torsion row does not generate the augmentation ideal")),
        }
    }

    /// Decouples the toric block around row `i = (x - 1 at a, y - 1 at b)`.
    /// Returns `Ok(false)` when the partner row needs another coarse round.
    fn finish(&mut self, i: usize, a: usize, b: usize) -> Result<bool, ClassifyError> {
        let field = self.field();
        let q = self.q;
        let xm = LaurentPoly::binomial_minus_one(field, 2, 0, 1);
        let ym = LaurentPoly::binomial_minus_one(field, 2, 1, 1);
        let eps = self.eps()?;
        debug_assert!(eps.get(i, a) == &xm && eps.get(i, b) == &ym);

        // Logical X operators of the block, moved onto qudits a and b at x = y = 1.
        let zrows = self.gens_of(Kind::Z);
        let pos_i = zrows.iter().position(|&g| g == i).expect("Z row");
        let left = eps.select_rows(&zrows).select_cols(&(0..q).collect::<Vec<_>>());
        let basis = ModuleBasis::new(&left)?;
        let mut evals = Vec::new();
        for target in [&xm, &ym] {
            let mut v = vec![LaurentPoly::zero(field, 2); zrows.len()];
            v[pos_i] = target.clone();
            let sol = basis.solve(&v)?.ok_or_else(|| self.stall("annihilator condition fails for the torsion row"))?;
            evals.push(sol.iter().map(LaurentPoly::eval_ones).collect::<Vec<u32>>());
        }
        let (u, w) = (&evals[0], &evals[1]);
        if (u[a], u[b], w[a], w[b]) != (1, 0, 0, 1) {
            return Err(self.stall("logical operators do not restrict to the block qudits"));
        }
        for c in (0..q).filter(|&c| c != a && c != b) {
            if u[c] != 0 {
                self.emit(LatticeMove::Cell(Move::Cnot(a, c, field.neg(u[c]))))?;
            }
            if w[c] != 0 {
                self.emit(LatticeMove::Cell(Move::Cnot(b, c, field.neg(w[c]))))?;
            }
        }
        let eps = self.eps()?;
        if (0..eps.rows()).any(|r| eps.get(r, a).eval_ones() != 0 || eps.get(r, b).eval_ones() != 0) {
            return Err(self.stall("block columns do not vanish at x = y = 1"));
        }
        if (0..eps.rows()).all(|r| eps.get(r, q + a).is_zero() && eps.get(r, q + b).is_zero()) {
            return Err(self.stall("no X-type row meets the block"));
        }

        // Partner X-type row.
        let ybar = LaurentPoly::binomial_minus_one(field, 2, 1, -1);
        let kappa_b = LaurentPoly::one(field, 2).sub(&poly(field, &[([-1, 0], 1)]));
        let xrows = self.gens_of(Kind::X);
        let mut factors = Vec::new();
        for &r in &xrows {
            let ua = eps.get(r, q + a);
            let f = exact_div(ua, &ybar)?.ok_or_else(|| self.stall("block entries are not a Koszul multiple"))?;
            if f.mul(&kappa_b) != *eps.get(r, q + b) {
                return Err(self.stall("block entries are not a Koszul multiple"));
            }
            factors.push(f);
        }
        let m = eps.eval_ones();
        let vanishes = |r: usize| (0..q).all(|k| m.get(r, q + k) == 0);
        let units: Vec<usize> = (0..xrows.len()).filter(|&n| factors[n].as_unit().is_some()).collect();
        let Some(&pn) = units.iter().find(|&&n| vanishes(xrows[n])).or(units.first()) else { return Ok(false) };
        let j = xrows[pn];
        let rj = factors[pn].clone();
        let rj_inv = unit_inverse(&rj);
        for (n, &r) in xrows.iter().enumerate() {
            if r != j && !factors[n].is_zero() {
                self.row_add(j, r, &factors[n].mul(&rj_inv).neg())?;
            }
        }
        let others: Vec<usize> = xrows.iter().copied().filter(|&r| r != j).collect();
        let m = self.eps()?.eval_ones();
        let lhs = Matrix::from_fn(field, q, others.len(), |k, n| m.get(others[n], q + k));
        let rhs: Vec<u32> = (0..q).map(|k| m.get(j, q + k)).collect();
        let Some(comb) = lhs.solve(&rhs).map_err(|e| ClassifyError::Internal(e.to_string()))? else { return Ok(false) };
        for (n, &r) in others.iter().enumerate() {
            if comb[n] != 0 {
                self.row_add(r, j, &LaurentPoly::constant(field, 2, field.neg(comb[n]) as i64))?;
            }
        }
        self.row_scale(j, &rj_inv)?;

        let eps = self.eps()?;
        let gens = PolyMatrix::from_rows(field, 2, vec![vec![eps.get(j, q + a).clone(), eps.get(j, q + b).clone()]])?;
        let pair = ModuleBasis::new(&gens)?;
        for k in (0..q).filter(|&k| k != a && k != b) {
            let e = eps.get(j, q + k).clone();
            if e.is_zero() {
                continue;
            }
            let sol = pair.solve(&[e])?.ok_or_else(|| self.stall("partner row entry outside the augmentation ideal"))?;
            self.right_add(k, a, &sol[0].neg())?;
            self.right_add(k, b, &sol[1].neg())?;
        }

        let eps = self.eps()?;
        for r in self.gens_of(Kind::Z) {
            if r == i {
                continue;
            }
            let s = exact_div(eps.get(r, a), &xm)?.ok_or_else(|| self.stall("Z row is not a multiple of the block row"))?;
            if s.mul(&ym) != *eps.get(r, b) {
                return Err(self.stall("Z row is not a multiple of the block row"));
            }
            self.row_add(i, r, &s.neg())?;
        }
        self.emit(LatticeMove::Split { qudits: [a, b], gens: [i, j] })?;
        Ok(true)
    }

    fn extract(&mut self) -> Result<(), ClassifyError> {
        self.simplify()?;
        for _ in 0..MAX_ROUNDS {
            let top = self.normalize_rows()?;
            if top > 1 {
                let n = top as usize;
                self.emit(LatticeMove::CoarseGrain { b: vec![n, n] })?;
                continue;
            }
            let Some(i) = self.torsion_row()? else { return Err(self.stall("no torsion row")) };
            let (a, b) = self.two_entry_form(i)?;
            let field = self.field();
            let xm = LaurentPoly::binomial_minus_one(field, 2, 0, 1);
            let ym = LaurentPoly::binomial_minus_one(field, 2, 1, 1);
            let eps = self.eps()?;
            if eps.get(i, a) != &xm || eps.get(i, b) != &ym || (0..2 * self.q).any(|k| k != a && k != b && !eps.get(i, k).is_zero()) {
                return Err(self.stall("torsion row not in two-entry form"));
            }
            if self.finish(i, a, b)? {
                return Ok(());
            }
        }
        Err(ClassifyError::Inconclusive(format!("toric extraction did not converge in {MAX_ROUNDS} rounds")))
    }
}

/// Outcome of a single extraction.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub script: LatticeGateScript,
    /// Two-qudit stabilizer map of the removed block.
    pub block: PolyMatrix,
    pub reduced: CodeDefinition,
    /// Total coarse-graining factor applied per direction.
    pub b: usize,
}

/// Finds one toric-code block, decouples it by translation-invariant
/// moves and splits it off.
pub fn extract_toric_block(code: &CssCode, b_max: usize) -> Result<Extraction, ClassifyError> {
    let (script, simple) = prepare(code.code())?;
    let mut ex = extract_checked(&simple, b_max)?;
    let mut full = script;
    full.extend(&ex.script);
    ex.script = full;
    Ok(ex)
}

fn extract_checked(code: &CodeDefinition, b_max: usize) -> Result<Extraction, ClassifyError> {
    let b0 = search_factor(code, b_max)?;
    let mut ex = Extractor::new(code);
    if b0 > 1 {
        ex.emit(LatticeMove::CoarseGrain { b: vec![b0, b0] })?;
    }
    ex.extract()?;
    let Some(LatticeMove::Split { .. }) = ex.script.moves().last() else {
        return Err(ClassifyError::Internal("extraction did not end in a split".into()));
    };
    let (mut q, mut s) = (code.q(), code.sigma().clone());
    let mut block = None;
    for m in ex.script.moves() {
        if let Some(bl) = m.split_block(q, &s)? {
            block = Some(bl);
        }
        (q, s) = m.apply(q, &s)?;
    }
    if q != ex.q || s != ex.sigma {
        return Err(ClassifyError::Internal("extraction witness does not replay".into()));
    }
    let block = block.expect("split present");
    check_toric_block(&block)?;
    Ok(Extraction { script: ex.script, block, reduced: CodeDefinition::new(s, q)?, b: ex.b })
}

/// Whether a two-qudit block is the toric code up to the choice of axes.
fn check_toric_block(block: &PolyMatrix) -> Result<(), ClassifyError> {
    let code = CodeDefinition::new(block.clone(), 2)?;
    let t = torsion_dimension(&CssCode::new(code)?, 1)?;
    if t.dimension != 2 {
        return Err(ClassifyError::Internal(format!("split block has torsion {} instead of 2", t.dimension)));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoDReport {
    pub toric_copies: usize,
    pub torsion_dim: usize,
    pub b: usize,
    pub witness: LatticeGateScript,
    pub residual_q: usize,
    #[serde(serialize_with = "crate::classify1d::serialize_matrix")]
    pub residual: PolyMatrix,
}

/// Repeatedly extracts toric blocks until the cokernel is trivial.
pub fn classify_2d(code: &CodeDefinition, b_max: usize) -> Result<TwoDReport, ClassifyError> {
    CssCode::new(code.clone())?;
    let (mut witness, simple) = prepare(code)?;
    let torsion = torsion_of_checked(&simple, b_max)?;
    if torsion.dimension % 2 != 0 {
        return Err(ClassifyError::Internal(format!("odd cokernel dimension {}", torsion.dimension)));
    }
    let mut current = CssCode::new(simple)?;
    let mut remaining = torsion.dimension;
    let mut b = 1;
    while remaining > 0 {
        let ex = extract_checked(current.code(), b_max)?;
        witness.extend(&ex.script);
        b *= ex.b;
        current = CssCode::new(ex.reduced)?;
        let left = torsion_of_checked(current.code(), b_max)?.dimension;
        if left + 2 != remaining {
            return Err(ClassifyError::Internal(format!("extraction lowered the cokernel from {remaining} to {left}")));
        }
        remaining = left;
    }
    let (rq, rs) = witness.apply(code.q(), code.sigma())?;
    if rq != current.code().q() || &rs != current.code().sigma() {
        return Err(ClassifyError::Internal("witness replay does not reproduce the residual code".into()));
    }
    Ok(TwoDReport {
        toric_copies: torsion.dimension / 2,
        torsion_dim: torsion.dimension,
        b,
        witness,
        residual_q: rq,
        residual: rs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(q: usize, rows: &[&[&str]]) -> CodeDefinition {
        let f = Field::new(2).unwrap();
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        CodeDefinition::new(PolyMatrix::parse(f, 2, &rows).unwrap(), q).unwrap()
    }

    fn toric() -> CodeDefinition {
        code(2, &[&["1 + x", "0"], &["1 + y", "0"], &["0", "1 + y^-1"], &["0", "1 + x^-1"]])
    }

    #[test]
    fn homology_of_tori() {
        for l in 1..=4 {
            assert_eq!(torus_homology(l).unwrap(), (1, 2, 1));
        }
    }

    #[test]
    fn toric_torsion() {
        let t = torsion_dimension(&CssCode::new(toric()).unwrap(), DEFAULT_B_MAX).unwrap();
        assert_eq!((t.dimension, t.b), (2, 1));
    }

    #[test]
    fn toric_extraction() {
        let r = classify_2d(&toric(), DEFAULT_B_MAX).unwrap();
        assert_eq!(r.toric_copies, 1);
        assert_eq!(r.residual_q, 0);
        assert!(r.witness.moves().iter().all(|m| !matches!(m, LatticeMove::CoarseGrain { .. })));
    }

    #[test]
    fn stacked_pair() {
        let z = "0";
        let s = code(
            4,
            &[
                &["1 + x", z, z, z],
                &["1 + y", z, z, z],
                &[z, z, "1 + x", z],
                &[z, z, "1 + y", z],
                &[z, "1 + y^-1", z, z],
                &[z, "1 + x^-1", z, z],
                &[z, z, z, "1 + y^-1"],
                &[z, z, z, "1 + x^-1"],
            ],
        );
        let r = classify_2d(&s, DEFAULT_B_MAX).unwrap();
        assert_eq!((r.toric_copies, r.torsion_dim), (2, 4));
    }
}
