//! Buchberger's algorithm for submodules of F_p[t, x_1..x_D]^r, used to
//! answer kernel, membership and quotient-dimension questions over the
//! Laurent ring via the relation `t x_1 ... x_D = 1`.
//!
//! Monomials are ordered graded-lex on (t, x_1, .., x_D); module terms
//! position-over-term with lower positions larger.

use std::cmp::Ordering;

use super::{LaurentError, LaurentPoly, PolyMatrix};
use crate::gf::Field;

pub const MAX_VARS: usize = 3;
const SLOTS: usize = MAX_VARS + 1;

/// Exponents of (t, x_1, .., x_D); unused slots stay zero.
pub type Mono = [u32; SLOTS];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub pos: usize,
    pub mono: Mono,
    pub coeff: u32,
}

fn degree(m: &Mono) -> u32 {
    m.iter().sum()
}

fn cmp_key(ap: usize, am: &Mono, bp: usize, bm: &Mono) -> Ordering {
    bp.cmp(&ap).then_with(|| degree(am).cmp(&degree(bm))).then_with(|| am.cmp(bm))
}

fn divides(a: &Mono, b: &Mono) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &Mono, b: &Mono) -> Mono {
    std::array::from_fn(|i| a[i].max(b[i]))
}

fn quotient(b: &Mono, a: &Mono) -> Mono {
    std::array::from_fn(|i| b[i] - a[i])
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    std::array::from_fn(|i| a[i] + b[i])
}

/// Element of a free module, terms sorted in decreasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModVec {
    terms: Vec<Term>,
}

impl ModVec {
    pub fn from_terms(mut terms: Vec<Term>) -> Self {
        terms.retain(|t| t.coeff != 0);
        terms.sort_by(|a, b| cmp_key(b.pos, &b.mono, a.pos, &a.mono));
        ModVec { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn lead(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self, field: Field) {
        if let Some(l) = self.terms.first() {
            let inv = field.inv(l.coeff);
            for t in &mut self.terms {
                t.coeff = field.mul(t.coeff, inv);
            }
        }
    }

    /// `self - c * m * g`.
    fn sub_mul(&self, field: Field, c: u32, m: &Mono, g: &ModVec) -> ModVec {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let (mut i, mut j) = (0, 0);
        let neg = field.neg(c);
        while i < self.terms.len() || j < g.terms.len() {
            let a = self.terms.get(i);
            let b = g.terms.get(j).map(|t| Term { pos: t.pos, mono: mono_mul(&t.mono, m), coeff: field.mul(t.coeff, neg) });
            match (a, b) {
                (Some(a), Some(b)) => match cmp_key(a.pos, &a.mono, b.pos, &b.mono) {
                    Ordering::Greater => {
                        out.push(*a);
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push(b);
                        j += 1;
                    }
                    Ordering::Equal => {
                        let s = field.add(a.coeff, b.coeff);
                        if s != 0 {
                            out.push(Term { coeff: s, ..*a });
                        }
                        i += 1;
                        j += 1;
                    }
                },
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        ModVec { terms: out }
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    pos: usize,
    lcm: Mono,
}

/// A Groebner basis of a submodule of a free module with `npos` positions.
#[derive(Clone, Debug)]
pub struct Groebner {
    field: Field,
    npos: usize,
    basis: Vec<ModVec>,
    by_pos: Vec<Vec<usize>>,
}

impl Groebner {
    /// Computes a reduced basis. With `keep_below = Some(r)` only the part
    /// of the basis with leading position `< r` is computed.
    pub fn compute(field: Field, npos: usize, gens: Vec<ModVec>, keep_below: Option<usize>) -> Self {
        let limit = keep_below.unwrap_or(npos);
        let mut gb = Groebner { field, npos, basis: Vec::new(), by_pos: vec![Vec::new(); npos] };
        let mut pairs: Vec<Pair> = Vec::new();
        let mut queue: Vec<ModVec> = gens;
        queue.reverse();
        loop {
            let next = if let Some(g) = queue.pop() {
                g
            } else if let Some(k) = select_pair(&pairs) {
                let p = pairs.swap_remove(k);
                gb.s_vector(&p)
            } else {
                break;
            };
            let mut h = gb.reduce(next, true, npos);
            let Some(lead) = h.lead() else { continue };
            if lead.pos >= limit {
                continue;
            }
            h.make_monic(field);
            gb.insert(h, &mut pairs);
        }
        gb.interreduce();
        gb
    }

    fn s_vector(&self, p: &Pair) -> ModVec {
        let (f, g) = (&self.basis[p.i], &self.basis[p.j]);
        let (lf, lg) = (f.lead().unwrap(), g.lead().unwrap());
        let mf = quotient(&p.lcm, &lf.mono);
        let mg = quotient(&p.lcm, &lg.mono);
        let fm = ModVec::default().sub_mul(self.field, self.field.neg(1), &mf, f);
        fm.sub_mul(self.field, 1, &mg, g)
    }

    fn insert(&mut self, h: ModVec, pairs: &mut Vec<Pair>) {
        let hl = *h.lead().unwrap();
        let idx = self.basis.len();
        let mut new: Vec<Pair> = self.by_pos[hl.pos]
            .iter()
            .map(|&i| Pair { i, j: idx, pos: hl.pos, lcm: lcm(&self.basis[i].lead().unwrap().mono, &hl.mono) })
            .collect();
        // Chain criterion on old pairs.
        pairs.retain(|p| {
            if p.pos != hl.pos || !divides(&hl.mono, &p.lcm) {
                return true;
            }
            let li = lcm(&self.basis[p.i].lead().unwrap().mono, &hl.mono);
            let lj = lcm(&self.basis[p.j].lead().unwrap().mono, &hl.mono);
            li == p.lcm || lj == p.lcm
        });
        // Keep new pairs whose lcm is minimal, one per distinct lcm.
        new.sort_by(|a, b| degree(&a.lcm).cmp(&degree(&b.lcm)).then(a.lcm.cmp(&b.lcm)));
        let mut kept: Vec<Pair> = Vec::new();
        for p in new {
            if kept.iter().any(|k| divides(&k.lcm, &p.lcm)) {
                continue;
            }
            kept.push(p);
        }
        pairs.extend(kept);
        self.by_pos[hl.pos].push(idx);
        self.basis.push(h);
    }

    fn find_reducer(&self, t: &Term) -> Option<usize> {
        self.by_pos
            .get(t.pos)?
            .iter()
            .copied()
            .find(|&i| divides(&self.basis[i].lead().unwrap().mono, &t.mono))
    }

    /// Reduces `f`. With `full` every term at a position `< pos_limit` is
    /// reduced, otherwise only the leading term.
    pub fn reduce(&self, mut f: ModVec, full: bool, pos_limit: usize) -> ModVec {
        let mut k = 0;
        while k < f.terms.len() {
            let t = f.terms[k];
            if t.pos >= pos_limit {
                if full {
                    break;
                }
                return f;
            }
            match self.find_reducer(&t) {
                Some(i) => {
                    let g = &self.basis[i];
                    let gl = g.lead().unwrap();
                    let c = self.field.mul(t.coeff, self.field.inv(gl.coeff));
                    let m = quotient(&t.mono, &gl.mono);
                    f = f.sub_mul(self.field, c, &m, g);
                }
                None => {
                    if !full {
                        return f;
                    }
                    k += 1;
                }
            }
        }
        f
    }

    fn interreduce(&mut self) {
        let n = self.basis.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            let li = *self.basis[i].lead().unwrap();
            for j in 0..n {
                if i == j || !keep[j] {
                    continue;
                }
                let lj = self.basis[j].lead().unwrap();
                if lj.pos == li.pos && divides(&lj.mono, &li.mono) && (lj.mono != li.mono || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut basis: Vec<ModVec> = self.basis.drain(..).zip(keep).filter(|(_, k)| *k).map(|(b, _)| b).collect();
        basis.sort_by(|a, b| {
            let (la, lb) = (a.lead().unwrap(), b.lead().unwrap());
            cmp_key(lb.pos, &lb.mono, la.pos, &la.mono)
        });
        self.rebuild_index(basis);
        for i in 0..self.basis.len() {
            let mut v = std::mem::take(&mut self.basis[i]);
            let lead = v.terms.remove(0);
            let tail = self.reduce_skipping(ModVec { terms: v.terms }, i);
            let mut terms = vec![lead];
            terms.extend(tail.terms);
            self.basis[i] = ModVec { terms };
        }
    }

    fn reduce_skipping(&self, mut f: ModVec, skip: usize) -> ModVec {
        let mut k = 0;
        while k < f.terms.len() {
            let t = f.terms[k];
            let r = self.by_pos.get(t.pos).and_then(|v| {
                v.iter().copied().find(|&i| i != skip && divides(&self.basis[i].lead().unwrap().mono, &t.mono))
            });
            match r {
                Some(i) => {
                    let g = &self.basis[i];
                    let gl = g.lead().unwrap();
                    let c = self.field.mul(t.coeff, self.field.inv(gl.coeff));
                    f = f.sub_mul(self.field, c, &quotient(&t.mono, &gl.mono), g);
                }
                None => k += 1,
            }
        }
        f
    }

    fn rebuild_index(&mut self, basis: Vec<ModVec>) {
        self.by_pos = vec![Vec::new(); self.npos];
        for (i, b) in basis.iter().enumerate() {
            self.by_pos[b.lead().unwrap().pos].push(i);
        }
        self.basis = basis;
    }

    pub fn basis(&self) -> &[ModVec] {
        &self.basis
    }

    /// Number of standard monomials at positions `< rows` in `nvars`
    /// variables, or `None` if infinite.
    pub fn standard_monomial_count(&self, rows: usize, nvars: usize) -> Option<usize> {
        let mut total = 0usize;
        for pos in 0..rows {
            let leads: Vec<Mono> = self.by_pos[pos].iter().map(|&i| self.basis[i].lead().unwrap().mono).collect();
            let mut bounds = [1u32; SLOTS];
            for (v, bound) in bounds.iter_mut().enumerate().take(nvars) {
                let pure = leads
                    .iter()
                    .filter(|m| m.iter().enumerate().all(|(k, &e)| k == v || e == 0))
                    .map(|m| m[v])
                    .min()?;
                *bound = pure;
            }
            let mut m: Mono = [0; SLOTS];
            loop {
                if !leads.iter().any(|l| divides(l, &m)) {
                    total += 1;
                }
                let mut v = 0;
                loop {
                    if v == nvars {
                        break;
                    }
                    m[v] += 1;
                    if m[v] < bounds[v] {
                        break;
                    }
                    m[v] = 0;
                    v += 1;
                }
                if v == nvars {
                    break;
                }
            }
        }
        Some(total)
    }
}

fn select_pair(pairs: &[Pair]) -> Option<usize> {
    (0..pairs.len()).min_by(|&a, &b| {
        let (pa, pb) = (&pairs[a], &pairs[b]);
        degree(&pa.lcm)
            .cmp(&degree(&pb.lcm))
            .then_with(|| cmp_key(pb.pos, &pb.lcm, pa.pos, &pa.lcm))
            .then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
    })
}

fn to_mono(e: &[i64]) -> Mono {
    let shift = e.iter().copied().min().unwrap_or(0).min(0).unsigned_abs() as u32;
    let mut m = [0; SLOTS];
    m[0] = shift;
    for (i, &a) in e.iter().enumerate() {
        m[i + 1] = (a + shift as i64) as u32;
    }
    m
}

fn push_laurent(p: &LaurentPoly, pos: usize, out: &mut Vec<Term>) {
    for (e, c) in p.terms() {
        out.push(Term { pos, mono: to_mono(e), coeff: c });
    }
}

fn relation(field: Field, nvars: usize, pos: usize) -> ModVec {
    let mut m = [1u32; SLOTS];
    for slot in m.iter_mut().skip(nvars + 1) {
        *slot = 0;
    }
    ModVec::from_terms(vec![
        Term { pos, mono: m, coeff: 1 },
        Term { pos, mono: [0; SLOTS], coeff: field.neg(1) },
    ])
}

fn to_laurent(field: Field, nvars: usize, v: &ModVec, offset: usize, len: usize) -> Vec<LaurentPoly> {
    let mut out = vec![LaurentPoly::zero(field, nvars); len];
    for t in v.terms() {
        if t.pos < offset || t.pos >= offset + len {
            continue;
        }
        let e: Vec<i64> = (0..nvars).map(|i| t.mono[i + 1] as i64 - t.mono[0] as i64).collect();
        out[t.pos - offset].add_term(e, t.coeff);
    }
    out
}

fn check_vars(nvars: usize) -> Result<(), LaurentError> {
    if nvars > MAX_VARS {
        return Err(LaurentError::TooManyVariables(nvars));
    }
    Ok(())
}

/// Groebner data for the submodule of R^r spanned by the columns of a matrix.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    gens: PolyMatrix,
    gb: Groebner,
    tracked: bool,
}

impl ModuleBasis {
    fn build(gens: &PolyMatrix, tracked: bool, kernel: bool) -> Result<Self, LaurentError> {
        check_vars(gens.nvars())?;
        let (field, nvars, r, c) = (gens.field(), gens.nvars(), gens.rows(), gens.cols());
        let npos = if tracked { r + c } else { r };
        let mut input = Vec::new();
        for j in 0..c {
            let mut terms = Vec::new();
            for i in 0..r {
                push_laurent(gens.get(i, j), i, &mut terms);
            }
            if tracked {
                terms.push(Term { pos: r + j, mono: [0; SLOTS], coeff: 1 });
            }
            input.push(ModVec::from_terms(terms));
        }
        for i in 0..r {
            input.push(relation(field, nvars, i));
        }
        let keep = if kernel { None } else { Some(r) };
        let gb = Groebner::compute(field, npos, input, keep);
        Ok(ModuleBasis { gens: gens.clone(), gb, tracked })
    }

    /// Basis supporting membership with cofactors.
    pub fn new(gens: &PolyMatrix) -> Result<Self, LaurentError> {
        Self::build(gens, true, false)
    }

    /// Basis supporting membership tests only.
    pub fn without_cofactors(gens: &PolyMatrix) -> Result<Self, LaurentError> {
        Self::build(gens, false, false)
    }

    pub fn generators(&self) -> &PolyMatrix {
        &self.gens
    }

    fn reduce_vector(&self, v: &[LaurentPoly]) -> Result<ModVec, LaurentError> {
        if v.len() != self.gens.rows() {
            return Err(LaurentError::Shape(format!("vector of length {} for {} rows", v.len(), self.gens.rows())));
        }
        if v.iter().any(|p| p.field() != self.gens.field() || p.nvars() != self.gens.nvars()) {
            return Err(LaurentError::Ring("vector over a different ring".into()));
        }
        let mut terms = Vec::new();
        for (i, p) in v.iter().enumerate() {
            push_laurent(p, i, &mut terms);
        }
        Ok(self.gb.reduce(ModVec::from_terms(terms), true, self.gens.rows()))
    }

    pub fn contains(&self, v: &[LaurentPoly]) -> Result<bool, LaurentError> {
        let rem = self.reduce_vector(v)?;
        Ok(rem.lead().is_none_or(|t| t.pos >= self.gens.rows()))
    }

    /// Coefficients `a` with `gens * a = v`, verified by substitution.
    pub fn solve(&self, v: &[LaurentPoly]) -> Result<Option<Vec<LaurentPoly>>, LaurentError> {
        if !self.tracked {
            return Err(LaurentError::Invalid("basis built without cofactors".into()));
        }
        let r = self.gens.rows();
        let rem = self.reduce_vector(v)?;
        if rem.lead().is_some_and(|t| t.pos < r) {
            return Ok(None);
        }
        let (field, nvars) = (self.gens.field(), self.gens.nvars());
        let coeffs: Vec<LaurentPoly> =
            to_laurent(field, nvars, &rem, r, self.gens.cols()).into_iter().map(|p| p.neg()).collect();
        let check = self.gens.mul(&PolyMatrix::column(field, nvars, coeffs.clone()))?;
        if check.col(0) != v {
            return Err(LaurentError::Invalid("membership witness failed verification".into()));
        }
        Ok(Some(coeffs))
    }

    /// F_p-dimension of `R^r / span`, or `None` if infinite.
    pub fn quotient_dimension(&self) -> Option<usize> {
        self.gb.standard_monomial_count(self.gens.rows(), self.gens.nvars() + 1)
    }
}

/// Coefficients `a` with `gens * a = v`, if any.
pub fn module_member(v: &[LaurentPoly], gens: &PolyMatrix) -> Result<Option<Vec<LaurentPoly>>, LaurentError> {
    ModuleBasis::new(gens)?.solve(v)
}

/// Columns generating `{v : m v = 0}` over the Laurent ring.
pub fn module_kernel(m: &PolyMatrix) -> Result<PolyMatrix, LaurentError> {
    let basis = ModuleBasis::build(m, true, true)?;
    let (field, nvars, r, c) = (m.field(), m.nvars(), m.rows(), m.cols());
    let mut cols: Vec<Vec<LaurentPoly>> = Vec::new();
    for v in basis.gb.basis() {
        if v.lead().is_some_and(|t| t.pos < r) {
            continue;
        }
        let col = normalize_column(to_laurent(field, nvars, v, r, c));
        if col.iter().all(LaurentPoly::is_zero) || cols.contains(&col) {
            continue;
        }
        cols.push(col);
    }
    for col in &cols {
        let prod = m.mul(&PolyMatrix::column(field, nvars, col.clone()))?;
        if !prod.is_zero() {
            return Err(LaurentError::Invalid("kernel generator failed verification".into()));
        }
    }
    let cols = prune_generators(field, nvars, c, cols)?;
    let mut out = PolyMatrix::zeros(field, nvars, c, cols.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, p) in col.into_iter().enumerate() {
            out.set(i, j, p);
        }
    }
    Ok(out)
}

/// Scales a column by a unit so that its first nonzero entry has lowest
/// exponent zero and leading coefficient one.
fn normalize_column(mut col: Vec<LaurentPoly>) -> Vec<LaurentPoly> {
    let Some(first) = col.iter().find(|p| !p.is_zero()) else { return col };
    let field = first.field();
    let (lo, _) = first.exponent_bounds().unwrap();
    let shift: Vec<i64> = lo.iter().map(|a| -a).collect();
    let lead_c = first.terms().map(|(_, c)| c).next().unwrap_or(1);
    let s = field.inv(lead_c);
    for p in &mut col {
        *p = p.shift(&shift).scale(s);
    }
    col
}

const PRUNE_LIMIT: usize = 16;

/// Drops generators lying in the span of the others, scanning from the last.
fn prune_generators(
    field: Field,
    nvars: usize,
    rows: usize,
    mut cols: Vec<Vec<LaurentPoly>>,
) -> Result<Vec<Vec<LaurentPoly>>, LaurentError> {
    if cols.len() > PRUNE_LIMIT {
        return Ok(cols);
    }
    let mut k = cols.len();
    while k > 0 {
        k -= 1;
        if cols.len() < 2 {
            break;
        }
        let others: Vec<&Vec<LaurentPoly>> = cols.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| c).collect();
        let m = PolyMatrix::from_fn(field, nvars, rows, others.len(), |i, j| others[j][i].clone());
        if ModuleBasis::without_cofactors(&m)?.contains(&cols[k])? {
            cols.remove(k);
        }
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;

    fn pm(field: Field, nvars: usize, rows: &[&[&str]]) -> PolyMatrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        PolyMatrix::parse(field, nvars, &rows).unwrap()
    }

    #[test]
    fn kernel_of_domain_element_is_zero() {
        let f = Field::new(2).unwrap();
        let k = module_kernel(&pm(f, 1, &[&["x - 1"]])).unwrap();
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn koszul_syzygy() {
        let f = Field::new(3).unwrap();
        let m = pm(f, 2, &[&["x - 1", "y - 1"]]);
        let k = module_kernel(&m).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).unwrap().is_zero());
        let koszul = PolyMatrix::column(
            f,
            2,
            vec![parse_poly(f, 2, "y - 1").unwrap(), parse_poly(f, 2, "1 - x").unwrap()],
        );
        assert!(module_member(&koszul.col(0), &k).unwrap().is_some());
    }

    #[test]
    fn membership_with_units() {
        let f = Field::new(2).unwrap();
        let gens = pm(f, 1, &[&["1 + x"]]);
        let v = vec![parse_poly(f, 1, "x^-3 + x^-1").unwrap()];
        let a = module_member(&v, &gens).unwrap().unwrap();
        assert_eq!(gens.mul(&PolyMatrix::column(f, 1, a)).unwrap().col(0), v);
        assert!(module_member(&[LaurentPoly::one(f, 1)], &gens).unwrap().is_none());
    }

    #[test]
    fn quotient_dimensions() {
        let f = Field::new(2).unwrap();
        // R / (x - 1, y - 1) = F_2.
        let b = ModuleBasis::without_cofactors(&pm(f, 2, &[&["x - 1", "y - 1"]])).unwrap();
        assert_eq!(b.quotient_dimension(), Some(1));
        let b = ModuleBasis::without_cofactors(&pm(f, 2, &[&["x^2 - 1", "y^3 - 1"]])).unwrap();
        assert_eq!(b.quotient_dimension(), Some(6));
        let b = ModuleBasis::without_cofactors(&pm(f, 2, &[&["x - 1"]])).unwrap();
        assert_eq!(b.quotient_dimension(), None);
    }
}
