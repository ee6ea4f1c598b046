//! Parameters of finite additive codes: logical qudit count, logical
//! operator counts on regions, correctability, distance and entanglement.

use thiserror::Error;

use crate::gf::{Field, Matrix};
use crate::pauli::{
    canonicalize_isotropic, decompose_symplectic, generator_matrix, is_symplectic, lambda, GateScript, PauliError,
    PauliVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("region index {index} out of range for {n} qudits")]
    RegionOutOfRange { index: usize, n: usize },
    #[error("code encodes no logical qudits")]
    NoLogicalQudits,
    #[error("stabilizers have rank {rank}, a pure state needs rank {n}")]
    NotPureState { rank: usize, n: usize },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// A stabilizer code on `n` qudits given by commuting generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCode {
    field: Field,
    n: usize,
    gens: Vec<PauliVector>,
}

impl FiniteCode {
    pub fn new(field: Field, n: usize, gens: Vec<PauliVector>) -> Result<Self, CodeError> {
        for g in &gens {
            if g.n() != n || g.field() != field {
                return Err(PauliError::Mismatch("generator on a different space".into()).into());
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if !crate::pauli::symplectic_product(&gens[i], &gens[j])?.is_zero() {
                    return Err(PauliError::NotIsotropic(i, j).into());
                }
            }
        }
        Ok(FiniteCode { field, n, gens })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliVector] {
        &self.gens
    }

    pub fn generator_matrix(&self) -> Matrix {
        generator_matrix(self.field, self.n, &self.gens)
    }

    /// Rank of the stabilizer group.
    pub fn stabilizer_rank(&self) -> usize {
        self.generator_matrix().rank()
    }

    /// Rows of a basis of the stabilizer space.
    fn basis(&self) -> Matrix {
        let r = self.generator_matrix().rref();
        r.matrix.select_rows(&(0..r.rank).collect::<Vec<_>>())
    }

    /// Basis (columns) of the commutant, i.e. vectors commuting with every generator.
    pub fn commutant_basis(&self) -> Matrix {
        let g = self.generator_matrix();
        let gl = g.mul(&lambda(self.field, self.n)).expect("shapes agree");
        gl.kernel_basis()
    }
}

/// A sorted set of 0-based qudit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    n: usize,
    indices: Vec<usize>,
}

impl Region {
    pub fn new(n: usize, indices: &[usize]) -> Result<Self, CodeError> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
            return Err(CodeError::RegionOutOfRange { index: bad, n });
        }
        Ok(Region { n, indices: idx })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn complement(&self) -> Region {
        let indices = (0..self.n).filter(|i| self.indices.binary_search(i).is_err()).collect();
        Region { n: self.n, indices }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Coordinate positions (x then z) of a set of qudits.
fn coords_of(n: usize, qudits: &[usize]) -> Vec<usize> {
    qudits.iter().copied().chain(qudits.iter().map(|&q| n + q)).collect()
}

fn check_region(code: &FiniteCode, m: &Region) -> Result<(), CodeError> {
    if m.n != code.n {
        return Err(CodeError::RegionOutOfRange { index: m.n, n: code.n });
    }
    Ok(())
}

pub fn logical_qubits(code: &FiniteCode) -> usize {
    code.n - code.stabilizer_rank()
}

/// Dimension of the stabilizer subspace supported inside `m`, given a basis `g`.
fn dim_supported_in(g: &Matrix, n: usize, m: &Region) -> usize {
    let outside = coords_of(n, m.complement().indices());
    g.rows() - g.select_cols(&outside).rank()
}

/// `ℓ_M = 2|M| − rank(π_M Σ) − dim Σ_M`.
pub fn region_logical_count(code: &FiniteCode, m: &Region) -> Result<usize, CodeError> {
    check_region(code, m)?;
    let g = code.basis();
    let proj_rank = g.select_cols(&coords_of(code.n, m.indices())).rank();
    let inside = dim_supported_in(&g, code.n, m);
    Ok(2 * m.len() - proj_rank - inside)
}

pub fn is_correctable(code: &FiniteCode, m: &Region) -> Result<bool, CodeError> {
    Ok(region_logical_count(code, m)? == 0)
}

/// Exhaustive enumeration is used when it visits at most this many vectors (log2).
const EXHAUSTIVE_LOG2: f64 = 24.0;
const EXHAUSTIVE_MAX_LOGICAL_DIM: usize = 22;

/// Minimal weight of a logical operator not in the stabilizer group.
/// Returns `Ok(None)` when the distance exceeds `weight_cap`.
pub fn distance(code: &FiniteCode, weight_cap: usize) -> Result<Option<usize>, CodeError> {
    let f = code.field;
    let n = code.n;
    let stab = code.basis();
    let s = stab.rows();
    if s == n {
        return Err(CodeError::NoLogicalQudits);
    }
    let comm = code.commutant_basis().transpose();
    let logical_dim = comm.rows() - s;
    let log2_size = (comm.rows() as f64) * (f.p() as f64).log2();
    let d = if logical_dim <= EXHAUSTIVE_MAX_LOGICAL_DIM && log2_size <= EXHAUSTIVE_LOG2 {
        let logicals = complement_rows(&stab, &comm);
        Some(min_weight_enumerate(f, n, &stab, &logicals))
    } else {
        min_weight_scan(code, &stab, weight_cap)
    };
    Ok(d.filter(|&d| d <= weight_cap))
}

/// Rows of `big` extending the row space of `base` to that of `big`.
fn complement_rows(base: &Matrix, big: &Matrix) -> Matrix {
    let mut acc = base.clone();
    let mut picked = Vec::new();
    for r in 0..big.rows() {
        let cand = acc.vstack(&big.select_rows(&[r])).expect("same width");
        if cand.rank() > acc.rank() {
            acc = cand;
            picked.push(r);
        }
    }
    big.select_rows(&picked)
}

fn min_weight_enumerate(f: Field, n: usize, stab: &Matrix, logicals: &Matrix) -> usize {
    let basis: Vec<Vec<u32>> = (0..stab.rows())
        .map(|r| stab.row(r).to_vec())
        .chain((0..logicals.rows()).map(|r| logicals.row(r).to_vec()))
        .collect();
    let s = stab.rows();
    if f.p() == 2 && n <= 64 {
        let pack = |v: &[u32]| -> (u64, u64) {
            let mut x = 0u64;
            let mut z = 0u64;
            for i in 0..n {
                x |= (v[i] as u64 & 1) << i;
                z |= (v[n + i] as u64 & 1) << i;
            }
            (x, z)
        };
        let packed: Vec<(u64, u64)> = basis.iter().map(|v| pack(v)).collect();
        let total = basis.len();
        let mut best = usize::MAX;
        let (mut x, mut z) = (0u64, 0u64);
        // Gray-code walk: step i flips the basis vector at the lowest set bit of i.
        let mut logical_mask = 0u64;
        for i in 1u64..(1u64 << total) {
            let b = i.trailing_zeros() as usize;
            x ^= packed[b].0;
            z ^= packed[b].1;
            if b >= s {
                logical_mask ^= 1 << (b - s);
            }
            if logical_mask != 0 {
                let w = (x | z).count_ones() as usize;
                if w < best {
                    best = w;
                    if best == 1 {
                        break;
                    }
                }
            }
        }
        return best;
    }
    let p = f.p();
    let total = basis.len();
    let mut digits = vec![0u32; total];
    let mut cur = vec![0u32; 2 * n];
    let mut best = usize::MAX;
    loop {
        let mut k = 0;
        loop {
            if k == total {
                return best;
            }
            for (c, &b) in cur.iter_mut().zip(&basis[k]) {
                *c = f.add(*c, b);
            }
            digits[k] = (digits[k] + 1) % p;
            if digits[k] != 0 {
                break;
            }
            k += 1;
        }
        if digits[s..].iter().any(|&d| d != 0) {
            let w = (0..n).filter(|&i| cur[i] != 0 || cur[n + i] != 0).count();
            best = best.min(w);
            if best == 1 {
                return best;
            }
        }
    }
}

/// Smallest support size carrying a nontrivial logical operator, by increasing weight.
fn min_weight_scan(code: &FiniteCode, stab: &Matrix, cap: usize) -> Option<usize> {
    let n = code.n;
    for w in 1..=cap.min(n) {
        let mut subset: Vec<usize> = (0..w).collect();
        loop {
            let region = Region { n, indices: subset.clone() };
            let proj = stab.select_cols(&coords_of(n, &subset)).rank();
            let inside = dim_supported_in(stab, n, &region);
            if 2 * w > proj + inside {
                return Some(w);
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    None
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn check_pure(field: Field, n: usize, stabilizers: &[PauliVector]) -> Result<Matrix, CodeError> {
    let code = FiniteCode::new(field, n, stabilizers.to_vec())?;
    let basis = code.basis();
    if basis.rows() != n {
        return Err(CodeError::NotPureState { rank: basis.rows(), n });
    }
    Ok(basis)
}

/// `s = |M| − dim Σ_M` in units of log p.
pub fn entanglement_entropy(field: Field, n: usize, stabilizers: &[PauliVector], m: &Region) -> Result<usize, CodeError> {
    if m.n != n {
        return Err(CodeError::RegionOutOfRange { index: m.n, n });
    }
    let basis = check_pure(field, n, stabilizers)?;
    Ok(m.len() - dim_supported_in(&basis, n, m))
}

/// `p^s`, if it fits in 64 bits.
pub fn schmidt_rank(p: u32, s: usize) -> Option<u64> {
    (p as u64).checked_pow(u32::try_from(s).ok()?)
}

/// Completes the stabilizer group of a code to a stabilizer state by adding
/// logical X operators of a canonical frame.
pub fn complete_to_state(code: &FiniteCode) -> Result<Vec<PauliVector>, CodeError> {
    let (script, s) = canonicalize_isotropic(code.field, code.n, &code.gens)?;
    let undo = script.inverse();
    let mut out: Vec<PauliVector> = code.gens.clone();
    for j in s..code.n {
        out.push(undo.apply(&PauliVector::x(code.field, code.n, j))?);
    }
    Ok(out)
}

/// Local scripts bringing a stabilizer state into single-qudit X's and Bell pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellForm {
    /// Acts only on qudits of M.
    pub script_m: GateScript,
    /// Acts only on qudits of the complement.
    pub script_mc: GateScript,
    pub bell_count: usize,
    /// `(a, b)` with `a ∈ M`, `b ∈ M^c`; stabilized by `X_a X_b` and `Z_a Z_b^{-1}`.
    pub pairs: Vec<(usize, usize)>,
    /// Qudits left in the single-qudit X eigenstate.
    pub singles: Vec<usize>,
}

impl BellForm {
    /// Generators of the target state.
    pub fn target(&self, field: Field, n: usize) -> Vec<PauliVector> {
        let mut out: Vec<PauliVector> = self.singles.iter().map(|&q| PauliVector::x(field, n, q)).collect();
        for &(a, b) in &self.pairs {
            out.push(PauliVector::x(field, n, a).add(&PauliVector::x(field, n, b)));
            out.push(PauliVector::z(field, n, a).add(&PauliVector::z(field, n, b).scale(field.neg(1))));
        }
        out
    }
}

fn restrict(v: &PauliVector, qudits: &[usize]) -> PauliVector {
    let n = v.n();
    let x: Vec<u32> = qudits.iter().map(|&q| v.coords()[q]).collect();
    let z: Vec<u32> = qudits.iter().map(|&q| v.coords()[n + q]).collect();
    PauliVector::from_xz(v.field(), &x, &z).expect("same length")
}

/// Elements of the row space of `basis` supported inside `region`.
fn supported_subspace(basis: &Matrix, n: usize, region: &Region) -> Vec<PauliVector> {
    let f = basis.field();
    let outside = basis.select_cols(&coords_of(n, region.complement().indices()));
    let combos = outside.transpose().kernel_basis();
    (0..combos.cols())
        .map(|c| {
            let coeff = Matrix::from_fn(f, 1, basis.rows(), |_, r| combos.get(r, c));
            let v = coeff.mul(basis).expect("shapes agree");
            PauliVector::new(f, n, v.row(0).to_vec()).expect("length 2n")
        })
        .collect()
}

pub fn bell_canonicalize(field: Field, n: usize, stabilizers: &[PauliVector], m: &Region) -> Result<BellForm, CodeError> {
    if m.n != n {
        return Err(CodeError::RegionOutOfRange { index: m.n, n });
    }
    let basis = check_pure(field, n, stabilizers)?;
    let mc = m.complement();
    let mut script_m = GateScript::new(field, n);
    let mut script_mc = GateScript::new(field, n);
    let mut singles = Vec::new();
    let mut frozen_m = 0;
    let mut frozen_mc = 0;
    for (side, script, frozen) in [(m, &mut script_m, &mut frozen_m), (&mc, &mut script_mc, &mut frozen_mc)] {
        let local: Vec<PauliVector> =
            supported_subspace(&basis, n, side).iter().map(|v| restrict(v, side.indices())).collect();
        let (u, dim) = canonicalize_isotropic(field, side.len(), &local)?;
        script.extend(&u.embed(n, side.indices())?)?;
        singles.extend_from_slice(&side.indices()[..dim]);
        *frozen = dim;
    }
    let s = m.len() - frozen_m;
    if mc.len() - frozen_mc != s {
        return Err(CodeError::Internal("entropy of region and complement differ".into()));
    }
    singles.sort_unstable();
    let m_rest = &m.indices()[frozen_m..];
    let mc_rest = &mc.indices()[frozen_mc..];

    // Current stabilizer basis after both local scripts.
    let rows: Vec<PauliVector> = (0..basis.rows())
        .map(|r| {
            let v = PauliVector::new(field, n, basis.row(r).to_vec()).expect("length 2n");
            script_mc.apply(&script_m.apply(&v).expect("same space")).expect("same space")
        })
        .collect();
    let g = generator_matrix(field, n, &rows);
    let frozen_x: Vec<usize> = singles.clone();
    let mut constrained = coords_of(n, m_rest);
    constrained.extend_from_slice(&frozen_x);
    let system = g.select_cols(&constrained).transpose();
    // Partner map on the complement side: column j holds the image of local basis vector j.
    let mut partner = Matrix::zeros(field, 2 * s, 2 * s);
    for j in 0..2 * s {
        let mut rhs = vec![0u32; constrained.len()];
        rhs[j] = 1;
        let c = system
            .solve(&rhs)
            .map_err(|e| CodeError::Internal(e.to_string()))?
            .ok_or_else(|| CodeError::Internal("no stabilizer with prescribed restriction".into()))?;
        let coeff = Matrix::from_fn(field, 1, g.rows(), |_, r| c[r]);
        let w = coeff.mul(&g).expect("shapes agree");
        let w = PauliVector::new(field, n, w.row(0).to_vec()).expect("length 2n");
        let image = restrict(&w, mc_rest);
        let sign = if j < s { 1 } else { field.neg(1) };
        for (r, &v) in image.coords().iter().enumerate() {
            partner.set(r, j, field.mul(v, sign));
        }
    }
    if !is_symplectic(&partner) {
        return Err(CodeError::Internal("partner map is not anti-symplectic".into()));
    }
    let undo = partner.inverse().ok_or_else(|| CodeError::Internal("partner map singular".into()))?;
    let pairing = decompose_symplectic(&undo)?;
    script_mc.extend(&pairing.embed(n, mc_rest)?)?;
    let pairs = m_rest.iter().copied().zip(mc_rest.iter().copied()).collect();
    Ok(BellForm { script_m, script_mc, bell_count: s, pairs, singles })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    fn zz(f: Field, n: usize, a: usize, b: usize) -> PauliVector {
        PauliVector::z(f, n, a).add(&PauliVector::z(f, n, b))
    }

    fn xx(f: Field, n: usize, a: usize, b: usize) -> PauliVector {
        PauliVector::x(f, n, a).add(&PauliVector::x(f, n, b))
    }

    fn repetition() -> FiniteCode {
        let f = f2();
        FiniteCode::new(f, 3, vec![zz(f, 3, 0, 1), zz(f, 3, 1, 2)]).unwrap()
    }

    #[test]
    fn logical_counts() {
        let f = f2();
        let bell = FiniteCode::new(f, 2, vec![xx(f, 2, 0, 1), zz(f, 2, 0, 1)]).unwrap();
        assert_eq!(logical_qubits(&bell), 0);
        assert_eq!(region_logical_count(&bell, &Region::new(2, &[0]).unwrap()).unwrap(), 0);
        let rep = repetition();
        assert_eq!(logical_qubits(&rep), 1);
        assert_eq!(region_logical_count(&rep, &Region::new(3, &[0]).unwrap()).unwrap(), 1);
        assert_eq!(region_logical_count(&rep, &Region::new(3, &[1, 2]).unwrap()).unwrap(), 1);
        assert!(!is_correctable(&rep, &Region::new(3, &[0]).unwrap()).unwrap());
        assert!(is_correctable(&rep, &Region::new(3, &[]).unwrap()).unwrap());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&repetition(), 3).unwrap(), Some(1));
        let f = f2();
        let bell = FiniteCode::new(f, 2, vec![xx(f, 2, 0, 1), zz(f, 2, 0, 1)]).unwrap();
        assert_eq!(distance(&bell, 2), Err(CodeError::NoLogicalQudits));
    }

    #[test]
    fn scan_matches_enumeration() {
        let rep = repetition();
        let stab = rep.basis();
        assert_eq!(min_weight_scan(&rep, &stab, 3), Some(1));
    }

    #[test]
    fn entropy_examples() {
        let f = f2();
        let bell = vec![xx(f, 2, 0, 1), zz(f, 2, 0, 1)];
        let m = Region::new(2, &[0]).unwrap();
        assert_eq!(entanglement_entropy(f, 2, &bell, &m).unwrap(), 1);
        assert_eq!(schmidt_rank(2, 1), Some(2));
        let prod = vec![PauliVector::z(f, 2, 0), PauliVector::z(f, 2, 1)];
        assert_eq!(entanglement_entropy(f, 2, &prod, &m).unwrap(), 0);
        let ghz = vec![xx(f, 3, 0, 1).add(&PauliVector::x(f, 3, 2)), zz(f, 3, 0, 1), zz(f, 3, 1, 2)];
        assert_eq!(entanglement_entropy(f, 3, &ghz, &Region::new(3, &[0]).unwrap()).unwrap(), 1);
        assert!(matches!(
            entanglement_entropy(f, 3, &ghz[..2], &Region::new(3, &[0]).unwrap()),
            Err(CodeError::NotPureState { .. })
        ));
    }

    #[test]
    fn bell_examples() {
        let f = f2();
        let ghz = vec![xx(f, 3, 0, 1).add(&PauliVector::x(f, 3, 2)), zz(f, 3, 0, 1), zz(f, 3, 1, 2)];
        let m = Region::new(3, &[0, 1]).unwrap();
        let form = bell_canonicalize(f, 3, &ghz, &m).unwrap();
        assert_eq!(form.bell_count, 1);
        let prod = vec![PauliVector::z(f, 2, 0), PauliVector::z(f, 2, 1)];
        let form = bell_canonicalize(f, 2, &prod, &Region::new(2, &[0]).unwrap()).unwrap();
        assert_eq!(form.bell_count, 0);
        assert_eq!(form.singles, vec![0, 1]);
    }
}
