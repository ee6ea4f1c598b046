//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use qcodes::classify1d::classify_1d;
use qcodes::codeanalysis::{
    distance, entanglement_entropy, logical_qubits, region_logical_count, FiniteCode, Region,
};
use qcodes::css2d::{classify_2d, torsion_dimension, torus_homology, CssCode, DEFAULT_B_MAX};
use qcodes::gf::{Field, Matrix};
use qcodes::laurent::{
    check_isotropy, coarse_grain, coarse_index_map, excitation_map, exactness_check, instantiate_torus, CodeDefinition,
    FpPoly, LaurentPoly, ModuleBasis,
};
use qcodes::pauli::{decompose_symplectic, symplectic_product, GateScript, Move, PauliVector};
use qcodes::smith::{determinantal_ideals, smith_normal_form, EMatrix, EuclideanDomain};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn gf(p: u64) -> Field {
    Field::new(p).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn torus(code: &CodeDefinition, dims: &[usize]) -> Result<FiniteCode, String> {
    instantiate_torus(code, dims).map_err(err)
}

/// Smallest weight of a Pauli commuting with every generator and outside
/// their span, by enumerating supports of increasing size.
fn brute_force_distance(code: &FiniteCode, max_w: usize) -> Option<usize> {
    let (f, n) = (code.field(), code.n());
    let stab = code.generator_matrix();
    let rank = stab.rank();
    let p = f.p();
    let local: Vec<(u32, u32)> = (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).filter(|&t| t != (0, 0)).collect();
    for w in 1..=max_w.min(n) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            let mut choice = vec![0usize; w];
            loop {
                let mut coords = vec![0u32; 2 * n];
                for (k, &q) in support.iter().enumerate() {
                    coords[q] = local[choice[k]].0;
                    coords[n + q] = local[choice[k]].1;
                }
                let v = PauliVector::new(f, n, coords.clone()).unwrap();
                let commutes = code.generators().iter().all(|g| symplectic_product(g, &v).unwrap().is_zero());
                if commutes {
                    let row = Matrix::from_fn(f, 1, 2 * n, |_, c| coords[c]);
                    if stab.vstack(&row).unwrap().rank() > rank {
                        return Some(w);
                    }
                }
                let mut k = 0;
                while k < w && choice[k] + 1 == local.len() {
                    choice[k] = 0;
                    k += 1;
                }
                if k == w {
                    break;
                }
                choice[k] += 1;
            }
            let mut i = w;
            while i > 0 && support[i - 1] == n - w + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            support[i - 1] += 1;
            for j in i..w {
                support[j] = support[j - 1] + 1;
            }
        }
    }
    None
}

fn criterion_1() -> Outcome {
    let toric = common::toric(2);
    ensure!(check_isotropy(toric.sigma(), 2).map_err(err)?, "not isotropic");
    ensure!(exactness_check(&toric).map_err(err)?, "not exact");
    for l in 2..=4 {
        let k = logical_qubits(&torus(&toric, &[l, l])?);
        ensure!(k == 2, "k = {k} at L = {l}");
    }
    for l in 2..=3 {
        let fc = torus(&toric, &[l, l])?;
        let oracle = brute_force_distance(&fc, l);
        let d = distance(&fc, fc.n()).map_err(err)?;
        ensure!(oracle == Some(l) && d == Some(l), "d = {d:?}, oracle {oracle:?} at L = {l}");
    }
    let r = classify_2d(&toric, DEFAULT_B_MAX).map_err(err)?;
    ensure!(r.toric_copies == 1 && r.residual_q == 0, "toric copies {} residual {}", r.toric_copies, r.residual_q);
    Ok("isotropic, exact, k=2 (L=2..4), d=L (L=2,3), 1 toric copy".into())
}

fn criterion_2() -> Outcome {
    let code = common::code(2, 1, 1, &[&["1 + x + x^2"], &["0"]]);
    let r = classify_1d(&code, 64).map_err(err)?;
    ensure!(
        (r.ising_copies, r.trivial_qudits, r.b) == (2, 1, 3),
        "got ising {} trivial {} b {}",
        r.ising_copies,
        r.trivial_qudits,
        r.b
    );
    let nf = &r.normal_form;
    let mut diag: Vec<String> = (0..3).map(|i| nf.get(i, i).to_string()).collect();
    diag.sort();
    ensure!(diag == ["1", "1 + x", "1 + x"], "diagonal {diag:?}");
    Ok("2 Ising + 1 trivial at b=3, diagonal (1, 1+x, 1+x)".into())
}

/// Same stabilizer group after relabelling coarse qudits into the fine torus.
fn same_group_after_coarse_graining(code: &CodeDefinition, b: &[usize], dims: &[usize]) -> Result<bool, String> {
    let f = code.field();
    let coarse = torus(&coarse_grain(code, b).map_err(err)?, dims)?;
    let fine_dims: Vec<usize> = b.iter().zip(dims).map(|(x, y)| x * y).collect();
    let fine = torus(code, &fine_dims)?;
    let n = fine.n();
    let map = coarse_index_map(code.q(), b, dims);
    let rows: Vec<u32> = coarse
        .generators()
        .iter()
        .flat_map(|g| {
            let mut coords = vec![0u32; 2 * n];
            for (i, &t) in map.iter().enumerate() {
                coords[t] = g.x_part()[i];
                coords[n + t] = g.z_part()[i];
            }
            coords
        })
        .collect();
    let a = Matrix::from_fn(f, coarse.generators().len(), 2 * n, |r, c| rows[r * 2 * n + c]);
    let c = fine.generator_matrix();
    Ok(a.rank() == c.rank() && a.vstack(&c).map_err(err)?.rank() == c.rank())
}

fn criterion_3() -> Outcome {
    let ising = common::code(2, 1, 1, &[&["1 + x"], &["0"]]);
    let r = classify_1d(&ising, 64).map_err(err)?;
    ensure!(r.ising_copies == 1, "ising copies {}", r.ising_copies);
    for l in 3..=6 {
        let fc = torus(&ising, &[l])?;
        let d = distance(&fc, fc.n()).map_err(err)?;
        let oracle = brute_force_distance(&fc, 2);
        ensure!(d == Some(1) && oracle == Some(1), "d = {d:?} oracle {oracle:?} at L = {l}");
    }
    for b in 2..=3 {
        for l in 2..=3 {
            ensure!(same_group_after_coarse_graining(&ising, &[b], &[l])?, "coarse-graining mismatch b={b} L={l}");
        }
    }
    Ok("1 Ising copy, d=1 (L=3..6), coarse-graining invariant".into())
}

/// Random stabilizer code: Z on the first `s` qudits conjugated by a random script.
fn random_code(f: Field, n: usize, s: usize, rng: &mut ChaCha8Rng) -> FiniteCode {
    let script = random_script(f, n, 4 * n, rng);
    let gens = (0..s).map(|i| script.apply(&PauliVector::z(f, n, i)).unwrap()).collect();
    FiniteCode::new(f, n, gens).unwrap()
}

fn random_script(f: Field, n: usize, len: usize, rng: &mut ChaCha8Rng) -> GateScript {
    let p = f.p();
    let mut script = GateScript::new(f, n);
    while script.len() < len {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let m = match rng.gen_range(0..4) {
            0 => Move::Hadamard(i),
            1 => Move::Phase(i, rng.gen_range(1..p)),
            2 => Move::Rescale(i, rng.gen_range(1..p)),
            _ if i != j => Move::Cnot(i, j, rng.gen_range(1..p)),
            _ => continue,
        };
        script.push(m).unwrap();
    }
    script
}

fn random_region(n: usize, rng: &mut ChaCha8Rng) -> Region {
    let idx: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Region::new(n, &idx).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..500 {
        let f = gf(if trial % 2 == 0 { 2 } else { 3 });
        let n = rng.gen_range(1..=10);
        let s = rng.gen_range(0..=n);
        let code = random_code(f, n, s, &mut rng);
        let m = random_region(n, &mut rng);
        let k = logical_qubits(&code);
        let lm = region_logical_count(&code, &m).map_err(err)?;
        let lc = region_logical_count(&code, &m.complement()).map_err(err)?;
        ensure!(lm + lc == 2 * k, "trial {trial}: {lm} + {lc} != 2*{k}");
    }
    Ok("500 random codes satisfy l_M + l_Mc = 2k".into())
}

fn random_poly_in_window(f: Field, w: usize, rng: &mut ChaCha8Rng) -> LaurentPoly {
    LaurentPoly::from_terms(f, 1, (0..w as i64).filter(|_| rng.gen_bool(0.5)).map(|e| (vec![e], 1)))
}

/// Random isotropic 1D code whose generators each fit in `w` consecutive sites.
fn random_1d_code(w: usize, rng: &mut ChaCha8Rng) -> CodeDefinition {
    let f = gf(2);
    loop {
        let q = rng.gen_range(1..=2);
        let t = rng.gen_range(1..=3);
        let css = rng.gen_bool(0.7);
        let sigma = qcodes::laurent::PolyMatrix::from_fn(f, 1, 2 * q, t, |r, c| {
            if css && (r < q) != (c % 2 == 0) {
                LaurentPoly::zero(f, 1)
            } else {
                random_poly_in_window(f, w, rng)
            }
        });
        if (0..t).all(|c| sigma.col(c).iter().all(|p| p.is_zero())) {
            continue;
        }
        if let Ok(code) = CodeDefinition::new(sigma, q) {
            return code;
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut with_logicals = 0;
    for trial in 0..200 {
        let w = rng.gen_range(1..=3);
        let code = random_1d_code(w, &mut rng);
        let fc = torus(&code, &[12])?;
        if logical_qubits(&fc) == 0 {
            continue;
        }
        with_logicals += 1;
        let d = distance(&fc, 3 * w).map_err(err)?;
        ensure!(d.is_some(), "trial {trial}: d > 3w = {} for sigma {:?}", 3 * w, code.sigma());
    }
    Ok(format!("200 random codes of width <= 3 at L=12, {with_logicals} with k >= 1, all d <= 3w"))
}

/// Exact Gaussian integers for the state-vector oracle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Gauss(i64, i64);

impl Gauss {
    fn add(self, o: Gauss) -> Gauss {
        Gauss(self.0 + o.0, self.1 + o.1)
    }

    fn mul(self, o: Gauss) -> Gauss {
        Gauss(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
}

type CMatrix = Vec<Vec<Gauss>>;

fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let mut out = vec![vec![Gauss(0, 0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == Gauss(0, 0) {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].add(a[i][k].mul(b[k][j]));
            }
        }
    }
    out
}

/// Hermitian qubit Pauli `i^{x.z} X^x Z^z` as a dense matrix.
fn pauli_matrix(v: &PauliVector) -> CMatrix {
    let n = v.n();
    let dim = 1 << n;
    let mut out = vec![vec![Gauss(0, 0); dim]; dim];
    for col in 0..dim {
        let mut row = col;
        let mut phase = Gauss(1, 0);
        for q in 0..n {
            let (x, z) = (v.x_part()[q], v.z_part()[q]);
            let bit = (col >> q) & 1;
            if z == 1 && bit == 1 {
                phase = phase.mul(Gauss(-1, 0));
            }
            if x == 1 {
                row ^= 1 << q;
                if z == 1 {
                    phase = phase.mul(Gauss(0, 1));
                }
            }
        }
        out[row][col] = phase;
    }
    out
}

/// `2^{-s}`-flat spectrum test of the reduced state on `m`; returns `s`.
fn oracle_entropy(n: usize, stabilizers: &[PauliVector], m: &[usize]) -> Option<usize> {
    let dim = 1usize << n;
    let mut proj: CMatrix = (0..dim).map(|i| (0..dim).map(|j| Gauss(i64::from(i == j), 0)).collect()).collect();
    for g in stabilizers {
        let mut term = pauli_matrix(g);
        for (i, row) in term.iter_mut().enumerate() {
            row[i] = row[i].add(Gauss(1, 0));
        }
        proj = cmul(&proj, &term);
    }
    let keep: Vec<usize> = m.to_vec();
    let rest: Vec<usize> = (0..n).filter(|q| !m.contains(q)).collect();
    let index = |a: usize, b: usize| -> usize {
        let mut out = 0;
        for (k, &q) in keep.iter().enumerate() {
            out |= ((a >> k) & 1) << q;
        }
        for (k, &q) in rest.iter().enumerate() {
            out |= ((b >> k) & 1) << q;
        }
        out
    };
    let dm = 1usize << keep.len();
    let mut red = vec![vec![Gauss(0, 0); dm]; dm];
    for (a, row) in red.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            for c in 0..1usize << rest.len() {
                *cell = cell.add(proj[index(a, c)][index(b, c)]);
            }
        }
    }
    // red = 2^n rho_M; a flat spectrum means red^2 = (2^n / 2^s) red.
    let sq = cmul(&red, &red);
    let trace: i64 = (0..dm).map(|i| red[i][i].0).sum();
    let full = 1i64 << n;
    if trace != full {
        return None;
    }
    (0..=keep.len()).find(|&s| {
        let factor = full >> s;
        (0..dm).all(|i| (0..dm).all(|j| sq[i][j] == red[i][j].mul(Gauss(factor, 0))))
    })
}

fn ghz(n: usize) -> Vec<PauliVector> {
    let f = gf(2);
    let mut gens = vec![PauliVector::from_xz(f, &vec![1; n], &vec![0; n]).unwrap()];
    for i in 0..n - 1 {
        gens.push(PauliVector::z(f, n, i).add(&PauliVector::z(f, n, i + 1)));
    }
    gens
}

fn criterion_6() -> Outcome {
    let f = gf(2);
    let bell = vec![
        PauliVector::from_xz(f, &[1, 1], &[0, 0]).unwrap(),
        PauliVector::from_xz(f, &[0, 0], &[1, 1]).unwrap(),
    ];
    let m = Region::new(2, &[0]).unwrap();
    let s = entanglement_entropy(f, 2, &bell, &m).map_err(err)?;
    ensure!(s == 1 && oracle_entropy(2, &bell, &[0]) == Some(1), "Bell pair entropy {s}");
    for n in 2..=6 {
        let gens = ghz(n);
        let s = entanglement_entropy(f, n, &gens, &Region::new(n, &[0]).unwrap()).map_err(err)?;
        let oracle = oracle_entropy(n, &gens, &[0]);
        ensure!(s == 1 && oracle == Some(1), "GHZ n={n}: s={s}, oracle {oracle:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..200 {
        let p = if trial % 2 == 0 { 2 } else { 3 };
        let f = gf(p);
        let n = rng.gen_range(1..=6);
        let state = random_code(f, n, n, &mut rng);
        let m = random_region(n, &mut rng);
        let s = entanglement_entropy(f, n, state.generators(), &m).map_err(err)?;
        let sc = entanglement_entropy(f, n, state.generators(), &m.complement()).map_err(err)?;
        ensure!(s == sc, "trial {trial}: s(M)={s}, s(Mc)={sc}");
        if p == 2 {
            let oracle = oracle_entropy(n, state.generators(), m.indices());
            ensure!(oracle == Some(s), "trial {trial}: s={s}, oracle {oracle:?}");
        }
    }
    Ok("Bell s=1, GHZ s=1 (n=2..6, state-vector oracle), 200 random states symmetric".into())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let p = [2u64, 3, 5][trial % 3];
        let f = gf(p);
        let n = rng.gen_range(1..=5);
        let len = rng.gen_range(0..=20);
        let script = random_script(f, n, len, &mut rng);
        let a = script.matrix();
        let found = decompose_symplectic(&a).map_err(err)?;
        ensure!(found.matrix() == a, "trial {trial}: decomposition does not reproduce the matrix");
        for _ in 0..3 {
            let mut vec = || PauliVector::new(f, n, (0..2 * n).map(|_| rng.gen_range(0..p as u32)).collect()).unwrap();
            let (u, v) = (vec(), vec());
            let before = symplectic_product(&u, &v).map_err(err)?;
            let after = symplectic_product(&script.apply(&u).map_err(err)?, &script.apply(&v).map_err(err)?).map_err(err)?;
            ensure!(before == after, "trial {trial}: symplectic product changed");
        }
    }
    Ok("1000 decompositions reproduce their input; products preserved".into())
}

fn normalized<T: EuclideanDomain>(v: &[T]) -> Vec<T> {
    v.iter().map(|d| d.normal_unit().times(d)).collect()
}

fn check_snf<T: EuclideanDomain>(m: &EMatrix<T>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = smith_normal_form(m).map_err(err)?;
    ensure!(s.a.mul(m).map_err(err)?.mul(&s.b).map_err(err)? == s.diagonal, "a m b != diagonal");
    for w in s.divisors.windows(2) {
        ensure!(w[1].div_rem_e(&w[0]).1.is_zero_elem(), "divisor chain broken: {} does not divide {}", w[0], w[1]);
    }
    let ideals = determinantal_ideals(m, s.divisors.len()).map_err(err)?;
    let mut prod = m.zero().one_like();
    for (d, i) in s.divisors.iter().zip(&ideals) {
        prod = prod.times(d);
        ensure!(normalized(&[prod.clone()]) == normalized(std::slice::from_ref(i)), "product {prod} vs minor gcd {i}");
    }
    let mut rows: Vec<usize> = (0..m.rows()).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut shuffled = EMatrix::zeros(m.zero().clone(), m.rows(), m.cols());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            shuffled.set(i, j, m.get(r, c).clone());
        }
    }
    let t = smith_normal_form(&shuffled).map_err(err)?;
    ensure!(normalized(&t.divisors) == normalized(&s.divisors), "divisors change under shuffling");
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..250 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<BigInt>> =
            (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-30i64..=30))).collect()).collect();
        let m = EMatrix::from_rows(BigInt::from(0), rows).map_err(err)?;
        check_snf(&m, &mut rng).map_err(|e| format!("Z trial {trial}: {e}"))?;
    }
    let f = gf(2);
    for trial in 0..250 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let rows: Vec<Vec<FpPoly>> = (0..r)
            .map(|_| {
                (0..c).map(|_| FpPoly::from_coeffs(f, (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..2)).collect())).collect()
            })
            .collect();
        let m = EMatrix::from_rows(FpPoly::zero(f), rows).map_err(err)?;
        check_snf(&m, &mut rng).map_err(|e| format!("F2[x] trial {trial}: {e}"))?;
    }
    Ok("500 matrices over Z and F_2[x]: chain, minors and shuffling invariance".into())
}

fn criterion_9() -> Outcome {
    let toric = common::toric(2);
    for l in 1..=6 {
        let h = torus_homology(l).map_err(err)?;
        let k = logical_qubits(&torus(&toric, &[l, l])?);
        ensure!(h == (1, 2, 1) && h.1 == k, "L={l}: homology {h:?}, toric k={k}");
    }
    Ok("H = (1, 2, 1) and h1 = k(toric) for L = 1..6".into())
}

fn criterion_10() -> Outcome {
    let base = common::toric(2);
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (_, code) = common::scramble(&base, 8, &mut rng);
        let t = torsion_dimension(&CssCode::new(code.clone()).map_err(err)?, DEFAULT_B_MAX).map_err(err)?;
        ensure!(t.dimension == 2, "seed {seed}: torsion {}", t.dimension);
        ensure!(t.torus_checks.iter().all(|&(_, k)| k == 2), "seed {seed}: torus checks {:?}", t.torus_checks);
        for l in [2, 3, 5] {
            let k = logical_qubits(&torus(&code, &[l, l])?);
            ensure!(k == 2, "seed {seed}: k = {k} at L = {l}");
        }
    }
    Ok("torsion 2 and k(L)=2 (L=2,3,5) under 50 scrambles".into())
}

fn criterion_11() -> Outcome {
    let cubic = common::code(
        2,
        3,
        2,
        &[
            &["1 + x*y + y*z + x*z", "0"],
            &["1 + x + y + z", "0"],
            &["0", "1 + x^-1 + y^-1 + z^-1"],
            &["0", "1 + x^-1*y^-1 + y^-1*z^-1 + x^-1*z^-1"],
        ],
    );
    let eps = excitation_map(&cubic);
    ensure!(eps.mul(cubic.sigma()).map_err(err)?.is_zero(), "cubic code is not isotropic");
    let image = ModuleBasis::without_cofactors(&eps).map_err(err)?;
    let f = cubic.field();
    let one = LaurentPoly::one(f, 3);
    let zero = LaurentPoly::zero(f, 3);
    // A single-qudit error is in the image; its syndrome is four excitations.
    ensure!(image.contains(&eps.col(0)).map_err(err)?, "column of the excitation map not in its image");
    let mut tested = 0;
    for a in -8i64..=8 {
        for b in -8i64..=8 {
            for c in -8i64..=8 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let binomial = one.add(&LaurentPoly::monomial(f, vec![a, b, c], 1));
                for slot in 0..2 {
                    let v = if slot == 0 { vec![binomial.clone(), zero.clone()] } else { vec![zero.clone(), binomial.clone()] };
                    ensure!(!image.contains(&v).map_err(err)?, "binomial 1 + x^{a} y^{b} z^{c} in slot {slot} is reachable");
                    tested += 1;
                }
            }
        }
    }
    Ok(format!("{tested} binomial syndromes (offsets in [-8,8]^3) unreachable; bounded check"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("toric code", criterion_1),
        ("1D golden classification", criterion_2),
        ("Ising model", criterion_3),
        ("logical counting law", criterion_4),
        ("1D distance bound", criterion_5),
        ("entanglement", criterion_6),
        ("symplectic round-trips", criterion_7),
        ("Smith normal form", criterion_8),
        ("torus homology", criterion_9),
        ("torsion invariance", criterion_10),
        ("cubic code binomials", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = secs(start.elapsed());
        match outcome {
            Ok(msg) => println!("PASS {label}: {msg} [{secs}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {label}: {msg} [{secs}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}
