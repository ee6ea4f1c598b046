#![allow(dead_code)]

use qcodes::classify1d::{LatticeGateScript, LatticeMove};
use qcodes::gf::Field;
use qcodes::laurent::{CodeDefinition, LaurentPoly, PolyMatrix};
use qcodes::pauli::Move;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn code(p: u64, nvars: usize, q: usize, rows: &[&[&str]]) -> CodeDefinition {
    let f = Field::new(p).unwrap();
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    CodeDefinition::new(PolyMatrix::parse(f, nvars, &rows).unwrap(), q).unwrap()
}

pub fn toric(p: u64) -> CodeDefinition {
    code(p, 2, 2, &[&["x - 1", "0"], &["y - 1", "0"], &["0", "y^-1 - 1"], &["0", "1 - x^-1"]])
}

/// Two toric codes side by side.
pub fn toric_pair(p: u64) -> CodeDefinition {
    let t = toric(p);
    let f = t.field();
    let s = t.sigma();
    let sigma = PolyMatrix::from_fn(f, 2, 8, 4, |r, c| {
        let (qudit, xz) = (r % 4, r / 4);
        if qudit / 2 != c / 2 {
            return LaurentPoly::zero(f, 2);
        }
        s.get(xz * 2 + qudit % 2, c % 2).clone()
    });
    CodeDefinition::new(sigma, 4).unwrap()
}

fn random_monomial(f: Field, rng: &mut ChaCha8Rng) -> LaurentPoly {
    LaurentPoly::monomial(f, vec![rng.gen_range(-1..=1), rng.gen_range(-1..=1)], rng.gen_range(1..f.p()) as i64)
}

/// Random moves that keep every generator purely X or purely Z.
pub fn scramble(code: &CodeDefinition, moves: usize, rng: &mut ChaCha8Rng) -> (LatticeGateScript, CodeDefinition) {
    let f = code.field();
    let q = code.q();
    let kinds: Vec<bool> = (0..code.num_generators()).map(|g| (0..q).all(|r| code.sigma().get(r, g).is_zero())).collect();
    let mut script = LatticeGateScript::new();
    while script.len() < moves {
        let m = match rng.gen_range(0..5) {
            0 | 1 => {
                let (c, t) = (rng.gen_range(0..q), rng.gen_range(0..q));
                if c == t {
                    continue;
                }
                LatticeMove::CxPoly { control: c, target: t, m: random_monomial(f, rng) }
            }
            2 => LatticeMove::Translate { qudit: rng.gen_range(0..q), shift: vec![rng.gen_range(-1..=1), rng.gen_range(-1..=1)] },
            3 => {
                let (c, t) = (rng.gen_range(0..q), rng.gen_range(0..q));
                if c == t {
                    continue;
                }
                LatticeMove::Cell(Move::Cnot(c, t, rng.gen_range(1..f.p())))
            }
            _ => {
                let (s, d) = (rng.gen_range(0..kinds.len()), rng.gen_range(0..kinds.len()));
                if s == d || kinds[s] != kinds[d] {
                    continue;
                }
                LatticeMove::ColAdd { src: s, dst: d, f: random_monomial(f, rng) }
            }
        };
        script.push(m);
    }
    let (nq, s) = script.apply(q, code.sigma()).unwrap();
    (script, CodeDefinition::new(s, nq).unwrap())
}
