use super::groebner::ModuleBasis;
use super::{module_kernel, site_coords, LaurentError, LaurentPoly, PolyMatrix};
use crate::codeanalysis::{CodeError, FiniteCode};
use crate::gf::Field;
use crate::pauli::PauliVector;

/// Translation-invariant code: `q` qudits per site, stabilizer map `sigma`
/// with `2q` rows (X components, then Z components), one column per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeDefinition {
    q: usize,
    sigma: PolyMatrix,
}

impl CodeDefinition {
    pub fn new(sigma: PolyMatrix, q: usize) -> Result<Self, LaurentError> {
        if let Some((i, j)) = isotropy_violation(&sigma, q)? {
            return Err(LaurentError::NotIsotropic(i, j));
        }
        Ok(CodeDefinition { q, sigma })
    }

    pub fn field(&self) -> Field {
        self.sigma.field()
    }

    pub fn p(&self) -> u32 {
        self.sigma.field().p()
    }

    pub fn nvars(&self) -> usize {
        self.sigma.nvars()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn sigma(&self) -> &PolyMatrix {
        &self.sigma
    }

    pub fn num_generators(&self) -> usize {
        self.sigma.cols()
    }

    pub fn sigma_x(&self) -> PolyMatrix {
        self.sigma.select_rows(&(0..self.q).collect::<Vec<_>>())
    }

    pub fn sigma_z(&self) -> PolyMatrix {
        self.sigma.select_rows(&(self.q..2 * self.q).collect::<Vec<_>>())
    }

    /// Every generator is purely X-type or purely Z-type.
    pub fn is_css(&self) -> bool {
        (0..self.sigma.cols()).all(|j| {
            let x = (0..self.q).all(|r| self.sigma.get(r, j).is_zero());
            let z = (self.q..2 * self.q).all(|r| self.sigma.get(r, j).is_zero());
            x || z
        })
    }
}

fn isotropy_violation(sigma: &PolyMatrix, q: usize) -> Result<Option<(usize, usize)>, LaurentError> {
    if sigma.rows() != 2 * q {
        return Err(LaurentError::Shape(format!("stabilizer map has {} rows, expected {}", sigma.rows(), 2 * q)));
    }
    let form = sigma.dagger().mul(&PolyMatrix::lambda(sigma.field(), sigma.nvars(), q))?.mul(sigma)?;
    for i in 0..form.rows() {
        for j in 0..form.cols() {
            if !form.get(i, j).is_zero() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// Whether `sigma^dagger lambda_q sigma` vanishes.
pub fn check_isotropy(sigma: &PolyMatrix, q: usize) -> Result<bool, LaurentError> {
    Ok(isotropy_violation(sigma, q)?.is_none())
}

/// `epsilon = sigma^dagger lambda_q = (-sigma_Z^dagger, sigma_X^dagger)`.
pub fn excitation_map(code: &CodeDefinition) -> PolyMatrix {
    let (sigma, q) = (code.sigma(), code.q());
    PolyMatrix::from_fn(sigma.field(), sigma.nvars(), sigma.cols(), 2 * q, |g, k| {
        if k < q {
            sigma.get(q + k, g).antipode().neg()
        } else {
            sigma.get(k - q, g).antipode()
        }
    })
}

/// All translates of the generators on the periodic torus with side lengths `dims`.
pub fn instantiate_torus(code: &CodeDefinition, dims: &[usize]) -> Result<FiniteCode, LaurentError> {
    let field = code.field();
    let gx = code.sigma_x().instantiate(dims)?;
    let gz = code.sigma_z().instantiate(dims)?;
    let n = gx.rows();
    let gens = (0..gx.cols())
        .map(|c| {
            let mut coords = gx.col(c);
            coords.extend(gz.col(c));
            PauliVector::new(field, n, coords).map_err(CodeError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiniteCode::new(field, n, gens)?)
}

fn mixed_radix(c: &[usize], b: &[usize]) -> usize {
    c.iter().zip(b).rev().fold(0, |acc, (&ci, &bi)| acc * bi + ci)
}

/// Regards blocks of `b_1 x ... x b_D` sites as single sites.
pub fn coarse_grain(code: &CodeDefinition, b: &[usize]) -> Result<CodeDefinition, LaurentError> {
    let (field, nvars) = (code.field(), code.nvars());
    if b.len() != nvars {
        return Err(LaurentError::Shape(format!("{} block sizes for {} variables", b.len(), nvars)));
    }
    if b.contains(&0) {
        return Err(LaurentError::Invalid("block sizes must be positive".into()));
    }
    let block: usize = b.iter().product();
    let sigma = code.sigma();
    let mut out = PolyMatrix::zeros(field, nvars, sigma.rows() * block, sigma.cols() * block);
    for r in 0..sigma.rows() {
        for j in 0..sigma.cols() {
            let f = sigma.get(r, j);
            for cidx in 0..block {
                let c = site_coords(cidx, b);
                for (e, coef) in f.terms() {
                    let mut m = Vec::with_capacity(nvars);
                    let mut cp = Vec::with_capacity(nvars);
                    for i in 0..nvars {
                        let s = e[i] + c[i] as i64;
                        m.push(s.div_euclid(b[i] as i64));
                        cp.push(s.rem_euclid(b[i] as i64) as usize);
                    }
                    let (row, col) = (r * block + mixed_radix(&cp, b), j * block + cidx);
                    let mut entry = out.get(row, col).clone();
                    entry.add_term(m, coef);
                    out.set(row, col, entry);
                }
            }
        }
    }
    CodeDefinition::new(out, code.q() * block)
}

/// For each qudit of the coarse code on the torus `dims`, its index in the
/// original code on the torus `b * dims`.
pub fn coarse_index_map(q: usize, b: &[usize], dims: &[usize]) -> Vec<usize> {
    let block: usize = b.iter().product();
    let sites: usize = dims.iter().product();
    let fine: Vec<usize> = b.iter().zip(dims).map(|(x, y)| x * y).collect();
    let mut map = Vec::with_capacity(sites * q * block);
    for s in 0..sites {
        let a = site_coords(s, dims);
        for r in 0..q {
            for cidx in 0..block {
                let c = site_coords(cidx, b);
                let coords: Vec<usize> = (0..b.len()).map(|i| b[i] * a[i] + c[i]).collect();
                map.push(mixed_radix(&coords, &fine) * q + r);
            }
        }
    }
    map
}

/// Whether `ker epsilon = im sigma` over the Laurent ring.
pub fn exactness_check(code: &CodeDefinition) -> Result<bool, LaurentError> {
    let eps = excitation_map(code);
    if !eps.mul(code.sigma())?.is_zero() {
        return Err(LaurentError::Invalid("excitation map does not annihilate the stabilizer map".into()));
    }
    let kernel = module_kernel(&eps)?;
    let image = ModuleBasis::without_cofactors(code.sigma())?;
    for j in 0..kernel.cols() {
        if !image.contains(&kernel.col(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

impl LaurentPoly {
    /// `x_i^k - 1`.
    pub fn binomial_minus_one(field: Field, nvars: usize, i: usize, k: i64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = k;
        LaurentPoly::monomial(field, e, 1).sub(&LaurentPoly::one(field, nvars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codeanalysis::logical_qubits;
    use crate::laurent::parse_poly;

    fn toric() -> CodeDefinition {
        let f = Field::new(2).unwrap();
        let rows: Vec<Vec<String>> = [["x - 1", "0"], ["y - 1", "0"], ["0", "y^-1 - 1"], ["0", "x^-1 - 1"]]
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect();
        CodeDefinition::new(PolyMatrix::parse(f, 2, &rows).unwrap(), 2).unwrap()
    }

    fn ising() -> CodeDefinition {
        let f = Field::new(2).unwrap();
        let s = PolyMatrix::column(f, 1, vec![parse_poly(f, 1, "1 + x").unwrap(), LaurentPoly::zero(f, 1)]);
        CodeDefinition::new(s, 1).unwrap()
    }

    #[test]
    fn isotropy_examples() {
        let f = Field::new(2).unwrap();
        assert!(check_isotropy(toric().sigma(), 2).unwrap());
        let xz = PolyMatrix::identity(f, 1, 2);
        assert!(!check_isotropy(&xz, 1).unwrap());
        assert!(matches!(CodeDefinition::new(xz, 1), Err(LaurentError::NotIsotropic(0, 1))));
    }

    #[test]
    fn ising_excitations() {
        let code = ising();
        let eps = excitation_map(&code);
        let f = code.field();
        assert!(eps.get(0, 0).is_zero());
        assert_eq!(*eps.get(0, 1), parse_poly(f, 1, "1 + x^-1").unwrap());
        let z_err = PolyMatrix::column(f, 1, vec![LaurentPoly::zero(f, 1), LaurentPoly::one(f, 1)]);
        assert_eq!(eps.mul(&z_err).unwrap().get(0, 0).num_terms(), 2);
    }

    #[test]
    fn torus_instantiation() {
        let c = instantiate_torus(&ising(), &[3]).unwrap();
        assert_eq!((c.n(), c.stabilizer_rank(), logical_qubits(&c)), (3, 2, 1));
        let t = instantiate_torus(&toric(), &[2, 2]).unwrap();
        assert_eq!((t.n(), logical_qubits(&t)), (8, 2));
    }

    #[test]
    fn coarse_grain_companion() {
        let f = Field::new(2).unwrap();
        let s = PolyMatrix::column(f, 1, vec![LaurentPoly::var(f, 1, 0), LaurentPoly::zero(f, 1)]);
        let code = CodeDefinition::new(s, 1).unwrap();
        let cg = coarse_grain(&code, &[2]).unwrap();
        assert_eq!(cg.q(), 2);
        assert!(cg.sigma().get(0, 0).is_zero());
        assert_eq!(*cg.sigma().get(0, 1), LaurentPoly::var(f, 1, 0));
        assert!(cg.sigma().get(1, 0).is_one());
        assert!(cg.sigma().get(1, 1).is_zero());
        assert_eq!(coarse_grain(&code, &[1]).unwrap(), code);
    }

    #[test]
    fn toric_exactness() {
        assert!(exactness_check(&toric()).unwrap());
        let f = Field::new(2).unwrap();
        let s = PolyMatrix::column(f, 2, vec![parse_poly(f, 2, "1 + x").unwrap(), LaurentPoly::zero(f, 2)]);
        assert!(!exactness_check(&CodeDefinition::new(s, 1).unwrap()).unwrap());
        let eps = excitation_map(&toric());
        let k = module_kernel(&eps).unwrap();
        let sigma = toric().sigma().clone();
        let img = ModuleBasis::without_cofactors(&k).unwrap();
        for j in 0..2 {
            assert!(img.contains(&sigma.col(j)).unwrap());
        }
    }
}
