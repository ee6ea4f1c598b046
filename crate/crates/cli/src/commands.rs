use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use qcodes::classify1d::{classify_1d, OneDReport};
use qcodes::codeanalysis::{
    complete_to_state, distance, entanglement_entropy, logical_qubits, schmidt_rank, FiniteCode, Region,
};
use qcodes::css2d::{classify_2d, torsion_dimension, torus_homology, CssCode, TwoDReport};
use qcodes::gf::Field;
use qcodes::laurent::{exactness_check, instantiate_torus, CodeDefinition, LaurentError, PolyMatrix};
use qcodes::pauli::canonicalize_isotropic;
use qcodes::smith::{abelian_group_decomposition, laurent_smith_normal_form, smith_normal_form, EMatrix, Ring};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codefile::CodeFile;
use crate::error::CliError;

/// A command result: JSON payload, text rendering and whether it signals failure.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub failed: bool,
}

impl Report {
    fn ok(payload: &impl Serialize, text: String) -> Result<Self, CliError> {
        let json = serde_json::to_value(payload).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Report { json, text, failed: false })
    }
}

fn torus(code: &CodeDefinition, l: usize) -> Result<FiniteCode, CliError> {
    Ok(instantiate_torus(code, &vec![l; code.nvars()])?)
}

/// Side lengths to use; a zero-dimensional code has a single site.
fn sizes(code: &CodeDefinition, ls: &[usize]) -> Result<Vec<usize>, CliError> {
    if code.nvars() == 0 {
        return Ok(vec![1]);
    }
    if ls.is_empty() {
        return Err(CliError::Input("--L is required for codes with D >= 1".into()));
    }
    if ls.contains(&0) {
        return Err(CliError::Input("--L values must be positive".into()));
    }
    Ok(ls.to_vec())
}

#[derive(Serialize)]
struct Params {
    #[serde(rename = "L")]
    l: usize,
    n: usize,
    k: usize,
    d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_exceeds: Option<usize>,
}

#[derive(Serialize)]
struct ParamsReport {
    n: usize,
    k: usize,
    d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_exceeds: Option<usize>,
    #[serde(rename = "per_L")]
    per_l: Vec<Params>,
}

fn params_at(code: &CodeDefinition, l: usize, weight_cap: Option<usize>) -> Result<Params, CliError> {
    let fc = torus(code, l)?;
    let (n, k) = (fc.n(), logical_qubits(&fc));
    let (mut d, mut d_exceeds) = (None, None);
    if k > 0 {
        let cap = weight_cap.unwrap_or(n);
        d = distance(&fc, cap)?;
        if d.is_none() {
            d_exceeds = Some(cap);
        }
    }
    Ok(Params { l, n, k, d, d_exceeds })
}

pub fn params(code: &CodeDefinition, ls: &[usize], weight_cap: Option<usize>) -> Result<Report, CliError> {
    let ls = sizes(code, ls)?;
    let per_l = std::thread::scope(|s| {
        let handles: Vec<_> = ls.iter().map(|&l| s.spawn(move || params_at(code, l, weight_cap))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Internal("worker panicked".into()))))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut text = String::new();
    for r in &per_l {
        let d = match (r.d, r.d_exceeds) {
            (Some(d), _) => d.to_string(),
            (None, Some(cap)) => format!(">{cap}"),
            (None, None) => "-".into(),
        };
        writeln!(text, "L={} n={} k={} d={d}", r.l, r.n, r.k).unwrap();
    }
    let (n, k, d, d_exceeds) = (per_l[0].n, per_l[0].k, per_l[0].d, per_l[0].d_exceeds);
    Report::ok(&ParamsReport { n, k, d, d_exceeds, per_l }, text)
}

fn witness_text(lines: &[String]) -> String {
    lines.iter().map(|l| format!("  {l}\n")).collect()
}

fn one_d_text(r: &OneDReport) -> String {
    let mut t = format!(
        "ising_copies={} trivial_qudits={} free_qudits={} b={}\n",
        r.ising_copies, r.trivial_qudits, r.free_qudits, r.b
    );
    let diag: Vec<String> = r.diagonal.iter().map(|p| p.to_string()).collect();
    writeln!(t, "diagonal: {}", diag.join(", ")).unwrap();
    t.push_str("witness:\n");
    t + &witness_text(&r.witness.lines())
}

fn two_d_text(r: &TwoDReport) -> String {
    let mut t = format!(
        "toric_copies={} torsion_dim={} b={} residual_q={}\n",
        r.toric_copies, r.torsion_dim, r.b, r.residual_q
    );
    t.push_str("witness:\n");
    t + &witness_text(&r.witness.lines())
}

pub fn classify(code: &CodeDefinition, n_max: usize, b_max: usize) -> Result<Report, CliError> {
    match code.nvars() {
        1 => {
            let r = classify_1d(code, n_max)?;
            Report::ok(&r, one_d_text(&r))
        }
        2 => {
            if !code.is_css() {
                return Err(CliError::Input(
                    "unsupported: classification in D = 2 requires a CSS code (each generator purely X-type or purely Z-type)"
                        .into(),
                ));
            }
            let r = classify_2d(code, b_max)?;
            Report::ok(&r, two_d_text(&r))
        }
        d => Err(CliError::Input(format!("unsupported: classification is available for D = 1 and D = 2, got D = {d}"))),
    }
}

/// Parses a 1-based comma-separated qudit list.
pub fn parse_region(spec: &str, n: usize) -> Result<Region, CliError> {
    let mut idx = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let i: usize = part.parse().map_err(|_| CliError::Input(format!("--region: \"{part}\" is not a qudit index")))?;
        if i == 0 || i > n {
            return Err(CliError::Input(format!("--region: index {i} out of range 1..={n}")));
        }
        idx.push(i - 1);
    }
    Ok(Region::new(n, &idx)?)
}

#[derive(Serialize)]
struct Entropy {
    entropy: usize,
    schmidt_rank: Option<u64>,
}

pub fn entropy(code: &CodeDefinition, ls: &[usize], region: &str) -> Result<Report, CliError> {
    let ls = sizes(code, ls)?;
    if ls.len() != 1 {
        return Err(CliError::Input("entropy takes a single --L value".into()));
    }
    let fc = torus(code, ls[0])?;
    let m = parse_region(region, fc.n())?;
    let state = complete_to_state(&fc)?;
    let s = entanglement_entropy(fc.field(), fc.n(), &state, &m)?;
    let rank = schmidt_rank(code.p(), s);
    let text = match rank {
        Some(r) => format!("entropy={s} schmidt_rank={r}\n"),
        None => format!("entropy={s} schmidt_rank={}^{s}\n", code.p()),
    };
    Report::ok(&Entropy { entropy: s, schmidt_rank: rank }, text)
}

#[derive(Serialize)]
struct Homology {
    #[serde(rename = "L")]
    l: usize,
    h0: usize,
    h1: usize,
    h2: usize,
}

pub fn homology(ls: &[usize]) -> Result<Report, CliError> {
    if ls.is_empty() || ls.contains(&0) {
        return Err(CliError::Input("--L needs one or more positive sizes".into()));
    }
    let mut out = Vec::new();
    let mut text = String::new();
    for &l in ls {
        let (h0, h1, h2) = torus_homology(l)?;
        writeln!(text, "L={l} h0={h0} h1={h1} h2={h2}").unwrap();
        out.push(Homology { l, h0, h1, h2 });
    }
    Report::ok(&out, text)
}

#[derive(Serialize)]
struct Canon {
    rank: usize,
    script: Vec<String>,
}

pub fn canon(code: &CodeDefinition) -> Result<Report, CliError> {
    if code.nvars() != 0 {
        return Err(CliError::Input(format!("canon expects a D = 0 stabilizer list, got D = {}", code.nvars())));
    }
    let fc = torus(code, 1)?;
    let (script, rank) = canonicalize_isotropic(fc.field(), fc.n(), fc.generators())?;
    let lines: Vec<String> = script.moves().iter().map(|m| m.to_string()).collect();
    Report::ok(&Canon { rank, script: lines }, script.to_string())
}

#[derive(Serialize)]
struct Annihilator {
    b: usize,
    torsion_dim: usize,
    torus_checks: Vec<(usize, usize)>,
}

#[derive(Serialize, Default)]
struct Check {
    isotropic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    css: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    annihilator: Option<Annihilator>,
}

fn check_text(c: &Check) -> String {
    let mut t = match c.violation {
        Some([i, j]) => format!("isotropic: no (columns {i} and {j} do not commute)\n"),
        None => "isotropic: yes\n".into(),
    };
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    if let Some(css) = c.css {
        writeln!(t, "css: {}", yes_no(css)).unwrap();
    }
    if let Some(exact) = c.exact {
        writeln!(t, "exact: {}", yes_no(exact)).unwrap();
    }
    if let Some(a) = &c.annihilator {
        writeln!(t, "annihilator: b={} torsion_dim={}", a.b, a.torsion_dim).unwrap();
    }
    t
}

pub fn check(file: &CodeFile) -> Result<Report, CliError> {
    let sigma = file.to_matrix()?;
    let code = match CodeDefinition::new(sigma, file.q) {
        Ok(c) => c,
        Err(LaurentError::NotIsotropic(i, j)) => {
            let c = Check { isotropic: false, violation: Some([i + 1, j + 1]), ..Check::default() };
            let mut r = Report::ok(&c, check_text(&c))?;
            r.failed = true;
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let mut c = Check { isotropic: true, css: Some(code.is_css()), ..Check::default() };
    if (1..=3).contains(&code.nvars()) {
        let exact = exactness_check(&code)?;
        c.exact = Some(exact);
        if exact && code.nvars() == 2 && code.is_css() {
            let t = torsion_dimension(&CssCode::new(code)?, qcodes::css2d::DEFAULT_B_MAX)?;
            c.annihilator = Some(Annihilator { b: t.b, torsion_dim: t.dimension, torus_checks: t.torus_checks });
        }
    }
    Report::ok(&c, check_text(&c))
}

/// Matrix input for `snf`: integers, or polynomials in `x` over F_p.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    ring: String,
    #[serde(default)]
    p: Option<u64>,
    matrix: Vec<Vec<Value>>,
}

impl MatrixFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("line {}, column {}: {e}", e.line(), e.column())))
    }
}

#[derive(Serialize)]
struct Snf {
    ring: String,
    divisors: Vec<String>,
    diagonal: Vec<Vec<String>>,
    a: Vec<Vec<String>>,
    b: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
}

fn grid<T: Ring>(m: &EMatrix<T>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

fn poly_grid(m: &PolyMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|p| p.to_string()).collect()).collect()
}

fn entry_text(v: &Value, r: usize, c: usize) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Input(format!("matrix entry ({}, {}) must be a number or a string", r + 1, c + 1))),
    }
}

fn snf_text(s: &Snf) -> String {
    let mut t = format!("divisors: {}\n", s.divisors.join(", "));
    if let Some(g) = &s.group {
        writeln!(t, "cokernel: {g}").unwrap();
    }
    t
}

pub fn snf(file: &MatrixFile) -> Result<Report, CliError> {
    let cols = file.matrix.first().map_or(0, Vec::len);
    if file.matrix.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input("matrix rows have different lengths".into()));
    }
    let mut texts = Vec::new();
    for (r, row) in file.matrix.iter().enumerate() {
        texts.push(row.iter().enumerate().map(|(c, v)| entry_text(v, r, c)).collect::<Result<Vec<_>, _>>()?);
    }
    let out = match file.ring.as_str() {
        "Z" => {
            let rows = texts
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(c, s)| {
                            BigInt::from_str(s.trim()).map_err(|_| {
                                CliError::Input(format!("matrix entry ({}, {}): \"{s}\" is not an integer", r + 1, c + 1))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = EMatrix::from_rows(BigInt::from(0), rows)?;
            let res = smith_normal_form(&m)?;
            let group = abelian_group_decomposition(&m)?;
            Snf {
                ring: file.ring.clone(),
                divisors: res.divisors.iter().map(|d| d.to_string()).collect(),
                diagonal: grid(&res.diagonal),
                a: grid(&res.a),
                b: grid(&res.b),
                group: Some(group.to_string()),
            }
        }
        "Fp[x]" => {
            let p = file.p.ok_or_else(|| CliError::Input("ring Fp[x] needs \"p\"".into()))?;
            let field = Field::new(p).map_err(|e| CliError::Input(format!("field \"p\": {e}")))?;
            let m = PolyMatrix::parse(field, 1, &texts).map_err(|e| match e {
                LaurentError::Parse(pe) => CliError::Input(format!("\"matrix\" {pe}")),
                other => other.into(),
            })?;
            let res = laurent_smith_normal_form(&m)?;
            Snf {
                ring: file.ring.clone(),
                divisors: res.divisors.iter().map(|d| d.to_string()).collect(),
                diagonal: poly_grid(&res.diagonal),
                a: poly_grid(&res.a),
                b: poly_grid(&res.b),
                group: None,
            }
        }
        other => return Err(CliError::Input(format!("unknown ring \"{other}\", expected \"Z\" or \"Fp[x]\""))),
    };
    Report::ok(&out, snf_text(&out))
}
