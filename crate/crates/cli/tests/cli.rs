use std::path::PathBuf;

use assert_cmd::Command;
use qcodes::codeanalysis::Region;
use qcodes::gf::Field;
use qcodes::laurent::{instantiate_torus, CodeDefinition};
use qcodes_cli::codefile::CodeFile;
use serde_json::Value;
use tempfile::TempDir;

const TORIC: &str = r#"{"p":2,"D":2,"q":2,"sigma":[["x - 1","0"],["y - 1","0"],["0","y^-1 - 1"],["0","x^-1 - 1"]]}"#;
const ISING: &str = r#"{"p":2,"D":1,"q":1,"sigma":[["1 + x"],["0"]]}"#;
const TRIVIAL: &str = r#"{"p":2,"D":1,"q":1,"sigma":[["1"],["0"]]}"#;
const CUBIC_CHAIN: &str = r#"{"p":2,"D":1,"q":1,"sigma":[["1 + x + x^2"],["0"]]}"#;
const BELL: &str = r#"{"p":2,"D":0,"q":2,"sigma":[["1","0"],["1","0"],["0","1"],["0","1"]]}"#;
const PRODUCT: &str = r#"{"p":3,"D":0,"q":3,"sigma":[["1","0","0"],["0","1","0"],["0","0","1"],["0","0","0"],["0","0","0"],["0","0","0"]]}"#;

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(TempDir::new().unwrap())
    }

    fn put(&self, name: &str, body: &str) -> PathBuf {
        let path = self.0.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }
}

fn qcodes() -> Command {
    Command::cargo_bin("qcodes").unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let out = qcodes().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code_arg(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn params_of_small_codes() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let v = json_of(&["params", "--code", code_arg(&toric), "--L", "3"]);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64(), v["d"].as_u64()), (Some(18), Some(2), Some(3)));

    let ising = f.put("ising.json", ISING);
    let v = json_of(&["params", "--code", code_arg(&ising), "--L", "4"]);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64(), v["d"].as_u64()), (Some(4), Some(1), Some(1)));

    let trivial = f.put("trivial.json", TRIVIAL);
    let v = json_of(&["params", "--code", code_arg(&trivial), "--L", "5"]);
    assert_eq!((v["n"].as_u64(), v["k"].as_u64()), (Some(5), Some(0)));
    assert!(v["d"].is_null());
}

#[test]
fn params_lists_every_size_in_order() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let v = json_of(&["params", "--code", code_arg(&toric), "--L", "3,2"]);
    let per: Vec<(u64, u64)> =
        v["per_L"].as_array().unwrap().iter().map(|r| (r["L"].as_u64().unwrap(), r["d"].as_u64().unwrap())).collect();
    assert_eq!(per, vec![(3, 3), (2, 2)]);
}

#[test]
fn weight_cap_bounds_the_distance_search() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let v = json_of(&["params", "--code", code_arg(&toric), "--L", "3", "--weight-cap", "2"]);
    assert!(v["d"].is_null());
    assert_eq!(v["d_exceeds"].as_u64(), Some(2));
}

#[test]
fn classify_one_dimensional_codes() {
    let f = Files::new();
    let chain = f.put("chain.json", CUBIC_CHAIN);
    let v = json_of(&["classify", "--code", code_arg(&chain)]);
    assert_eq!((v["ising_copies"].as_u64(), v["trivial_qudits"].as_u64(), v["b"].as_u64()), (Some(2), Some(1), Some(3)));

    let ising = f.put("ising.json", ISING);
    let v = json_of(&["classify", "--code", code_arg(&ising)]);
    assert_eq!((v["ising_copies"].as_u64(), v["trivial_qudits"].as_u64(), v["b"].as_u64()), (Some(1), Some(0), Some(1)));
}

#[test]
fn classify_toric_code() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let v = json_of(&["classify", "--code", code_arg(&toric)]);
    assert_eq!(v["toric_copies"].as_u64(), Some(1));
    assert_eq!(v["residual_q"].as_u64(), Some(0));
}

#[test]
fn classify_exit_codes() {
    let f = Files::new();
    let chain = f.put("chain.json", CUBIC_CHAIN);
    qcodes().args(["classify", "--code", code_arg(&chain), "--nmax", "2"]).assert().code(2);

    let mixed = f.put("mixed.json", r#"{"p":2,"D":2,"q":1,"sigma":[["1 + x"],["1 + x"]]}"#);
    let out = qcodes().args(["classify", "--code", code_arg(&mixed)]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}

/// Entropy of a pure stabilizer state as `rank(restriction to M) - |M|`.
fn restriction_entropy(code: &CodeDefinition, l: usize, region: &[usize]) -> usize {
    let fc = instantiate_torus(code, &vec![l; code.nvars()]).unwrap();
    let state = qcodes::codeanalysis::complete_to_state(&fc).unwrap();
    let n = fc.n();
    let cols: Vec<usize> = region.iter().copied().chain(region.iter().map(|&i| n + i)).collect();
    let m = qcodes::pauli::generator_matrix(fc.field(), n, &state).select_cols(&cols);
    m.rank() - region.len()
}

#[test]
fn entropy_examples() {
    let f = Files::new();
    let bell = f.put("bell.json", BELL);
    let v = json_of(&["entropy", "--code", code_arg(&bell), "--region", "1"]);
    assert_eq!((v["entropy"].as_u64(), v["schmidt_rank"].as_u64()), (Some(1), Some(2)));

    let product = f.put("product.json", PRODUCT);
    for region in ["1", "2,3", "1,2,3"] {
        let v = json_of(&["entropy", "--code", code_arg(&product), "--region", region]);
        assert_eq!((v["entropy"].as_u64(), v["schmidt_rank"].as_u64()), (Some(0), Some(1)));
    }

    let toric = f.put("toric.json", TORIC);
    let code = CodeFile::from_json(TORIC).unwrap().to_code().unwrap();
    let oracle = restriction_entropy(&code, 3, &[0, 1]);
    let v = json_of(&["entropy", "--code", code_arg(&toric), "--L", "3", "--region", "1,2"]);
    assert_eq!(v["entropy"].as_u64(), Some(oracle as u64));
    assert_eq!(oracle, 2);
    let complement: Vec<String> = (3..=18).map(|i| i.to_string()).collect();
    let v = json_of(&["entropy", "--code", code_arg(&toric), "--L", "3", "--region", &complement.join(",")]);
    assert_eq!(v["entropy"].as_u64(), Some(2));
}

#[test]
fn region_out_of_range_is_an_input_error() {
    let f = Files::new();
    let bell = f.put("bell.json", BELL);
    let out = qcodes().args(["entropy", "--code", code_arg(&bell), "--region", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
}

#[test]
fn parse_errors_carry_positions() {
    let f = Files::new();
    let bad = f.put("bad.json", r#"{"p":2,"D":1,"q":1,"sigma":[["1 + x*"],["0"]]}"#);
    let out = qcodes().args(["params", "--code", code_arg(&bad), "--L", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("entry (1, 1)") && err.contains("column 7"), "{err}");

    let broken = f.put("broken.json", "{\"p\": 2,\n \"D\": 1,\n \"q\": }");
    let out = qcodes().args(["params", "--code", code_arg(&broken), "--L", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column"));
}

#[test]
fn isotropy_violations_name_columns() {
    let f = Files::new();
    let bad = f.put("bad.json", r#"{"p":3,"D":1,"q":1,"sigma":[["1","1","0"],["0","0","1"]]}"#);
    let out = qcodes().args(["params", "--code", code_arg(&bad), "--L", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("columns 1 and 3"));

    let out = qcodes().args(["check", "--code", code_arg(&bad)]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["isotropic"], Value::Bool(false));
    assert_eq!(v["violation"], serde_json::json!([1, 3]));
}

#[test]
fn check_reports_exactness_and_annihilator() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let v = json_of(&["check", "--code", code_arg(&toric)]);
    assert_eq!(v["isotropic"], Value::Bool(true));
    assert_eq!(v["exact"], Value::Bool(true));
    assert_eq!(v["annihilator"]["b"].as_u64(), Some(1));
    assert_eq!(v["annihilator"]["torsion_dim"].as_u64(), Some(2));
}

#[test]
fn homology_of_tori() {
    let v = json_of(&["homology", "--L", "1,2,5"]);
    for row in v.as_array().unwrap() {
        assert_eq!((row["h0"].as_u64(), row["h1"].as_u64(), row["h2"].as_u64()), (Some(1), Some(2), Some(1)));
    }
}

#[test]
fn canon_script_maps_stabilizers_to_single_qudit_operators() {
    let f = Files::new();
    let bell = f.put("bell.json", BELL);
    let out = qcodes().args(["canon", "--code", code_arg(&bell)]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let field = Field::new(2).unwrap();
    let script = qcodes::pauli::GateScript::parse(field, 2, &text).unwrap();
    let code = CodeFile::from_json(BELL).unwrap().to_code().unwrap();
    let fc = instantiate_torus(&code, &[]).unwrap();
    for g in fc.generators() {
        let image = script.apply(g).unwrap();
        assert!(image.z_part().iter().all(|&c| c == 0), "{image:?}");
    }
    let v = json_of(&["canon", "--code", code_arg(&bell), "--format", "json"]);
    assert_eq!(v["rank"].as_u64(), Some(2));
}

#[test]
fn snf_over_integers_and_polynomials() {
    let f = Files::new();
    let z = f.put("z.json", r#"{"ring":"Z","matrix":[[2,4,4],[-6,6,12],[10,-4,-16]]}"#);
    let v = json_of(&["snf", code_arg(&z)]);
    assert_eq!(v["divisors"], serde_json::json!(["2", "6", "12"]));
    assert_eq!(v["group"], Value::String("Z/2 + Z/6 + Z/12".into()));

    let px = f.put("px.json", r#"{"ring":"Fp[x]","p":2,"matrix":[["1 + x","1 + x"],["0","1 + x^2"]]}"#);
    let v = json_of(&["snf", code_arg(&px)]);
    assert_eq!(v["divisors"], serde_json::json!(["1 + x", "1 + x^2"]));
}

#[test]
fn output_is_byte_stable() {
    let f = Files::new();
    let toric = f.put("toric.json", TORIC);
    let run = || qcodes().args(["classify", "--code", code_arg(&toric)]).output().unwrap().stdout;
    assert_eq!(run(), run());
}

#[test]
fn canonical_code_files_round_trip() {
    for text in [TORIC, ISING, CUBIC_CHAIN, BELL, PRODUCT] {
        let once = CodeFile::from_code(&CodeFile::from_json(text).unwrap().to_code().unwrap()).to_json();
        let twice = CodeFile::from_code(&CodeFile::from_json(&once).unwrap().to_code().unwrap()).to_json();
        assert_eq!(once, twice);
    }
}

#[test]
fn regions_are_one_based() {
    let r = qcodes_cli::commands::parse_region("2, 1", 3).unwrap();
    assert_eq!(r, Region::new(3, &[0, 1]).unwrap());
    assert!(qcodes_cli::commands::parse_region("0", 3).is_err());
}
