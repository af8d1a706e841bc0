use std::path::PathBuf;
use std::process::{Command, Output};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tate-periods")).current_dir(dir()).args(args).output().expect("binary runs")
}

/// Every invocation here has a blessed output under golden/.
const GOLDEN_RUNS: &[&[&str]] = &[
    &["counterexample"],
    &["counterexample", "--prime", "13"],
    &["appendix-a3", "--ell", "2"],
    &["appendix-a3", "--ell", "3"],
    &["appendix-a3", "--ell", "5"],
    &["l-independence", "--ell", "2"],
    &["l-independence", "--prime", "13", "--ell", "3"],
    &["l-independence", "--ell", "2", "--q1", "p", "--q2", "p^2"],
    &["product-positive", "--q1", "p", "--q2", "p^2"],
    &["product-positive", "--q1", "p", "--q2", "(1+p)*p"],
    &["linv", "--input", "inputs/surface_vb.json"],
    &["hom", "--input", "inputs/tate_p.json", "--input", "inputs/surface_vb.json"],
    &["hom", "--integral", "--input", "inputs/tate_p.json", "--input", "inputs/tate_p2.json"],
    &["tate-hom", "--ell", "7", "--input", "inputs/surface_vb.json", "--input", "inputs/surface_vb.json"],
    &["tate-hom", "--ell", "2", "--input", "inputs/tate_p.json", "--input", "inputs/tate_eps_p.json"],
    &["isogeny", "--input", "inputs/product.json", "--input", "inputs/product.json"],
    &["dst", "--input", "inputs/product.json"],
    &["raskind", "--input", "inputs/example45.json"],
    &["surface", "--q1", "p", "--q2", "(1+p)*p"],
    &["surface", "--q1", "p", "--q2", "p^2"],
    &["ordinary", "--vector", "0,0,0,0,1,1"],
];

#[test]
fn golden_outputs_match() {
    for args in GOLDEN_RUNS {
        let mut full = args.to_vec();
        full.extend(["--golden", "golden"]);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn exit_codes() {
    let out = run(&["counterexample", "--prime", "11"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PRIME_CONSTRAINT"));
    assert_eq!(run(&["appendix-a3", "--ell", "7"]).status.code(), Some(1));
    assert_eq!(run(&["surface", "--q1", "1", "--q2", "p"]).status.code(), Some(1));
    assert_eq!(run(&["ordinary", "--vector", "1,0,0,0,0,1"]).status.code(), Some(1));
    // a golden file that disagrees with the run
    let tmp = std::env::temp_dir().join(format!("tate-periods-golden-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let g = tmp.to_str().unwrap();
    assert_eq!(run(&["appendix-a3", "--ell", "2", "--golden", g, "--bless"]).status.code(), Some(0));
    let blessed = std::fs::read_dir(&tmp).unwrap().next().unwrap().unwrap().path();
    std::fs::write(&blessed, "{}\n").unwrap();
    assert_eq!(run(&["appendix-a3", "--ell", "2", "--golden", g]).status.code(), Some(2));
    std::fs::remove_dir_all(&tmp).unwrap();
}

#[test]
fn json_is_deterministic() {
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let a = strip(run(&["counterexample"]));
    let b = strip(run(&["counterexample"]));
    assert_eq!(a, b);
    assert_eq!(a["pass"], true);
}

#[test]
fn text_format() {
    let out = run(&["l-independence", "--ell", "2", "--format", "text"]);
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.starts_with("l_independence [PASS]"));
    assert!(s.contains("dim_ell = 3"));
}
