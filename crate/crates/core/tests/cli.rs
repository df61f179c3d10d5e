use std::path::PathBuf;
use std::process::Command;

use superpainleve::cli::{cmd_analyze, cmd_scan, load_seed, load_system, parse_grid, Format, ScanReport};
use superpainleve::engine::{Status, TestVerdict};
use superpainleve::ring::rat;

fn seed(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("atlas/seeds").join(name)
}

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_superpainleve")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn analyze_skdv1_passes_with_twelve_functions() {
    let s = seed("skdv_II.toml");
    let (code, stdout, _) = bin(&["analyze", "--system", "skdv", "--seed", s.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v = TestVerdict::from_json(&stdout).unwrap();
    assert_eq!(v.status, Status::PrincipalPass);
    assert_eq!(v.arbitrary_functions.len(), 12);
    assert_eq!(TestVerdict::from_json(&v.to_json()).unwrap(), v);
}

#[test]
fn analyze_degenerate_case_fails() {
    let s = seed("skdv_V.toml");
    let (code, stdout, _) = bin(&["analyze", "--system", "skdv", "--seed", s.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.contains("compatibility at level -1"), "{stdout}");
}

#[test]
fn non_principal_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vi.toml");
    std::fs::write(&path, "label = \"VI[4]\"\ncore = true\nparams = { c = \"3\", alpha = \"1\", beta = \"3\" }\nlevel0 = { u = \"2\", w = \"0\" }\n").unwrap();
    let (code, stdout, _) = bin(&["analyze", "--system", "skdv", "--seed", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{stdout}");
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let eqn = dir.path().join("bad.eqn");
    std::fs::write(&eqn, "system bad\nfield u parity=even lead=2\neq u = d(u) +* u\n").unwrap();
    let s = seed("skdv_II.toml");
    let (code, _, stderr) = bin(&["analyze", "--system", eqn.to_str().unwrap(), "--seed", s.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(stderr.contains("3:"), "{stderr}");
    let (code, _, _) = bin(&["analyze", "--system", "skdv"]);
    assert_eq!(code, 3);
    let (code, _, _) = bin(&["scan", "--alpha", "1/0", "--beta", "0"]);
    assert_eq!(code, 3);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let s = seed("osp22.toml");
    let (code, stdout, _) = bin(&["analyze", "--system", "osp22", "--seed", s.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v = TestVerdict::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.status.is_pass());
}

#[test]
fn exit_code_follows_status() {
    let sys = load_system("skdv").unwrap();
    for (name, code) in [("skdv_I.toml", 0), ("skdv_II_core.toml", 0), ("skdv_II_perturbed.toml", 1), ("skdv_V.toml", 1)] {
        let s = load_seed(&seed(name)).unwrap();
        let text = cmd_analyze(&sys, &s, None, Format::Text);
        let json = cmd_analyze(&sys, &s, None, Format::Json);
        assert_eq!(text.code, code, "{name}: {}", text.report);
        assert_eq!(json.code, code);
        assert_eq!(TestVerdict::from_json(&json.report).unwrap().status.exit_code(), code);
    }
}

#[test]
fn scan_flags_the_integrable_points() {
    let sys = load_system("skdv").unwrap();
    let r = cmd_scan(&sys, &rat(3, 1), &parse_grid("-2:4:1").unwrap(), &parse_grid("-6:12:3").unwrap(), None, 2);
    assert_eq!(r.points.len(), 7 * 7);
    let hits: Vec<(&str, &str)> = r.hits.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    assert_eq!(hits, [("-2", "-6"), ("1", "3"), ("4", "12")]);
    assert_eq!(ScanReport::from_json(&r.to_json()).unwrap(), r);

    let r0 = cmd_scan(&sys, &rat(0, 1), &parse_grid("0,1,2").unwrap(), &parse_grid("-1,0,1").unwrap(), None, 1);
    assert_eq!(r0.hits, [("1".to_string(), "0".to_string())]);

    let empty = cmd_scan(&sys, &rat(3, 1), &[], &parse_grid("1").unwrap(), None, 1);
    assert!(empty.points.is_empty() && empty.hits.is_empty());
}

#[test]
fn scan_is_independent_of_worker_count() {
    let sys = load_system("skdv").unwrap();
    let (a, b) = (parse_grid("0:2:1/2").unwrap(), parse_grid("2,3").unwrap());
    assert_eq!(cmd_scan(&sys, &rat(3, 1), &a, &b, None, 1), cmd_scan(&sys, &rat(3, 1), &a, &b, None, 4));
}
