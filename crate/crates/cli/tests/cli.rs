use std::process::{Command, Output};

use sonda::{decode_dyadic, Dyadic};

fn sonda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonda")).args(args).output().expect("spawn sonda")
}

fn ok_lines(args: &[&str]) -> Vec<String> {
    let out = sonda(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().lines().map(str::to_string).collect()
}

fn within(line: &str, want: f64, n: i32) -> bool {
    let d = decode_dyadic(line).unwrap();
    (d.to_f64() - want).abs() <= 2f64.powi(-n)
}

#[test]
fn real_eval_sum() {
    let lines = ok_lines(&["real", "eval", "--expr", "1/2 + 1/4", "--prec", "10"]);
    assert_eq!(lines.len(), 1);
    assert!(within(&lines[0], 0.75, 10));
}

#[test]
fn real_eval_meter_and_decimal() {
    let lines = ok_lines(&["real", "eval", "--expr", "sin(1/2) * 3", "--prec", "20", "--meter", "--decimal"]);
    assert!(within(&lines[0], 0.5f64.sin() * 3.0, 20));
    assert!(lines[1].contains("lossy"));
    let t: Vec<u64> = lines[2].split(' ').map(|w| w.parse().unwrap()).collect();
    assert_eq!(t[0], 20);
    assert!(t[1] <= t[2]);
}

#[test]
fn ivp_solve_closed_form() {
    let lines = ok_lines(&["ivp", "solve", "--rhs", "(y+1)*1/100", "--lipschitz", "1", "--prec", "8", "--at", "+1/1"]);
    assert!(within(&lines[0], 0.25f64.exp() - 1.0, 8));
    assert!(lines[1].starts_with("error_bound 2^-8 steps 2^"));
}

#[test]
fn sopoly_eval() {
    assert_eq!(ok_lines(&["sopoly", "eval", "--poly", "L(n)+4", "--size", "square", "--n", "3"]), ["13"]);
    assert_eq!(ok_lines(&["sopoly", "eval", "--poly", "L(L(n))", "--size", "const:5", "--n", "9"]), ["5"]);
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("l.txt");
    std::fs::write(&table, "1 4 2 9").unwrap();
    let arg = format!("table:{}", table.display());
    assert_eq!(ok_lines(&["sopoly", "eval", "--poly", "L(n)", "--size", &arg, "--n", "2"]), ["4"]);
}

#[test]
fn cfun_commands() {
    let v = ok_lines(&["cfun", "eval", "--expr", "t*y", "--domain", "rect", "--at", "1/2,-1/4", "--prec", "6"]);
    assert!(within(&v[0], -0.125, 6));
    let v = ok_lines(&["cfun", "apply", "--expr", "t*t", "--x", "3/4", "--prec", "12"]);
    assert!(within(&v[0], 0.5625, 12));
    let m: usize = ok_lines(&["cfun", "modulus", "--expr", "t*t", "--prec", "5"])[0].parse().unwrap();
    assert!(m >= 6);
    assert_eq!(sonda(&["cfun", "eval", "--expr", "t", "--at", "3/2", "--prec", "2"]).status.code(), Some(2));
}

#[test]
fn sets_and_hull() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pts.txt");
    std::fs::write(&file, "# two corners\n+1/10 +1/10\n+1/100 +11/100\n").unwrap();
    let f = file.to_str().unwrap();
    let q = |cmd: &str, u: &str, v: &str, n: &str| ok_lines(&["set", cmd, "--set", f, "--u", u, "--v", v, "--prec", n]);
    assert_eq!(q("query", "+1/10", "+1/10", "4"), ["1"]);
    // midpoint of the segment is only in the hull
    assert_eq!(q("query", "3/8", "5/8", "4"), ["0"]);
    assert_eq!(q("hull", "3/8", "5/8", "4"), ["1"]);
    assert_eq!(q("hull", "0", "1", "4"), ["0"]);
    let capped = sonda(&["set", "hull", "--set", f, "--u", "0", "--v", "0", "--prec", "7"]);
    assert_eq!(capped.status.code(), Some(1));
    let raised = Command::new(env!("CARGO_BIN_EXE_sonda"))
        .args(["set", "hull", "--set", f, "--u", "3/8", "--v", "5/8", "--prec", "7"])
        .env("SONDA_MAX_PREC", "7")
        .output()
        .unwrap();
    assert!(raised.status.success());
    assert_eq!(String::from_utf8(raised.stdout).unwrap().trim(), "1");
}

#[test]
fn complexity_commands() {
    assert_eq!(ok_lines(&["cx", "sat", "--pred", "builtin:and", "--formula", "p(a1,a2) & !a1"]), ["0"]);
    assert_eq!(ok_lines(&["cx", "qbf", "--pred", "builtin:or", "--formula", "∀a1.∃a2. p(a1,a2)"]), ["1"]);
    assert_eq!(ok_lines(&["cx", "qbf", "--pred", "builtin:and", "--formula", "A a1. E a2. p(a1,a2)"]), ["0"]);
    assert_eq!(ok_lines(&["cx", "power", "--fun", "builtin:inc", "--u", "101"]), ["0"]);
    assert_eq!(ok_lines(&["cx", "power", "--fun", "builtin:zero", "--u", "101"]), ["1"]);
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("p.txt");
    std::fs::write(&table, "00011101 1\n").unwrap();
    let arg = format!("table:{}", table.display());
    // the table holds only <0, 1>
    assert_eq!(ok_lines(&["cx", "exist", "--pred", &arg, "--u", "0", "--n", "1"]), ["1"]);
    assert_eq!(ok_lines(&["cx", "exist", "--pred", &arg, "--u", "1", "--n", "1"]), ["0"]);
}

#[test]
fn meter_lines_stay_under_bounds() {
    let lines = ok_lines(&["meter", "--op", "real_mul", "--x", "3/4", "--y", "-5/2", "--bound", "8", "--to", "12"]);
    assert_eq!(lines.len(), 13);
    for (n, l) in lines.iter().enumerate() {
        let t: Vec<u64> = l.split(' ').map(|w| w.parse().unwrap()).collect();
        assert_eq!(t[0], n as u64);
        assert!(t[1] <= t[2], "{l}");
    }
    assert_eq!(ok_lines(&["meter", "--list"]).len(), 6);
}

#[test]
fn exit_codes() {
    assert_eq!(sonda(&["real", "eval", "--expr", "1/3", "--prec", "3"]).status.code(), Some(2));
    assert_eq!(sonda(&["real", "eval", "--expr", "t", "--prec", "3"]).status.code(), Some(2));
    assert_eq!(sonda(&["sopoly", "eval", "--poly", "n+0", "--size", "id", "--n", "1"]).status.code(), Some(2));
    assert_eq!(sonda(&["nonsense"]).status.code(), Some(2));
    assert_eq!(sonda(&["cx", "exist", "--pred", "builtin:id", "--n", "30"]).status.code(), Some(1));
}

#[test]
fn deterministic_output() {
    let args = ["ivp", "solve", "--rhs", "2*t", "--prec", "4", "--at", "+11/100"];
    let a = sonda(&args);
    let b = sonda(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let t = decode_dyadic(String::from_utf8(a.stdout).unwrap().lines().next().unwrap()).unwrap();
    assert!((&t - &Dyadic::new(9, 4)).abs() <= Dyadic::pow2(-4));
}

#[test]
fn selftest_subset() {
    let lines = ok_lines(&["selftest", "--only", "1,2"]);
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.starts_with("PASS")));
}
