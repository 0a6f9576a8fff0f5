use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use waring_core::selftest::seeded_quintics;

fn waring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waring"))
        .args(args)
        .env_remove("WARING_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = fs::remove_file(&p);
    p
}

fn write(name: &str, text: &str) -> String {
    let p = scratch(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn term_count(text: &str) -> usize {
    text.lines().filter(|l| l.contains(" : ")).count()
}

#[test]
fn decompose_a_fifth_power() {
    let o = waring(&["decompose", "--inline", "vars=3 deg=5;5 0 0 = 1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(term_count(&out), 1);
    assert!(out.contains("# status = ok"));
}

#[test]
fn rank_of_binary_monomials() {
    for (e, r) in [("5 0", 1), ("4 1", 5), ("3 2", 4), ("2 3", 4), ("1 4", 5)] {
        let o = waring(&["rank", "--inline", &format!("vars=2 deg=5;{e} = 1")]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert!(out.starts_with(&format!("rank = {r}\n")), "{out}");
        assert_eq!(term_count(&out), r);
    }
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let three_vars = waring(&["rank", "--inline", "vars=3 deg=5;5 0 0 = 1"]);
    assert_eq!(three_vars.status.code(), Some(3));
    let bad_sum = waring(&["decompose", "--inline", "vars=3 deg=5;5 1 0 = 1"]);
    assert_eq!(bad_sum.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad_sum.stderr).contains("line 2"));
    assert_eq!(waring(&["frobnicate"]).status.code(), Some(3));
    let low = waring(&["--precision", "32", "decompose", "--inline", "vars=3 deg=5;5 0 0 = 1"]);
    assert_eq!(low.status.code(), Some(3));
    assert_eq!(waring(&["decompose", "/nonexistent/form.txt"]).status.code(), Some(3));
    assert_eq!(waring(&["--help"]).status.code(), Some(0));
}

#[test]
fn decompose_then_verify() {
    let form = write("mono.txt", "vars=3 deg=5\n1 2 2 = 1\n");
    let o = waring(&["decompose", &form]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(term_count(&out) <= 10);
    let dec = write("mono.dec", &out);
    let v = waring(&["verify", "--form", &form, "--decomposition", &dec]);
    assert_eq!(v.status.code(), Some(0));
    let r: f64 = stdout(&v).trim().strip_prefix("residual = ").unwrap().parse().unwrap();
    assert!(r <= (-128f64).exp2());

    // dropping a term is caught
    let first = out.lines().position(|l| l.contains(" : ")).unwrap();
    let tampered: Vec<&str> = out.lines().enumerate().filter(|(i, _)| *i != first).map(|(_, l)| l).collect();
    let bad = write("mono-bad.dec", &tampered.join("\n"));
    let v = waring(&["verify", "--form", &form, "--decomposition", &bad]);
    assert_eq!(v.status.code(), Some(2));
}

#[test]
fn batch_keeps_input_order() {
    let forms = seeded_quintics(3, 10);
    let text: String = forms.iter().map(|f| f.to_string()).collect();
    let path = write("batch.txt", &text);
    let o = waring(&["batch", &path]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    for (i, l) in lines.iter().enumerate() {
        assert!(l.starts_with(&format!("form {i}: ")), "{l}");
        assert!(l.ends_with("status = ok"));
        let r: f64 = l.split("residual = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert!(r <= (-128f64).exp2());
        let n: usize = l.split("terms = ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert!(n <= 10);
    }
}

#[test]
fn output_is_deterministic() {
    let form = write("det.txt", &seeded_quintics(11, 1)[0].to_string());
    let a = waring(&["--seed", "5", "decompose", &form]);
    let b = waring(&["--seed", "5", "decompose", &form]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let form = write("env.txt", &seeded_quintics(12, 1)[0].to_string());
    let env = Command::new(env!("CARGO_BIN_EXE_waring"))
        .args(["lines", &form])
        .env("WARING_SEED", "17")
        .output()
        .unwrap();
    let flag = waring(&["--seed", "17", "lines", &form]);
    assert_eq!(env.status.code(), Some(0));
    assert_eq!(env.stdout, flag.stdout);
}

#[test]
fn output_file_is_appended() {
    let out = scratch("appended.txt");
    let o = out.to_str().unwrap();
    for _ in 0..2 {
        let r = waring(&["--output", o, "decompose", "--inline", "vars=3 deg=5;0 0 5 = 2"]);
        assert_eq!(r.status.code(), Some(0));
        assert!(r.stdout.is_empty());
    }
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("# status = ok").count(), 2);
}

#[test]
fn pencil_dump() {
    let o = waring(&["pencil", "--factors", "1 2;3 -1;0 1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("d = 5\n"));
    assert_eq!(out.matches("# r row").count(), 4);
    assert_eq!(out.matches("\na").count(), 3);
    // X holds [1,0], [0,1] and the roots [lⁱ(x₁)², lⁱ(x₀)²]; the root of
    // the factor (0, 1) is [1, 0] again
    assert_eq!(out.matches("X = ").count(), 4);
    assert!(out.contains("X = 4 1\n") && out.contains("X = 1 9\n"));
    assert_eq!(waring(&["pencil", "--factors", "1 2 3"]).status.code(), Some(3));
}

#[test]
fn lines_prints_a_certificate() {
    let form = write("lines.txt", &seeded_quintics(13, 1)[0].to_string());
    let o = waring(&["lines", &form]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("kind = "));
    assert!(out.contains("check = "));
    assert!(!out.contains("FAILED"));
}
