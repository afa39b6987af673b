use super::*;

#[test]
fn builtins_print_canonically() {
    for (name, text) in BUILTINS {
        let doc = dsl::parse(text).unwrap_or_else(|d| panic!("{name}: {}", render(&d)));
        assert_eq!(dsl::print(&doc), text, "{name}");
    }
}

#[test]
fn generated_heisenberg_matches_shipped_files() {
    assert_eq!(builtin_source("heisenberg3").unwrap(), heisenberg_source(3));
    assert_eq!(builtin_source("heisenberg4").unwrap(), heisenberg_source(4));
    assert_eq!(builtin_source("heisenberg(5)").unwrap(), heisenberg_source(5));
    assert!(builtin_source("heisenberg1").is_err());
}

fn all_pass(name: &str) {
    let spec = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
    let report = run_claims(&spec);
    for c in &report.claims {
        eprintln!("{name}/{}: {} {} {:?}", c.id, if c.passed { "ok" } else { "FAIL" }, c.detail, c.residual);
    }
    assert!(report.all_passed(), "{name}: {} failed", report.failed);
}

#[test]
fn sl2c_claims() {
    all_pass("sl2c");
}

#[test]
fn iwasawa_claims() {
    all_pass("iwasawa");
}

#[test]
fn torus6_claims() {
    all_pass("torus6");
}

#[test]
fn c4_claims() {
    all_pass("c4_family");
}

#[test]
fn heisenberg_claims() {
    all_pass("heisenberg3");
    all_pass("heisenberg4");
}
