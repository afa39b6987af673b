//! Acceptance run: one PASS/FAIL line per criterion, with the sub-checks
//! indented below it. Known deviations are printed as FAIL with their
//! analysis and do not change the exit status; anything else does.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use pklab::catalog::{builtin, run_claim, ManifoldSpec};
use pklab::exterior::{Form, Matrix, Word};
use pklab::obstruct::{
    linear_power_preservation, mt_calibrate, random_conjugate, random_symplectic, standard_structure, standard_symplectic,
    MtExpectation,
};
use pklab::symexpr::{Assignment, Expr, NoFunctions, Var};

struct Sub {
    name: String,
    result: Result<String, String>,
    /// Analysis of a failure that is expected and recorded.
    known: Option<&'static str>,
}

fn sub(name: &str, result: Result<String, String>) -> Sub {
    Sub { name: name.to_string(), result, known: None }
}

fn spec(name: &str) -> ManifoldSpec {
    builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Run the claim with this id from a shipped description.
fn claim(spec: &ManifoldSpec, id: &str) -> Sub {
    let Some(decl) = spec.claims.iter().find(|c| c.id == id) else {
        return sub(&format!("{}:{id}", spec.name), Err("no such claim".into()));
    };
    let out = run_claim(spec, decl);
    let mut detail = out.detail.clone();
    if let Some(r) = &out.residual {
        detail.push_str(&format!(" (residual {r})"));
    }
    sub(&format!("{}:{id}", spec.name), if out.passed { Ok(detail) } else { Err(detail) })
}

fn claims(spec: &ManifoldSpec, ids: &[&str]) -> Vec<Sub> {
    ids.iter().map(|id| claim(spec, id)).collect()
}

fn proptest_cases<S: Strategy>(name: &str, strategy: S, check: impl Fn(&S::Value) -> Check) -> Sub
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let r = runner.run(&strategy, |v| check(&v).map_err(TestCaseError::fail));
    sub(name, r.map(|_| "100 cases".to_string()).map_err(|e| e.to_string()))
}

fn sl2c() -> Vec<Sub> {
    let s = spec("sl2c");
    claims(&s, &["mc1", "mc2", "mc3", "exact", "dt1", "dt2", "dt3", "jt1", "jt3", "jt3bar", "fixed", "taming", "integrable", "kahler2"])
}

/// Least-squares ratio of two forms evaluated at a point.
fn numeric_ratio(a: &Form, b: &Form, at: &Assignment) -> Complex64 {
    let a = a.eval(at, &NoFunctions).unwrap();
    let b = b.eval(at, &NoFunctions).unwrap();
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for (w, y) in &b {
        let x = a.get(w).copied().unwrap_or_default();
        num += x * y.conj();
        den += y.norm_sqr();
    }
    num / den
}

fn iwasawa() -> Vec<Sub> {
    let s = spec("iwasawa");
    let mut out = claims(&s, &["balanced", "notkahler", "dt1", "dt2", "dt3", "corollary", "dbar", "firstorder", "integrable", "nop"]);

    // independent numeric check of the coefficient at t = 1/2
    let bracket = s
        .eval_text("phit1^phit2 + t*(phit1^phitbar1 + phit2^phitbar2) + t^2*phitbar1^phitbar2")
        .unwrap();
    let dphi = s.eval_text("d(phit3)").unwrap();
    let mut at = Assignment::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for v in s.frame.coords() {
        at.set(v, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    }
    at.set(&Var::real_parameter("t"), Complex64::new(0.5, 0.0));
    let c = numeric_ratio(&dphi, &bracket, &at);
    let want = -1.0 / (1.25f64 * 1.25);
    out.push(sub(
        "dphit3 coefficient at t = 1/2 (numeric)",
        if (c - want).norm() < 1e-9 { Ok(format!("{:.6} = -1/(1+t^2)^2", c.re)) } else { Err(format!("{c}, expected {want}")) },
    ));

    // the equation exactly as printed, with coefficient -1/(1+t^2)
    let printed = s
        .eval_text("-1/(1 + t^2)*(phit1^phit2 + t*(phit1^phitbar1 + phit2^phitbar2) + t^2*phitbar1^phitbar2)")
        .unwrap();
    let literal = if printed == dphi {
        Ok("matches".to_string())
    } else {
        Err(format!("printed coefficient -1/(1+t^2) gives {:.6} at t = 1/2; the engine gives {:.6}", -0.8, c.re))
    };
    out.push(Sub {
        name: "deformed structure equation as printed".into(),
        result: literal,
        known: Some(
            "inverting phit1 = dz1 + t dzbar2, phit2 = dz2 - t dzbar1 divides by 1+t^2 once per factor of \
             dz1^dz2, so the coefficient is -1/(1+t^2)^2; the printed -1/(1+t^2) is a typo (see Known deviations in the README). \
             The corrected equation passes above and every qualitative consequence is unchanged",
        ),
    });
    out
}

fn torus() -> Vec<Sub> {
    let s = spec("torus6");
    claims(&s, &["semikahler", "balanced", "mt", "pdes", "firstorder", "coframe", "family"])
}

fn c4() -> Vec<Sub> {
    let s = spec("c4_family");
    claims(&s, &["type", "dOmega", "dre", "lemma", "kahler2", "mt", "kahler", "integrable"])
}

fn heisenberg() -> Vec<Sub> {
    let mut out = Vec::new();
    for (name, n) in [("heisenberg3", 3), ("heisenberg4", 4)] {
        let s = spec(name);
        let ids: Vec<String> = (1..n).map(|p| format!("nop{p}")).collect();
        out.extend(claims(&s, &ids.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    out
}

fn linear() -> Vec<Sub> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let symplectic = (|| {
        for k in 0..1000 {
            let n = 2 + k % 2;
            let (s, inv) = random_symplectic(n, 3, &mut rng);
            let j = s.mul(&standard_structure(n)).mul(&inv);
            for p in 1..=n {
                let r = linear_power_preservation(&j, &standard_symplectic(n), p).map_err(|e| e.to_string())?;
                if !r.preserves_omega_p || r.preserves_omega_sign != Some(1) {
                    return Err(format!("sample {k}, p = {p}: {r:?}"));
                }
            }
        }
        Ok("1000 conjugates, every p, sign +1".to_string())
    })();
    out.push(sub("symplectic conjugates", symplectic));

    let anti = (|| {
        let r = linear_power_preservation(&anti_symplectic(2), &standard_symplectic(2), 2).map_err(|e| e.to_string())?;
        if !(r.preserves_omega_p && r.preserves_omega_sign == Some(-1)) {
            return Err(format!("n = 2, p = 2: {r:?}"));
        }
        let rows = check_linear(&anti_symplectic(4), 4, "n = 4")?;
        if rows != vec![(1, false, Some(-1)), (2, true, Some(-1)), (3, false, Some(-1))] {
            return Err(format!("n = 4: {rows:?}"));
        }
        Ok("n = 2, p = 2 and n = 4, p = 2 preserved with sign -1; odd p not preserved".to_string())
    })();
    out.push(sub("anti-symplectic structure", anti));

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let implication = (|| {
        let mut preserved = 0;
        for k in 0..200 {
            let n = 2 + k % 3;
            let j: Matrix = match rng.gen_range(0..3) {
                0 => random_conjugate(n, &mut rng),
                choice => {
                    let (s, inv) = random_symplectic(n, 2, &mut rng);
                    let base = if choice == 2 && n % 2 == 0 { anti_symplectic(n) } else { standard_structure(n) };
                    s.mul(&base).mul(&inv)
                }
            };
            preserved += check_linear(&j, n, &format!("sample {k}"))?.iter().filter(|r| r.1).count();
        }
        Ok(format!("200 structures, {preserved} preserved powers, each with J*w = ±w (Pfaffian oracle agrees)"))
    })();
    out.push(sub("no power preserved without ±ω", implication));
    out
}

fn engine() -> Vec<Sub> {
    let mut out = vec![
        proptest_cases("d² = 0 on every frame", arb_form_terms(), check_d2),
        proptest_cases("graded Leibniz", (arb_form_terms(), arb_form_terms(), 0usize..4), |(a, b, k)| check_leibniz(a, b, *k)),
        proptest_cases("invariant bidegree projections", arb_form_terms(), check_invariant_projections),
        proptest_cases("coframe bidegree projections", arb_form_terms(), check_coframe_projections),
        proptest_cases("fuzzed documents round trip", arb_document(), check_document_round_trip),
        sub("catalog round trip", check_catalog_round_trip().map(|_| "every shipped file".into())),
    ];
    let mut worst = 0f64;
    let mut fd = Ok(());
    for (seed, (name, f, frame, params)) in fd_cases().into_iter().enumerate() {
        match check_fd(&name, &f, &frame, &params, seed as u64) {
            Ok(e) => worst = worst.max(e),
            Err(e) => fd = Err(e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let fr = coord_frame();
    for round in 0..10 {
        let f = form_from(&fr, &random_form_terms(&mut rng), None);
        match check_fd("random", &f, &fr, &[(Var::real_parameter("t"), 0.6)], 100 + round) {
            Ok(e) => worst = worst.max(e),
            Err(e) => fd = Err(e),
        }
    }
    out.push(sub("d against finite differences", fd.map(|_| format!("worst relative error {worst:.1e}"))));
    out
}

fn scalar(s: &ManifoldSpec, text: &str) -> Expr {
    s.eval_text(text).unwrap().coeff(Word(0)).at_origin()
}

fn calibration() -> Vec<Sub> {
    let torus = spec("torus6");
    let c4 = spec("c4_family");
    let restricted = c4.structure().unwrap().restrict(&["dx1", "dx2", "dx3", "dy1", "dy2", "dy3"]).unwrap();
    let expectations = [
        MtExpectation {
            label: "torus".into(),
            j: torus.structure().unwrap(),
            coords: torus.frame.coords().cloned().collect(),
            equation: 1,
            target: scalar(&torus, "diff(u, x2) + diff(v, y2)"),
        },
        MtExpectation {
            label: "c4".into(),
            j: restricted,
            coords: c4.frame.coords().cloned().collect(),
            equation: 2,
            target: scalar(&c4, "diff(g, x2)"),
        },
    ];
    let rows = match mt_calibrate(&expectations) {
        Ok(r) => r,
        Err(e) => return vec![sub("calibration", Err(e.to_string()))],
    };
    let passing: Vec<_> = rows.iter().filter(|r| r.passes).map(|r| format!("{:?}", r.ordering)).collect();
    let table = rows.iter().map(|r| format!("{:?} {:?}", r.ordering, r.multiples)).collect::<Vec<_>>().join("; ");
    vec![sub(
        "exactly one convention passes both outcomes",
        if passing.len() == 1 { Ok(format!("{} ({table})", passing[0])) } else { Err(format!("passing: {passing:?} ({table})")) },
    )]
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Vec<Sub>); 8] = [
        ("SL(2,C) structure equations, exactness, J_t-invariance and taming", sl2c),
        ("Iwasawa balanced metric, deformed equations, corollary and non-existence", iwasawa),
        ("six-torus family: semi-Kahler, compatibility equation 1, first-order equations", torus),
        ("C^4 family: closedness lemma, almost 2-Kahler, compatibility equation 2", c4),
        ("Heisenberg groups n = 3, 4: no almost p-Kahler form", heisenberg),
        ("constant structures preserving omega^p", linear),
        ("engine properties", engine),
        ("compatibility calibration gate", calibration),
    ];
    let start = Instant::now();
    let mut unexpected = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let subs = run();
        let pass = subs.iter().all(|s| s.result.is_ok());
        println!("criterion {} {}: {title} ({:.1}s)", k + 1, if pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        for s in &subs {
            match (&s.result, s.known) {
                (Ok(d), _) => println!("    ok   {}: {d}", s.name),
                (Err(d), Some(why)) => {
                    println!("    FAIL {}: {d}", s.name);
                    println!("         known deviation: {why}");
                }
                (Err(d), None) => {
                    println!("    FAIL {}: {d}", s.name);
                    unexpected += 1;
                }
            }
        }
    }
    println!("total {:.1}s, {unexpected} unexpected failure(s)", start.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
