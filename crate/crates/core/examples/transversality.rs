//! Transversality of a `(2,2)`-form on ℂ⁴ with a certified parameter range,
//! and the sampled test with a reproducible seed.

use pklab::catalog::ManifoldSpec;
use pklab::dsl::parse_expr;
use pklab::pkahler::{is_transverse, TransverseOptions};
use pklab::symexpr::{Expr, NoFunctions, Var};

fn main() {
    let spec = pklab::catalog::builtin("c4_family").unwrap();
    let spec: ManifoldSpec = spec.with_subs(&vec![("g".into(), parse_expr("2*tau*x2 + x3").unwrap())]).unwrap();
    let tau = Var::real_parameter("tau");
    let omega = spec.form("Omegatau").unwrap();
    println!("d(Omega_tau) = 0: {}", spec.frame.d(omega).unwrap().is_zero());

    let in_cf = spec.base.to_coframe(omega).unwrap();
    let exact = is_transverse(&in_cf, &TransverseOptions::default(), &NoFunctions).unwrap();
    println!("{:?} via {}", exact.verdict, exact.method);
    if let Some(r) = &exact.certified_range {
        println!("certified for {r}");
    }

    // outside the certified range the minors are not all positive, and the
    // answer comes from sampling simple (2,0)-covectors
    for value in [Expr::ratio(3, 4), Expr::int(2)] {
        let opts = TransverseOptions { subs: vec![(tau.clone(), value.clone())], samples: 20_000, seed: 7, ..Default::default() };
        let r = is_transverse(&in_cf, &opts, &NoFunctions).unwrap();
        print!("tau = {value}: {:?} via {}", r.verdict, r.method);
        match &r.witness {
            Some(w) => println!(", a sampled simple covector pairs to {}", w.pairing),
            None => println!(", margin {:?} over {:?} samples", r.margin, r.samples),
        }
    }
}
