//! First-order deformation of the balanced condition along a curve of
//! structures: `η`, `λ`, and the corollary form.

use pklab::catalog::builtin;
use pklab::deform::{first_order, semi_kahler_first_order_check};
use pklab::symexpr::Var;

fn main() {
    let t = Var::real_parameter("t");
    for name in ["iwasawa", "torus6"] {
        let spec = builtin(name).unwrap();
        let m = spec.metric.as_ref().unwrap();
        let fo = first_order(m, &t).unwrap();
        println!("{name}: eta = {}", fo.eta);
        println!("{name}: lambda = {}", fo.lambda);
        let r = semi_kahler_first_order_check(m, &spec.frame, &t).unwrap();
        println!("{name}: residual {}; passes {}", r.residual, r.passes);
        if let Some(c) = &r.corollary {
            println!("{name}: corollary form {c}");
        }
        if let Some(p) = &r.pdes {
            println!("{name}: first-order equations [{}]", p.join(", "));
        }
    }
}
