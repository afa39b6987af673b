//! Closed invariant 2-forms taming a left-invariant structure.

use pklab::catalog::{builtin, ManifoldSpec};
use pklab::dsl::parse_expr;
use pklab::obstruct::invariant_taming_solver;

fn solve(spec: &ManifoldSpec) {
    let cf = spec.working_coframe().unwrap();
    let frame = spec.frame_on(&cf).unwrap();
    let r = invariant_taming_solver(&frame, 1).unwrap();
    println!(
        "{}: taming {:?} (closed invariant 2-forms {}, forced to zero [{}]); compatible {:?}",
        spec.name,
        r.taming.verdict,
        r.taming.closed_dimension,
        r.taming.forced_zero.join(", "),
        r.compatible.verdict
    );
}

fn main() {
    let sl2c = builtin("sl2c").unwrap();
    let member = sl2c.with_subs(&vec![("t".into(), parse_expr("1/2").unwrap())]).unwrap();
    solve(&member);
    solve(&builtin("heisenberg3").unwrap());
    let torus = ManifoldSpec::from_text("spec flat\nstructure e 2 {\n}\n").unwrap();
    solve(&torus);
}
