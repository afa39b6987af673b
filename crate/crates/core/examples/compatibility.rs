//! The two local compatibility equations on ℝ⁶ and the coordinate-ordering
//! calibration.

use pklab::catalog::builtin;
use pklab::dsl::parse_expr;
use pklab::exterior::Word;
use pklab::obstruct::{mt_calibrate, mt_obstruction, MtExpectation, Ordering6};

fn main() {
    let torus = builtin("torus6").unwrap();
    let coords: Vec<_> = torus.frame.coords().cloned().collect();
    let r = mt_obstruction(&torus.structure().unwrap(), &coords, Ordering6::Block).unwrap();
    println!("torus: eq1 = {}\n       eq2 = {}", r.eq1, r.eq2);

    let f = torus.with_subs(&vec![("u".into(), parse_expr("x2").unwrap()), ("v".into(), parse_expr("y2").unwrap())]).unwrap();
    let r = mt_obstruction(&f.structure().unwrap(), &coords, Ordering6::Block).unwrap();
    println!("torus with u = x2, v = y2: eq1 = {}, obstructed {}", r.eq1, r.obstructed);

    let c4 = builtin("c4_family").unwrap();
    let keep = ["dx1", "dx2", "dx3", "dy1", "dy2", "dy3"];
    let scalar = |s: &pklab::catalog::ManifoldSpec, e: &str| s.eval_text(e).unwrap().coeff(Word(0)).at_origin();
    let rows = mt_calibrate(&[
        MtExpectation {
            label: "torus".into(),
            j: torus.structure().unwrap(),
            coords,
            equation: 1,
            target: scalar(&torus, "diff(u, x2) + diff(v, y2)"),
        },
        MtExpectation {
            label: "c4".into(),
            j: c4.structure().unwrap().restrict(&keep).unwrap(),
            coords: c4.frame.coords().cloned().collect(),
            equation: 2,
            target: scalar(&c4, "diff(g, x2)"),
        },
    ])
    .unwrap();
    for row in rows {
        println!("{:?}: multiples {:?}, passes {}", row.ordering, row.multiples, row.passes);
    }
}
