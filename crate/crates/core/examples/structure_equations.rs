//! Maurer–Cartan equations from a bracket table, and `d² = 0` as the Jacobi
//! identity.

use pklab::catalog::{builtin, heisenberg_source, ManifoldSpec};

fn main() {
    let sl2c = builtin("sl2c").unwrap();
    for k in 1..=3 {
        let d = sl2c.eval_text(&format!("d(psi{k})")).unwrap();
        println!("d(psi{k}) = {d}");
    }
    println!("d² = 0 on sl(2,C): {}", sl2c.frame.check_d2().is_ok());

    // a structure with no bracket table, written as structure equations
    let h = ManifoldSpec::from_text(&heisenberg_source(4)).unwrap();
    println!("d(phi4) = {}", h.eval_text("d(phi4)").unwrap());

    // an inconsistent table is rejected when loaded
    let bad = "algebra e 3 dual E {\n  [E1, E2] = E3\n  [E1, E3] = E1\n}\n";
    match ManifoldSpec::from_text(bad) {
        Ok(s) => println!("d² = 0: {:?}", s.frame.check_d2().map_err(|e| e.to_string())),
        Err(d) => println!("rejected: {}", d[0]),
    }
}
