//! Non-existence of almost `p`-Kähler forms from an exact one-signed
//! `(n-p,n-p)`-form.

use pklab::catalog::{builtin, heisenberg_source, ManifoldSpec};
use pklab::obstruct::{nop_test, NopCertificate};

fn report(spec: &ManifoldSpec, beta: &str, p: usize) {
    let cf = spec.working_coframe().unwrap();
    let frame = spec.frame_on(&cf).unwrap();
    let beta = cf.to_coframe(&spec.eval_text(beta).unwrap()).unwrap();
    match NopCertificate::diagonal(beta, p, &frame).and_then(|c| nop_test(&c, &frame, spec.compact)) {
        Ok(r) => println!("{} p = {p}: d(beta) = {}; {}", spec.name, r.d_beta, r.verdict),
        Err(e) => println!("{} p = {p}: certificate rejected: {e}", spec.name),
    }
}

fn main() {
    let h5 = ManifoldSpec::from_text(&heisenberg_source(5)).unwrap();
    report(&h5, "phi5^phi1^phibar1^phi2^phibar2", 2);
    report(&h5, "phi5", 4);

    let iw = builtin("iwasawa").unwrap();
    report(&iw, "phit3", 2);

    // a closed β certifies nothing
    report(&h5, "phi1", 4);
}
