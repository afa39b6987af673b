//! Constant structures on ℝ²ⁿ that preserve a power of the standard
//! symplectic form.

use pklab::exterior::Matrix;
use pklab::obstruct::{linear_power_preservation, random_conjugate, random_symplectic, standard_structure, standard_symplectic};
use pklab::symexpr::Expr;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(label: &str, j: &Matrix, n: usize) {
    for p in 1..=n {
        let r = linear_power_preservation(j, &standard_symplectic(n), p).unwrap();
        println!("{label}: p = {p}, preserves omega^p {}, J*omega = ±omega {:?}", r.preserves_omega_p, r.preserves_omega_sign);
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (s, inv) = random_symplectic(2, 3, &mut rng);
    show("symplectic conjugate", &s.mul(&standard_structure(2)).mul(&inv), 2);

    // J x1 = x2, J x2 = -x1, J y1 = -y2, J y2 = y1 reverses omega
    let one = Expr::one();
    let z = Expr::zero();
    let anti = Matrix::from_rows(vec![
        vec![z.clone(), -one.clone(), z.clone(), z.clone()],
        vec![one.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), one.clone()],
        vec![z.clone(), z.clone(), -one, z],
    ]);
    show("anti-symplectic", &anti, 2);

    show("generic conjugate", &random_conjugate(3, &mut rng), 3);
}
