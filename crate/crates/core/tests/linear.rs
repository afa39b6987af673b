//! Constant structures on ℝ²ⁿ: preserving `ω^p` for `1 ≤ p ≤ n-1` forces
//! `J^*ω = ±ω`, with `-1` only for even `p`. The engine compares wedge powers;
//! the oracle here compares Pfaffians of principal minors.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pklab::exterior::Matrix;
use common::{anti_symplectic, check_linear};
use pklab::obstruct::{linear_power_preservation, random_conjugate, random_symplectic, standard_structure, standard_symplectic};
use pklab::symexpr::Expr;

#[test]
fn symplectic_conjugates_preserve_every_power_with_sign_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..1000 {
        let n = 2 + k % 2;
        let (s, inv) = random_symplectic(n, 3, &mut rng);
        assert_eq!(s.mul(&inv), Matrix::identity(2 * n));
        let j = s.mul(&standard_structure(n)).mul(&inv);
        for p in 1..=n {
            let r = linear_power_preservation(&j, &standard_symplectic(n), p).unwrap();
            assert!(r.preserves_omega_p, "sample {k}, p = {p}");
            assert_eq!(r.preserves_omega_sign, Some(1), "sample {k}");
        }
    }
}

#[test]
fn anti_symplectic_structure_preserves_even_powers_with_sign_minus() {
    let j2 = anti_symplectic(2);
    assert_eq!(j2.mul(&j2), Matrix::identity(4).scale(&-Expr::one()));
    let r = linear_power_preservation(&j2, &standard_symplectic(2), 2).unwrap();
    assert!(r.preserves_omega_p);
    assert_eq!(r.preserves_omega_sign, Some(-1));
    let r = linear_power_preservation(&j2, &standard_symplectic(2), 1).unwrap();
    assert!(!r.preserves_omega_p);

    let j4 = anti_symplectic(4);
    let got = check_linear(&j4, 4, "anti-symplectic n = 4").unwrap();
    assert_eq!(got, vec![(1, false, Some(-1)), (2, true, Some(-1)), (3, false, Some(-1))]);

    // symplectic conjugates stay anti-symplectic
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (s, inv) = random_symplectic(4, 2, &mut rng);
        let got = check_linear(&s.mul(&j4).mul(&inv), 4, "conjugated anti-symplectic").unwrap();
        assert_eq!(got.iter().map(|g| g.1).collect::<Vec<_>>(), vec![false, true, false]);
    }
}

#[test]
fn no_structure_preserves_a_power_without_preserving_omega_up_to_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut preserved = 0;
    for k in 0..200 {
        let n = 2 + k % 3;
        // generic conjugates, plus symplectic conjugates of J_0 and of the
        // anti-symplectic structure so the implication is exercised
        let j = match rng.gen_range(0..3) {
            0 => random_conjugate(n, &mut rng),
            choice => {
                let (s, inv) = random_symplectic(n, 2, &mut rng);
                let base = if choice == 2 && n % 2 == 0 { anti_symplectic(n) } else { standard_structure(n) };
                s.mul(&base).mul(&inv)
            }
        };
        assert_eq!(j.mul(&j), Matrix::identity(2 * n).scale(&-Expr::one()));
        preserved += check_linear(&j, n, &format!("sample {k}")).unwrap().iter().filter(|g| g.1).count();
    }
    assert!(preserved > 0);
}

#[test]
fn top_power_is_always_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=3 {
        let j = random_conjugate(n, &mut rng);
        let r = linear_power_preservation(&j, &standard_symplectic(n), n).unwrap();
        assert!(r.preserves_omega_p);
    }
}
