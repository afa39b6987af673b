use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Basis, Form, Matrix, Word};
use crate::symexpr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearReport {
    pub p: usize,
    pub preserves_omega_p: bool,
    /// `Some(±1)` when `J^*ω = ±ω`.
    pub preserves_omega_sign: Option<i8>,
}

/// `ω = [[0, I], [-I, 0]]` in the basis `x_1…x_n, y_1…y_n`.
pub fn standard_symplectic(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |a, b| {
        if b == a + n {
            Expr::one()
        } else if a == b + n {
            -Expr::one()
        } else {
            Expr::zero()
        }
    })
}

/// `J x_k = y_k`, `J y_k = -x_k`, acting on column vectors.
pub fn standard_structure(n: usize) -> Matrix {
    standard_symplectic(n).transpose()
}

/// The 2-form `Σ_{a<b} W_{ab} e^a ∧ e^b` of an antisymmetric matrix.
fn two_form(basis: &std::sync::Arc<Basis>, w: &Matrix) -> Form {
    let d = w.rows();
    Form::from_terms(
        basis,
        (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).map(|(a, b)| (Word::from_indices(&[a, b]).unwrap().1, w.get(a, b).clone())),
    )
}

/// Whether a constant complex structure `J` preserves `ω^p`, and whether it
/// preserves `ω` itself up to sign. `J` acts on column vectors and `ω` is the
/// matrix with `ω(u, v) = uᵀ W v`.
pub fn linear_power_preservation(j: &Matrix, omega: &Matrix, p: usize) -> Result<LinearReport> {
    let d = j.rows();
    if !j.is_square() || d % 2 == 1 || (omega.rows(), omega.cols()) != (d, d) {
        return Err(Error::Invalid("J and ω must be square of the same even size".into()));
    }
    if (0..d).any(|a| (0..d).any(|b| j.get(a, b).as_constant().is_none() || omega.get(a, b).as_constant().is_none())) {
        return Err(Error::Invalid("entries must be constants".into()));
    }
    if omega.transpose() != omega.scale(&-Expr::one()) {
        return Err(Error::Invalid("ω is not antisymmetric".into()));
    }
    if omega.det().is_zero() {
        return Err(Error::DegenerateOmega);
    }
    if j.mul(j) != Matrix::identity(d).scale(&-Expr::one()) {
        return Err(Error::NotAComplexStructure(format!("J² != -1 for\n{j}")));
    }
    let names: Vec<String> = (1..=d).map(|k| format!("e{k}")).collect();
    let basis = Basis::real(&names);
    let pulled = j.transpose().mul(omega).mul(j);
    let w = two_form(&basis, omega);
    let wj = two_form(&basis, &pulled);
    let preserves_omega_p = wj.wedge_pow(p) == w.wedge_pow(p);
    let preserves_omega_sign = if wj == w {
        Some(1)
    } else if wj == w.scale(&-Expr::one()) {
        Some(-1)
    } else {
        None
    };
    Ok(LinearReport { p, preserves_omega_p, preserves_omega_sign })
}

fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for r in 0..n {
        for c in r..n {
            let v = rng.gen_range(-2..=2);
            a[r][c] = v;
            a[c][r] = v;
        }
    }
    a
}

/// A product of `steps` random symplectic shears `[[I, A], [0, I]]` and
/// `[[I, 0], [A, I]]` with small symmetric integer `A`, and its inverse
/// `W⁻¹SᵀW`.
pub fn random_symplectic<R: Rng>(n: usize, steps: usize, rng: &mut R) -> (Matrix, Matrix) {
    let mut s = Matrix::identity(2 * n);
    for k in 0..steps {
        let a = random_symmetric(n, rng);
        let upper = k % 2 == 0;
        let shear = Matrix::from_fn(2 * n, 2 * n, |r, c| {
            if r == c {
                Expr::one()
            } else if upper && r < n && c >= n {
                Expr::int(a[r][c - n])
            } else if !upper && r >= n && c < n {
                Expr::int(a[r - n][c])
            } else {
                Expr::zero()
            }
        });
        s = s.mul(&shear);
    }
    let w = standard_symplectic(n);
    let inv = w.scale(&-Expr::one()).mul(&s.transpose()).mul(&w);
    (s, inv)
}

/// `A J_0 A⁻¹` for a random invertible integer matrix `A`.
pub fn random_conjugate<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    loop {
        let rows = (0..2 * n).map(|_| (0..2 * n).map(|_| Expr::int(rng.gen_range(-2..=2))).collect()).collect();
        let a = Matrix::from_rows(rows);
        if let Ok(inv) = a.inverse() {
            return a.mul(&standard_structure(n)).mul(&inv);
        }
    }
}
