//! Dense matrices over [`Expr`]: division-free determinants, inversion with
//! parameter-only pivots, and linear solves with inconsistency certificates.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symexpr::Expr;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Expr>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Expr::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Expr) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diagonal(d: &[Expr]) -> Matrix {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[Expr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Matrix {
        self.map(|e| e.conj())
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut r = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = r.get(i, j) + &(a * b);
                        r.set(i, j, v);
                    }
                }
            }
        }
        r
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.add(&o.map(|e| -e))
    }

    pub fn scale(&self, k: &Expr) -> Matrix {
        self.map(|e| e * k)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Expr::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Determinant by Laplace expansion with memoized minors; never divides.
    pub fn det(&self) -> Expr {
        assert!(self.is_square());
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.minor(&rows, &cols)
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Expr {
        assert_eq!(rows.len(), cols.len());
        assert!(cols.len() <= 64);
        let mut memo: HashMap<u64, Expr> = HashMap::new();
        let all: u64 = if cols.len() == 64 { u64::MAX } else { (1u64 << cols.len()) - 1 };
        self.laplace(rows, cols, all, &mut memo)
    }

    fn laplace(&self, rows: &[usize], cols: &[usize], mask: u64, memo: &mut HashMap<u64, Expr>) -> Expr {
        let k = mask.count_ones() as usize;
        if k == 0 {
            return Expr::one();
        }
        if let Some(e) = memo.get(&mask) {
            return e.clone();
        }
        let r = rows[k - 1];
        let mut acc = Expr::zero();
        let mut pos = 0usize;
        for (j, &c) in cols.iter().enumerate() {
            if mask & (1 << j) == 0 {
                continue;
            }
            let a = self.get(r, c);
            if !a.is_zero() {
                let sub = self.laplace(rows, cols, mask & !(1 << j), memo);
                if !sub.is_zero() {
                    let term = a * &sub;
                    // column j sits at position `pos` among the k remaining columns
                    acc = if (k - 1 + pos) % 2 == 0 { acc + term } else { acc - term };
                }
            }
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }

    /// Inverse, provided the determinant is a nonzero parameter-only expression.
    pub fn inverse(&self) -> Result<Matrix> {
        assert!(self.is_square());
        match self.gauss_jordan_inverse() {
            Some(inv) => Ok(inv),
            None => self.adjugate_inverse(),
        }
    }

    fn gauss_jordan_inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let pick = (c..n)
                .filter(|&r| !a.get(r, c).is_zero() && a.get(r, c).is_parameter_only())
                .min_by_key(|&r| (a.get(r, c).as_constant().is_none(), r))?;
            a.swap_rows(c, pick);
            inv.swap_rows(c, pick);
            let p = a.get(c, c).clone();
            let pinv = Expr::one().checked_div(&p).ok()?;
            a.scale_row(c, &pinv);
            inv.scale_row(c, &pinv);
            for r in 0..n {
                if r == c || a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                a.axpy_row(r, c, &f);
                inv.axpy_row(r, c, &f);
            }
        }
        Some(inv)
    }

    fn adjugate_inverse(&self) -> Result<Matrix> {
        let n = self.rows;
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularCoframe("determinant is zero".into()));
        }
        if !det.is_parameter_only() {
            return Err(Error::SingularCoframe(format!("determinant {det} depends on the point")));
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let m = self.minor(&rows, &cols);
                let cof = if (i + j) % 2 == 0 { m } else { -m };
                inv.set(i, j, cof.checked_div(&det)?);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, k: &Expr) {
        for j in 0..self.cols {
            let v = self.get(r, j) * k;
            self.set(r, j, v);
        }
    }

    /// `row[r] -= f * row[src]`.
    fn axpy_row(&mut self, r: usize, src: usize, f: &Expr) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let v = self.get(r, j) - &(f * s);
                self.set(r, j, v);
            }
        }
    }
}

impl Matrix {
    /// Numeric value at a point.
    pub fn eval(
        &self,
        at: &crate::symexpr::Assignment,
        table: &dyn crate::symexpr::FnTable,
    ) -> Result<nalgebra::DMatrix<num_complex::Complex64>> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).eval(at, table)?;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug)]
pub enum LinearSolution {
    /// A particular solution plus a basis of the kernel of `A`.
    Solved { particular: Vec<Expr>, kernel: Vec<Vec<Expr>>, rank: usize, pivots_nonzero: Vec<Expr> },
    /// `y` with `yᵀA = 0` and `yᵀb ≠ 0`, together with the ranks of `A` and `[A|b]`.
    Inconsistent { certificate: Vec<Expr>, residual: Expr, rank: usize, augmented_rank: usize },
}

/// Gaussian elimination with parameter-only pivots.
///
/// Every pivot used is recorded; the answer holds wherever they are nonzero,
/// in particular for generic parameter values.
pub fn solve(a: &Matrix, b: &[Expr]) -> Result<LinearSolution> {
    assert_eq!(a.rows, b.len());
    let (m, n) = (a.rows, a.cols);
    // [A | b | I] so that row operations leave a trail for the certificate
    let mut w = Matrix::zeros(m, n + 1 + m);
    for i in 0..m {
        for j in 0..n {
            w.set(i, j, a.get(i, j).clone());
        }
        w.set(i, n, b[i].clone());
        w.set(i, n + 1 + i, Expr::one());
    }
    let mut pivot_cols = Vec::new();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        if row == m {
            break;
        }
        let Some(pick) = (row..m)
            .filter(|&r| !w.get(r, c).is_zero())
            .min_by_key(|&r| (w.get(r, c).as_constant().is_none(), w.get(r, c).numerator().len(), r))
        else {
            continue;
        };
        let p = w.get(pick, c).clone();
        if !p.is_parameter_only() {
            return Err(Error::Invalid(format!("pivot {p} depends on the point")));
        }
        w.swap_rows(row, pick);
        let pinv = Expr::one().checked_div(&p)?;
        w.scale_row(row, &pinv);
        for r in 0..m {
            if r != row && !w.get(r, c).is_zero() {
                let f = w.get(r, c).clone();
                w.axpy_row(r, row, &f);
            }
        }
        if p.as_constant().is_none() {
            pivots.push(p);
        }
        pivot_cols.push(c);
        row += 1;
    }
    let rank = row;
    for r in rank..m {
        if !w.get(r, n).is_zero() {
            let certificate = (0..m).map(|i| w.get(r, n + 1 + i).clone()).collect();
            return Ok(LinearSolution::Inconsistent {
                certificate,
                residual: w.get(r, n).clone(),
                rank,
                augmented_rank: rank + 1,
            });
        }
    }
    let mut particular = vec![Expr::zero(); n];
    for (r, &c) in pivot_cols.iter().enumerate() {
        particular[c] = w.get(r, n).clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut v = vec![Expr::zero(); n];
            v[fc] = Expr::one();
            for (r, &c) in pivot_cols.iter().enumerate() {
                v[c] = -w.get(r, fc);
            }
            v
        })
        .collect();
    Ok(LinearSolution::Solved { particular, kernel, rank, pivots_nonzero: pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Var;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Expr::int(x)).collect()).collect())
    }

    #[test]
    fn laplace_matches_known_determinants() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).det(), Expr::int(-2));
        assert_eq!(m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]).det(), Expr::int(0));
        assert_eq!(m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]).det(), Expr::int(1));
    }

    #[test]
    fn inverse_with_point_dependent_entries() {
        let x = Expr::var(&Var::real_coordinate("x1"));
        let a = Matrix::from_rows(vec![
            vec![Expr::one(), x.clone(), Expr::zero()],
            vec![Expr::zero(), Expr::one(), &x * &x],
            vec![Expr::zero(), Expr::zero(), Expr::int(2)],
        ]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
    }

    #[test]
    fn adjugate_fallback_when_no_constant_pivot() {
        let x = Expr::var(&Var::real_coordinate("x1"));
        // det = x^2 - (x+1)(x-1) = 1 while column 0 holds only point-dependent entries
        let b = Matrix::from_rows(vec![
            vec![x.clone(), &x + &Expr::one()],
            vec![&x - &Expr::one(), x.clone()],
        ]);
        assert_eq!(b.det(), Expr::one());
        let binv = b.inverse().unwrap();
        assert_eq!(b.mul(&binv), Matrix::identity(2));
        let c = Matrix::from_rows(vec![vec![x.clone(), Expr::zero()], vec![Expr::zero(), Expr::one()]]);
        assert!(matches!(c.inverse(), Err(Error::SingularCoframe(_))));
    }

    #[test]
    fn solve_reports_rank_certificate() {
        let a = m(&[&[1, 1], &[2, 2]]);
        match solve(&a, &[Expr::int(1), Expr::int(3)]).unwrap() {
            LinearSolution::Inconsistent { certificate, residual, rank, .. } => {
                assert_eq!(rank, 1);
                let ya: Vec<Expr> = (0..2)
                    .map(|j| (0..2).map(|i| &certificate[i] * a.get(i, j)).sum())
                    .collect();
                assert!(ya.iter().all(Expr::is_zero));
                let yb = &certificate[0] * &Expr::int(1) + &certificate[1] * &Expr::int(3);
                assert_eq!(yb, residual);
                assert!(!residual.is_zero());
            }
            other => panic!("{other:?}"),
        }
        match solve(&a, &[Expr::int(1), Expr::int(2)]).unwrap() {
            LinearSolution::Solved { particular, kernel, rank, .. } => {
                assert_eq!(rank, 1);
                assert_eq!(kernel.len(), 1);
                assert_eq!(&particular[0] + &particular[1], Expr::int(1));
            }
            other => panic!("{other:?}"),
        }
    }
}
