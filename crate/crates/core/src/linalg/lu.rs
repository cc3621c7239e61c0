//! Partial-pivot LU with a 1-norm condition estimate.

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Reciprocal-condition cutoff: matrices with `cond_1 > 1e12` are treated as
/// singular by every solve in the crate.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    lu: Matrix<T>,
    perm: Vec<usize>,
    anorm: T,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold(
                        (k, T::zero()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            anorm: a.norm1(),
            singular,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` without any conditioning check.
    pub fn solve_unchecked(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    fn inverse_unchecked(&self) -> Matrix<T> {
        let n = self.n;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve_unchecked(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// `||A||_1 ||A^{-1}||_1`, infinite for an exactly singular factor.
    ///
    /// Computed from the explicit inverse; fine at the dimensions this crate
    /// works with (n <= 20).
    pub fn condition(&self) -> T {
        if self.singular {
            return T::infinity();
        }
        let c = self.anorm * self.inverse_unchecked().norm1();
        if c.is_finite() {
            c
        } else {
            T::infinity()
        }
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.condition() <= lit(COND_LIMIT)
    }

    /// Inverse, or the condition estimate when it exceeds [`COND_LIMIT`].
    pub fn inverse(&self) -> Result<Matrix<T>, f64> {
        let cond = self.condition();
        if cond > lit(COND_LIMIT) {
            return Err(cond.to_f64_lossy());
        }
        Ok(self.inverse_unchecked())
    }

    /// Solve, or the condition estimate when it exceeds [`COND_LIMIT`].
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, f64> {
        let cond = self.condition();
        if cond > lit(COND_LIMIT) {
            return Err(cond.to_f64_lossy());
        }
        Ok(self.solve_unchecked(b))
    }

    pub fn determinant(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let mut det = (0..self.n)
            .map(|i| self.lu[(i, i)])
            .fold(T::one(), |a, b| a * b);
        // sign of the permutation
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }
}

/// Solve `A x = b`, mapping ill-conditioning to [`Error::SingularSystem`].
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if a.rows() != b.len() {
        return Err(Error::invalid("right-hand side length mismatch"));
    }
    Lu::factor(a)?
        .solve(b)
        .map_err(|cond| Error::SingularSystem { cond })
}
