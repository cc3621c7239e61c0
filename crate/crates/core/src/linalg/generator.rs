//! Steady-state generator algebra.
//!
//! A generator of order `n` is the companion pair `(Phi(a), Gamma)` whose
//! output obeys `y^(n) + a_n y^(n-1) + ... + a_1 y = 0`. The internal model
//! `(M, N)` has order `2n`. The pair is tied together by
//! `Xi(a) = Phi^{2n} + sum_j m_j Phi^{j-1}` and by the matrix `Q` solving the
//! generalized Sylvester equation `M Q = Q Phi - N Gamma`.

use num_complex::Complex;

use super::lu::{Lu, COND_LIMIT};
use super::{spectrum, Matrix, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Generator coefficients `a = (a_1, ..., a_n)`, `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector<T>(Vec<T>);

impl<T: Scalar> CoeffVector<T> {
    pub fn new(a: Vec<T>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("coefficient vector must be non-empty"));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self(a))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T: Scalar> TryFrom<&[T]> for CoeffVector<T> {
    type Error = Error;

    fn try_from(a: &[T]) -> Result<Self> {
        Self::new(a.to_vec())
    }
}

/// Companion matrix with identity superdiagonal block and bottom row
/// `(-c_1, ..., -c_k)`.
fn companion<T: Scalar>(c: &[T]) -> Matrix<T> {
    let k = c.len();
    let mut m = Matrix::zeros(k, k);
    for i in 0..k.saturating_sub(1) {
        m[(i, i + 1)] = T::one();
    }
    for (j, &cj) in c.iter().enumerate() {
        m[(k - 1, j)] = -cj;
    }
    m
}

/// `Phi(a)`.
pub fn companion_from_coeffs<T: Scalar>(a: &CoeffVector<T>) -> Matrix<T> {
    companion(a.as_slice())
}

/// `Gamma = (1, 0, ..., 0)` as a `1 x n` matrix.
pub fn gamma<T: Scalar>(n: usize) -> Matrix<T> {
    let mut g = Matrix::zeros(1, n);
    g[(0, 0)] = T::one();
    g
}

/// Internal-model pair `(M, N)` for coefficients `m_1, ..., m_{2n}`.
pub fn mn_pair<T: Scalar>(m_coeffs: &[T]) -> Result<(Matrix<T>, Matrix<T>)> {
    if m_coeffs.len() < 2 || !m_coeffs.len().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "internal-model coefficients must have even length >= 2, got {}",
            m_coeffs.len()
        )));
    }
    if m_coeffs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("internal-model coefficients must be finite"));
    }
    let k = m_coeffs.len();
    let mut n = Matrix::zeros(k, 1);
    n[(k - 1, 0)] = T::one();
    Ok((companion(m_coeffs), n))
}

/// Monic polynomial coefficients `(c_1, ..., c_k)` of `prod (s - p)`, ordered
/// so that `s^k + c_k s^{k-1} + ... + c_1` matches the companion layout.
pub fn poles_to_coeffs<T: Scalar>(poles: &[Complex<T>]) -> Result<Vec<T>> {
    if poles.is_empty() {
        return Err(Error::invalid("pole list must be non-empty"));
    }
    let scale = poles.iter().map(|p| p.norm()).fold(T::one(), T::max);
    let tol = lit::<T>(1e-10) * scale;
    // conjugate closure: greedy matching
    let mut used = vec![false; poles.len()];
    for i in 0..poles.len() {
        if used[i] {
            continue;
        }
        let p = poles[i];
        if p.im.abs() <= tol {
            used[i] = true;
            continue;
        }
        let partner =
            (0..poles.len()).find(|&j| j != i && !used[j] && (poles[j] - p.conj()).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => {
                return Err(Error::invalid(format!(
                    "pole set is not closed under conjugation (no partner for {p})"
                )))
            }
        }
    }
    // coefficients in ascending powers, poly[0] = constant term
    let mut poly = vec![Complex::new(T::one(), T::zero())];
    for &p in poles {
        let mut next = vec![Complex::new(T::zero(), T::zero()); poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * p;
        }
        poly = next;
    }
    let k = poles.len();
    let residue = poly.iter().map(|c| c.im.abs()).fold(T::zero(), T::max);
    let coeff_scale = poly.iter().map(|c| c.re.abs()).fold(T::one(), T::max);
    if residue > lit::<T>(1e-10) * coeff_scale {
        return Err(Error::NumericFailure(format!(
            "imaginary residue {residue} in expanded polynomial"
        )));
    }
    Ok(poly[..k].iter().map(|c| c.re).collect())
}

fn check_generator_dims<T: Scalar>(a: &CoeffVector<T>, m_coeffs: &[T]) -> Result<()> {
    if m_coeffs.len() != 2 * a.n() {
        return Err(Error::invalid(format!(
            "generator of order {} needs {} internal-model coefficients, got {}",
            a.n(),
            2 * a.n(),
            m_coeffs.len()
        )));
    }
    Ok(())
}

/// `Xi(a) = Phi^{2n} + sum_{j=1}^{2n} m_j Phi^{j-1}`, by Horner accumulation.
pub fn xi_matrix<T: Scalar>(a: &CoeffVector<T>, m_coeffs: &[T]) -> Result<Matrix<T>> {
    check_generator_dims(a, m_coeffs)?;
    let n = a.n();
    let phi = companion_from_coeffs(a);
    // Horner: (((Phi + m_2n I) Phi + m_{2n-1} I) Phi + ...) Phi + m_1 I
    let mut acc = Matrix::identity(n);
    for &mj in m_coeffs.iter().rev() {
        acc = acc.matmul(&phi)?;
        for i in 0..n {
            acc[(i, i)] += mj;
        }
    }
    Ok(acc)
}

/// One step `r <- r Phi(a)` for a row vector, using the companion structure.
#[inline]
pub(crate) fn row_times_companion<T: Scalar>(r: &[T], a: &[T], out: &mut [T]) {
    let n = a.len();
    let last = r[n - 1];
    out[0] = -last * a[0];
    for j in 1..n {
        out[j] = r[j - 1] - last * a[j];
    }
}

/// First row of `Xi(a)`, i.e. `Gamma Xi(a)`, in O(n^2).
pub fn xi_first_row<T: Scalar>(a: &[T], m_coeffs: &[T]) -> Vec<T> {
    let n = a.len();
    let mut row = vec![T::zero(); n];
    let mut r = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    r[0] = T::one();
    for &mk in m_coeffs {
        for (acc, &x) in row.iter_mut().zip(&r) {
            *acc += mk * x;
        }
        row_times_companion(&r, a, &mut next);
        std::mem::swap(&mut r, &mut next);
    }
    // r now holds Gamma Phi^{2n}
    for (acc, &x) in row.iter_mut().zip(&r) {
        *acc += x;
    }
    row
}

/// First row of `Xi(a)` together with its Jacobian with respect to `a`:
/// `jac[(j, i)] = d row_i / d a_j`.
pub fn xi_first_row_jacobian<T: Scalar>(a: &[T], m_coeffs: &[T]) -> (Vec<T>, Matrix<T>) {
    let n = a.len();
    let mut row = vec![T::zero(); n];
    let mut jac = vec![T::zero(); n * n];
    // r and its derivatives dr[j * n + l] = d r_l / d a_j, packed in one buffer
    let mut cur = vec![T::zero(); n + n * n];
    let mut nxt = vec![T::zero(); n + n * n];
    cur[0] = T::one();
    let steps = m_coeffs.len();
    for k in 0..=steps {
        let ck = if k < steps { m_coeffs[k] } else { T::one() };
        let (r, dr) = cur.split_at(n);
        for i in 0..n {
            row[i] += ck * r[i];
        }
        for (acc, &x) in jac.iter_mut().zip(dr) {
            *acc += ck * x;
        }
        if k == steps {
            break;
        }
        // r' = r Phi(a): r'_l = r_{l-1} - r_n a_l
        let (next, dnext) = nxt.split_at_mut(n);
        row_times_companion(r, a, next);
        let last = r[n - 1];
        for j in 0..n {
            let drj = &dr[j * n..(j + 1) * n];
            let dn = &mut dnext[j * n..(j + 1) * n];
            let dlast = drj[n - 1];
            dn[0] = -dlast * a[0];
            for l in 1..n {
                dn[l] = drj[l - 1] - dlast * a[l];
            }
            dn[j] -= last;
        }
        std::mem::swap(&mut cur, &mut nxt);
    }
    let jac = Matrix::from_vec(n, n, jac).expect("n x n buffer");
    (row, jac)
}

/// `Q = col(Q_1, ..., Q_{2n})` with `Q_j = Gamma Xi(a)^{-1} Phi(a)^{j-1}`.
pub fn q_matrix<T: Scalar>(a: &CoeffVector<T>, m_coeffs: &[T]) -> Result<Matrix<T>> {
    let xi = xi_matrix(a, m_coeffs)?;
    let xi_inv = Lu::factor(&xi)?
        .inverse()
        .map_err(|cond| Error::DegenerateGenerator { cond })?;
    let n = a.n();
    let mut q = Matrix::zeros(2 * n, n);
    let mut r = xi_inv.row(0).to_vec();
    let mut next = vec![T::zero(); n];
    for j in 0..2 * n {
        q.row_mut(j).copy_from_slice(&r);
        row_times_companion(&r, a.as_slice(), &mut next);
        std::mem::swap(&mut r, &mut next);
    }
    Ok(q)
}

/// Frobenius norm of `M Q - Q Phi + N Gamma`.
pub fn sylvester_residual<T: Scalar>(
    m: &Matrix<T>,
    q: &Matrix<T>,
    phi: &Matrix<T>,
    n: &Matrix<T>,
    gamma: &Matrix<T>,
) -> Result<T> {
    let mq = m.matmul(q)?;
    let qphi = q.matmul(phi)?;
    let ng = n.matmul(gamma)?;
    Ok(mq.sub(&qphi)?.add(&ng)?.frobenius_norm())
}

/// Independent solve of `M Q = Q Phi - N Gamma` through the vectorized system
/// `(I (x) M - Phi^T (x) I) vec(Q) = -vec(N Gamma)`.
pub fn sylvester_solve_oracle<T: Scalar>(
    m: &Matrix<T>,
    phi: &Matrix<T>,
    n: &Matrix<T>,
    gamma: &Matrix<T>,
) -> Result<Matrix<T>> {
    if !m.is_square() || !phi.is_square() {
        return Err(Error::invalid("M and Phi must be square"));
    }
    let p = m.rows();
    let k = phi.rows();
    if n.rows() != p || n.cols() != gamma.rows() || gamma.cols() != k {
        return Err(Error::invalid("N Gamma must be conformable with M and Phi"));
    }
    let dim = p * k;
    let mut big = Matrix::zeros(dim, dim);
    // column-major vec: vec(Q)[c * p + r] = Q[r, c]
    for c in 0..k {
        for r in 0..p {
            let row = c * p + r;
            for rr in 0..p {
                big[(row, c * p + rr)] += m[(r, rr)];
            }
            for cc in 0..k {
                // (Phi^T (x) I)[(c,r), (cc,r)] = Phi[cc, c]
                big[(row, cc * p + r)] -= phi[(cc, c)];
            }
        }
    }
    let ng = n.matmul(gamma)?;
    let mut rhs = vec![T::zero(); dim];
    for c in 0..k {
        for r in 0..p {
            rhs[c * p + r] = -ng[(r, c)];
        }
    }
    let x = Lu::factor(&big)?
        .solve(&rhs)
        .map_err(|cond| Error::SingularSystem { cond })?;
    let mut q = Matrix::zeros(p, k);
    for c in 0..k {
        for r in 0..p {
            q[(r, c)] = x[c * p + r];
        }
    }
    Ok(q)
}

fn check_even<T>(theta: &[T]) -> Result<usize> {
    if theta.len() < 2 || !theta.len().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "Hankel data must have even length >= 2, got {}",
            theta.len()
        )));
    }
    Ok(theta.len() / 2)
}

/// `n x n` Hankel matrix with `(i, j)` entry `theta_{i+j-1}` (1-based).
pub fn hankel<T: Scalar>(theta: &[T]) -> Result<Matrix<T>> {
    let n = check_even(theta)?;
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = theta[i + j];
        }
    }
    Ok(h)
}

/// `a = -Theta(theta)^{-1} col(theta_{n+1}, ..., theta_{2n})`.
pub fn solve_a<T: Scalar>(theta: &[T]) -> Result<CoeffVector<T>> {
    let n = check_even(theta)?;
    let h = hankel(theta)?;
    let rhs: Vec<T> = theta[n..].iter().map(|&x| -x).collect();
    let a = Lu::factor(&h)?
        .solve(&rhs)
        .map_err(|cond| Error::DegenerateSignal { cond })?;
    CoeffVector::new(a)
}

/// Condition estimate of `Theta(theta)`.
pub fn hankel_condition<T: Scalar>(theta: &[T]) -> Result<T> {
    Ok(Lu::factor(&hankel(theta)?)?.condition())
}

/// Complex square matrix stored row-major; only what the Vandermonde check
/// needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    pub n: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let mut a = self.data.clone();
        let mut inv = vec![zero; n * n];
        for i in 0..n {
            inv[i * n + i] = one;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| {
                a[x * n + col]
                    .norm()
                    .partial_cmp(&a[y * n + col].norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[piv * n + col].norm() == T::zero() {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[i * n + col];
                if f == zero {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[i * n + j] -= f * ac;
                    inv[i * n + j] -= f * ic;
                }
            }
        }
        Some(Self { n, data: inv })
    }
}

/// `Phi(a) = P Lambda P^{-1}` with `P` the Vandermonde matrix of the
/// eigenvalues.
#[derive(Debug, Clone)]
pub struct VandermondeFactor<T> {
    pub p: ComplexMatrix<T>,
    pub lambda: Spectrum<T>,
    /// `max |Phi - P Lambda P^{-1}|` entrywise.
    pub reconstruction_error: T,
}

const SPECTRAL_GAP_MIN: f64 = 1e-8;

pub fn vandermonde_factor<T: Scalar>(a: &CoeffVector<T>) -> Result<VandermondeFactor<T>> {
    let phi = companion_from_coeffs(a);
    let mut lambda = spectrum(&phi)?;
    let gap = lambda.min_gap();
    if gap < lit(SPECTRAL_GAP_MIN) {
        return Err(Error::DegenerateSpectrum {
            gap: gap.to_f64_lossy(),
        });
    }
    // order by imaginary part (descending), then real part
    lambda.eigenvalues.sort_by(|x, y| {
        y.im.partial_cmp(&x.im)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal))
    });
    let n = a.n();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for l in &lambda.eigenvalues {
            data.push(l.powu(i as u32));
        }
    }
    let p = ComplexMatrix { n, data };
    let pinv = p.inverse().ok_or(Error::DegenerateSpectrum {
        gap: gap.to_f64_lossy(),
    })?;
    let mut err = T::zero();
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                s += p.get(i, k) * lambda.eigenvalues[k] * pinv.get(k, j);
            }
            err = err.max((s - Complex::new(phi[(i, j)], T::zero())).norm());
        }
    }
    Ok(VandermondeFactor {
        p,
        lambda,
        reconstruction_error: err,
    })
}

/// Largest cutoff accepted as "nonsingular" by [`q_matrix`] and [`solve_a`].
pub fn condition_limit() -> f64 {
    COND_LIMIT
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(a: &[f64]) -> CoeffVector<f64> {
        CoeffVector::new(a.to_vec()).unwrap()
    }

    #[test]
    fn companion_layouts() {
        assert_eq!(
            companion_from_coeffs(&cv(&[1.0, 0.0])).to_rows(),
            vec![vec![0.0, 1.0], vec![-1.0, 0.0]]
        );
        let c = companion_from_coeffs(&cv(&[9.0, 0.0, 10.0, 0.0]));
        assert_eq!(c.row(3), &[-9.0, 0.0, -10.0, 0.0]);
        assert_eq!(c.row(0), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            companion_from_coeffs(&cv(&[0.0])).to_rows(),
            vec![vec![0.0]]
        );
        assert!(CoeffVector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn mn_pair_layout_and_errors() {
        let (m, n) = mn_pair(&[2.0, 3.0]).unwrap();
        assert_eq!(m.to_rows(), vec![vec![0.0, 1.0], vec![-2.0, -3.0]]);
        assert_eq!(n.to_rows(), vec![vec![0.0], vec![1.0]]);
        assert!(mn_pair(&[1.0, 2.0, 3.0]).is_err());
        assert!(mn_pair::<f64>(&[]).is_err());
    }

    #[test]
    fn poles_to_coeffs_examples() {
        let c = |re: f64, im: f64| Complex::new(re, im);
        assert_eq!(
            poles_to_coeffs(&[c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap(),
            vec![2.0, 3.0]
        );
        assert_eq!(
            poles_to_coeffs(&[c(-1.0, 0.0), c(-1.0, 0.0)]).unwrap(),
            vec![1.0, 2.0]
        );
        let v = poles_to_coeffs(&[c(-1.0, 1.0), c(-1.0, -1.0)]).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
        assert!(matches!(
            poles_to_coeffs(&[c(-1.0, 1.0), c(-2.0, 0.0)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn xi_small_cases() {
        assert_eq!(
            xi_matrix(&cv(&[0.0]), &[2.0, 3.0]).unwrap().to_rows(),
            vec![vec![2.0]]
        );
        let xi = xi_matrix(&cv(&[1.0, 0.0]), &[0.0; 4]).unwrap();
        assert_eq!(xi.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(xi_matrix(&cv(&[1.0, 0.0]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn xi_first_row_matches_dense() {
        let a = [9.0, 0.3, 10.0, -0.2];
        let m = [
            1.0, 5.1503, 13.301, 22.2016, 25.7518, 21.6013, 12.8005, 5.2001,
        ];
        let dense = xi_matrix(&cv(&a), &m).unwrap();
        let row = xi_first_row(&a, &m);
        let (row2, _) = xi_first_row_jacobian(&a, &m);
        for i in 0..4 {
            assert!((row[i] - dense[(0, i)]).abs() < 1e-9 * dense[(0, i)].abs().max(1.0));
            assert!((row2[i] - row[i]).abs() < 1e-9 * row[i].abs().max(1.0));
        }
    }

    #[test]
    fn xi_jacobian_matches_finite_differences() {
        let a = [0.7f64, -0.4, 1.3];
        let m = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let (_, jac) = xi_first_row_jacobian(&a, &m);
        let h = 1e-6;
        for j in 0..3 {
            let mut ap = a;
            let mut am = a;
            ap[j] += h;
            am[j] -= h;
            let (rp, rm) = (xi_first_row(&ap, &m), xi_first_row(&am, &m));
            for i in 0..3 {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                assert!(
                    (fd - jac[(j, i)]).abs() < 1e-5 * fd.abs().max(1.0),
                    "j={j} i={i}"
                );
            }
        }
    }

    #[test]
    fn q_matrix_scalar_generator() {
        let q = q_matrix(&cv(&[0.0]), &[2.0, 3.0]).unwrap();
        assert_eq!(q.to_rows(), vec![vec![0.5], vec![0.0]]);
    }

    #[test]
    fn q_matrix_degenerate_xi() {
        // Phi has eigenvalue 0 and M = [[0,1],[0,-1]] also has 0: Xi singular
        assert!(matches!(
            q_matrix(&cv(&[0.0]), &[0.0, 1.0]),
            Err(Error::DegenerateGenerator { .. })
        ));
    }

    #[test]
    fn sylvester_small_cases() {
        let m = Matrix::from_rows(&[vec![-1.0f64]]).unwrap();
        let phi = Matrix::from_rows(&[vec![0.0]]).unwrap();
        let n = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let g = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let q = sylvester_solve_oracle(&m, &phi, &n, &g).unwrap();
        assert!((q[(0, 0)] - 1.0).abs() < 1e-15);

        let zero_g = Matrix::zeros(1, 1);
        let q0 = sylvester_solve_oracle(&m, &phi, &n, &zero_g).unwrap();
        assert_eq!(q0[(0, 0)], 0.0);
        let r = sylvester_residual(&m, &Matrix::zeros(1, 1), &phi, &n, &zero_g).unwrap();
        assert_eq!(r, 0.0);

        let mut bad = q.clone();
        bad[(0, 0)] += 1.0;
        assert!(sylvester_residual(&m, &bad, &phi, &n, &g).unwrap() > 0.0);

        // shared eigenvalue 0
        let m0 = Matrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(matches!(
            sylvester_solve_oracle(&m0, &phi, &n, &g),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn hankel_and_solve_a() {
        let h = hankel(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(h.to_rows(), vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(hankel(&[1.0, 0.0]).unwrap().to_rows(), vec![vec![1.0]]);
        assert!(hankel(&[1.0, 2.0, 3.0]).is_err());

        let a = solve_a(&[1.0f64, 2.0, 3.0, 4.0]).unwrap();
        assert!((a.as_slice()[0] - 1.0).abs() < 1e-14);
        assert!((a.as_slice()[1] + 2.0).abs() < 1e-14);
        assert_eq!(solve_a(&[1.0, 0.0]).unwrap().as_slice(), &[0.0]);
        match solve_a(&[0.0, 0.0, 0.0, 0.0]) {
            Err(Error::DegenerateSignal { cond }) => assert!(cond.is_infinite()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vandermonde_examples() {
        let f = vandermonde_factor(&cv(&[1.0, 0.0])).unwrap();
        let l = &f.lambda.eigenvalues;
        assert!((l[0] - Complex::new(0.0, 1.0)).norm() < 1e-12);
        assert!((l[1] - Complex::new(0.0, -1.0)).norm() < 1e-12);
        assert!((f.p.get(1, 0) - Complex::new(0.0, 1.0)).norm() < 1e-12);
        assert!((f.p.get(1, 1) - Complex::new(0.0, -1.0)).norm() < 1e-12);
        assert!(f.reconstruction_error < 1e-8);

        let f = vandermonde_factor(&cv(&[9.0, 0.0, 10.0, 0.0])).unwrap();
        let ims: Vec<f64> = f.lambda.eigenvalues.iter().map(|z| z.im).collect();
        for (got, want) in ims.iter().zip([3.0, 1.0, -1.0, -3.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(f.reconstruction_error < 1e-8);

        assert!(matches!(
            vandermonde_factor(&cv(&[1.0, 2.0])),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }
}
