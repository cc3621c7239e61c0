//! Internal model `eta' = M eta + N drive`, the steady-state mapping
//! `chi(eta, a) = Gamma Xi(a) col(eta_1..eta_n)` with its smooth saturation
//! `chi_s`, and the Hankel gradient-flow learner for `a`.

use crate::error::{Error, Result};
use crate::linalg::{is_hurwitz, mn_pair, xi_first_row, xi_first_row_jacobian, Matrix};
use crate::scalar::{dot, lit, norm_sq, Scalar};

/// Default saturation radius; large enough that the saturation never engages
/// on trajectories of moderate size.
pub const DEFAULT_DELTA: f64 = 1e4;

#[derive(Debug, Clone)]
pub struct InternalModel<T> {
    n: usize,
    m_coeffs: Vec<T>,
    m: Matrix<T>,
    n_vec: Matrix<T>,
    pub eta: Vec<T>,
}

impl<T: Scalar> InternalModel<T> {
    /// Builds `(M, N)` from `m_1..m_{2n}` and rejects a non-Hurwitz `M`.
    pub fn new(m_coeffs: &[T]) -> Result<Self> {
        let (m, n_vec) = mn_pair(m_coeffs)?;
        if !is_hurwitz(&m, T::zero())? {
            return Err(Error::invalid(
                "internal-model coefficients do not give a Hurwitz M",
            ));
        }
        Ok(Self {
            n: m_coeffs.len() / 2,
            m_coeffs: m_coeffs.to_vec(),
            m,
            n_vec,
            eta: vec![T::zero(); m_coeffs.len()],
        })
    }

    /// Generator order `n` (the model state has `2n` entries).
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn m_coeffs(&self) -> &[T] {
        &self.m_coeffs
    }

    pub fn m(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn n_vec(&self) -> &Matrix<T> {
        &self.n_vec
    }

    /// `M eta + N drive` for the stored state.
    pub fn rhs(&self, drive: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.eta.len()];
        im_rhs_into(&self.m_coeffs, &self.eta, drive, &mut out)?;
        Ok(out)
    }
}

/// `M eta + N drive` using the companion structure of `M`.
pub fn im_rhs_into<T: Scalar>(m_coeffs: &[T], eta: &[T], drive: T, out: &mut [T]) -> Result<()> {
    if !drive.is_finite() {
        return Err(Error::invalid("internal-model drive must be finite"));
    }
    let k = eta.len();
    debug_assert_eq!(m_coeffs.len(), k);
    out[..k - 1].copy_from_slice(&eta[1..]);
    out[k - 1] = drive - dot(m_coeffs, eta);
    Ok(())
}

/// `psi(s) = exp(-1/s)` for `s > 0`, else 0. Values under 1e-300 are
/// flushed to zero.
pub fn bump_psi<T: Scalar>(s: T) -> T {
    if s <= T::zero() {
        return T::zero();
    }
    let v = (-s.recip()).exp();
    if v < lit(1e-300) {
        T::zero()
    } else {
        v
    }
}

fn bump_psi_deriv<T: Scalar>(s: T) -> T {
    let v = bump_psi(s);
    if v == T::zero() {
        T::zero()
    } else {
        v / (s * s)
    }
}

/// `Psi(s) = psi(s) / (psi(s) + psi(1 - s))`: 0 for `s <= 0`, 1 for `s >= 1`.
pub fn smooth_step<T: Scalar>(s: T) -> T {
    let a = bump_psi(s);
    let b = bump_psi(T::one() - s);
    if a == T::zero() {
        return T::zero();
    }
    if b == T::zero() {
        return T::one();
    }
    a / (a + b)
}

pub fn smooth_step_deriv<T: Scalar>(s: T) -> T {
    let a = bump_psi(s);
    let b = bump_psi(T::one() - s);
    if a == T::zero() || b == T::zero() {
        return T::zero();
    }
    let da = bump_psi_deriv(s);
    let db = bump_psi_deriv(T::one() - s);
    let d = a + b;
    (da * b + a * db) / (d * d)
}

fn check_chi_dims<T>(eta: &[T], a_hat: &[T], m_coeffs: &[T]) -> Result<usize> {
    let n = a_hat.len();
    if n == 0 || eta.len() != 2 * n || m_coeffs.len() != 2 * n {
        return Err(Error::invalid(format!(
            "chi needs eta of length 2n, a of length n and 2n m-coefficients (got {}, {}, {})",
            eta.len(),
            a_hat.len(),
            m_coeffs.len()
        )));
    }
    Ok(n)
}

/// `chi(eta, a) = Gamma Xi(a) col(eta_1, ..., eta_n)`.
pub fn chi<T: Scalar>(eta: &[T], a_hat: &[T], m_coeffs: &[T]) -> Result<T> {
    let n = check_chi_dims(eta, a_hat, m_coeffs)?;
    Ok(dot(&xi_first_row(a_hat, m_coeffs), &eta[..n]))
}

/// Saturation argument `delta + 1 - ||col(eta, a)||^2`.
fn saturation_arg<T: Scalar>(eta: &[T], a_hat: &[T], delta: T) -> T {
    delta + T::one() - norm_sq(eta) - norm_sq(a_hat)
}

/// `chi_s = chi * Psi(delta + 1 - ||col(eta, a)||^2)`.
pub fn chi_s<T: Scalar>(eta: &[T], a_hat: &[T], m_coeffs: &[T], delta: T) -> Result<T> {
    let sat = smooth_step(saturation_arg(eta, a_hat, delta));
    if sat == T::zero() {
        check_chi_dims(eta, a_hat, m_coeffs)?;
        return Ok(T::zero());
    }
    Ok(chi(eta, a_hat, m_coeffs)? * sat)
}

/// Value and analytic gradients of `chi_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiGrad<T> {
    pub value: T,
    pub d_eta: Vec<T>,
    pub d_a: Vec<T>,
}

/// Analytic gradient of `chi_s` with respect to `eta` and `a`.
pub fn chi_s_grad<T: Scalar>(
    eta: &[T],
    a_hat: &[T],
    m_coeffs: &[T],
    delta: T,
) -> Result<ChiGrad<T>> {
    let n = check_chi_dims(eta, a_hat, m_coeffs)?;
    let s = saturation_arg(eta, a_hat, delta);
    let sat = smooth_step(s);
    let dsat = smooth_step_deriv(s);
    if sat == T::zero() && dsat == T::zero() {
        return Ok(ChiGrad {
            value: T::zero(),
            d_eta: vec![T::zero(); 2 * n],
            d_a: vec![T::zero(); n],
        });
    }
    let (row, jac) = xi_first_row_jacobian(a_hat, m_coeffs);
    let chi_val = dot(&row, &eta[..n]);
    let two = lit::<T>(2.0);
    // d Psi(s) / d x = Psi'(s) * (-2 x)
    let mut d_eta: Vec<T> = eta.iter().map(|&e| -two * e * dsat * chi_val).collect();
    for i in 0..n {
        d_eta[i] += sat * row[i];
    }
    let d_a: Vec<T> = (0..n)
        .map(|j| sat * dot(jac.row(j), &eta[..n]) - two * a_hat[j] * dsat * chi_val)
        .collect();
    Ok(ChiGrad {
        value: chi_val * sat,
        d_eta,
        d_a,
    })
}

/// Gradient-flow learner state.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner<T> {
    pub a_hat: Vec<T>,
    pub k_a: T,
    pub delta: T,
}

impl<T: Scalar> Learner<T> {
    pub fn new(n: usize, k_a: T, delta: T) -> Result<Self> {
        if !(k_a > T::zero()) {
            return Err(Error::invalid("learning gain k_a must be positive"));
        }
        if !(delta > T::zero()) {
            return Err(Error::invalid("saturation radius delta must be positive"));
        }
        Ok(Self {
            a_hat: vec![T::zero(); n],
            k_a,
            delta,
        })
    }

    pub fn n(&self) -> usize {
        self.a_hat.len()
    }

    /// Learning-law right-hand side for the stored estimate.
    pub fn rhs(&self, eta: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if eta.len() != 2 * n {
            return Err(Error::invalid("eta must have length 2n"));
        }
        let mut out = vec![T::zero(); n];
        learning_rhs_into(self.k_a, eta, &self.a_hat, &mut out);
        Ok(out)
    }
}

/// `-k_a Theta(eta)^T [Theta(eta) a + col(eta_{n+1}, ..., eta_{2n})]`.
///
/// Uses products only, so a singular `Theta(eta)` is harmless.
pub fn learning_rhs_into<T: Scalar>(k_a: T, eta: &[T], a_hat: &[T], out: &mut [T]) {
    let n = a_hat.len();
    let mut resid = [T::zero(); 32];
    let resid = if n <= 32 {
        &mut resid[..n]
    } else {
        // generators this large never occur in practice; fall back to the heap
        return learning_rhs_heap(k_a, eta, a_hat, out);
    };
    for i in 0..n {
        resid[i] = dot(&eta[i..i + n], a_hat) + eta[n + i];
    }
    // Theta is symmetric
    for j in 0..n {
        out[j] = -k_a * dot(&eta[j..j + n], resid);
    }
}

fn learning_rhs_heap<T: Scalar>(k_a: T, eta: &[T], a_hat: &[T], out: &mut [T]) {
    let n = a_hat.len();
    let resid: Vec<T> = (0..n)
        .map(|i| dot(&eta[i..i + n], a_hat) + eta[n + i])
        .collect();
    for j in 0..n {
        out[j] = -k_a * dot(&eta[j..j + n], &resid);
    }
}

/// `||Theta(eta) a + col(eta_{n+1..2n})||^2`, the quantity the learner descends.
pub fn hankel_residual_sq<T: Scalar>(eta: &[T], a_hat: &[T]) -> T {
    let n = a_hat.len();
    (0..n)
        .map(|i| {
            let r = dot(&eta[i..i + n], a_hat) + eta[n + i];
            r * r
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn im_rhs_examples() {
        let mut im = InternalModel::new(&[2.0, 3.0]).unwrap();
        assert_eq!(im.rhs(0.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(im.rhs(1.0).unwrap(), vec![0.0, 1.0]);
        im.eta = vec![1.0, 0.0];
        assert_eq!(im.rhs(0.0).unwrap(), vec![0.0, -2.0]);
        assert!(im.rhs(f64::NAN).is_err());
        assert!(InternalModel::new(&[-1.0, 1.0]).is_err());
    }

    #[test]
    fn im_rhs_matches_dense_product() {
        let m = [
            1.0, 5.1503, 13.301, 22.2016, 25.7518, 21.6013, 12.8005, 5.2001,
        ];
        let mut im = InternalModel::new(&m).unwrap();
        im.eta = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let fast = im.rhs(0.3).unwrap();
        let mut dense = im.m().mul_vec(&im.eta).unwrap();
        dense[7] += 0.3;
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bump_and_step_values() {
        assert_eq!(bump_psi(-1.0f64), 0.0);
        assert!((bump_psi(1.0f64) - (-1.0f64).exp()).abs() < 1e-15);
        let tiny = bump_psi(0.01f64);
        assert!(tiny > 0.0 && tiny < 1e-40);
        assert_eq!(bump_psi(1e-3f64), 0.0);
        assert_eq!(smooth_step(0.5f64), 0.5);
        assert_eq!(smooth_step(-3.0f64), 0.0);
        assert_eq!(smooth_step(2.0f64), 1.0);
    }

    #[test]
    fn smooth_step_derivative_matches_fd() {
        for &s in &[0.1f64, 0.3, 0.5, 0.77, 0.95] {
            let h = 1e-6;
            let fd = (smooth_step(s + h) - smooth_step(s - h)) / (2.0 * h);
            assert!((fd - smooth_step_deriv(s)).abs() < 1e-6, "s={s}");
        }
        assert_eq!(smooth_step_deriv(-0.5f64), 0.0);
        assert_eq!(smooth_step_deriv(1.5f64), 0.0);
    }

    #[test]
    fn chi_examples() {
        let m = [2.0, 3.0];
        assert_eq!(chi(&[0.5, 7.0], &[0.0], &m).unwrap(), 1.0);
        assert_eq!(chi(&[0.0, 0.0], &[0.3], &m).unwrap(), 0.0);
        assert!(chi(&[0.0], &[0.3], &m).is_err());
    }

    #[test]
    fn chi_s_regions() {
        let m = [2.0, 3.0];
        let delta = 4.0;
        // ||col(eta, a)||^2 = 2 = delta / 2
        let eta = [1.0, 1.0];
        let a = [0.0];
        assert_eq!(
            chi_s(&eta, &a, &m, delta).unwrap(),
            chi(&eta, &a, &m).unwrap()
        );
        // norm^2 = delta + 2
        let eta = [6f64.sqrt(), 0.0];
        assert_eq!(chi_s(&eta, &a, &m, delta).unwrap(), 0.0);
        // norm^2 = delta + 0.5: midband
        let eta = [4.5f64.sqrt(), 0.0];
        let full = chi(&eta, &a, &m).unwrap();
        let sat = chi_s(&eta, &a, &m, delta).unwrap();
        assert!(sat > 0.0 && sat < full);
    }

    #[test]
    fn chi_s_grad_at_origin_and_deep_saturation() {
        let m = [1.0, 2.0, 3.0, 4.0];
        let g = chi_s_grad(&[0.0; 4], &[0.0; 2], &m, 10.0).unwrap();
        let row = xi_first_row(&[0.0, 0.0], &m);
        let psi = smooth_step(11.0);
        assert_eq!(&g.d_eta[..2], &[row[0] * psi, row[1] * psi]);
        assert_eq!(&g.d_eta[2..], &[0.0, 0.0]);
        assert_eq!(g.d_a, vec![0.0, 0.0]);

        let g = chi_s_grad(&[10.0, 0.0, 0.0, 0.0], &[0.0; 2], &m, 10.0).unwrap();
        assert_eq!(g.value, 0.0);
        assert!(g.d_eta.iter().chain(&g.d_a).all(|&x| x == 0.0));
    }

    #[test]
    fn learning_rhs_examples() {
        let mut l = Learner::new(1, 1.0, 1e4).unwrap();
        assert_eq!(l.rhs(&[1.0, 2.0]).unwrap(), vec![-2.0]);
        assert_eq!(l.rhs(&[0.0, 0.0]).unwrap(), vec![0.0]);
        // exact fixed point: Theta a = -col(eta_{n+1..})
        l.a_hat = vec![-2.0];
        assert_eq!(l.rhs(&[1.0, 2.0]).unwrap(), vec![0.0]);
        assert!(Learner::<f64>::new(1, 0.0, 1.0).is_err());
        assert!(Learner::<f64>::new(1, 1.0, -1.0).is_err());
    }

    #[test]
    fn learning_rhs_matches_dense_hankel() {
        let eta: Vec<f64> = (0..10).map(|i| (i as f64 * 1.3).cos()).collect();
        let a = [0.2, -0.1, 0.5, 0.3, -0.7];
        let mut out = [0.0; 5];
        learning_rhs_into(2.0, &eta, &a, &mut out);
        let th = crate::linalg::hankel(&eta).unwrap();
        let mut r = th.mul_vec(&a).unwrap();
        for i in 0..5 {
            r[i] += eta[5 + i];
        }
        let want = th.transpose().mul_vec(&r).unwrap();
        for i in 0..5 {
            assert!((out[i] + 2.0 * want[i]).abs() < 1e-12);
        }
    }
}
