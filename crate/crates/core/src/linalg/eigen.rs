//! Eigenvalues of small dense real matrices.
//!
//! Balancing, reduction to upper Hessenberg form by stabilized elementary
//! similarity transforms, then Francis double-shift QR on the Hessenberg
//! matrix. Only eigenvalues are produced.

use num_complex::Complex;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues of a square matrix as complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_real(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(T::neg_infinity(), T::max)
    }

    /// Smallest pairwise distance between eigenvalues.
    pub fn min_gap(&self) -> T {
        let ev = &self.eigenvalues;
        let mut gap = T::infinity();
        for i in 0..ev.len() {
            for j in i + 1..ev.len() {
                gap = gap.min((ev[i] - ev[j]).norm());
            }
        }
        gap
    }

    /// Largest distance from the imaginary axis.
    pub fn max_abs_real(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|z| z.re.abs())
            .fold(T::zero(), T::max)
    }
}

/// All eigenvalues of `m`.
pub fn spectrum<T: Scalar>(m: &Matrix<T>) -> Result<Spectrum<T>> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "spectrum needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    balance(&mut a);
    hessenberg(&mut a);
    let eigenvalues = hqr(&mut a)?;
    debug_assert_eq!(eigenvalues.len(), n);
    Ok(Spectrum { eigenvalues })
}

/// True iff every eigenvalue has real part `< -margin`.
pub fn is_hurwitz<T: Scalar>(m: &Matrix<T>, margin: T) -> Result<bool> {
    let s = spectrum(m)?;
    Ok(s.eigenvalues.iter().all(|z| z.re < -margin))
}

fn balance<T: Scalar>(a: &mut [Vec<T>]) {
    let n = a.len();
    let radix: T = lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < lit::<T>(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg<T: Scalar>(a: &mut [Vec<T>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for m in 1..n - 1 {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        let amj = a[m][j];
                        a[i][j] -= y * amj;
                    }
                    for row in a.iter_mut() {
                        let rim = row[i];
                        row[m] += y * rim;
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[i][j] = T::zero();
        }
    }
}

#[inline]
fn sign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr<T: Scalar>(a: &mut [Vec<T>]) -> Result<Vec<Complex<T>>> {
    let n = a.len() as isize;
    let zero = T::zero();
    let mut wr = vec![zero; n as usize];
    let mut wi = vec![zero; n as usize];
    let idx = |i: isize| i as usize;

    let mut anorm = zero;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += a[idx(i)][idx(j)].abs();
        }
    }

    let mut nn = n - 1;
    let mut t = zero;
    let (mut p, mut q, mut r) = (zero, zero, zero);
    let (mut x, mut y, mut z, mut w);
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = a[idx(l - 1)][idx(l - 1)].abs() + a[idx(l)][idx(l)].abs();
                if s == zero {
                    s = anorm;
                }
                if a[idx(l)][idx(l - 1)].abs() + s == s {
                    a[idx(l)][idx(l - 1)] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[idx(nn)][idx(nn)];
            if l == nn {
                wr[idx(nn)] = x + t;
                wi[idx(nn)] = zero;
                nn -= 1;
                break;
            }
            y = a[idx(nn - 1)][idx(nn - 1)];
            w = a[idx(nn)][idx(nn - 1)] * a[idx(nn - 1)][idx(nn)];
            if l == nn - 1 {
                p = lit::<T>(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= zero {
                    z = p + sign(z, p);
                    wr[idx(nn - 1)] = x + z;
                    wr[idx(nn)] = x + z;
                    if z != zero {
                        wr[idx(nn)] = x - w / z;
                    }
                    wi[idx(nn - 1)] = zero;
                    wi[idx(nn)] = zero;
                } else {
                    wr[idx(nn - 1)] = x + p;
                    wr[idx(nn)] = x + p;
                    wi[idx(nn - 1)] = -z;
                    wi[idx(nn)] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERS_PER_EIGENVALUE {
                return Err(Error::NumericFailure(format!(
                    "QR iteration did not converge after {its} iterations"
                )));
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    a[idx(i)][idx(i)] -= x;
                }
                let s = a[idx(nn)][idx(nn - 1)].abs() + a[idx(nn - 1)][idx(nn - 2)].abs();
                x = lit::<T>(0.75) * s;
                y = x;
                w = lit::<T>(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            while m >= l {
                z = a[idx(m)][idx(m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[idx(m + 1)][idx(m)] + a[idx(m)][idx(m + 1)];
                q = a[idx(m + 1)][idx(m + 1)] - z - r - s;
                r = a[idx(m + 2)][idx(m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(m)][idx(m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[idx(m - 1)][idx(m - 1)].abs() + z.abs() + a[idx(m + 1)][idx(m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[idx(i)][idx(i - 2)] = zero;
                if i != m + 2 {
                    a[idx(i)][idx(i - 3)] = zero;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[idx(k)][idx(k - 1)];
                    q = a[idx(k + 1)][idx(k - 1)];
                    r = zero;
                    if k != nn - 1 {
                        r = a[idx(k + 2)][idx(k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != zero {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != zero {
                    if k == m {
                        if l != m {
                            a[idx(k)][idx(k - 1)] = -a[idx(k)][idx(k - 1)];
                        }
                    } else {
                        a[idx(k)][idx(k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a[idx(k)][idx(j)] + q * a[idx(k + 1)][idx(j)];
                        if k != nn - 1 {
                            pp += r * a[idx(k + 2)][idx(j)];
                            a[idx(k + 2)][idx(j)] -= pp * z;
                        }
                        a[idx(k + 1)][idx(j)] -= pp * y;
                        a[idx(k)][idx(j)] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[idx(i)][idx(k)] + y * a[idx(i)][idx(k + 1)];
                        if k != nn - 1 {
                            pp += z * a[idx(i)][idx(k + 2)];
                            a[idx(i)][idx(k + 2)] -= pp * r;
                        }
                        a[idx(i)][idx(k + 1)] -= pp * q;
                        a[idx(i)][idx(k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}
