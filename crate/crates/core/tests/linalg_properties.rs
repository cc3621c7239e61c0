use imreg::linalg::{
    companion_from_coeffs, gamma, hankel, mn_pair, q_matrix, solve_a, spectrum, sylvester_residual,
    sylvester_solve_oracle, vandermonde_factor, xi_matrix, CoeffVector, Matrix,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// Ascending coefficients of `prod (s - r)` by direct convolution.
fn expand(roots: &[Complex64]) -> Vec<f64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        poly = next;
    }
    poly[..roots.len()].iter().map(|c| c.re).collect()
}

/// Durand-Kerner iteration on the monic polynomial with ascending
/// coefficients `c` (leading 1 implied).
fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let n = c.len();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * z + c[k];
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let prev = z.clone();
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
        }
        if z.iter()
            .zip(&prev)
            .all(|(a, b)| (a - b).norm() < 1e-15 * a.norm().max(1.0))
        {
            break;
        }
    }
    z
}

fn max_matching_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    let mut used = vec![false; want.len()];
    let mut worst: f64 = 0.0;
    for g in got {
        let (j, d) = want
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (g - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Conjugate-closed root sets with distinct members.
fn root_set(max_n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, 0.0f64..2.0, any::<bool>()), 1..=max_n).prop_filter_map(
        "roots too close",
        move |raw| {
            let mut roots = Vec::new();
            for (re, im, real) in raw {
                if roots.len() >= max_n {
                    break;
                }
                if real || roots.len() + 2 > max_n {
                    roots.push(Complex64::new(re, 0.0));
                } else {
                    roots.push(Complex64::new(re, im.max(0.1)));
                    roots.push(Complex64::new(re, -im.max(0.1)));
                }
            }
            let ok = roots
                .iter()
                .enumerate()
                .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > 0.2));
            ok.then_some(roots)
        },
    )
}

/// Distinct frequencies `0.2..3` giving an imaginary-axis generator of order
/// `2 * len` (plus a zero root when `dc`).
fn harmonic_roots() -> impl Strategy<Value = Vec<Complex64>> {
    (prop::collection::vec(0.2f64..3.0, 1..=2), any::<bool>()).prop_filter_map(
        "close",
        |(ws, dc)| {
            if ws.len() == 2 && (ws[0] - ws[1]).abs() < 0.2 {
                return None;
            }
            let mut r: Vec<Complex64> = ws
                .iter()
                .flat_map(|&w| [Complex64::new(0.0, w), Complex64::new(0.0, -w)])
                .collect();
            if dc {
                r.push(Complex64::new(0.0, 0.0));
            }
            Some(r)
        },
    )
}

/// A generator together with Hurwitz internal-model coefficients.
fn generator_pair() -> impl Strategy<Value = (CoeffVector<f64>, Vec<f64>)> {
    harmonic_roots().prop_flat_map(|roots| {
        let n = roots.len();
        prop::collection::vec(0.5f64..3.0, 2 * n).prop_map(move |poles| {
            let a = CoeffVector::new(expand(&roots)).unwrap();
            let m_roots: Vec<Complex64> = poles.iter().map(|&p| Complex64::new(-p, 0.0)).collect();
            (a, expand(&m_roots))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn companion_spectrum_matches_roots(roots in root_set(8)) {
        let c = expand(&roots);
        let phi = companion_from_coeffs(&CoeffVector::new(c.clone()).unwrap());
        let got = spectrum(&phi).unwrap().eigenvalues;
        prop_assert_eq!(got.len(), roots.len());
        prop_assert!(max_matching_error(&got, &roots) < 1e-8);
        // and against an independent root finder
        prop_assert!(max_matching_error(&got, &durand_kerner(&c)) < 1e-8);
    }

    #[test]
    fn sylvester_identity_and_kronecker_agreement((a, m) in generator_pair()) {
        let (mm, nn) = mn_pair(&m).unwrap();
        let phi = companion_from_coeffs(&a);
        let g = gamma(a.n());
        let q = q_matrix(&a, &m).unwrap();
        prop_assert!(sylvester_residual(&mm, &q, &phi, &nn, &g).unwrap() < 1e-9);
        let q_ref = sylvester_solve_oracle(&mm, &phi, &nn, &g).unwrap();
        prop_assert!(q.max_abs_diff(&q_ref).unwrap() < 1e-7);
    }

    #[test]
    fn q_rows_follow_the_companion((a, m) in generator_pair()) {
        let q = q_matrix(&a, &m).unwrap();
        let phi = companion_from_coeffs(&a);
        let scale = q.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for j in 0..q.rows() - 1 {
            let next = phi.vec_mul(q.row(j)).unwrap();
            for (x, y) in next.iter().zip(q.row(j + 1)) {
                prop_assert!((x - y).abs() < 1e-10 * scale);
            }
        }
        // leading n rows stack to Xi(a)^{-1}
        let xi = xi_matrix(&a, &m).unwrap();
        let n = a.n();
        let top = Matrix::from_rows(&(0..n).map(|j| q.row(j).to_vec()).collect::<Vec<_>>()).unwrap();
        let prod = top.matmul(&xi).unwrap();
        prop_assert!(prod.max_abs_diff(&Matrix::identity(n)).unwrap() < 1e-12 * scale * xi.frobenius_norm().max(1.0));
    }

    #[test]
    fn xi_commutes_with_companion((a, m) in generator_pair()) {
        let phi = companion_from_coeffs(&a);
        let xi = xi_matrix(&a, &m).unwrap();
        let lhs = phi.matmul(&xi).unwrap();
        let rhs = xi.matmul(&phi).unwrap();
        let scale = xi.frobenius_norm().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10 * scale);
    }

    #[test]
    fn hankel_is_symmetric(theta in prop::collection::vec(-1e3f64..1e3, 1..=10usize).prop_map(|mut v| {
        if v.len() % 2 == 1 { v.pop(); }
        if v.is_empty() { v = vec![1.0, 2.0]; }
        v
    })) {
        prop_assert!(hankel(&theta).unwrap().is_symmetric(0.0));
    }

    #[test]
    fn solve_a_round_trip(theta in prop::collection::vec(-10.0f64..10.0, 2..=8usize).prop_map(|mut v| {
        if v.len() % 2 == 1 { v.pop(); }
        v
    })) {
        let n = theta.len() / 2;
        let Ok(a) = solve_a(&theta) else { return Ok(()); };
        let h = hankel(&theta).unwrap();
        let r = h.mul_vec(a.as_slice()).unwrap();
        let norm_theta = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let res = r.iter().zip(&theta[n..]).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
        let cond = imreg::linalg::hankel_condition(&theta).unwrap();
        // the solve is backward stable; the residual bound scales with conditioning
        prop_assert!(res < 1e-8 * norm_theta * (cond * 1e-8).max(1.0));
    }
}

#[test]
fn vandermonde_reconstructs_random_generators() {
    for ws in [[0.3, 1.7], [1.0, 3.0], [0.5, 2.9]] {
        let roots: Vec<Complex64> = ws
            .iter()
            .flat_map(|&w| [Complex64::new(0.0, w), Complex64::new(0.0, -w)])
            .collect();
        let a = CoeffVector::new(expand(&roots)).unwrap();
        let f = vandermonde_factor(&a).unwrap();
        assert!(f.reconstruction_error < 1e-8, "{}", f.reconstruction_error);
    }
}
