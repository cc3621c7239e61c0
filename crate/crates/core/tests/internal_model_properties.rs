use imreg::internal_model::{chi, chi_s, chi_s_grad, hankel_residual_sq, smooth_step, Learner};
use imreg::linalg::hankel;
use imreg::sim::finite_diff_check;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const DUFFING_M: [f64; 8] = [
    1.0, 5.1503, 13.301, 22.2016, 25.7518, 21.6013, 12.8005, 5.2001,
];

fn vec_in(len: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, len)
}

proptest! {
    #[test]
    fn saturation_never_amplifies(eta in vec_in(8, 5.0), a in vec_in(4, 5.0), delta in 1.0f64..200.0) {
        let raw = chi(&eta, &a, &DUFFING_M).unwrap();
        let sat = chi_s(&eta, &a, &DUFFING_M, delta).unwrap();
        prop_assert!(sat.abs() <= raw.abs());
        let sq: f64 = eta.iter().chain(&a).map(|x| x * x).sum();
        if sq <= delta {
            prop_assert_eq!(sat, raw);
        }
    }

    #[test]
    fn chi_is_linear_in_eta(
        e1 in vec_in(8, 3.0),
        e2 in vec_in(8, 3.0),
        a in vec_in(4, 2.0),
        al in -2.0f64..2.0,
        be in -2.0f64..2.0,
    ) {
        let mix: Vec<f64> = e1.iter().zip(&e2).map(|(x, y)| al * x + be * y).collect();
        let lhs = chi(&mix, &a, &DUFFING_M).unwrap();
        let rhs = al * chi(&e1, &a, &DUFFING_M).unwrap() + be * chi(&e2, &a, &DUFFING_M).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() < 1e-10 * scale);
    }

    #[test]
    fn learner_vanishes_at_exact_solutions(head in vec_in(4, 2.0), a in vec_in(4, 1.0), k_a in 0.1f64..10.0) {
        // eta_{n+i} = -sum_j eta_{i+j-1} a_j only looks back, so fill it forward
        let n = 4;
        let mut eta = head.clone();
        for i in 0..n {
            let next = -(0..n).map(|j| eta[i + j] * a[j]).sum::<f64>();
            eta.push(next);
        }
        let mut l = Learner::new(n, k_a, 1e4).unwrap();
        l.a_hat = a.clone();
        let scale = eta.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for d in l.rhs(&eta).unwrap() {
            prop_assert!(d.abs() < 1e-12 * k_a * scale * scale);
        }
    }
}

#[test]
fn smooth_step_stays_in_unit_interval() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..1_000_000 {
        let s: f64 = rng.gen_range(-3.0..4.0);
        let v = smooth_step(s);
        assert!((0.0..=1.0).contains(&v), "Psi({s}) = {v}");
    }
    let grid: Vec<f64> = (0..=4000).map(|k| -1.0 + 3.0 * k as f64 / 4000.0).collect();
    for w in grid.windows(2) {
        assert!(smooth_step(w[1]) >= smooth_step(w[0]));
    }
}

#[test]
fn euler_learning_descends_the_hankel_residual() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let eta: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let k_a = rng.gen_range(0.1..10.0);
        let theta = hankel(&eta).unwrap();
        let gram = theta.transpose().matmul(&theta).unwrap();
        // ||Theta^T Theta||_2 <= Frobenius norm
        let step = 1.0 / (k_a * gram.frobenius_norm().max(1e-12));
        let mut l = Learner::new(n, k_a, 1e4).unwrap();
        l.a_hat = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut prev = hankel_residual_sq(&eta, &l.a_hat);
        let floor = 1e-24 * (1.0 + prev);
        for _ in 0..50 {
            let d = l.rhs(&eta).unwrap();
            for (a, da) in l.a_hat.iter_mut().zip(&d) {
                *a += step * da;
            }
            let now = hankel_residual_sq(&eta, &l.a_hat);
            assert!(now <= prev * (1.0 + 1e-12) + floor, "{now} > {prev}");
            prev = now;
        }
    }
}

#[test]
fn learner_is_stationary_when_the_hankel_system_holds() {
    // eta from a steady cosine: eta_k = d^{k-1}/dt^{k-1} cos(w t) at t0
    let (w, t0) = (1.3f64, 0.4f64);
    let eta: Vec<f64> = (0..4)
        .map(|k| match k % 4 {
            0 => (w * t0).cos(),
            1 => -w * (w * t0).sin(),
            2 => -w * w * (w * t0).cos(),
            _ => w * w * w * (w * t0).sin(),
        })
        .collect();
    let mut l = Learner::new(2, 2.0, 1e4).unwrap();
    l.a_hat = vec![w * w, 0.0];
    let d = l.rhs(&eta).unwrap();
    assert!(d.iter().all(|x| x.abs() < 1e-12), "{d:?}");
}

#[test]
fn chi_s_gradient_matches_central_differences() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let p: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let sq: f64 = p.iter().map(|x| x * x).sum();
        // every other point sits inside the smooth transition band
        let delta = if i % 2 == 0 {
            sq - 1.0 + rng.gen_range(0.1..0.9)
        } else {
            1e4
        };
        let f = |x: &[f64]| chi_s(&x[..8], &x[8..], &DUFFING_M, delta).unwrap();
        let g = |x: &[f64]| {
            let g = chi_s_grad(&x[..8], &x[8..], &DUFFING_M, delta).unwrap();
            [g.d_eta, g.d_a].concat()
        };
        worst = worst.max(finite_diff_check(f, g, std::slice::from_ref(&p)));
    }
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn chi_is_a_polynomial_in_the_coefficients() {
    // along a -> t a, chi has degree <= 2n in t, so the (2n+1)-th forward
    // difference vanishes
    let eta = [0.3, -0.2, 0.5, 0.1, -0.4, 0.2, 0.7, -0.1];
    let a0 = [0.4, -0.3, 0.9, 0.2];
    let f = |t: f64| {
        let a: Vec<f64> = a0.iter().map(|x| x * t).collect();
        chi(&eta, &a, &DUFFING_M).unwrap()
    };
    let k = 9; // 2n + 1
    let h = 0.25;
    let mut diff = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        diff += sign * binom * f(j as f64 * h);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let scale = (0..=k).map(|j| f(j as f64 * h).abs()).fold(1.0, f64::max);
    assert!(diff.abs() < 1e-9 * scale * 512.0, "{diff}");
}
