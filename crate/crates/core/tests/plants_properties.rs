use imreg::linalg::{companion_from_coeffs, spectrum};
use imreg::plants::{
    bioreactor_rhs, cstr_reaction, cstr_rhs, duffing_rhs, duffing_true_a, exo_rhs, growth_rate_mu,
    reference_and_error, BioreactorParams, CstrParams, DuffingParams, Exosystem, Plant, Reference,
};
use imreg::sim::Rk4;
use imreg::Error;
use proptest::prelude::*;

fn integrate_exo(sigma: f64, v0: [f64; 2], horizon: f64, h: f64) -> Vec<f64> {
    let mut v = v0.to_vec();
    let mut rk = Rk4::new(2);
    let mut f = |_t: f64, y: &[f64], out: &mut [f64]| {
        out.copy_from_slice(&exo_rhs(sigma, y));
        Ok(())
    };
    let steps = (horizon / h).round() as usize;
    for k in 0..steps {
        rk.step(&mut f, k as f64 * h, &mut v, h).unwrap();
    }
    v
}

#[test]
fn exosystem_norm_is_conserved_over_a_long_run() {
    let v0 = [1.0, 2.0];
    let v = integrate_exo(1.0, v0, 100.0, 1e-3);
    let n0 = (v0[0] * v0[0] + v0[1] * v0[1]).sqrt();
    let n1 = (v[0] * v[0] + v[1] * v[1]).sqrt();
    assert!((n1 - n0).abs() < 1e-6, "{n0} -> {n1}");
    // and the phase matches the closed-form rotation
    let (s, c) = 100.0f64.sin_cos();
    assert!((v[0] - (c * v0[0] + s * v0[1])).abs() < 1e-6);
}

proptest! {
    #[test]
    fn exo_field_is_tangent_to_circles(sigma in 0.01f64..10.0, v1 in -5.0f64..5.0, v2 in -5.0f64..5.0) {
        let d = exo_rhs(sigma, &[v1, v2]);
        prop_assert!((v1 * d[0] + v2 * d[1]).abs() <= 1e-12 * (1.0 + sigma * (v1 * v1 + v2 * v2)));
    }

    #[test]
    fn cosine_exosystem_round_trips(amp in 0.01f64..10.0, omega in 0.1f64..5.0, phase in -3.0f64..3.0) {
        let ex = Exosystem::cosine(amp, omega, phase);
        prop_assert!((ex.amplitude() - amp).abs() < 1e-12 * amp.max(1.0));
        prop_assert!((ex.phase() - phase).abs() < 1e-12);
    }

    #[test]
    fn duffing_origin_is_an_equilibrium(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, c3 in -5.0f64..5.0) {
        let p = DuffingParams { c1, c2, c3 };
        prop_assert_eq!(duffing_rhs(&[0.0, 0.0], 0.0, 0.0, &p), [0.0, 0.0]);
    }

    #[test]
    fn duffing_input_and_disturbance_enter_additively(
        x1 in -3.0f64..3.0, x2 in -3.0f64..3.0, u in -5.0f64..5.0, d in -5.0f64..5.0,
    ) {
        let p = DuffingParams::default();
        let f0 = duffing_rhs(&[x1, x2], 0.0, 0.0, &p);
        let f = duffing_rhs(&[x1, x2], u, d, &p);
        prop_assert_eq!(f[0], f0[0]);
        prop_assert!((f[1] - f0[1] - u - d).abs() < 1e-12 * (1.0 + f0[1].abs() + u.abs() + d.abs()));
    }

    #[test]
    fn cstr_reaction_vanishes_and_flips_sign_at_full_conversion(x2 in -15.0f64..15.0, eps in 1e-3f64..1.0) {
        let p = CstrParams::default();
        prop_assert_eq!(cstr_reaction(1.0, x2, &p).unwrap(), 0.0);
        prop_assert!(cstr_reaction(1.0 - eps, x2, &p).unwrap() > 0.0);
        prop_assert!(cstr_reaction(1.0 + eps, x2, &p).unwrap() < 0.0);
    }

    #[test]
    fn bioreactor_growth_stops_at_the_product_limit(x2 in 0.0f64..30.0, mu_m in 0.1f64..1.0) {
        let p = BioreactorParams::default();
        prop_assert_eq!(growth_rate_mu(x2, p.xm, mu_m, &p).unwrap(), 0.0);
        let mu = growth_rate_mu(x2, 0.5 * p.xm, mu_m, &p).unwrap();
        prop_assert!(mu >= 0.0 && mu <= mu_m);
    }

    #[test]
    fn bioreactor_without_biomass_only_dilutes(x2 in 0.0f64..30.0, x3 in 0.0f64..50.0, u in 0.0f64..20.0) {
        let p = BioreactorParams::default();
        let f = bioreactor_rhs(&[0.0, x2, x3], u, 0.0, &p).unwrap();
        prop_assert_eq!(f[0], 0.0);
        prop_assert!((f[1] - p.d * (u - x2)).abs() < 1e-12 * (1.0 + u + x2));
        prop_assert!((f[2] + p.d * x3).abs() < 1e-12 * (1.0 + x3));
    }

    #[test]
    fn constant_references_give_plain_offsets(c in -100.0f64..100.0, y in -100.0f64..100.0, v in -5.0f64..5.0) {
        let (yr, e) = reference_and_error(Reference::Constant(c), &[v, -v], y);
        prop_assert_eq!(yr, c);
        prop_assert_eq!(e, y - c);
        let (yr, _) = reference_and_error(Reference::ExoV1, &[v, -v], y);
        prop_assert_eq!(yr, v);
    }
}

#[test]
fn plant_fields_are_deterministic() {
    let plants: Vec<(Plant<f64>, Vec<f64>)> = vec![
        (Plant::Duffing(DuffingParams::default()), vec![0.3, -1.2]),
        (Plant::Cstr(CstrParams::default()), vec![0.4, 3.1]),
        (
            Plant::Bioreactor(BioreactorParams::default()),
            vec![6.0, 2.1, 20.0],
        ),
    ];
    for (p, x) in plants {
        let mut a = vec![0.0; x.len()];
        let mut b = vec![0.0; x.len()];
        p.rhs_into(&x, 0.7, 0.05, &mut a).unwrap();
        p.rhs_into(&x, 0.7, 0.05, &mut b).unwrap();
        assert!(
            a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()),
            "{}",
            p.name()
        );
    }
}

#[test]
fn f32_and_f64_fields_agree() {
    let f64v = cstr_rhs(&[0.4, 3.1], 1.0, 0.1, &CstrParams::default()).unwrap();
    let f32v = cstr_rhs(&[0.4f32, 3.1], 1.0, 0.1, &CstrParams::default()).unwrap();
    for (a, b) in f64v.iter().zip(&f32v) {
        assert!((a - *b as f64).abs() < 1e-4 * a.abs().max(1.0));
    }
}

#[test]
fn cstr_pole_is_a_domain_error() {
    let p = CstrParams::<f64>::default();
    assert!(matches!(
        cstr_rhs(&[0.0, -p.gamma], 0.0, 0.0, &p),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn duffing_truth_has_harmonics_at_sigma_and_three_sigma() {
    for sigma in [0.5f64, 1.0, 1.7] {
        let a = duffing_true_a(sigma).unwrap();
        let mut im: Vec<f64> = spectrum(&companion_from_coeffs(&a))
            .unwrap()
            .eigenvalues
            .iter()
            .map(|z| {
                assert!(z.re.abs() < 1e-9 * sigma, "{z}");
                z.im
            })
            .collect();
        im.sort_by(f64::total_cmp);
        let want = [-3.0 * sigma, -sigma, sigma, 3.0 * sigma];
        for (g, w) in im.iter().zip(want) {
            assert!((g - w).abs() < 1e-9 * sigma, "{im:?}");
        }
    }
}

#[test]
fn plant_metadata() {
    let d = Plant::Duffing(DuffingParams::<f64>::default());
    let c = Plant::Cstr(CstrParams::<f64>::default());
    let b = Plant::Bioreactor(BioreactorParams::<f64>::default());
    assert_eq!(
        (d.state_dim(), d.relative_degree(), d.output_index()),
        (2, 2, 0)
    );
    assert_eq!(
        (c.state_dim(), c.relative_degree(), c.output_index()),
        (2, 1, 1)
    );
    assert_eq!(
        (b.state_dim(), b.relative_degree(), b.output_index()),
        (3, 1, 1)
    );
    assert_eq!(c.default_reference(), Reference::Constant(10.0));
    assert_eq!(b.default_reference(), Reference::Constant(2.0));
    assert!(Plant::Cstr(CstrParams {
        beta: 0.0,
        ..CstrParams::<f64>::default()
    })
    .validate()
    .is_err());
}
