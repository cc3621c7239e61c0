//! Brute-force verifiers: steady generator trajectories, constancy of the
//! Hankel solve along them, spectral content of a converged control input,
//! and randomized check suites emitting plain `key=value` records.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::internal_model::{chi_s, chi_s_grad};
use crate::linalg::{
    companion_from_coeffs, gamma, mn_pair, poles_to_coeffs, q_matrix, solve_a, spectrum,
    sylvester_residual, sylvester_solve_oracle, CoeffVector, COND_LIMIT,
};
use crate::plants::duffing_true_a;
use crate::regulator::{
    alpha1_grad, GainMode, MappingMode, RegulatorConfig, RegulatorState, RhoSpec,
};
use crate::scalar::{lit, Scalar};
use crate::scenario::ScenarioConfig;
use crate::sim::{finite_diff_check, simulate, Rk4, Scenario, Trace};

/// Samples of `xi' = Phi(a) xi` and of `theta = Q xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyTrajectory<T> {
    pub times: Vec<T>,
    pub theta: Vec<Vec<T>>,
    pub xi: Vec<Vec<T>>,
}

/// Coefficients of the generator whose spectrum is `{0 if with_dc} ∪ {±i w}`.
pub fn harmonic_generator<T: Scalar>(omegas: &[T], with_dc: bool) -> Result<CoeffVector<T>> {
    let mut poles = Vec::with_capacity(2 * omegas.len() + 1);
    if with_dc {
        poles.push(Complex::new(T::zero(), T::zero()));
    }
    for &w in omegas {
        if !(w > T::zero()) {
            return Err(Error::invalid("harmonic frequencies must be positive"));
        }
        poles.push(Complex::new(T::zero(), w));
        poles.push(Complex::new(T::zero(), -w));
    }
    CoeffVector::new(poles_to_coeffs(&poles)?)
}

/// `sum_k amps_k Re(v_k)` where `v_k = (1, i w_k, (i w_k)^2, ...)` is the
/// eigenvector of a companion matrix of order `n` for the eigenvalue `i w_k`.
/// The generator output starting there is `sum_k amps_k cos(w_k t)`.
pub fn modal_initial_state<T: Scalar>(omegas: &[T], amps: &[T], n: usize) -> Vec<T> {
    let mut xi = vec![T::zero(); n];
    for (&w, &c) in omegas.iter().zip(amps) {
        let mut p = Complex::new(T::one(), T::zero());
        let iw = Complex::new(T::zero(), w);
        for x in xi.iter_mut() {
            *x += c * p.re;
            p *= iw;
        }
    }
    xi
}

/// Integrates `xi' = Phi(a) xi` with RK4 and maps every sample through `Q`.
pub fn generator_trajectory<T: Scalar>(
    a: &CoeffVector<T>,
    m_coeffs: &[T],
    xi0: &[T],
    horizon: T,
    h: T,
) -> Result<SteadyTrajectory<T>> {
    let n = a.n();
    if xi0.len() != n {
        return Err(Error::invalid(format!(
            "xi0 has length {}, generator order is {n}",
            xi0.len()
        )));
    }
    if !(h > T::zero()) || !(horizon >= T::zero()) {
        return Err(Error::invalid(
            "step must be positive and horizon non-negative",
        ));
    }
    let phi = companion_from_coeffs(a);
    let spec = spectrum(&phi)?;
    let scale = spec
        .eigenvalues
        .iter()
        .map(|z| z.norm())
        .fold(T::one(), T::max);
    if spec.max_abs_real() > lit::<T>(1e-6) * scale {
        return Err(Error::Precondition(format!(
            "generator spectrum is off the imaginary axis (max |Re| = {:.3e})",
            spec.max_abs_real().to_f64_lossy()
        )));
    }
    let q = q_matrix(a, m_coeffs)?;
    let steps = (horizon / h).round().to_usize().unwrap_or(0);
    let mut xi = xi0.to_vec();
    let mut out = SteadyTrajectory {
        times: Vec::with_capacity(steps + 1),
        theta: Vec::with_capacity(steps + 1),
        xi: Vec::with_capacity(steps + 1),
    };
    let mut rk = Rk4::new(n);
    let mut f = |_t: T, y: &[T], dy: &mut [T]| -> Result<()> {
        dy.copy_from_slice(&phi.mul_vec(y)?);
        Ok(())
    };
    for k in 0..=steps {
        let t = T::from_usize(k).unwrap_or_else(T::zero) * h;
        if k > 0 {
            rk.step(&mut f, t - h, &mut xi, h)?;
        }
        out.times.push(t);
        out.theta.push(q.mul_vec(&xi)?);
        out.xi.push(xi.clone());
    }
    Ok(out)
}

/// Dense Gaussian elimination with partial pivoting. Returns the solution,
/// the determinant and the 1-norm condition number, or `None` for the
/// solution when a pivot vanishes.
fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> (Option<Vec<f64>>, f64, f64) {
    let n = b.len();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap_or(c);
        if m[p][c] == 0.0 {
            return (None, 0.0, f64::INFINITY);
        }
        if p != c {
            m.swap(p, c);
            perm.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            m[i][c] = f;
            for j in c + 1..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= m[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= m[i][j] * x[j];
            }
            x[i] /= m[i][i];
        }
        x
    };
    let mut inv_norm1: f64 = 0.0;
    for j in 0..n {
        let mut ej = vec![0.0; n];
        ej[j] = 1.0;
        inv_norm1 = inv_norm1.max(solve(&ej).iter().map(|x| x.abs()).sum());
    }
    (Some(solve(b)), det, norm1 * inv_norm1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSample {
    pub time: f64,
    pub cond: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstancyReport {
    /// Largest `||a(theta(t)) - a_true||` over the well-conditioned samples.
    pub max_deviation: f64,
    pub min_abs_det: f64,
    /// `min |det Theta| / prod ||row_i||`, in `[0, 1]` by Hadamard's bound.
    pub min_rel_det: f64,
    pub max_cond: f64,
    pub samples: usize,
    /// First sample whose Hankel matrix failed the conditioning test.
    pub first_singular: Option<SingularSample>,
    pub singular_count: usize,
}

impl ConstancyReport {
    pub fn is_singular(&self) -> bool {
        self.singular_count > 0
    }
}

/// Solves the Hankel system at every sample by dense pivoted elimination and
/// compares against `a_true`.
pub fn lemma1_constancy<T: Scalar>(
    traj: &SteadyTrajectory<T>,
    a_true: &[T],
) -> Result<ConstancyReport> {
    let n = a_true.len();
    if traj.theta.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }
    let mut rep = ConstancyReport {
        max_deviation: 0.0,
        min_abs_det: f64::INFINITY,
        min_rel_det: f64::INFINITY,
        max_cond: 0.0,
        samples: traj.theta.len(),
        first_singular: None,
        singular_count: 0,
    };
    for (t, theta) in traj.times.iter().zip(&traj.theta) {
        if theta.len() != 2 * n {
            return Err(Error::invalid(format!(
                "theta has length {}, expected {}",
                theta.len(),
                2 * n
            )));
        }
        let th: Vec<f64> = theta.iter().map(|x| x.to_f64_lossy()).collect();
        let big: Vec<Vec<f64>> = (0..n).map(|i| th[i..i + n].to_vec()).collect();
        let rhs: Vec<f64> = th[n..].iter().map(|x| -x).collect();
        let (sol, det, cond) = dense_solve(&big, &rhs);
        let hadamard: f64 = big
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        rep.min_abs_det = rep.min_abs_det.min(det.abs());
        rep.min_rel_det = rep.min_rel_det.min(if hadamard > 0.0 {
            det.abs() / hadamard
        } else {
            0.0
        });
        rep.max_cond = rep.max_cond.max(cond);
        match sol {
            Some(x) if cond <= COND_LIMIT => {
                let dev = x
                    .iter()
                    .zip(a_true)
                    .map(|(&u, &v)| (u - v.to_f64_lossy()).powi(2))
                    .sum::<f64>()
                    .sqrt();
                rep.max_deviation = rep.max_deviation.max(dev);
            }
            _ => {
                rep.singular_count += 1;
                if rep.first_singular.is_none() {
                    rep.first_singular = Some(SingularSample {
                        time: t.to_f64_lossy(),
                        cond,
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// Magnitudes `|X_k|`, `k = 0..=N/2`, of the direct DFT of `x`.
pub fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &xj) in x.iter().enumerate() {
                // reduce k*j mod n first to keep the angle small
                let ang = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                re += xj * ang.cos();
                im -= xj * ang.sin();
            }
            re.hypot(im)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    /// Angular frequency, rad/s.
    pub omega: f64,
    pub magnitude: f64,
    pub bin: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyInputOptions {
    /// Tail length in seconds.
    pub window: f64,
    /// Largest admissible rms tracking error over the window.
    pub e_tol: f64,
    pub max_samples: usize,
    /// Peaks below this fraction of the largest one are dropped.
    pub rel_peak: f64,
}

impl Default for SteadyInputOptions {
    fn default() -> Self {
        Self {
            window: 50.0,
            // a few percent of a unit-amplitude reference
            e_tol: 0.1,
            max_samples: 4096,
            rel_peak: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyInput {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub tail_rms_e: f64,
    /// Angular width of one DFT bin.
    pub bin_width: f64,
    /// Sorted by decreasing magnitude.
    pub peaks: Vec<SpectralPeak>,
    pub a_hat: Vec<f64>,
    /// Hankel solve on the final internal-model state.
    pub a_from_eta: Option<Vec<f64>>,
}

impl SteadyInput {
    pub fn has_peak_near(&self, omega: f64, bins: f64) -> bool {
        self.peaks
            .iter()
            .any(|p| (p.omega - omega).abs() <= bins * self.bin_width)
    }
}

/// Runs the scenario and analyses the tail of `u`.
pub fn steady_state_input_oracle<T: Scalar>(
    sc: &Scenario<T>,
    opts: &SteadyInputOptions,
) -> Result<SteadyInput> {
    steady_state_from_trace(&simulate(sc)?, opts)
}

pub fn steady_state_from_trace(trace: &Trace, opts: &SteadyInputOptions) -> Result<SteadyInput> {
    let (Some(ju), Some(je)) = (trace.index_of("u"), trace.index_of("e")) else {
        return Err(Error::invalid("trace lacks u or e columns"));
    };
    let t_end = match trace.rows.last() {
        Some(r) => r[0],
        None => return Err(Error::InconclusiveOracle("empty trace".into())),
    };
    let mut tail: Vec<&Vec<f64>> = trace
        .rows
        .iter()
        .filter(|r| r[0] >= t_end - opts.window - 1e-9)
        .collect();
    if tail.len() < 8 {
        return Err(Error::InconclusiveOracle(format!(
            "only {} samples in the tail window",
            tail.len()
        )));
    }
    // the closing sample may sit off the sampling grid
    let dt = tail[1][0] - tail[0][0];
    let n = tail.len();
    if ((tail[n - 1][0] - tail[n - 2][0]) - dt).abs() > 1e-9 * dt.max(1.0) {
        tail.pop();
    }
    if tail.len() > opts.max_samples {
        tail.drain(..tail.len() - opts.max_samples);
    }
    let n = tail.len();
    let tail_rms_e = (tail.iter().map(|r| r[je] * r[je]).sum::<f64>() / n as f64).sqrt();
    if !(tail_rms_e <= opts.e_tol) {
        return Err(Error::InconclusiveOracle(format!(
            "run has not converged: tail rms(e) = {tail_rms_e:.3e} > {:.1e}",
            opts.e_tol
        )));
    }
    let u: Vec<f64> = tail.iter().map(|r| r[ju]).collect();
    let hann: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(j, &x)| x * (0.5 - 0.5 * (2.0 * PI * j as f64 / (n - 1) as f64).cos()))
        .collect();
    let mag = dft_magnitudes(&hann);
    let bin_width = 2.0 * PI / (n as f64 * dt);
    let top = mag.iter().cloned().fold(0.0, f64::max);
    let mut peaks: Vec<SpectralPeak> = (0..mag.len())
        .filter(|&k| {
            let left = k == 0 || mag[k] >= mag[k - 1];
            let right = k + 1 == mag.len() || mag[k] > mag[k + 1];
            left && right && mag[k] >= opts.rel_peak * top && mag[k] > 0.0
        })
        .map(|k| SpectralPeak {
            omega: k as f64 * bin_width,
            magnitude: mag[k],
            bin: k,
        })
        .collect();
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));

    let a_hat = trace.last("ahat");
    let eta = trace.last("eta");
    let a_from_eta = solve_a(&eta).ok().map(|a| a.into_vec());
    Ok(SteadyInput {
        times: tail.iter().map(|r| r[0]).collect(),
        u,
        tail_rms_e,
        bin_width,
        peaks,
        a_hat,
        a_from_eta,
    })
}

/// One verification outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckRecord {
    fn below(suite: &'static str, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            limit,
            passed: value < limit,
        }
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite={} check={} value={:.3e} limit={:.1e} status={}",
            self.suite,
            self.name,
            self.value,
            self.limit,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

pub const SUITE_NAMES: [&str; 4] = ["sylvester", "equivalence", "lemma1", "gradients"];

/// Scenario name, generator coefficients and internal-model polynomial.
pub type PresetGenerator = (String, CoeffVector<f64>, Vec<f64>);

/// Generators for the three shipped scenarios. Duffing uses the known
/// coefficients; the other two use harmonic stand-ins built from the
/// disturbance frequency (a constant plus its first harmonics), since their
/// true generators are not available in closed form.
pub fn preset_generators() -> Result<Vec<PresetGenerator>> {
    let mut out = Vec::new();
    for name in ["duffing", "cstr", "bioreactor"] {
        let cfg = ScenarioConfig::preset(name)?;
        let m = cfg.regulator.m_coeffs.clone();
        let n = m.len() / 2;
        let a = if name == "duffing" {
            duffing_true_a(cfg.exo.sigma)?
        } else {
            let w = cfg.disturbance.omega;
            let omegas: Vec<f64> = (1..=(n - 1) / 2).map(|k| k as f64 * w).collect();
            harmonic_generator(&omegas, n % 2 == 1)?
        };
        out.push((name.to_string(), a, m));
    }
    Ok(out)
}

fn random_hurwitz_coeffs(rng: &mut StdRng, k: usize) -> Vec<f64> {
    let poles: Vec<Complex<f64>> = (0..k)
        .map(|_| Complex::new(-rng.gen_range(0.5..3.0), 0.0))
        .collect();
    poles_to_coeffs(&poles).expect("real poles")
}

fn random_generator(rng: &mut StdRng, n: usize) -> CoeffVector<f64> {
    // distinct frequencies spaced at least 0.2 apart
    let mut omegas: Vec<f64> = Vec::new();
    while omegas.len() < n / 2 {
        let w = rng.gen_range(0.2..3.0);
        if omegas.iter().all(|&o: &f64| (o - w).abs() > 0.2) {
            omegas.push(w);
        }
    }
    harmonic_generator(&omegas, n % 2 == 1).expect("positive frequencies")
}

/// Residual of `M Q = Q Phi - N Gamma` for the preset generators and
/// `count` random pairs.
pub fn suite_sylvester(seed: u64, count: usize) -> Result<Vec<CheckRecord>> {
    let mut recs = Vec::new();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases = preset_generators()?;
    for i in 0..count {
        let n = rng.gen_range(1..=4);
        let a = random_generator(&mut rng, n);
        cases.push((
            format!("random{i}_n{n}"),
            a,
            random_hurwitz_coeffs(&mut rng, 2 * n),
        ));
    }
    let mut worst_random: f64 = 0.0;
    for (name, a, m) in &cases {
        let (mm, nn) = mn_pair(m)?;
        let q = q_matrix(a, m)?;
        let res = sylvester_residual(&mm, &q, &companion_from_coeffs(a), &nn, &gamma(a.n()))?;
        if name.starts_with("random") {
            worst_random = worst_random.max(res);
        } else {
            recs.push(CheckRecord::below(
                "sylvester",
                format!("residual_{name}"),
                res,
                1e-9,
            ));
        }
    }
    if count > 0 {
        recs.push(CheckRecord::below(
            "sylvester",
            format!("residual_random_max_of_{count}"),
            worst_random,
            1e-9,
        ));
    }
    Ok(recs)
}

/// `q_matrix` against the Kronecker solve, entrywise.
pub fn suite_equivalence(seed: u64, count: usize) -> Result<Vec<CheckRecord>> {
    let mut recs = Vec::new();
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let mut cases = preset_generators()?;
    for i in 0..count {
        let n = rng.gen_range(1..=4);
        let a = random_generator(&mut rng, n);
        cases.push((
            format!("random{i}"),
            a,
            random_hurwitz_coeffs(&mut rng, 2 * n),
        ));
    }
    let mut worst_random: f64 = 0.0;
    for (name, a, m) in &cases {
        let (mm, nn) = mn_pair(m)?;
        let q = q_matrix(a, m)?;
        let q_ref = sylvester_solve_oracle(&mm, &companion_from_coeffs(a), &nn, &gamma(a.n()))?;
        let diff = q.max_abs_diff(&q_ref)?;
        if name.starts_with("random") {
            worst_random = worst_random.max(diff);
        } else {
            recs.push(CheckRecord::below(
                "equivalence",
                format!("q_vs_kronecker_{name}"),
                diff,
                1e-7,
            ));
        }
    }
    if count > 0 {
        recs.push(CheckRecord::below(
            "equivalence",
            format!("q_vs_kronecker_random_max_of_{count}"),
            worst_random,
            1e-7,
        ));
    }
    Ok(recs)
}

/// Constancy of the Hankel solve along `count` random steady trajectories
/// with every mode excited, plus one trajectory with a single mode that
/// must be flagged as singular.
pub fn suite_lemma1(seed: u64, count: usize) -> Result<Vec<CheckRecord>> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x1e11a);
    let mut worst: f64 = 0.0;
    let mut worst_cond: f64 = 0.0;
    let mut singular_hits = 0usize;
    let mut cases: Vec<(CoeffVector<f64>, Vec<f64>, Vec<f64>)> = Vec::new();
    let duff_m = ScenarioConfig::preset("duffing")?.regulator.m_coeffs;
    let duff_a = duffing_true_a(1.0)?;
    cases.push((
        duff_a,
        duff_m.clone(),
        modal_initial_state(&[1.0, 3.0], &[1.0, 0.5], 4),
    ));
    while cases.len() < count.max(1) {
        let n = 2 * rng.gen_range(1..=3);
        let a = random_generator(&mut rng, n);
        let xi0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        cases.push((a, random_hurwitz_coeffs(&mut rng, 2 * n), xi0));
    }
    for (a, m, xi0) in cases.iter().take(count.max(1)) {
        let traj = generator_trajectory(a, m, xi0, 2.0 * PI, 1e-2)?;
        let rep = lemma1_constancy(&traj, a.as_slice())?;
        worst = worst.max(rep.max_deviation);
        worst_cond = worst_cond.max(rep.max_cond);
        singular_hits += rep.singular_count;
    }
    let mut recs = vec![
        CheckRecord::below(
            "lemma1",
            format!("max_deviation_over_{}", count.max(1)),
            worst,
            1e-6,
        ),
        CheckRecord::below(
            "lemma1",
            "singular_samples_with_full_excitation",
            singular_hits as f64,
            0.5,
        ),
        // reciprocal condition stays above 1e-8 under full excitation
        CheckRecord::below("lemma1", "max_hankel_cond_full_excitation", worst_cond, 1e8),
    ];
    // Duffing generator started on the 1 rad/s mode only
    let single = generator_trajectory(
        &duffing_true_a(1.0)?,
        &duff_m,
        &modal_initial_state(&[1.0], &[1.0], 4),
        2.0 * PI,
        1e-2,
    )?;
    let rep = lemma1_constancy(&single, &[9.0, 0.0, 10.0, 0.0])?;
    recs.push(CheckRecord {
        suite: "lemma1",
        name: "single_mode_flagged_singular".into(),
        value: rep.singular_count as f64 / rep.samples as f64,
        limit: 1.0,
        passed: rep.singular_count == rep.samples,
    });
    Ok(recs)
}

/// Analytic gradients of `chi_s` and `alpha_1` against central differences
/// at `count` random states, half of them inside the saturation band.
pub fn suite_gradients(seed: u64, count: usize) -> Result<Vec<CheckRecord>> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9bad);
    let m = ScenarioConfig::preset("duffing")?.regulator.m_coeffs;
    let n = m.len() / 2;
    let mut chi_points = Vec::with_capacity(count);
    let mut deltas = Vec::with_capacity(count);
    for i in 0..count {
        let p: Vec<f64> = (0..3 * n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let sq: f64 = p.iter().map(|x| x * x).sum();
        deltas.push(if i % 2 == 0 {
            sq - 1.0 + rng.gen_range(0.1..0.9)
        } else {
            1e4
        });
        chi_points.push(p);
    }
    let mut worst_chi: f64 = 0.0;
    for (p, &delta) in chi_points.iter().zip(&deltas) {
        let f = |x: &[f64]| chi_s(&x[..2 * n], &x[2 * n..], &m, delta).expect("dims");
        let g = |x: &[f64]| {
            let g = chi_s_grad(&x[..2 * n], &x[2 * n..], &m, delta).expect("dims");
            [g.d_eta, g.d_a].concat()
        };
        worst_chi = worst_chi.max(finite_diff_check(f, g, std::slice::from_ref(p)));
    }

    let cfg = RegulatorConfig {
        r: 2,
        b: 1.0,
        lambda: vec![4.0, 4.0],
        gain: GainMode::Adaptive(0.0),
        rho: RhoSpec::Quadratic { c0: 2.0, c2: 1.0 },
        k_a: 1.0,
        m_coeffs: m.clone(),
        delta: 1e4,
        mapping: MappingMode::Learned,
        a_true: None,
        recursive: false,
    };
    // x = (e, eta, a_hat, k)
    let unpack = |x: &[f64]| RegulatorState {
        x_hat: vec![0.0, 0.0],
        eta: x[1..1 + 2 * n].to_vec(),
        a_hat: x[1 + 2 * n..1 + 3 * n].to_vec(),
        k_hat: x[1 + 3 * n],
    };
    let pts: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let mut p: Vec<f64> = (0..1 + 3 * n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            p.push(rng.gen_range(0.0..5.0));
            p
        })
        .collect();
    let f = |x: &[f64]| {
        alpha1_grad(x[0], &unpack(x), &cfg)
            .expect("valid state")
            .value
    };
    let g = |x: &[f64]| {
        let g = alpha1_grad(x[0], &unpack(x), &cfg).expect("valid state");
        let mut v = vec![g.d_e];
        v.extend(g.d_eta);
        v.extend(g.d_a);
        v.push(g.d_k);
        v
    };
    let worst_alpha = finite_diff_check(f, g, &pts);
    Ok(vec![
        CheckRecord::below(
            "gradients",
            format!("chi_s_rel_err_{count}_points"),
            worst_chi,
            1e-5,
        ),
        CheckRecord::below(
            "gradients",
            format!("alpha1_rel_err_{count}_points"),
            worst_alpha,
            1e-5,
        ),
    ])
}

/// Runs the named suite (`all` for every suite).
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckRecord>> {
    match name {
        "sylvester" => suite_sylvester(seed, 100),
        "equivalence" => suite_equivalence(seed, 100),
        "lemma1" => suite_lemma1(seed, 20),
        "gradients" => suite_gradients(seed, 100),
        "all" => {
            let mut v = Vec::new();
            for s in SUITE_NAMES {
                v.extend(run_suite(s, seed)?);
            }
            Ok(v)
        }
        other => Err(Error::config(format!(
            "unknown suite '{other}' (expected one of {} or all)",
            SUITE_NAMES.join(", ")
        ))),
    }
}
