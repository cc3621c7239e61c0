//! Input-driven filter, backstepping virtual controls, adaptive gain and the
//! assembled closed-loop vector field.

use crate::error::{Error, Result};
use crate::internal_model::{chi_s, chi_s_grad, im_rhs_into, learning_rhs_into};
use crate::linalg::{is_hurwitz, Matrix};
use crate::plants::{exo_rhs, reference_and_error, Plant, Reference};
use crate::scalar::{dot, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainMode<T> {
    /// Constant gain `k*`.
    Fixed(T),
    /// Adaptive gain `k' = rho(e1) e1^2` started from the given value.
    Adaptive(T),
}

impl<T: Scalar> GainMode<T> {
    pub fn initial(&self) -> T {
        match *self {
            GainMode::Fixed(k) | GainMode::Adaptive(k) => k,
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, GainMode::Adaptive(_))
    }
}

/// Smooth positive function `rho(e) >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoSpec<T> {
    Constant(T),
    /// `c0 + c2 e^2`
    Quadratic {
        c0: T,
        c2: T,
    },
}

impl<T: Scalar> RhoSpec<T> {
    pub fn from_name(name: &str, params: &[T]) -> Result<Self> {
        match (name, params) {
            ("constant", [c]) => Ok(RhoSpec::Constant(*c)),
            ("quadratic", [c0, c2]) => Ok(RhoSpec::Quadratic { c0: *c0, c2: *c2 }),
            ("constant", _) | ("quadratic", _) => Err(Error::config(format!(
                "rho '{name}' got {} parameters",
                params.len()
            ))),
            _ => Err(Error::config(format!("unknown rho function '{name}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RhoSpec::Constant(c) => c >= T::one(),
            RhoSpec::Quadratic { c0, c2 } => c0 >= T::one() && c2 >= T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("rho must satisfy rho(e) >= 1 for all e"))
        }
    }
}

pub fn rho_eval<T: Scalar>(spec: &RhoSpec<T>, e: T) -> T {
    match *spec {
        RhoSpec::Constant(c) => c,
        RhoSpec::Quadratic { c0, c2 } => c0 + c2 * e * e,
    }
}

pub fn rho_deriv<T: Scalar>(spec: &RhoSpec<T>, e: T) -> T {
    match *spec {
        RhoSpec::Constant(_) => T::zero(),
        RhoSpec::Quadratic { c2, .. } => lit::<T>(2.0) * c2 * e,
    }
}

/// `rho(e1) e1^2`
pub fn adaptive_gain_rhs<T: Scalar>(eps1: T, rho: &RhoSpec<T>) -> T {
    rho_eval(rho, eps1) * eps1 * eps1
}

/// Source of the steady-state mapping inside `alpha_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingMode {
    /// `chi_s(eta, a_hat)` with `a_hat` learned online.
    Learned,
    /// `chi_s(eta, a)` with the true coefficients; no learning.
    Oracle,
    /// `chi_s = 0`.
    None,
}

impl MappingMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "learned" => Ok(MappingMode::Learned),
            "oracle" => Ok(MappingMode::Oracle),
            "none" => Ok(MappingMode::None),
            other => Err(Error::config(format!(
                "unknown mapping mode '{other}' (expected learned, oracle or none)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MappingMode::Learned => "learned",
            MappingMode::Oracle => "oracle",
            MappingMode::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorConfig<T> {
    pub r: usize,
    pub b: T,
    pub lambda: Vec<T>,
    pub gain: GainMode<T>,
    pub rho: RhoSpec<T>,
    pub k_a: T,
    pub m_coeffs: Vec<T>,
    pub delta: T,
    pub mapping: MappingMode,
    /// Coefficients used in oracle mode.
    pub a_true: Option<Vec<T>>,
    /// Numerical recursive differentiation for `r >= 3`.
    pub recursive: bool,
}

impl<T: Scalar> RegulatorConfig<T> {
    /// Generator order `n`.
    pub fn n(&self) -> usize {
        self.m_coeffs.len() / 2
    }

    pub fn has_filter(&self) -> bool {
        self.r >= 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::config("relative degree must be at least 1"));
        }
        if self.r >= 3 && !self.recursive {
            return Err(Error::config(format!(
                "relative degree {} needs regulator.recursive = true",
                self.r
            )));
        }
        if !(self.b > T::zero()) {
            return Err(Error::config("b must be positive"));
        }
        if self.m_coeffs.is_empty() || !self.m_coeffs.len().is_multiple_of(2) {
            return Err(Error::config("m_coeffs must have even, nonzero length"));
        }
        if !(self.k_a > T::zero()) {
            return Err(Error::config("k_a must be positive"));
        }
        if !(self.delta > T::zero()) {
            return Err(Error::config("delta must be positive"));
        }
        self.rho.validate()?;
        let (m, _) = crate::linalg::mn_pair(&self.m_coeffs)?;
        if !is_hurwitz(&m, T::zero())? {
            return Err(Error::config("m_coeffs do not give a Hurwitz M"));
        }
        if self.has_filter() {
            if self.lambda.len() != self.r {
                return Err(Error::config(format!(
                    "lambda needs {} entries, got {}",
                    self.r,
                    self.lambda.len()
                )));
            }
            if !is_hurwitz(&filter_matrix(&self.lambda), T::zero())? {
                return Err(Error::config(
                    "filter matrix A_c - lambda C_c is not Hurwitz",
                ));
            }
        }
        if self.mapping == MappingMode::Oracle {
            match &self.a_true {
                Some(a) if a.len() == self.n() => {}
                _ => {
                    return Err(Error::config(
                        "oracle mapping needs true coefficients of length n",
                    ))
                }
            }
        }
        Ok(())
    }
}

/// `A = A_c - lambda C_c`: shift matrix with `-lambda` in the first column.
pub fn filter_matrix<T: Scalar>(lambda: &[T]) -> Matrix<T> {
    let r = lambda.len();
    let mut a = Matrix::zeros(r, r);
    for i in 0..r {
        a[(i, 0)] = -lambda[i];
        if i + 1 < r {
            a[(i, i + 1)] += T::one();
        }
    }
    a
}

/// `(A_c - lambda C_c) x_hat + B_c u`.
pub fn filter_rhs<T: Scalar>(x_hat: &[T], u: T, lambda: &[T]) -> Result<Vec<T>> {
    let r = x_hat.len();
    if r < 2 {
        return Err(Error::config(
            "the input-driven filter needs relative degree >= 2",
        ));
    }
    if lambda.len() != r {
        return Err(Error::invalid("lambda and x_hat lengths differ"));
    }
    let mut out = vec![T::zero(); r];
    filter_rhs_into(x_hat, u, lambda, &mut out);
    Ok(out)
}

fn filter_rhs_into<T: Scalar>(x_hat: &[T], u: T, lambda: &[T], out: &mut [T]) {
    let r = x_hat.len();
    for i in 0..r {
        let next = if i + 1 < r { x_hat[i + 1] } else { u };
        out[i] = next - lambda[i] * x_hat[0];
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegulatorState<T> {
    pub x_hat: Vec<T>,
    pub eta: Vec<T>,
    pub a_hat: Vec<T>,
    pub k_hat: T,
}

impl<T: Scalar> RegulatorState<T> {
    pub fn zeros(cfg: &RegulatorConfig<T>) -> Self {
        Self {
            x_hat: vec![T::zero(); if cfg.has_filter() { cfg.r } else { 0 }],
            eta: vec![T::zero(); 2 * cfg.n()],
            a_hat: vec![T::zero(); cfg.n()],
            k_hat: cfg.gain.initial(),
        }
    }
}

/// `alpha_1` and its partial derivatives. `d_a` is taken with respect to the
/// coefficient vector that feeds `chi_s` (learned or true).
#[derive(Debug, Clone, PartialEq)]
pub struct Alpha1Grad<T> {
    pub value: T,
    pub d_e: T,
    pub d_eta: Vec<T>,
    pub d_a: Vec<T>,
    pub d_k: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonChain<T> {
    pub eps: Vec<T>,
    pub alpha: Vec<T>,
    pub u: T,
}

/// Everything the controller produces at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerEval<T> {
    pub chain: EpsilonChain<T>,
    pub x_hat_dot: Vec<T>,
    pub eta_dot: Vec<T>,
    pub a_hat_dot: Vec<T>,
    pub k_dot: T,
}

/// Borrowed view of the controller state with the coefficient vector that
/// feeds `chi_s` already resolved.
#[derive(Clone, Copy)]
struct View<'a, T> {
    cfg: &'a RegulatorConfig<T>,
    e: T,
    x_hat: &'a [T],
    eta: &'a [T],
    a_map: &'a [T],
    k: T,
}

impl<T: Scalar> View<'_, T> {
    fn learned(&self) -> bool {
        self.cfg.mapping == MappingMode::Learned
    }

    fn k_dot(&self) -> T {
        if self.cfg.gain.is_adaptive() {
            adaptive_gain_rhs(self.e, &self.cfg.rho)
        } else {
            T::zero()
        }
    }

    fn eta_dot(&self, drive: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.eta.len()];
        im_rhs_into(&self.cfg.m_coeffs, self.eta, drive, &mut out)?;
        Ok(out)
    }

    fn a_dot(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.a_map.len()];
        if self.learned() {
            learning_rhs_into(self.cfg.k_a, self.eta, self.a_map, &mut out);
        }
        out
    }

    fn chi_s(&self) -> Result<T> {
        if self.cfg.mapping == MappingMode::None {
            return Ok(T::zero());
        }
        chi_s(self.eta, self.a_map, &self.cfg.m_coeffs, self.cfg.delta)
    }

    fn alpha1(&self) -> Result<T> {
        let rho = rho_eval(&self.cfg.rho, self.e);
        Ok(-self.k * rho * self.e + self.chi_s()?)
    }

    fn alpha1_grad(&self) -> Result<Alpha1Grad<T>> {
        let cfg = self.cfg;
        let e = self.e;
        let rho = rho_eval(&cfg.rho, e);
        let drho = rho_deriv(&cfg.rho, e);
        let (chi, d_eta, d_a) = match cfg.mapping {
            MappingMode::None => (
                T::zero(),
                vec![T::zero(); self.eta.len()],
                vec![T::zero(); self.a_map.len()],
            ),
            _ => {
                let g = chi_s_grad(self.eta, self.a_map, &cfg.m_coeffs, cfg.delta)?;
                (g.value, g.d_eta, g.d_a)
            }
        };
        Ok(Alpha1Grad {
            value: -self.k * rho * e + chi,
            d_e: -self.k * (drho * e + rho),
            d_eta,
            d_a,
            d_k: -rho * e,
        })
    }

    /// Closed-form `alpha_2`.
    fn alpha2(&self) -> Result<T> {
        let cfg = self.cfg;
        let e = self.e;
        let rho = rho_eval(&cfg.rho, e);
        let k = self.k;
        let g1 = self.alpha1_grad()?;
        let alpha1 = g1.value;
        let (da_de, da_dk) = (g1.d_e, g1.d_k);
        let (g_eta, g_a) = match cfg.mapping {
            MappingMode::None => (None, None),
            _ => (Some(g1.d_eta), Some(g1.d_a)),
        };
        let eps2 = self.x_hat[1] - alpha1;
        let mut a2 = -cfg.b * e - eps2
            + cfg.lambda[1] * self.x_hat[0]
            + cfg.b * da_de * (eps2 - k * rho * e)
            - lit::<T>(0.5) * eps2 * da_de * da_de
            + da_dk * self.k_dot();
        if let Some(g) = g_eta {
            // eta_dot = (eta_2, ..., eta_2n, x_hat_2 - m . eta)
            let last = g.len() - 1;
            a2 += dot(&g[..last], &self.eta[1..])
                + g[last] * (self.x_hat[1] - dot(&cfg.m_coeffs, self.eta));
        }
        if let (Some(g), true) = (g_a, self.learned()) {
            let mut buf = [T::zero(); 32];
            if g.len() <= buf.len() {
                let a_dot = &mut buf[..g.len()];
                learning_rhs_into(cfg.k_a, self.eta, self.a_map, a_dot);
                a2 += dot(&g, a_dot);
            } else {
                a2 += dot(&g, &self.a_dot());
            }
        }
        Ok(a2)
    }

    fn alpha(&self, i: usize) -> Result<T> {
        match i {
            1 => self.alpha1(),
            2 => self.alpha2(),
            _ => self.alpha_recursive(i),
        }
    }

    fn eps(&self, i: usize) -> Result<T> {
        if i == 1 {
            Ok(self.e)
        } else {
            Ok(self.x_hat[i - 1] - self.alpha(i - 1)?)
        }
    }

    /// `alpha_i` for `i >= 2` with the partials of `alpha_{i-1}` taken by
    /// forward differences: one directional derivative along the known part
    /// of the flow and one partial in `e`.
    fn alpha_recursive(&self, i: usize) -> Result<T> {
        let cfg = self.cfg;
        let e = self.e;
        let rho = rho_eval(&cfg.rho, e);
        let prev = self.alpha(i - 1)?;
        let eps_i = self.x_hat[i - 1] - prev;
        let eps_im1 = self.eps(i - 1)?;
        let eps2 = self.eps(2)?;

        // flow of the arguments alpha_{i-1} depends on
        let mut xh_dot = vec![T::zero(); self.x_hat.len()];
        for j in 0..i - 1 {
            xh_dot[j] = self.x_hat[j + 1] - cfg.lambda[j] * self.x_hat[0];
        }
        let eta_dot = self.eta_dot(self.x_hat[1])?;
        let a_dot = self.a_dot();
        let k_dot = self.k_dot();

        let scale = |v: &[T]| v.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let dir_norm = scale(&xh_dot)
            .max(scale(&eta_dot))
            .max(scale(&a_dot))
            .max(k_dot.abs());
        let h = lit::<T>(1e-7) / dir_norm;
        let shift =
            |x: &[T], d: &[T]| -> Vec<T> { x.iter().zip(d).map(|(&a, &b)| a + h * b).collect() };
        let xh2 = shift(self.x_hat, &xh_dot);
        let eta2 = shift(self.eta, &eta_dot);
        let a2 = shift(self.a_map, &a_dot);
        let moved = View {
            cfg,
            e,
            x_hat: &xh2,
            eta: &eta2,
            a_map: &a2,
            k: self.k + h * k_dot,
        };
        let directional = (moved.alpha(i - 1)? - prev) / h;

        let he = lit::<T>(1e-7) * T::one().max(e.abs());
        let bumped = View { e: e + he, ..*self };
        let da_de = (bumped.alpha(i - 1)? - prev) / he;

        let cross = if i == 2 { cfg.b * e } else { eps_im1 };
        Ok(-cross - eps_i
            + cfg.lambda[i - 1] * self.x_hat[0]
            + directional
            + cfg.b * da_de * (eps2 - self.k * rho * e)
            - lit::<T>(0.5) * eps_i * da_de * da_de)
    }
}

fn resolve_mapping<'a, T: Scalar>(
    cfg: &'a RegulatorConfig<T>,
    st: &'a RegulatorState<T>,
) -> Result<&'a [T]> {
    match cfg.mapping {
        MappingMode::Oracle => cfg
            .a_true
            .as_deref()
            .ok_or_else(|| Error::config("oracle mapping needs true coefficients")),
        _ => Ok(&st.a_hat),
    }
}

fn check_state<T: Scalar>(cfg: &RegulatorConfig<T>, st: &RegulatorState<T>) -> Result<()> {
    let n = cfg.n();
    let r_hat = if cfg.has_filter() { cfg.r } else { 0 };
    if st.x_hat.len() != r_hat || st.eta.len() != 2 * n || st.a_hat.len() != n {
        return Err(Error::invalid(
            "regulator state dimensions do not match the configuration",
        ));
    }
    if cfg.r >= 3 && !cfg.recursive {
        return Err(Error::config(format!(
            "relative degree {} needs the recursive differentiation mode",
            cfg.r
        )));
    }
    Ok(())
}

/// `alpha_i` through the numerical recursion even where a closed form exists.
pub fn alpha_numeric<T: Scalar>(
    i: usize,
    e: T,
    st: &RegulatorState<T>,
    cfg: &RegulatorConfig<T>,
) -> Result<T> {
    check_state(cfg, st)?;
    if i < 2 || i > cfg.r {
        return Err(Error::invalid(format!(
            "alpha index {i} outside 2..={}",
            cfg.r
        )));
    }
    View {
        cfg,
        e,
        x_hat: &st.x_hat,
        eta: &st.eta,
        a_map: resolve_mapping(cfg, st)?,
        k: st.k_hat,
    }
    .alpha_recursive(i)
}

/// Analytic partials of `alpha_1` in `e`, `eta`, the mapping coefficients
/// and `k`.
pub fn alpha1_grad<T: Scalar>(
    e: T,
    st: &RegulatorState<T>,
    cfg: &RegulatorConfig<T>,
) -> Result<Alpha1Grad<T>> {
    check_state(cfg, st)?;
    View {
        cfg,
        e,
        x_hat: &st.x_hat,
        eta: &st.eta,
        a_map: resolve_mapping(cfg, st)?,
        k: st.k_hat,
    }
    .alpha1_grad()
}

/// Virtual controls `alpha_1..alpha_r`, the errors `eps_i` and `u = alpha_r`.
pub fn alpha_chain<T: Scalar>(
    e: T,
    st: &RegulatorState<T>,
    cfg: &RegulatorConfig<T>,
) -> Result<EpsilonChain<T>> {
    check_state(cfg, st)?;
    let view = View {
        cfg,
        e,
        x_hat: &st.x_hat,
        eta: &st.eta,
        a_map: resolve_mapping(cfg, st)?,
        k: st.k_hat,
    };
    let mut eps = Vec::with_capacity(cfg.r);
    let mut alpha = Vec::with_capacity(cfg.r);
    eps.push(e);
    for i in 1..=cfg.r {
        let a = view.alpha(i)?;
        alpha.push(a);
        if i < cfg.r {
            eps.push(st.x_hat[i] - a);
        }
    }
    let u = alpha[cfg.r - 1];
    Ok(EpsilonChain { eps, alpha, u })
}

/// Control plus the derivatives of every controller state.
pub fn controller_eval<T: Scalar>(
    e: T,
    st: &RegulatorState<T>,
    cfg: &RegulatorConfig<T>,
) -> Result<ControllerEval<T>> {
    let chain = alpha_chain(e, st, cfg)?;
    let u = chain.u;
    let view = View {
        cfg,
        e,
        x_hat: &st.x_hat,
        eta: &st.eta,
        a_map: &st.a_hat,
        k: st.k_hat,
    };
    let (x_hat_dot, drive) = if cfg.has_filter() {
        let mut out = vec![T::zero(); cfg.r];
        filter_rhs_into(&st.x_hat, u, &cfg.lambda, &mut out);
        (out, st.x_hat[1])
    } else {
        (Vec::new(), u)
    };
    Ok(ControllerEval {
        chain,
        x_hat_dot,
        eta_dot: view.eta_dot(drive)?,
        a_hat_dot: view.a_dot(),
        k_dot: view.k_dot(),
    })
}

/// Offsets of each block in the flat closed-loop state
/// `(v, w, x, x_hat, eta, a_hat, k_hat)`, where `w` is the disturbance
/// exosystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub v: usize,
    pub w: usize,
    pub x: usize,
    pub x_hat: usize,
    pub eta: usize,
    pub a_hat: usize,
    pub k_hat: usize,
    pub len: usize,
    pub nx: usize,
    pub r_hat: usize,
    pub n: usize,
}

impl Layout {
    pub fn new(nx: usize, r_hat: usize, n: usize) -> Self {
        let v = 0;
        let w = 2;
        let x = 4;
        let x_hat = x + nx;
        let eta = x_hat + r_hat;
        let a_hat = eta + 2 * n;
        let k_hat = a_hat + n;
        Self {
            v,
            w,
            x,
            x_hat,
            eta,
            a_hat,
            k_hat,
            len: k_hat + 1,
            nx,
            r_hat,
            n,
        }
    }
}

/// The full augmented system: plant, reference exosystem, disturbance
/// exosystem and regulator.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop<T> {
    pub plant: Plant<T>,
    pub reference: Reference<T>,
    /// Reference exosystem frequency.
    pub sigma: T,
    /// Disturbance exosystem frequency.
    pub omega: T,
    pub regulator: RegulatorConfig<T>,
    /// Force `u = 0` regardless of the controller.
    pub open_loop: bool,
}

/// Signals that are not states but belong in a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outputs<T> {
    pub y: T,
    pub yr: T,
    pub e: T,
    pub u: T,
    pub d: T,
}

impl<T: Scalar> ClosedLoop<T> {
    pub fn layout(&self) -> Layout {
        Layout::new(
            self.plant.state_dim(),
            if self.regulator.has_filter() {
                self.regulator.r
            } else {
                0
            },
            self.regulator.n(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.regulator.validate()?;
        if self.regulator.r != self.plant.relative_degree() {
            return Err(Error::config(format!(
                "regulator relative degree {} does not match the {} plant ({})",
                self.regulator.r,
                self.plant.name(),
                self.plant.relative_degree()
            )));
        }
        Ok(())
    }

    pub fn regulator_state(&self, s: &[T]) -> RegulatorState<T> {
        let l = self.layout();
        RegulatorState {
            x_hat: s[l.x_hat..l.eta].to_vec(),
            eta: s[l.eta..l.a_hat].to_vec(),
            a_hat: s[l.a_hat..l.k_hat].to_vec(),
            k_hat: s[l.k_hat],
        }
    }

    /// Output, tracking error and control at state `s` (no derivatives).
    pub fn outputs(&self, s: &[T]) -> Result<Outputs<T>> {
        let l = self.layout();
        let y = s[l.x + self.plant.output_index()];
        let (yr, e) = reference_and_error(self.reference, &s[l.v..l.v + 2], y);
        let u = if self.open_loop {
            T::zero()
        } else {
            alpha_chain(e, &self.regulator_state(s), &self.regulator)?.u
        };
        Ok(Outputs {
            y,
            yr,
            e,
            u,
            d: s[l.w],
        })
    }

    /// Closed-loop vector field at time `t`, written into `out`.
    pub fn rhs_into(&self, t: f64, s: &[T], out: &mut [T]) -> Result<Outputs<T>> {
        let l = self.layout();
        let cfg = &self.regulator;
        let y = s[l.x + self.plant.output_index()];
        let (yr, e) = reference_and_error(self.reference, &s[l.v..l.v + 2], y);
        if cfg.r >= 3 && !cfg.recursive {
            return Err(Error::config(format!(
                "relative degree {} needs the recursive differentiation mode",
                cfg.r
            )));
        }
        let a_hat = &s[l.a_hat..l.k_hat];
        let view = View {
            cfg,
            e,
            x_hat: &s[l.x_hat..l.eta],
            eta: &s[l.eta..l.a_hat],
            a_map: match cfg.mapping {
                MappingMode::Oracle => cfg
                    .a_true
                    .as_deref()
                    .ok_or_else(|| Error::config("oracle mapping needs true coefficients"))?,
                _ => a_hat,
            },
            k: s[l.k_hat],
        };
        let u_ctrl = view.alpha(cfg.r)?;
        let u = if self.open_loop { T::zero() } else { u_ctrl };
        let d = s[l.w];

        out[l.v..l.v + 2].copy_from_slice(&exo_rhs(self.sigma, &s[l.v..l.v + 2]));
        out[l.w..l.w + 2].copy_from_slice(&exo_rhs(self.omega, &s[l.w..l.w + 2]));
        self.plant
            .rhs_into(&s[l.x..l.x_hat], u, d, &mut out[l.x..l.x_hat])
            .map_err(|err| err.at_time(t))?;
        let drive = if cfg.has_filter() {
            filter_rhs_into(view.x_hat, u_ctrl, &cfg.lambda, &mut out[l.x_hat..l.eta]);
            view.x_hat[1]
        } else {
            u_ctrl
        };
        im_rhs_into(&cfg.m_coeffs, view.eta, drive, &mut out[l.eta..l.a_hat])?;
        let a_out = &mut out[l.a_hat..l.k_hat];
        if view.learned() {
            learning_rhs_into(cfg.k_a, view.eta, a_hat, a_out);
        } else {
            a_out.fill(T::zero());
        }
        out[l.k_hat] = view.k_dot();
        Ok(Outputs { y, yr, e, u, d })
    }

    pub fn rhs(&self, t: f64, s: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); s.len()];
        self.rhs_into(t, s, &mut out)?;
        Ok(out)
    }
}
