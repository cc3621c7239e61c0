//! Exosystem and the three plant models, plus a bare integrator chain used
//! for synthetic scenarios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CoeffVector;
use crate::scalar::{lit, Scalar};

/// Harmonic exosystem `v' = S(sigma) v` with `S = [[0, sigma], [-sigma, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exosystem<T> {
    pub sigma: T,
    pub v: [T; 2],
}

impl<T: Scalar> Exosystem<T> {
    pub fn new(sigma: T, v: [T; 2]) -> Self {
        Self { sigma, v }
    }

    /// Exosystem producing `A cos(omega t + phase)` as its first component.
    pub fn cosine(amplitude: T, omega: T, phase: T) -> Self {
        Self {
            sigma: omega,
            v: [amplitude * phase.cos(), -amplitude * phase.sin()],
        }
    }

    pub fn rhs(&self) -> [T; 2] {
        exo_rhs(self.sigma, &self.v)
    }

    /// Amplitude `||v||`, conserved by the flow.
    pub fn amplitude(&self) -> T {
        self.v[0].hypot(self.v[1])
    }

    /// Phase `psi` with `v = A (cos psi, -sin psi)`.
    pub fn phase(&self) -> T {
        (-self.v[1]).atan2(self.v[0])
    }
}

pub fn exo_rhs<T: Scalar>(sigma: T, v: &[T]) -> [T; 2] {
    [sigma * v[1], -sigma * v[0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuffingParams<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
}

impl<T: Scalar> Default for DuffingParams<T> {
    fn default() -> Self {
        Self {
            c1: lit(1.5),
            c2: lit(-2.0),
            c3: lit(0.5),
        }
    }
}

/// `x1' = x2`, `x2' = -c1 x1 - c2 x1^3 - c3 x2 + u + d`.
pub fn duffing_rhs<T: Scalar>(x: &[T], u: T, d: T, p: &DuffingParams<T>) -> [T; 2] {
    let (x1, x2) = (x[0], x[1]);
    [x2, -p.c1 * x1 - p.c2 * x1 * x1 * x1 - p.c3 * x2 + u + d]
}

/// Generator coefficients of the Duffing steady-state filter output:
/// `(9 sigma^4, 0, 10 sigma^2, 0)`.
pub fn duffing_true_a<T: Scalar>(sigma: T) -> Result<CoeffVector<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::invalid("sigma must be positive"));
    }
    let s2 = sigma * sigma;
    CoeffVector::new(vec![
        lit::<T>(9.0) * s2 * s2,
        T::zero(),
        lit::<T>(10.0) * s2,
        T::zero(),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstrParams<T> {
    pub gamma: T,
    pub beta: T,
    /// Adiabatic temperature rise.
    pub b_rise: T,
    pub da: T,
}

impl<T: Scalar> Default for CstrParams<T> {
    fn default() -> Self {
        Self {
            gamma: lit(20.0),
            beta: lit(0.3),
            b_rise: lit(8.0),
            da: lit(0.072),
        }
    }
}

/// Reaction rate `Da (1 - x1) exp(x2 / (1 + x2 / gamma))`.
pub fn cstr_reaction<T: Scalar>(x1: T, x2: T, p: &CstrParams<T>) -> Result<T> {
    let den = T::one() + x2 / p.gamma;
    if den == T::zero() || !den.is_finite() {
        return Err(Error::Domain {
            t: f64::NAN,
            msg: format!("CSTR exponent pole at x2 = {}", x2),
        });
    }
    Ok(p.da * (T::one() - x1) * (x2 / den).exp())
}

pub fn cstr_rhs<T: Scalar>(x: &[T], u: T, d: T, p: &CstrParams<T>) -> Result<[T; 2]> {
    let (x1, x2) = (x[0], x[1]);
    let r = cstr_reaction(x1, x2, p)?;
    Ok([-x1 + r, -x2 + p.b_rise * r + p.beta * (u - x2) + d])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BioreactorParams<T> {
    /// Dilution rate.
    pub d: T,
    pub y: T,
    pub alpha: T,
    pub beta: T,
    /// Nominal maximum growth rate.
    pub mu_m: T,
    pub km: T,
    pub ki: T,
    pub xm: T,
}

impl<T: Scalar> Default for BioreactorParams<T> {
    fn default() -> Self {
        Self {
            d: lit(0.164),
            y: lit(0.4),
            alpha: lit(2.2),
            beta: lit(0.2),
            mu_m: lit(0.48),
            km: lit(1.2),
            ki: lit(22.0),
            xm: lit(50.0),
        }
    }
}

/// `mu = mu_m(t) (1 - x3/xm) x2 / (Km + x2 + x2^2 / KI)`.
pub fn growth_rate_mu<T: Scalar>(x2: T, x3: T, mu_m_t: T, p: &BioreactorParams<T>) -> Result<T> {
    let den = p.km + x2 + x2 * x2 / p.ki;
    if !(den > T::zero()) {
        return Err(Error::Domain {
            t: f64::NAN,
            msg: format!("growth-rate denominator {} is not positive", den),
        });
    }
    Ok(mu_m_t * (T::one() - x3 / p.xm) * x2 / den)
}

/// The disturbance enters through `mu_m(t) = mu_m* + d`.
pub fn bioreactor_rhs<T: Scalar>(x: &[T], u: T, d: T, p: &BioreactorParams<T>) -> Result<[T; 3]> {
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    let mu = growth_rate_mu(x2, x3, p.mu_m + d, p)?;
    Ok([
        -p.d * x1 + mu * x1,
        p.d * (u - x2) - mu * x1 / p.y,
        -p.d * x3 + (p.alpha * mu + p.beta) * x1,
    ])
}

/// Integrator chain `x_i' = x_{i+1}`, `x_r' = drift x_1 + b u + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams<T> {
    pub r: usize,
    pub b: T,
    pub drift: T,
}

pub fn chain_rhs<T: Scalar>(x: &[T], u: T, d: T, p: &ChainParams<T>, out: &mut [T]) {
    let r = p.r;
    out[..r - 1].copy_from_slice(&x[1..r]);
    out[r - 1] = p.drift * x[0] + p.b * u + d;
}

/// What the output has to follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference<T> {
    /// First component of the exosystem state.
    ExoV1,
    Constant(T),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plant<T> {
    Duffing(DuffingParams<T>),
    Cstr(CstrParams<T>),
    Bioreactor(BioreactorParams<T>),
    Chain(ChainParams<T>),
}

impl<T: Scalar> Plant<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Plant::Duffing(_) => "duffing",
            Plant::Cstr(_) => "cstr",
            Plant::Bioreactor(_) => "bioreactor",
            Plant::Chain(_) => "chain",
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            Plant::Duffing(_) | Plant::Cstr(_) => 2,
            Plant::Bioreactor(_) => 3,
            Plant::Chain(p) => p.r,
        }
    }

    pub fn relative_degree(&self) -> usize {
        match self {
            Plant::Duffing(_) => 2,
            Plant::Cstr(_) | Plant::Bioreactor(_) => 1,
            Plant::Chain(p) => p.r,
        }
    }

    /// High-frequency gain `b`.
    pub fn b(&self) -> T {
        match self {
            Plant::Duffing(_) => T::one(),
            Plant::Cstr(p) => p.beta,
            Plant::Bioreactor(p) => p.d,
            Plant::Chain(p) => p.b,
        }
    }

    /// Index of the measured output within the plant state.
    pub fn output_index(&self) -> usize {
        match self {
            Plant::Duffing(_) | Plant::Chain(_) => 0,
            Plant::Cstr(_) | Plant::Bioreactor(_) => 1,
        }
    }

    pub fn default_reference(&self) -> Reference<T> {
        match self {
            Plant::Duffing(_) => Reference::ExoV1,
            Plant::Cstr(_) => Reference::Constant(lit(10.0)),
            Plant::Bioreactor(_) => Reference::Constant(lit(2.0)),
            Plant::Chain(_) => Reference::Constant(T::zero()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Plant::Duffing(_) => true,
            Plant::Cstr(p) => p.beta > T::zero() && p.gamma != T::zero(),
            Plant::Bioreactor(p) => {
                p.d > T::zero() && p.y != T::zero() && p.ki != T::zero() && p.xm != T::zero()
            }
            Plant::Chain(p) => p.r >= 1 && p.b > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "invalid {} plant parameters",
                self.name()
            )))
        }
    }

    /// Plant vector field written into `out`.
    pub fn rhs_into(&self, x: &[T], u: T, d: T, out: &mut [T]) -> Result<()> {
        match self {
            Plant::Duffing(p) => out.copy_from_slice(&duffing_rhs(x, u, d, p)),
            Plant::Cstr(p) => out.copy_from_slice(&cstr_rhs(x, u, d, p)?),
            Plant::Bioreactor(p) => out.copy_from_slice(&bioreactor_rhs(x, u, d, p)?),
            Plant::Chain(p) => chain_rhs(x, u, d, p, out),
        }
        Ok(())
    }
}

/// `(y_r, e)` for output `y`.
pub fn reference_and_error<T: Scalar>(reference: Reference<T>, v: &[T], y: T) -> (T, T) {
    let yr = match reference {
        Reference::ExoV1 => v[0],
        Reference::Constant(c) => c,
    };
    (yr, y - yr)
}
