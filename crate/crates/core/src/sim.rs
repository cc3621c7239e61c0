//! Fixed-step RK4 integration of the closed loop, sampled traces and
//! convergence metrics.

use crate::error::{Error, Result};
use crate::regulator::{ClosedLoop, MappingMode};
use crate::scalar::{lit, Scalar};

/// Any state entry above this magnitude aborts a simulation.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Scratch buffers for [`Rk4`].
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Scalar> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![T::zero(); dim],
            k2: vec![T::zero(); dim],
            k3: vec![T::zero(); dim],
            k4: vec![T::zero(); dim],
            tmp: vec![T::zero(); dim],
        }
    }

    /// Advances `y` in place by one classical RK4 step.
    pub fn step<F>(&mut self, f: &mut F, t: T, y: &mut [T], h: T) -> Result<()>
    where
        F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    {
        let half = lit::<T>(0.5) * h;
        f(t, y, &mut self.k1)?;
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        f(t + half, &self.tmp, &mut self.k2)?;
        for i in 0..y.len() {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        f(t + half, &self.tmp, &mut self.k3)?;
        for i in 0..y.len() {
            self.tmp[i] = y[i] + h * self.k3[i];
        }
        f(t + h, &self.tmp, &mut self.k4)?;
        let sixth = h / lit(6.0);
        let two = lit::<T>(2.0);
        for i in 0..y.len() {
            y[i] += sixth * (self.k1[i] + two * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
        Ok(())
    }
}

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<T, F>(mut f: F, y: &[T], t: T, h: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    if !(h > T::zero()) {
        return Err(Error::invalid("step size must be positive"));
    }
    let mut out = y.to_vec();
    Rk4::new(y.len()).step(&mut f, t, &mut out, h)?;
    Ok(out)
}

/// Initial values of every closed-loop block. Empty vectors mean zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState<T> {
    pub v: [T; 2],
    /// Disturbance exosystem state; `d(t)` is its first component.
    pub w: [T; 2],
    pub x: Vec<T>,
    pub x_hat: Vec<T>,
    pub eta: Vec<T>,
    pub a_hat: Vec<T>,
    pub k_hat: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub closed_loop: ClosedLoop<T>,
    pub init: InitialState<T>,
    pub horizon: T,
    pub step: T,
    pub sample_every: usize,
    /// Coefficients the learner should converge to, when known.
    pub a_true: Option<Vec<T>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        self.closed_loop.validate()?;
        if !(self.step > T::zero()) {
            return Err(Error::config("sim.step must be positive"));
        }
        if !(self.horizon >= self.step) {
            return Err(Error::config("sim.horizon must be at least one step"));
        }
        if self.sample_every == 0 {
            return Err(Error::config("sim.sample_every must be at least 1"));
        }
        let l = self.closed_loop.layout();
        let fits = |v: &[T], want: usize| v.is_empty() || v.len() == want;
        if !(self.init.x.len() == l.nx
            && fits(&self.init.x_hat, l.r_hat)
            && fits(&self.init.eta, 2 * l.n)
            && fits(&self.init.a_hat, l.n))
        {
            return Err(Error::config(format!(
                "initial state dimensions do not match the scenario (x: {}, x_hat: {}, eta: {}, a_hat: {})",
                l.nx,
                l.r_hat,
                2 * l.n,
                l.n
            )));
        }
        Ok(())
    }

    /// Flat initial state vector in [`crate::regulator::Layout`] order.
    pub fn initial_vector(&self) -> Vec<T> {
        let l = self.closed_loop.layout();
        let mut s = vec![T::zero(); l.len];
        s[l.v..l.v + 2].copy_from_slice(&self.init.v);
        s[l.w..l.w + 2].copy_from_slice(&self.init.w);
        s[l.x..l.x_hat].copy_from_slice(&self.init.x);
        if !self.init.x_hat.is_empty() {
            s[l.x_hat..l.eta].copy_from_slice(&self.init.x_hat);
        }
        if !self.init.eta.is_empty() {
            s[l.eta..l.a_hat].copy_from_slice(&self.init.eta);
        }
        if !self.init.a_hat.is_empty() {
            s[l.a_hat..l.k_hat].copy_from_slice(&self.init.a_hat);
        }
        if self.closed_loop.regulator.mapping == MappingMode::Oracle {
            if let Some(a) = &self.closed_loop.regulator.a_true {
                s[l.a_hat..l.k_hat].copy_from_slice(a);
            }
        }
        s[l.k_hat] = self.init.k_hat;
        s
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step)
            .round()
            .to_usize()
            .unwrap_or(0)
            .max(1)
    }

    /// Same scenario at half the step, sampling the same instants.
    pub fn halved(&self) -> Self {
        Self {
            step: self.step * lit(0.5),
            sample_every: self.sample_every * 2,
            ..self.clone()
        }
    }

    /// CSV column names: `t, v1, v2, x.., y, e, xhat.., eta.., ahat.., khat, u`.
    pub fn column_names(&self) -> Vec<String> {
        let l = self.closed_loop.layout();
        let mut names: Vec<String> = vec!["t".into(), "v1".into(), "v2".into()];
        names.extend((1..=l.nx).map(|i| format!("x{i}")));
        names.push("y".into());
        names.push("e".into());
        names.extend((1..=l.r_hat).map(|i| format!("xhat{i}")));
        names.extend((1..=2 * l.n).map(|i| format!("eta{i}")));
        names.extend((1..=l.n).map(|i| format!("ahat{i}")));
        names.push("khat".into());
        names.push("u".into());
        names
    }
}

/// Sampled time series, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Disturbance `d(t)` at each sample (not part of the CSV contract).
    pub disturbance: Vec<f64>,
}

impl Trace {
    pub fn empty(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
            disturbance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.index_of(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// All columns whose name starts with `prefix` followed by a digit.
    pub fn group(&self, prefix: &str) -> Vec<usize> {
        self.names
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                n.strip_prefix(prefix).is_some_and(|rest| {
                    !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
                })
            })
            .map(|(j, _)| j)
            .collect()
    }

    pub fn last(&self, prefix: &str) -> Vec<f64> {
        match self.rows.last() {
            Some(row) => self.group(prefix).into_iter().map(|j| row[j]).collect(),
            None => Vec::new(),
        }
    }

    /// Largest `|col|` over samples with `t0 <= t <= t1`.
    pub fn max_abs_between(&self, name: &str, t0: f64, t1: f64) -> Option<f64> {
        let j = self.index_of(name)?;
        self.rows
            .iter()
            .filter(|r| r[0] >= t0 - 1e-9 && r[0] <= t1 + 1e-9)
            .map(|r| r[j].abs())
            .fold(None, |m, x| Some(m.map_or(x, |m: f64| m.max(x))))
    }
}

/// Integrates a scenario and records a sample every `sample_every` steps
/// plus the final state.
pub fn simulate<T: Scalar>(sc: &Scenario<T>) -> Result<Trace> {
    sc.validate()?;
    let cl = &sc.closed_loop;
    let l = cl.layout();
    let mut s = sc.initial_vector();
    let n_steps = sc.steps();
    let h = sc.step;
    let mut trace = Trace::empty(sc.column_names());
    trace.rows.reserve(n_steps / sc.sample_every + 2);

    let record = |trace: &mut Trace, t: T, s: &[T]| -> Result<()> {
        let o = cl.outputs(s).map_err(|e| e.at_time(t.to_f64_lossy()))?;
        let mut row = Vec::with_capacity(trace.names.len());
        row.push(t.to_f64_lossy());
        row.extend(s[l.v..l.v + 2].iter().map(|x| x.to_f64_lossy()));
        row.extend(s[l.x..l.x_hat].iter().map(|x| x.to_f64_lossy()));
        row.push(o.y.to_f64_lossy());
        row.push(o.e.to_f64_lossy());
        row.extend(s[l.x_hat..l.k_hat + 1].iter().map(|x| x.to_f64_lossy()));
        row.push(o.u.to_f64_lossy());
        trace.rows.push(row);
        trace.disturbance.push(o.d.to_f64_lossy());
        Ok(())
    };

    let mut f = |t: T, y: &[T], out: &mut [T]| -> Result<()> {
        cl.rhs_into(t.to_f64_lossy(), y, out).map(|_| ())
    };
    let mut rk = Rk4::new(l.len);
    let limit = lit::<T>(BLOWUP_THRESHOLD);
    record(&mut trace, T::zero(), &s)?;
    for k in 0..n_steps {
        let t = T::from_usize(k).unwrap_or_else(T::zero) * h;
        rk.step(&mut f, t, &mut s, h)
            .map_err(|e| e.at_time(t.to_f64_lossy()))?;
        if s.iter().any(|x| !(x.abs() <= limit)) {
            return Err(Error::BlowUp {
                last_t: t.to_f64_lossy(),
                threshold: BLOWUP_THRESHOLD,
            });
        }
        let done = k + 1;
        if done % sc.sample_every == 0 || done == n_steps {
            let t_next = T::from_usize(done).unwrap_or_else(T::zero) * h;
            record(&mut trace, t_next, &s)?;
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// First time after which `|e| < tol` holds for every later sample.
    pub settle_time: Option<f64>,
    pub tail_rms: f64,
    pub max_abs_e: f64,
    pub a_err_final: Option<f64>,
}

/// Metrics of the `e` column. `tail_window` counts back from the last sample.
pub fn metrics(
    trace: &Trace,
    tol: f64,
    tail_window: f64,
    a_true: Option<&[f64]>,
) -> Result<Metrics> {
    let e = trace
        .column("e")
        .ok_or_else(|| Error::invalid("trace has no e column"))?;
    let t = trace.times();
    if e.is_empty() {
        return Err(Error::invalid("metrics of an empty trace"));
    }
    let t_end = *t.last().unwrap_or(&0.0);
    if tail_window > t_end - t[0] + 1e-9 {
        return Err(Error::invalid("tail window longer than the trace"));
    }
    let settle_time = match e.iter().rposition(|x| !(x.abs() < tol)) {
        None => Some(t[0]),
        Some(i) if i + 1 < e.len() => Some(t[i + 1]),
        Some(_) => None,
    };
    let tail: Vec<f64> = t
        .iter()
        .zip(&e)
        .filter(|(ti, _)| **ti >= t_end - tail_window - 1e-9)
        .map(|(_, x)| *x)
        .collect();
    let tail_rms = (tail.iter().map(|x| x * x).sum::<f64>() / tail.len() as f64).sqrt();
    let max_abs_e = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a_err_final = a_true.map(|a| {
        let ah = trace.last("ahat");
        ah.iter()
            .zip(a)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    });
    Ok(Metrics {
        settle_time,
        tail_rms,
        max_abs_e,
        a_err_final,
    })
}

/// Largest relative gap between central differences (step `1e-6` scaled by
/// `max(1, |x_i|)`) and `grad`, relative to `max(1, |grad_i|)`.
pub fn finite_diff_check<T, F, G>(f: F, grad: G, points: &[Vec<T>]) -> T
where
    T: Scalar,
    F: Fn(&[T]) -> T,
    G: Fn(&[T]) -> Vec<T>,
{
    let mut worst = T::zero();
    for p in points {
        let g = grad(p);
        let mut x = p.clone();
        for i in 0..p.len() {
            let h = lit::<T>(1e-6) * T::one().max(p[i].abs());
            x[i] = p[i] + h;
            let fp = f(&x);
            x[i] = p[i] - h;
            let fm = f(&x);
            x[i] = p[i];
            let fd = (fp - fm) / (h + h);
            let err = (fd - g[i]).abs() / T::one().max(g[i].abs());
            if !(err <= worst) {
                worst = err;
            }
        }
    }
    worst
}
