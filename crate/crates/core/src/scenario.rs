//! TOML scenario files, the shipped presets and dotted-key overrides.
//!
//! A scenario file has the tables `[plant]`, `[exo]`, `[disturbance]`,
//! `[regulator]`, `[init]` and `[sim]`; see `scenarios/*.toml` for complete
//! examples. Every key other than `plant.kind` and `init.x` has a default.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::plants::{
    duffing_true_a, BioreactorParams, ChainParams, CstrParams, DuffingParams, Exosystem, Plant,
    Reference,
};
use crate::regulator::{ClosedLoop, GainMode, MappingMode, RegulatorConfig, RhoSpec};
use crate::scalar::Scalar;
use crate::sim::{InitialState, Scenario};

pub const DUFFING_TOML: &str = include_str!("../scenarios/duffing.toml");
pub const CSTR_TOML: &str = include_str!("../scenarios/cstr.toml");
pub const BIOREACTOR_TOML: &str = include_str!("../scenarios/bioreactor.toml");

pub const PRESET_NAMES: [&str; 3] = ["duffing", "cstr", "bioreactor"];

pub fn preset_source(name: &str) -> Option<&'static str> {
    match name {
        "duffing" => Some(DUFFING_TOML),
        "cstr" => Some(CSTR_TOML),
        "bioreactor" => Some(BIOREACTOR_TOML),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Constant reference; defaults by plant kind.
    pub setpoint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExoSection {
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default)]
    pub v0: [f64; 2],
}

impl Default for ExoSection {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            v0: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSection {
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        Self {
            amplitude: 0.0,
            omega: 1.0,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorSection {
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default = "adaptive")]
    pub gain_mode: String,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "constant")]
    pub rho: String,
    #[serde(default = "one_vec")]
    pub rho_params: Vec<f64>,
    #[serde(default = "one")]
    pub k_a: f64,
    pub m_coeffs: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "learned")]
    pub mapping_mode: String,
    /// True generator coefficients, for oracle mode and error metrics.
    pub a_true: Option<Vec<f64>>,
    #[serde(default)]
    pub recursive: bool,
    /// Force `u = 0`.
    #[serde(default)]
    pub open_loop: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub x: Vec<f64>,
    #[serde(default)]
    pub x_hat: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
    #[serde(default)]
    pub a_hat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            horizon: default_horizon(),
            step: default_step(),
            sample_every: default_sample_every(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn one_vec() -> Vec<f64> {
    vec![1.0]
}
fn adaptive() -> String {
    "adaptive".into()
}
fn constant() -> String {
    "constant".into()
}
fn learned() -> String {
    "learned".into()
}
fn default_delta() -> f64 {
    crate::internal_model::DEFAULT_DELTA
}
fn default_horizon() -> f64 {
    100.0
}
fn default_step() -> f64 {
    1e-3
}
fn default_sample_every() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub plant: PlantSection,
    #[serde(default)]
    pub exo: ExoSection,
    #[serde(default)]
    pub disturbance: DisturbanceSection,
    pub regulator: RegulatorSection,
    pub init: InitSection,
    #[serde(default)]
    pub sim: SimSection,
}

fn toml_error(src: &str, err: toml::de::Error) -> Error {
    let at = err
        .span()
        .map(|sp| {
            let line = src[..sp.start.min(src.len())].matches('\n').count() + 1;
            format!(" (line {line})")
        })
        .unwrap_or_default();
    Error::config(format!("{}{at}", err.message()))
}

/// Parses TOML text into a table without interpreting it.
pub fn parse_table(src: &str) -> Result<Table> {
    src.parse::<Table>().map_err(|e| toml_error(src, e))
}

/// Interprets the right-hand side of `key=value`: any TOML value literal,
/// otherwise a bare string.
fn parse_override_value(raw: &str) -> Value {
    let probe = format!("v = {raw}");
    match probe.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

/// Applies one `a.b.c=value` override, creating intermediate tables.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override '{spec}' is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(format!("malformed override key '{key}'")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("override key '{key}': '{p}' is not a table")))?;
    }
    let mut value = parse_override_value(raw.trim());
    // integers where a float is expected are fine in TOML only as floats
    if let (Some(Value::Float(_)), Value::Integer(i)) = (cur.get(parts[parts.len() - 1]), &value) {
        value = Value::Float(*i as f64);
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ScenarioConfig {
    pub fn from_table(table: Table) -> Result<Self> {
        let text = toml::to_string(&table).map_err(|e| Error::config(e.to_string()))?;
        toml::from_str(&text).map_err(|e| toml_error(&text, e))
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| toml_error(src, e))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let src = preset_source(name).ok_or_else(|| {
            Error::config(format!(
                "unknown scenario '{name}' (presets: {})",
                PRESET_NAMES.join(", ")
            ))
        })?;
        Self::from_toml(src)
    }

    /// Preset name or path to a TOML file, with overrides applied.
    pub fn load(source: &str, overrides: &[String]) -> Result<Self> {
        let text = match preset_source(source) {
            Some(s) => s.to_string(),
            None => std::fs::read_to_string(source)
                .map_err(|e| Error::config(format!("cannot read scenario '{source}': {e}")))?,
        };
        let mut table = parse_table(&text)?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    fn plant<T: Scalar>(&self) -> Result<Plant<T>> {
        let p = &self.plant.params;
        let known: &[&str] = match self.plant.kind.as_str() {
            "duffing" => &["c1", "c2", "c3"],
            "cstr" => &["gamma", "beta", "b_rise", "da"],
            "bioreactor" => &["d", "y", "alpha", "beta", "mu_m", "km", "ki", "xm"],
            "chain" => &["r", "b", "drift"],
            other => {
                return Err(Error::config(format!(
                    "unknown plant kind '{other}' (expected duffing, cstr, bioreactor or chain)"
                )))
            }
        };
        if let Some(bad) = p.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::config(format!(
                "plant.params.{bad} is not a {} parameter",
                self.plant.kind
            )));
        }
        let get = |k: &str, dflt: T| p.get(k).map_or(dflt, |&x| T::lit(x));
        Ok(match self.plant.kind.as_str() {
            "duffing" => {
                let d = DuffingParams::default();
                Plant::Duffing(DuffingParams {
                    c1: get("c1", d.c1),
                    c2: get("c2", d.c2),
                    c3: get("c3", d.c3),
                })
            }
            "cstr" => {
                let d = CstrParams::default();
                Plant::Cstr(CstrParams {
                    gamma: get("gamma", d.gamma),
                    beta: get("beta", d.beta),
                    b_rise: get("b_rise", d.b_rise),
                    da: get("da", d.da),
                })
            }
            "bioreactor" => {
                let d = BioreactorParams::default();
                Plant::Bioreactor(BioreactorParams {
                    d: get("d", d.d),
                    y: get("y", d.y),
                    alpha: get("alpha", d.alpha),
                    beta: get("beta", d.beta),
                    mu_m: get("mu_m", d.mu_m),
                    km: get("km", d.km),
                    ki: get("ki", d.ki),
                    xm: get("xm", d.xm),
                })
            }
            _ => {
                let r = p.get("r").copied().unwrap_or(1.0);
                if r < 1.0 || r.fract() != 0.0 {
                    return Err(Error::config("plant.params.r must be a positive integer"));
                }
                Plant::Chain(ChainParams {
                    r: r as usize,
                    b: get("b", T::one()),
                    drift: get("drift", T::zero()),
                })
            }
        })
    }

    /// Coefficients the learner should find, if known for this plant.
    pub fn a_true(&self) -> Option<Vec<f64>> {
        if let Some(a) = &self.regulator.a_true {
            return Some(a.clone());
        }
        if self.plant.kind == "duffing" && self.exo.sigma > 0.0 {
            return duffing_true_a(self.exo.sigma).ok().map(|a| a.into_vec());
        }
        None
    }

    /// Builds the runtime scenario in scalar type `T` and validates it.
    pub fn build<T: Scalar>(&self) -> Result<Scenario<T>> {
        let plant = self.plant::<T>()?;
        let reference = match (self.plant.setpoint, plant.default_reference()) {
            (Some(c), _) => Reference::Constant(T::lit(c)),
            (None, r) => r,
        };
        let reg = &self.regulator;
        let vecf = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        let gain = match reg.gain_mode.as_str() {
            "fixed" => GainMode::Fixed(T::lit(reg.k)),
            "adaptive" => GainMode::Adaptive(T::lit(reg.k)),
            other => {
                return Err(Error::config(format!(
                    "unknown gain_mode '{other}' (expected fixed or adaptive)"
                )))
            }
        };
        let a_true = self.a_true();
        let regulator = RegulatorConfig {
            r: plant.relative_degree(),
            b: plant.b(),
            lambda: vecf(&reg.lambda),
            gain,
            rho: RhoSpec::from_name(&reg.rho, &vecf(&reg.rho_params))?,
            k_a: T::lit(reg.k_a),
            m_coeffs: vecf(&reg.m_coeffs),
            delta: T::lit(reg.delta),
            mapping: MappingMode::parse(&reg.mapping_mode)?,
            a_true: a_true.as_deref().map(vecf),
            recursive: reg.recursive,
        };
        let dist = Exosystem::cosine(
            T::lit(self.disturbance.amplitude),
            T::lit(self.disturbance.omega),
            T::lit(self.disturbance.phase),
        );
        let sc = Scenario {
            name: self.name.clone(),
            closed_loop: ClosedLoop {
                plant,
                reference,
                sigma: T::lit(self.exo.sigma),
                omega: dist.sigma,
                regulator,
                open_loop: reg.open_loop,
            },
            init: InitialState {
                v: [T::lit(self.exo.v0[0]), T::lit(self.exo.v0[1])],
                w: dist.v,
                x: vecf(&self.init.x),
                x_hat: vecf(&self.init.x_hat),
                eta: vecf(&self.init.eta),
                a_hat: vecf(&self.init.a_hat),
                k_hat: T::lit(reg.k),
            },
            horizon: T::lit(self.sim.horizon),
            step: T::lit(self.sim.step),
            sample_every: self.sim.sample_every,
            a_true: a_true.as_deref().map(vecf),
        };
        sc.validate()?;
        Ok(sc)
    }
}
