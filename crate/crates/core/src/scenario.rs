//! Scenario parameter sets, design points and the discretized time grid.
//!
//! A scenario file is a flat JSON object whose keys are the snake-cased
//! nomenclature symbols (`c_oor_v`, `sigma_mar`, ...). An optional
//! `design_space` object carries the feasible box of design variables:
//!
//! ```json
//! { "a_prop": 1.336, "...": 0.0,
//!   "design_space": { "t_life_range": [5, 15], "m_p_range": [1500, 3500] } }
//! ```
//!
//! Every numeric key listed in [`REQUIRED_KEYS`] must be present; `g0`,
//! `market_multiplicative` and `name` are optional. Anything else is
//! rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Standard gravity used by the rocket equation, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Largest tolerated gap between a lead time in steps and its nearest integer.
const STEP_TOLERANCE: f64 = 1e-6;

pub const REQUIRED_KEYS: [&str; 37] = [
    "a_prop",
    "b_prop",
    "c_serv",
    "c_lau",
    "c_oor_f",
    "c_oor_v",
    "isp",
    "m_oor_cap",
    "m_pl_ref",
    "m_base_ref",
    "m_serv",
    "p_lau",
    "p_oor",
    "r0",
    "rf",
    "t_oor_yr",
    "t_rep_yr",
    "t_ref_yr",
    "t_sim_yr",
    "dt_yr",
    "dv_ot_ideal",
    "dv_stk_yr",
    "alpha_adcs",
    "alpha_ins",
    "alpha_op",
    "alpha_str",
    "alpha_rel",
    "beta_rel_1",
    "beta_rel_2",
    "theta_rel_1",
    "theta_rel_2",
    "theta_obs",
    "kappa",
    "mu_mar",
    "sigma_mar",
    "sigma_oi",
    "cpi_ratio",
];

const OPTIONAL_KEYS: [&str; 4] = ["g0", "market_multiplicative", "name", "design_space"];

/// Parameters of the two-component Weibull reliability mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelParams {
    pub alpha_rel: f64,
    pub beta_rel_1: f64,
    pub beta_rel_2: f64,
    /// yr
    pub theta_rel_1: f64,
    /// yr
    pub theta_rel_2: f64,
}

/// Every constant of one scenario. Immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub a_prop: f64,
    pub b_prop: f64,
    pub c_serv: f64,
    pub c_lau: f64,
    pub c_oor_f: f64,
    pub c_oor_v: f64,
    pub isp: f64,
    pub m_oor_cap: f64,
    pub m_pl_ref: f64,
    pub m_base_ref: f64,
    pub m_serv: f64,
    pub p_lau: f64,
    pub p_oor: f64,
    pub r0: f64,
    pub rf: f64,
    pub t_oor_yr: f64,
    pub t_rep_yr: f64,
    pub t_ref_yr: f64,
    pub t_sim_yr: f64,
    pub dt_yr: f64,
    pub dv_ot_ideal: f64,
    pub dv_stk_yr: f64,
    pub alpha_adcs: f64,
    pub alpha_ins: f64,
    pub alpha_op: f64,
    pub alpha_str: f64,
    pub rel: RelParams,
    pub theta_obs: f64,
    pub kappa: f64,
    pub mu_mar: f64,
    pub sigma_mar: f64,
    pub sigma_oi: f64,
    pub cpi_ratio: f64,
    pub g0: f64,
    /// Use φ(t+1) = φ(t)(1 + μΔT + σε√ΔT) instead of the additive update.
    pub market_multiplicative: bool,
}

/// Decision vector: design lifetime (yr) and propellant loaded at launch (kg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub t_life_yr: f64,
    pub m_p_des: f64,
}

impl DesignPoint {
    pub fn new(t_life_yr: f64, m_p_des: f64) -> Self {
        DesignPoint { t_life_yr, m_p_des }
    }
}

/// Feasible box of design variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
    pub t_life_range: [f64; 2],
    pub m_p_range: [f64; 2],
}

impl DesignSpace {
    pub fn new(t_life_range: [f64; 2], m_p_range: [f64; 2]) -> Result<Self> {
        let space = DesignSpace {
            t_life_range,
            m_p_range,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        let [tl, th] = self.t_life_range;
        let [ml, mh] = self.m_p_range;
        if !(tl.is_finite() && th.is_finite() && tl > 0.0 && tl <= th) {
            return Err(Error::invariant("design_space.t_life_range", "need 0 < lo <= hi"));
        }
        if !(ml.is_finite() && mh.is_finite() && ml >= 0.0 && ml <= mh) {
            return Err(Error::invariant("design_space.m_p_range", "need 0 <= lo <= hi"));
        }
        Ok(())
    }

    pub fn contains(&self, x: &DesignPoint) -> bool {
        let [tl, th] = self.t_life_range;
        let [ml, mh] = self.m_p_range;
        x.t_life_yr >= tl && x.t_life_yr <= th && x.m_p_des >= ml && x.m_p_des <= mh
    }

    pub fn clip(&self, x: DesignPoint) -> DesignPoint {
        DesignPoint {
            t_life_yr: x.t_life_yr.clamp(self.t_life_range[0], self.t_life_range[1]),
            m_p_des: x.m_p_des.clamp(self.m_p_range[0], self.m_p_range[1]),
        }
    }

    pub fn lower(&self) -> [f64; 2] {
        [self.t_life_range[0], self.m_p_range[0]]
    }

    pub fn upper(&self) -> [f64; 2] {
        [self.t_life_range[1], self.m_p_range[1]]
    }

    /// Maps a design point into the unit square.
    pub fn to_unit(&self, x: &DesignPoint) -> [f64; 2] {
        let scale = |v: f64, r: [f64; 2]| {
            let w = r[1] - r[0];
            if w > 0.0 {
                (v - r[0]) / w
            } else {
                0.0
            }
        };
        [scale(x.t_life_yr, self.t_life_range), scale(x.m_p_des, self.m_p_range)]
    }
}

/// A scenario file: parameters plus an optional design space.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub params: ScenarioParams,
    pub design_space: Option<DesignSpace>,
}

/// Step counts derived from a scenario's time constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_sim: usize,
    pub t_rep: usize,
    pub t_oor: usize,
    /// Station-keeping ΔV per step, m/s.
    pub dv_stk_step: f64,
    pub dt_yr: f64,
}

fn take_f64(map: &mut Map<String, Value>, key: &str) -> Result<f64> {
    match map.remove(key) {
        None => Err(Error::MissingKey(key.to_string())),
        Some(Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| Error::invariant(key, "not representable as f64")),
        Some(other) => Err(Error::invariant(key, format!("expected a number, found {other}"))),
    }
}

fn range_pair(value: &Value, key: &str) -> Result<[f64; 2]> {
    let arr = value
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::invariant(key, "expected a two-element array [lo, hi]"))?;
    let lo = arr[0]
        .as_f64()
        .ok_or_else(|| Error::invariant(key, "lower bound is not a number"))?;
    let hi = arr[1]
        .as_f64()
        .ok_or_else(|| Error::invariant(key, "upper bound is not a number"))?;
    Ok([lo, hi])
}

fn parse_design_space(value: Value) -> Result<DesignSpace> {
    let mut map = match value {
        Value::Object(m) => m,
        _ => return Err(Error::Parse("`design_space` must be an object".into())),
    };
    let t = map
        .remove("t_life_range")
        .ok_or_else(|| Error::MissingKey("design_space.t_life_range".into()))?;
    let m = map
        .remove("m_p_range")
        .ok_or_else(|| Error::MissingKey("design_space.m_p_range".into()))?;
    if let Some(k) = map.keys().next() {
        return Err(Error::UnknownKey(format!("design_space.{k}")));
    }
    DesignSpace::new(
        range_pair(&t, "design_space.t_life_range")?,
        range_pair(&m, "design_space.m_p_range")?,
    )
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let mut map = match value {
            Value::Object(m) => m,
            _ => return Err(Error::Parse("top level must be a JSON object".into())),
        };
        if let Some(unknown) = map
            .keys()
            .find(|k| !REQUIRED_KEYS.contains(&k.as_str()) && !OPTIONAL_KEYS.contains(&k.as_str()))
        {
            return Err(Error::UnknownKey(unknown.clone()));
        }
        // Report the first missing key in schema order.
        for key in REQUIRED_KEYS {
            if !map.contains_key(key) {
                return Err(Error::MissingKey(key.to_string()));
            }
        }

        let name = match map.remove("name") {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(_) => return Err(Error::invariant("name", "expected a string")),
        };
        let g0 = match map.remove("g0") {
            None => STANDARD_GRAVITY,
            Some(v) => v.as_f64().ok_or_else(|| Error::invariant("g0", "expected a number"))?,
        };
        let market_multiplicative = match map.remove("market_multiplicative") {
            None => false,
            Some(Value::Bool(b)) => b,
            Some(_) => return Err(Error::invariant("market_multiplicative", "expected a boolean")),
        };
        let design_space = map.remove("design_space").map(parse_design_space).transpose()?;

        let m = &mut map;
        let params = ScenarioParams {
            a_prop: take_f64(m, "a_prop")?,
            b_prop: take_f64(m, "b_prop")?,
            c_serv: take_f64(m, "c_serv")?,
            c_lau: take_f64(m, "c_lau")?,
            c_oor_f: take_f64(m, "c_oor_f")?,
            c_oor_v: take_f64(m, "c_oor_v")?,
            isp: take_f64(m, "isp")?,
            m_oor_cap: take_f64(m, "m_oor_cap")?,
            m_pl_ref: take_f64(m, "m_pl_ref")?,
            m_base_ref: take_f64(m, "m_base_ref")?,
            m_serv: take_f64(m, "m_serv")?,
            p_lau: take_f64(m, "p_lau")?,
            p_oor: take_f64(m, "p_oor")?,
            r0: take_f64(m, "r0")?,
            rf: take_f64(m, "rf")?,
            t_oor_yr: take_f64(m, "t_oor_yr")?,
            t_rep_yr: take_f64(m, "t_rep_yr")?,
            t_ref_yr: take_f64(m, "t_ref_yr")?,
            t_sim_yr: take_f64(m, "t_sim_yr")?,
            dt_yr: take_f64(m, "dt_yr")?,
            dv_ot_ideal: take_f64(m, "dv_ot_ideal")?,
            dv_stk_yr: take_f64(m, "dv_stk_yr")?,
            alpha_adcs: take_f64(m, "alpha_adcs")?,
            alpha_ins: take_f64(m, "alpha_ins")?,
            alpha_op: take_f64(m, "alpha_op")?,
            alpha_str: take_f64(m, "alpha_str")?,
            rel: RelParams {
                alpha_rel: take_f64(m, "alpha_rel")?,
                beta_rel_1: take_f64(m, "beta_rel_1")?,
                beta_rel_2: take_f64(m, "beta_rel_2")?,
                theta_rel_1: take_f64(m, "theta_rel_1")?,
                theta_rel_2: take_f64(m, "theta_rel_2")?,
            },
            theta_obs: take_f64(m, "theta_obs")?,
            kappa: take_f64(m, "kappa")?,
            mu_mar: take_f64(m, "mu_mar")?,
            sigma_mar: take_f64(m, "sigma_mar")?,
            sigma_oi: take_f64(m, "sigma_oi")?,
            cpi_ratio: take_f64(m, "cpi_ratio")?,
            g0,
            market_multiplicative,
        };
        params.validate()?;
        Ok(Scenario {
            name,
            params,
            design_space,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut map = self.params.to_map();
        if let Some(name) = &self.name {
            map.insert("name".into(), Value::String(name.clone()));
        }
        if let Some(ds) = &self.design_space {
            let mut d = Map::new();
            d.insert("t_life_range".into(), serde_json::json!(ds.t_life_range));
            d.insert("m_p_range".into(), serde_json::json!(ds.m_p_range));
            map.insert("design_space".into(), Value::Object(d));
        }
        Value::Object(map)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("scenario values are finite")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string() + "\n").map_err(|e| Error::io(path, e))
    }

    /// Hex SHA-256 of the canonical serialization; stamped into output files.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_string(&self.to_value()).unwrap().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json_str(&text)
}

fn steps_exact(key: &str, years: f64, dt: f64) -> Result<usize> {
    let exact = years / dt;
    let rounded = exact.round();
    if (rounded - exact).abs() > STEP_TOLERANCE {
        return Err(Error::invariant(
            key,
            format!("{years} yr is not a whole number of {dt} yr steps"),
        ));
    }
    Ok(rounded as usize)
}

impl ScenarioParams {
    fn to_map(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), serde_json::json!(v));
        };
        put("a_prop", self.a_prop);
        put("b_prop", self.b_prop);
        put("c_serv", self.c_serv);
        put("c_lau", self.c_lau);
        put("c_oor_f", self.c_oor_f);
        put("c_oor_v", self.c_oor_v);
        put("isp", self.isp);
        put("m_oor_cap", self.m_oor_cap);
        put("m_pl_ref", self.m_pl_ref);
        put("m_base_ref", self.m_base_ref);
        put("m_serv", self.m_serv);
        put("p_lau", self.p_lau);
        put("p_oor", self.p_oor);
        put("r0", self.r0);
        put("rf", self.rf);
        put("t_oor_yr", self.t_oor_yr);
        put("t_rep_yr", self.t_rep_yr);
        put("t_ref_yr", self.t_ref_yr);
        put("t_sim_yr", self.t_sim_yr);
        put("dt_yr", self.dt_yr);
        put("dv_ot_ideal", self.dv_ot_ideal);
        put("dv_stk_yr", self.dv_stk_yr);
        put("alpha_adcs", self.alpha_adcs);
        put("alpha_ins", self.alpha_ins);
        put("alpha_op", self.alpha_op);
        put("alpha_str", self.alpha_str);
        put("alpha_rel", self.rel.alpha_rel);
        put("beta_rel_1", self.rel.beta_rel_1);
        put("beta_rel_2", self.rel.beta_rel_2);
        put("theta_rel_1", self.rel.theta_rel_1);
        put("theta_rel_2", self.rel.theta_rel_2);
        put("theta_obs", self.theta_obs);
        put("kappa", self.kappa);
        put("mu_mar", self.mu_mar);
        put("sigma_mar", self.sigma_mar);
        put("sigma_oi", self.sigma_oi);
        put("cpi_ratio", self.cpi_ratio);
        put("g0", self.g0);
        m.insert("market_multiplicative".into(), Value::Bool(self.market_multiplicative));
        m
    }

    /// Checks every invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("a_prop", self.a_prop),
            ("b_prop", self.b_prop),
            ("c_serv", self.c_serv),
            ("c_lau", self.c_lau),
            ("c_oor_f", self.c_oor_f),
            ("c_oor_v", self.c_oor_v),
            ("m_oor_cap", self.m_oor_cap),
            ("m_pl_ref", self.m_pl_ref),
            ("m_base_ref", self.m_base_ref),
            ("m_serv", self.m_serv),
            ("r0", self.r0),
            ("rf", self.rf),
            ("t_oor_yr", self.t_oor_yr),
            ("t_rep_yr", self.t_rep_yr),
            ("dv_ot_ideal", self.dv_ot_ideal),
            ("dv_stk_yr", self.dv_stk_yr),
            ("alpha_adcs", self.alpha_adcs),
            ("alpha_ins", self.alpha_ins),
            ("alpha_op", self.alpha_op),
            ("alpha_str", self.alpha_str),
            ("kappa", self.kappa),
            ("sigma_mar", self.sigma_mar),
            ("sigma_oi", self.sigma_oi),
        ];
        for (key, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invariant(key, format!("must be finite and >= 0, got {v}")));
            }
        }
        let positive = [
            ("isp", self.isp),
            ("dt_yr", self.dt_yr),
            ("t_ref_yr", self.t_ref_yr),
            ("theta_obs", self.theta_obs),
            ("theta_rel_1", self.rel.theta_rel_1),
            ("theta_rel_2", self.rel.theta_rel_2),
            ("cpi_ratio", self.cpi_ratio),
            ("g0", self.g0),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invariant(key, format!("must be finite and > 0, got {v}")));
            }
        }
        if !self.mu_mar.is_finite() {
            return Err(Error::invariant("mu_mar", "must be finite"));
        }
        if !(self.t_sim_yr.is_finite() && self.t_sim_yr >= self.dt_yr) {
            return Err(Error::invariant("t_sim_yr", "must be >= dt_yr"));
        }
        for (key, p) in [("p_lau", self.p_lau), ("p_oor", self.p_oor)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invariant(key, format!("probability out of [0, 1]: {p}")));
            }
        }
        if self.alpha_op >= 1.0 {
            return Err(Error::invariant("alpha_op", "must be < 1"));
        }
        if self.alpha_str + self.alpha_adcs >= 1.0 {
            return Err(Error::invariant(
                "alpha_str",
                format!(
                    "alpha_str + alpha_adcs = {} must be < 1",
                    self.alpha_str + self.alpha_adcs
                ),
            ));
        }
        if self.t_oor_yr >= self.t_rep_yr {
            return Err(Error::invariant("t_oor_yr", "must be < t_rep_yr"));
        }
        let rel = &self.rel;
        if !(0.0..=1.0).contains(&rel.alpha_rel) {
            return Err(Error::invariant("alpha_rel", "must lie in [0, 1]"));
        }
        if !(rel.beta_rel_1 > 0.0 && rel.beta_rel_1 < 1.0) {
            return Err(Error::invariant("beta_rel_1", "must lie in (0, 1)"));
        }
        if !(rel.beta_rel_2.is_finite() && rel.beta_rel_2 > 1.0) {
            return Err(Error::invariant("beta_rel_2", "must be > 1"));
        }
        steps_exact("t_sim_yr", self.t_sim_yr, self.dt_yr)?;
        steps_exact("t_rep_yr", self.t_rep_yr, self.dt_yr)?;
        let t_oor = steps_exact("t_oor_yr", self.t_oor_yr, self.dt_yr)?;
        if t_oor == 0 {
            return Err(Error::invariant("t_oor_yr", "must be at least one step"));
        }
        Ok(())
    }

    /// Step counts and per-step station-keeping ΔV.
    pub fn discretize(&self) -> TimeGrid {
        let steps = |yr: f64| (yr / self.dt_yr).round() as usize;
        TimeGrid {
            t_sim: steps(self.t_sim_yr),
            t_rep: steps(self.t_rep_yr),
            t_oor: steps(self.t_oor_yr),
            dv_stk_step: self.dv_stk_yr * self.dt_yr,
            dt_yr: self.dt_yr,
        }
    }

    /// Design lifetime in whole steps.
    pub fn life_steps(&self, t_life_yr: f64) -> usize {
        (t_life_yr / self.dt_yr).round() as usize
    }

    /// Effective exhaust velocity g0·Isp, m/s.
    pub fn exhaust_velocity(&self) -> f64 {
        self.g0 * self.isp
    }

    /// Per-step discount exponent rf·ΔT.
    pub fn rate_per_step(&self) -> f64 {
        self.rf * self.dt_yr
    }
}

/// Baseline chemical-propulsion scenario, embedded from `scenarios/`.
pub fn baseline_chemical() -> Scenario {
    Scenario::from_json_str(include_str!("../scenarios/baseline_chemical.json"))
        .expect("embedded chemical scenario is valid")
}

/// Baseline electric-propulsion scenario, embedded from `scenarios/`.
pub fn baseline_electric() -> Scenario {
    Scenario::from_json_str(include_str!("../scenarios/baseline_electric.json"))
        .expect("embedded electric scenario is valid")
}
