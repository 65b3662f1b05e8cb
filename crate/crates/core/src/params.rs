//! The shared physical/design parameter set and its config-file keys.

use crate::config::ConfigMap;
use crate::error::{Error, Result};
use crate::loop_builder::{Environment, PositionGains};
use crate::observer::{ObserverConfig, PlantParams};

/// All fifteen parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSet {
    pub j_m: f64,
    pub k_tau: f64,
    pub j_mn: f64,
    pub k_tau_n: f64,
    pub j_hat: f64,
    pub k_tau_hat: f64,
    pub g_dob: f64,
    pub g_rfob: f64,
    pub g_v: f64,
    pub k_p: f64,
    pub k_d: f64,
    /// Force gain, (m/s²)/N
    pub c_f: f64,
    pub d_env: f64,
    pub k_env: f64,
    pub q_e: f64,
}

impl Default for ParameterSet {
    /// Desk-scale motor with a moderately stiff wall 1 cm away.
    fn default() -> Self {
        Self {
            j_m: 0.004,
            k_tau: 0.4,
            j_mn: 0.004,
            k_tau_n: 0.4,
            j_hat: 0.004,
            k_tau_hat: 0.4,
            g_dob: 300.0,
            g_rfob: 300.0,
            g_v: 1000.0,
            k_p: 400.0,
            k_d: 40.0,
            c_f: 350.0,
            d_env: 2.0,
            k_env: 3000.0,
            q_e: 0.01,
        }
    }
}

impl ParameterSet {
    pub const KEYS: [&'static str; 15] = [
        "J_m", "K_tau", "J_mn", "K_tau_n", "J_hat", "K_tau_hat", "g_dob", "g_rfob", "g_v", "K_p", "K_D", "C_f",
        "D_env", "K_env", "q_e",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "J_m" => &mut self.j_m,
            "K_tau" => &mut self.k_tau,
            "J_mn" => &mut self.j_mn,
            "K_tau_n" => &mut self.k_tau_n,
            "J_hat" => &mut self.j_hat,
            "K_tau_hat" => &mut self.k_tau_hat,
            "g_dob" => &mut self.g_dob,
            "g_rfob" => &mut self.g_rfob,
            "g_v" => &mut self.g_v,
            "K_p" => &mut self.k_p,
            "K_D" => &mut self.k_d,
            "C_f" => &mut self.c_f,
            "D_env" => &mut self.d_env,
            "K_env" => &mut self.k_env,
            "q_e" => &mut self.q_e,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(key).map(|v| *v)
    }

    /// Sets one parameter by its config key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(key)
            .ok_or_else(|| Error::Config(format!("unknown parameter '{key}'")))?;
        *slot = value;
        Ok(())
    }

    /// Parameter file containing exactly the fifteen keys and nothing else.
    pub fn parse_strict(text: &str) -> Result<Self> {
        let map = ConfigMap::parse(text)?;
        let mut problems: Vec<String> = map
            .keys()
            .filter(|k| !Self::KEYS.contains(k))
            .map(|k| format!("unknown key '{k}'"))
            .collect();
        problems.extend(Self::KEYS.iter().filter(|k| !map.contains(k)).map(|k| format!("missing key '{k}'")));
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        Self::from_map(&map)
    }

    /// Reads whichever parameter keys are present, defaults for the rest.
    /// Keys outside the parameter set are ignored.
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut p = Self::default();
        let mut problems = Vec::new();
        for key in Self::KEYS {
            match map.real(key) {
                Ok(Some(v)) => p.set(key, v)?,
                Ok(None) => {}
                Err(msg) => problems.push(msg),
            }
        }
        if let Err(Error::InvalidParameter(msg)) = p.validate() {
            problems.push(msg);
        }
        if problems.is_empty() {
            Ok(p)
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for key in Self::KEYS {
            let v = self.get(key).expect("known key");
            let ok = match key {
                "C_f" | "D_env" | "K_env" => v >= 0.0,
                "q_e" => v.is_finite(),
                _ => v > 0.0,
            };
            if !ok || !v.is_finite() {
                problems.push(format!("{key} = {v} is out of range"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }

    pub fn to_config(&self) -> ConfigMap {
        let mut map = ConfigMap::default();
        for key in Self::KEYS {
            map.insert(key, format!("{:?}", self.get(key).expect("known key")));
        }
        map
    }

    pub fn plant(&self) -> Result<PlantParams> {
        PlantParams::new(self.j_m, self.k_tau, self.j_mn, self.k_tau_n)
    }

    pub fn observer(&self) -> Result<ObserverConfig> {
        ObserverConfig::new(self.g_dob, self.g_rfob, self.g_v, self.j_hat, self.k_tau_hat)
    }

    pub fn gains(&self) -> Result<PositionGains> {
        PositionGains::new(self.k_p, self.k_d)
    }

    pub fn environment(&self) -> Result<Environment> {
        Environment::new(self.d_env, self.k_env, self.q_e, 0.0)
    }
}
