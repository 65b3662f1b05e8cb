//! Scenario files: the fifteen model parameters plus the options of one
//! command kind. Parameters may be omitted (defaults apply); options are
//! checked against a per-kind table, and every problem is reported at once.

use std::collections::BTreeMap;
use std::fmt;

use clap::ValueEnum;
use dob_lab::config::{parse_real, parse_real_list, ConfigMap};
use dob_lab::stability::SweepParameter;
use dob_lab::{ParameterSet, Polynomial};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    ConstraintCheck,
    Bode,
    PositionTf,
    ForceTf,
    Routh,
    Locus,
    Map,
    SimulatePosition,
    SimulateForce,
    ReproduceFigure,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::ConstraintCheck => "constraint-check",
            Kind::Bode => "bode",
            Kind::PositionTf => "position-tf",
            Kind::ForceTf => "force-tf",
            Kind::Routh => "routh",
            Kind::Locus => "locus",
            Kind::Map => "map",
            Kind::SimulatePosition => "simulate-position",
            Kind::SimulateForce => "simulate-force",
            Kind::ReproduceFigure => "reproduce-figure",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
enum Value {
    Real,
    Positive,
    NonNegative,
    Count,
    Seed,
    PositiveList,
    Choice(&'static [&'static str]),
    Poly,
}

impl Value {
    fn check(&self, key: &str, v: &str) -> Result<(), String> {
        let positive = |x: f64, what: &str| {
            if x > 0.0 {
                Ok(())
            } else {
                Err(format!("key '{key}': {what} must be positive, got {x}"))
            }
        };
        match *self {
            Value::Real => parse_real(key, v).map(drop),
            Value::Positive => positive(parse_real(key, v)?, "value"),
            Value::NonNegative => match parse_real(key, v)? {
                x if x >= 0.0 => Ok(()),
                x => Err(format!("key '{key}': value must be non-negative, got {x}")),
            },
            Value::Count => match v.parse::<usize>() {
                Ok(n) if n > 0 => Ok(()),
                _ => Err(format!("key '{key}': '{v}' is not a positive integer")),
            },
            Value::Seed => v.parse::<u64>().map(drop).map_err(|_| format!("key '{key}': '{v}' is not a seed")),
            Value::PositiveList => parse_real_list(key, v)?.into_iter().try_for_each(|x| positive(x, "every entry")),
            Value::Choice(options) => {
                if options.contains(&v) {
                    Ok(())
                } else {
                    Err(format!("key '{key}': '{v}' is not one of {}", options.join("|")))
                }
            }
            Value::Poly => match v.parse::<Polynomial>() {
                Ok(p) if p.degree().is_some_and(|d| d >= 1) => Ok(()),
                Ok(_) => Err(format!("key '{key}': polynomial must have degree 1 or more")),
                Err(e) => Err(format!("key '{key}': {e}")),
            },
        }
    }
}

/// One option: its key, value type and default (`None` means required).
#[derive(Debug, Clone, Copy)]
struct Opt {
    key: &'static str,
    value: Value,
    default: Option<&'static str>,
}

const fn opt(key: &'static str, value: Value, default: &'static str) -> Opt {
    Opt { key, value, default: Some(default) }
}

const fn required(key: &'static str, value: Value) -> Opt {
    Opt { key, value, default: None }
}

pub const FIGURES: &[&str] = &["fig3", "fig7", "fig8", "fig9", "fig10"];
const VELOCITY: Value = Value::Choice(&["ideal", "filtered"]);
const SWEEP_NAMES: &[&str] = &["alpha", "g_dob", "g_v", "C_f", "j_hat_ratio", "k_tau_hat_ratio"];

fn sim_opts(dt: &'static str, duration: &'static str, seed: &'static str, noise: &'static str) -> [Opt; 4] {
    [
        opt("sim.dt", Value::Positive, dt),
        opt("sim.duration", Value::Positive, duration),
        opt("sim.seed", Value::Seed, seed),
        opt("sim.noise_std", Value::NonNegative, noise),
    ]
}

const FRICTION_OPTS: [Opt; 3] = [
    opt("friction.coulomb", Value::NonNegative, "0"),
    opt("friction.viscous", Value::NonNegative, "0"),
    opt("friction.smoothing_velocity", Value::Positive, "1e-3"),
];

fn options(kind: Kind) -> Vec<Opt> {
    let mut v = Vec::new();
    match kind {
        Kind::ConstraintCheck => {}
        Kind::Bode => v.extend([
            required("bode.target", Value::Choice(&["sensitivity", "dob_open_loop", "position", "force_open", "force_closed"])),
            opt("velocity", VELOCITY, "filtered"),
            opt("omega.min", Value::Positive, "1"),
            opt("omega.max", Value::Positive, "1e5"),
            opt("omega.points_per_decade", Value::Count, "50"),
        ]),
        Kind::PositionTf | Kind::ForceTf => v.push(opt("velocity", VELOCITY, "ideal")),
        Kind::Routh => v.push(required("polynomial", Value::Poly)),
        Kind::Locus => v.extend([
            required("locus.gain", Value::Choice(&["C_f", "alpha"])),
            opt("velocity", VELOCITY, "ideal"),
            opt("grid.min", Value::Positive, "1"),
            opt("grid.max", Value::Positive, "1e5"),
            opt("grid.points_per_decade", Value::Count, "40"),
        ]),
        Kind::Map => v.extend([
            required("map.param", Value::Choice(SWEEP_NAMES)),
            opt("velocity", VELOCITY, "ideal"),
            opt("grid.min", Value::Positive, "0.01"),
            opt("grid.max", Value::Positive, "100"),
            opt("grid.points_per_decade", Value::Count, "20"),
        ]),
        Kind::SimulatePosition => {
            v.extend(sim_opts("1e-4", "11", "7", "0.05"));
            v.extend(FRICTION_OPTS);
            v.extend([
                opt("reference.amplitude", Value::Real, "0.1"),
                opt("reference.frequency_hz", Value::Positive, "1"),
                opt("reference.start", Value::NonNegative, "1"),
                opt("reference.stop", Value::NonNegative, "10"),
                opt("window.start", Value::NonNegative, "2"),
                opt("window.end", Value::NonNegative, "10"),
            ]);
        }
        Kind::SimulateForce => {
            v.extend(sim_opts("1e-4", "3", "11", "0"));
            v.extend(FRICTION_OPTS);
            v.extend([
                opt("reference.initial", Value::Real, "0"),
                opt("reference.magnitude", Value::Real, "1"),
                opt("reference.at", Value::NonNegative, "1"),
                opt("init", Value::Choice(&["rest", "contact"]), "rest"),
                opt("init.q", Value::Real, "0"),
                opt("window.start", Value::NonNegative, "1"),
                opt("window.end", Value::NonNegative, "3"),
            ]);
        }
        Kind::ReproduceFigure => v.extend([
            required("figure", Value::Choice(FIGURES)),
            opt("fig3.alphas", Value::PositiveList, "0.5,1,3"),
            opt("fig3.omega_min", Value::Positive, "1"),
            opt("fig3.omega_max", Value::Positive, "1e5"),
            opt("fig7.alpha_min", Value::Positive, "1e-3"),
            opt("fig7.alpha_max", Value::Positive, "10"),
            opt("fig7.points_per_decade", Value::Count, "50"),
            opt("fig8.c_f_min", Value::Positive, "1"),
            opt("fig8.c_f_max", Value::Positive, "1e5"),
            opt("fig8.rfob_ratios", Value::PositiveList, "1,3"),
            opt("fig9.seed", Value::Seed, "7"),
            opt("fig9.noise_std", Value::NonNegative, "0.05"),
        ]),
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: Kind,
    pub params: ParameterSet,
    /// Options given in the file (defaults are not materialized).
    pub options: BTreeMap<String, String>,
}

impl Scenario {
    /// Strict parse: unknown keys, missing required options and malformed
    /// values are all listed in one error.
    pub fn parse(kind: Kind, text: &str) -> Result<Self, CliError> {
        let map = ConfigMap::parse(text).map_err(|e| CliError::Config(strip(e)))?;
        let table = options(kind);
        let mut problems = Vec::new();
        let mut opts = BTreeMap::new();
        for (key, value) in map.iter() {
            if ParameterSet::KEYS.contains(&key) {
                continue;
            }
            if key == "kind" {
                if value != kind.name() {
                    problems.push(format!("file is for kind '{value}', not '{kind}'"));
                }
                continue;
            }
            match table.iter().find(|o| o.key == key) {
                Some(o) => match o.value.check(key, value) {
                    Ok(()) => {
                        opts.insert(key.to_string(), value.to_string());
                    }
                    Err(msg) => problems.push(msg),
                },
                None => problems.push(format!("unknown key '{key}' for {kind}")),
            }
        }
        for o in table.iter().filter(|o| o.default.is_none() && !map.contains(o.key)) {
            problems.push(format!("missing required key '{}'", o.key));
        }
        let params = ParameterSet::from_map(&map);
        if let Err(e) = &params {
            problems.push(strip(e.clone()));
        }
        if !problems.is_empty() {
            return Err(CliError::Config(problems.join("; ")));
        }
        Ok(Self { kind, params: params.expect("checked above"), options: opts })
    }

    /// Canonical file form; parsing it gives back an equal scenario.
    pub fn to_config_text(&self) -> String {
        let mut map = ConfigMap::default();
        map.insert("kind", self.kind.name());
        for (k, v) in self.params.to_config().iter() {
            map.insert(k, v);
        }
        for (k, v) in &self.options {
            map.insert(k.as_str(), v.as_str());
        }
        map.to_string()
    }

    fn text(&self, key: &str) -> &str {
        let o = options(self.kind)
            .into_iter()
            .find(|o| o.key == key)
            .unwrap_or_else(|| panic!("option '{key}' is not defined for {}", self.kind));
        match self.options.get(key) {
            Some(v) => v,
            None => o.default.expect("required options are present after parsing"),
        }
    }

    pub fn choice(&self, key: &str) -> &str {
        self.text(key)
    }

    pub fn real(&self, key: &str) -> f64 {
        parse_real(key, self.text(key)).expect("validated")
    }

    pub fn count(&self, key: &str) -> usize {
        self.text(key).parse().expect("validated")
    }

    pub fn seed(&self, key: &str) -> u64 {
        self.text(key).parse().expect("validated")
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        parse_real_list(key, self.text(key)).expect("validated")
    }

    pub fn polynomial(&self, key: &str) -> Polynomial {
        self.text(key).parse().expect("validated")
    }

    pub fn sweep(&self, key: &str) -> SweepParameter {
        self.text(key).parse().expect("validated")
    }
}

fn strip(e: dob_lab::Error) -> String {
    match e {
        dob_lab::Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse(Kind::SimulateForce, "").unwrap();
        assert_eq!(s.params, ParameterSet::default());
        assert_eq!(s.real("sim.duration"), 3.0);
        assert_eq!(s.choice("init"), "rest");
    }

    #[test]
    fn every_violation_listed() {
        let err = Scenario::parse(Kind::Locus, "J_m = -1\nbogus = 2\ngrid.min = abc\n").unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        for needle in ["unknown key 'bogus'", "grid.min", "missing required key 'locus.gain'", "J_m"] {
            assert!(msg.contains(needle), "{needle} not in {msg}");
        }
    }

    #[test]
    fn round_trip() {
        let text = "g_dob = 500\nfigure = fig3\nfig3.alphas = 1, 2,4\n";
        let s = Scenario::parse(Kind::ReproduceFigure, text).unwrap();
        let again = Scenario::parse(Kind::ReproduceFigure, &s.to_config_text()).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.list("fig3.alphas"), vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn kind_must_match() {
        assert!(Scenario::parse(Kind::Routh, "kind = map\npolynomial = 1,1\n").is_err());
        assert!(Scenario::parse(Kind::Routh, "kind = routh\npolynomial = 1,1\n").is_ok());
    }

    #[test]
    fn constant_polynomial_rejected() {
        assert!(Scenario::parse(Kind::Routh, "polynomial = 3\n").is_err());
    }

    #[test]
    fn every_default_is_valid() {
        for kind in Kind::value_variants() {
            for o in options(*kind) {
                if let Some(d) = o.default {
                    o.value.check(o.key, d).unwrap();
                }
            }
        }
    }
}
