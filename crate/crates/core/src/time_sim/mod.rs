//! Fixed-step nonlinear simulation of the DOB position loop and the RFOB
//! force loop, with Coulomb/viscous friction, noisy velocity measurement and
//! a unilateral spring–damper wall.
//!
//! State vector: `[q, q̇, v_f, z_dob, z_rfob]` where `v_f` is the low-pass
//! filtered velocity and `z_*` are the observer states. Each observer
//! `F̂ = g/(s+g)·(K·I − J·s·v)` is realized without differentiating `v` as
//! `F̂ = z − g·J·v`, `ż = g·(K·I − z + g·J·v)`.

mod engine;
mod linear;
mod metrics;
mod reference;
pub mod scenarios;

pub use engine::{simulate_constant_current, simulate_force, simulate_position, InitialState};
pub use linear::simulate_tf_step;
pub use metrics::{compute_metrics, paired_noise_rms, ResponseMetrics, Tracked, Window};
pub use reference::{ForceReference, PositionReference, Reference};

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// s
    pub dt: f64,
    /// s
    pub duration: f64,
    pub seed: u64,
    /// Standard deviation of the additive velocity noise.
    pub noise_std: f64,
    pub integrator: Integrator,
}

impl SimConfig {
    pub fn new(dt: f64, duration: f64, seed: u64, noise_std: f64) -> Result<Self> {
        let c = Self { dt, duration, seed, noise_std, integrator: Integrator::Rk4 };
        c.validate_basic()?;
        Ok(c)
    }

    fn validate_basic(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.duration.is_finite() && self.duration >= 10.0 * self.dt) {
            problems.push(format!("duration {} must be at least 10·dt", self.duration));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            problems.push(format!("noise_std must be non-negative, got {}", self.noise_std));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Also checks that the step resolves the fastest filter: `dt·g_max ≤ 0.5`.
    pub fn validate(&self, fastest_cutoff: f64) -> Result<()> {
        self.validate_basic()?;
        if self.dt * fastest_cutoff > 0.5 {
            return Err(Error::Config(format!(
                "dt = {} is too coarse for a {} rad/s filter (dt·g must be ≤ 0.5)",
                self.dt, fastest_cutoff
            )));
        }
        Ok(())
    }

    /// `floor(duration/dt)`; the trajectory has one more record.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt * (1.0 + 1e-12)).floor() as usize
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionModel {
    /// N (or N·m)
    pub coulomb: f64,
    pub viscous: f64,
    /// Velocity scale of the tanh Coulomb approximation.
    pub smoothing_velocity: f64,
}

impl Default for FrictionModel {
    fn default() -> Self {
        Self::none()
    }
}

impl FrictionModel {
    pub fn none() -> Self {
        Self { coulomb: 0.0, viscous: 0.0, smoothing_velocity: 1e-3 }
    }

    pub fn new(coulomb: f64, viscous: f64, smoothing_velocity: f64) -> Result<Self> {
        let f = Self { coulomb, viscous, smoothing_velocity };
        if !(coulomb >= 0.0 && viscous >= 0.0 && smoothing_velocity >= 0.0)
            || !(coulomb.is_finite() && viscous.is_finite() && smoothing_velocity.is_finite())
        {
            return Err(Error::Config("friction coefficients must be non-negative".into()));
        }
        if coulomb > 0.0 && smoothing_velocity <= 0.0 {
            return Err(Error::Config("Coulomb friction needs a positive smoothing velocity".into()));
        }
        Ok(f)
    }

    pub fn force(&self, qd: f64) -> f64 {
        let c = if self.coulomb > 0.0 { self.coulomb * (qd / self.smoothing_velocity).tanh() } else { 0.0 };
        c + self.viscous * qd
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q_m: f64,
    pub qdot_m: f64,
    pub v_meas: f64,
    pub i_m: f64,
    pub f_dis_hat: f64,
    pub f_l_hat: f64,
    pub f_l_true: f64,
    pub contact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<Sample>,
}

pub const TRAJECTORY_HEADER: &str = "t,q_m,qdot_m,v_meas,I_m,F_dis_hat,F_l_hat,F_l_true,contact";

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn column(&self, f: impl Fn(&Sample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.column(|s| s.t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 120);
        out.push_str(TRAJECTORY_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.t,
                s.q_m,
                s.qdot_m,
                s.v_meas,
                s.i_m,
                s.f_dis_hat,
                s.f_l_hat,
                s.f_l_true,
                u8::from(s.contact)
            );
        }
        out
    }
}
