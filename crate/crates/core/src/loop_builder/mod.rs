//! Loop construction: the DOB inner loop, the robust position loop and the
//! RFOB force loop.
//!
//! Closed forms are provided next to loops assembled from the individual
//! blocks (plant, velocity filter, observers, controllers). The block-derived
//! versions come from [`interconnect`], which keeps every block's order in the
//! characteristic polynomial.

mod force;
pub(crate) mod interconnect;
mod position;

pub use force::{compose_force_loop, rfob_estimator_tf, ForceLoopModel};
pub use position::{
    compose_position_loop, compose_position_characteristic, finite_velocity_discrepancy,
    position_loop_finite_gv, position_loop_ideal, position_loop_ideal_denominator,
    FiniteVelocityDiscrepancy,
};

use crate::error::{Error, Result};
use crate::poly_tf::{Polynomial, TransferFunction};

/// How the controller and observers see the motor velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityMeasurement {
    /// Exact velocity, `v = s·q`.
    #[default]
    Ideal,
    /// First-order low-pass at `g_v`, `v = g_v/(s+g_v)·s·q`.
    Filtered,
}

impl VelocityMeasurement {
    pub fn from_ideal_flag(ideal: bool) -> Self {
        if ideal {
            Self::Ideal
        } else {
            Self::Filtered
        }
    }
}

/// Outer-loop PD gains on the acceleration reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionGains {
    /// 1/s²
    pub k_p: f64,
    /// 1/s
    pub k_d: f64,
}

impl PositionGains {
    pub fn new(k_p: f64, k_d: f64) -> Result<Self> {
        for (name, v) in [("K_p", k_p), ("K_D", k_d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { k_p, k_d })
    }

    /// `s² + K_D·s + K_p`
    pub fn characteristic(&self) -> Polynomial {
        Polynomial::new(vec![self.k_p, self.k_d, 1.0])
    }
}

/// Lumped spring–damper contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// N·s/m
    pub d_env: f64,
    /// N/m
    pub k_env: f64,
    /// Surface position, m
    pub q_e: f64,
    /// Surface velocity, m/s
    pub qdot_e: f64,
}

impl Environment {
    pub fn new(d_env: f64, k_env: f64, q_e: f64, qdot_e: f64) -> Result<Self> {
        let env = Self { d_env, k_env, q_e, qdot_e };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("D_env", self.d_env), ("K_env", self.k_env)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.q_e.is_finite() && self.qdot_e.is_finite()) {
            return Err(Error::InvalidParameter("surface position and velocity must be finite".into()));
        }
        Ok(())
    }

    /// Fails with [`Error::NoContact`] when the wall has neither stiffness nor damping.
    pub fn require_contact(&self) -> Result<()> {
        self.validate()?;
        if self.d_env == 0.0 && self.k_env == 0.0 {
            return Err(Error::NoContact);
        }
        Ok(())
    }

    /// `D_env·s + K_env`
    pub fn impedance(&self) -> Polynomial {
        Polynomial::new(vec![self.k_env, self.d_env])
    }
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// Inner-loop open-loop gain: `α·g_dob/s`, or `α·g_v·g_dob/(s(s+g_v))` with
/// a filtered velocity.
pub fn dob_open_loop(alpha: f64, g_dob: f64, g_v: f64, velocity: VelocityMeasurement) -> Result<TransferFunction> {
    check_positive(&[("alpha", alpha), ("g_dob", g_dob)])?;
    match velocity {
        VelocityMeasurement::Ideal => TransferFunction::new(Polynomial::constant(alpha * g_dob), Polynomial::s()),
        VelocityMeasurement::Filtered => {
            check_positive(&[("g_v", g_v)])?;
            TransferFunction::new(
                Polynomial::constant(alpha * g_v * g_dob),
                Polynomial::new(vec![0.0, g_v, 1.0]),
            )
        }
    }
}

/// `T_Sen = s(s+g_v) / (s² + g_v·s + α·g_v·g_dob)`.
pub fn sensitivity_tf(alpha: f64, g_dob: f64, g_v: f64) -> Result<TransferFunction> {
    check_positive(&[("alpha", alpha), ("g_dob", g_dob), ("g_v", g_v)])?;
    TransferFunction::new(
        Polynomial::new(vec![0.0, g_v, 1.0]),
        Polynomial::new(vec![alpha * g_v * g_dob, g_v, 1.0]),
    )
}
