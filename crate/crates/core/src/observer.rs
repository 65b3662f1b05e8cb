//! Plant and observer parameters, the nominalization ratio α and the
//! bandwidth constraint that keeps the inner-loop sensitivity peak bounded.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Damping threshold separating acceptable from peaking sensitivity.
pub const XI_THRESHOLD: f64 = FRAC_1_SQRT_2;

/// True and nominal motor parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    /// True inertia, kg·m²
    pub j_m: f64,
    /// True torque coefficient, N·m/A
    pub k_tau: f64,
    /// Nominal inertia used by the DOB, kg·m²
    pub j_mn: f64,
    /// Nominal torque coefficient used by the DOB, N·m/A
    pub k_tau_n: f64,
}

/// Observer filter cutoffs and the identified parameters used by the RFOB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverConfig {
    /// DOB low-pass cutoff, rad/s
    pub g_dob: f64,
    /// RFOB low-pass cutoff, rad/s
    pub g_rfob: f64,
    /// Velocity-measurement low-pass cutoff, rad/s
    pub g_v: f64,
    /// Identified inertia, kg·m²
    pub j_hat: f64,
    /// Identified torque coefficient, N·m/A
    pub k_tau_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrder {
    /// Natural frequency, rad/s
    pub w_n: f64,
    pub xi: f64,
}

/// Outcome of the bandwidth constraint `α·g_dob ≤ g_v/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignVerdict {
    pub alpha: f64,
    /// g_v / g_dob
    pub kappa: f64,
    pub w_n: f64,
    pub xi: f64,
    /// α·g_dob, rad/s
    pub constraint_lhs: f64,
    /// g_v/2, rad/s
    pub constraint_rhs: f64,
    pub satisfied: bool,
    /// rhs − lhs, rad/s
    pub margin: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl PlantParams {
    pub fn new(j_m: f64, k_tau: f64, j_mn: f64, k_tau_n: f64) -> Result<Self> {
        let p = Self { j_m, k_tau, j_mn, k_tau_n };
        p.validate()?;
        Ok(p)
    }

    /// Nominal parameters equal to the true ones (α = 1).
    pub fn nominal(j_m: f64, k_tau: f64) -> Result<Self> {
        Self::new(j_m, k_tau, j_m, k_tau)
    }

    pub fn validate(&self) -> Result<()> {
        positive("J_m", self.j_m)?;
        positive("K_tau", self.k_tau)?;
        positive("J_mn", self.j_mn)?;
        positive("K_tau_n", self.k_tau_n)
    }

    /// `J_mn·K_tau / (J_m·K_tau_n)`; above 1 the DOB behaves as a lead compensator.
    pub fn alpha(&self) -> f64 {
        (self.j_mn * self.k_tau) / (self.j_m * self.k_tau_n)
    }

    /// Same plant with the nominal inertia chosen to give the requested α.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Self::new(self.j_m, self.k_tau, alpha * self.j_m * self.k_tau_n / self.k_tau, self.k_tau_n)
    }
}

impl ObserverConfig {
    pub fn new(g_dob: f64, g_rfob: f64, g_v: f64, j_hat: f64, k_tau_hat: f64) -> Result<Self> {
        let o = Self { g_dob, g_rfob, g_v, j_hat, k_tau_hat };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        positive("g_dob", self.g_dob)?;
        positive("g_rfob", self.g_rfob)?;
        positive("g_v", self.g_v)?;
        positive("J_hat", self.j_hat)?;
        positive("K_tau_hat", self.k_tau_hat)
    }

    /// `g_v / g_dob`, always derived.
    pub fn kappa(&self) -> f64 {
        self.g_v / self.g_dob
    }
}

/// Natural frequency and damping of the inner-loop characteristic polynomial
/// `s² + κ·g·s + α·κ·g²`.
pub fn second_order_params(alpha: f64, kappa: f64, g_dob: f64) -> SecondOrder {
    SecondOrder {
        w_n: (alpha * kappa).sqrt() * g_dob,
        xi: 0.5 * (kappa / alpha).sqrt(),
    }
}

pub fn check_bandwidth_constraint(plant: &PlantParams, obs: &ObserverConfig) -> DesignVerdict {
    let alpha = plant.alpha();
    let kappa = obs.kappa();
    let SecondOrder { w_n, xi } = second_order_params(alpha, kappa, obs.g_dob);
    let constraint_lhs = alpha * obs.g_dob;
    let constraint_rhs = obs.g_v / 2.0;
    DesignVerdict {
        alpha,
        kappa,
        w_n,
        xi,
        constraint_lhs,
        constraint_rhs,
        satisfied: constraint_lhs <= constraint_rhs,
        margin: constraint_rhs - constraint_lhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(g_dob: f64, g_v: f64) -> ObserverConfig {
        ObserverConfig::new(g_dob, g_dob, g_v, 0.004, 0.4).unwrap()
    }

    #[test]
    fn alpha_cases() {
        assert_eq!(PlantParams::nominal(0.004, 0.4).unwrap().alpha(), 1.0);
        assert_eq!(PlantParams::new(0.004, 0.4, 0.008, 0.4).unwrap().alpha(), 2.0);
        let a = PlantParams::new(0.004, 0.5, 0.006, 0.4).unwrap().alpha();
        assert!((a - 0.006 * 0.5 / (0.004 * 0.4)).abs() < 1e-15);
        assert!((a - 1.875).abs() < 1e-12);
    }

    #[test]
    fn with_alpha_round_trip() {
        let p = PlantParams::new(0.004, 0.5, 0.006, 0.4).unwrap().with_alpha(3.0).unwrap();
        assert!((p.alpha() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(PlantParams::new(0.0, 0.4, 0.004, 0.4).is_err());
        assert!(ObserverConfig::new(300.0, 300.0, -1.0, 0.004, 0.4).is_err());
        assert!(PlantParams::new(f64::NAN, 0.4, 0.004, 0.4).is_err());
    }

    #[test]
    fn second_order_reference_values() {
        let so = second_order_params(1.0, 2.0, 100.0);
        assert!((so.w_n - 141.421_356).abs() < 1e-5);
        assert!((so.xi - 0.707_106_8).abs() < 1e-6);

        let so = second_order_params(4.0, 2.0, 100.0);
        assert!((so.w_n - 282.842_712).abs() < 1e-5);
        assert!((so.xi - 0.353_553_4).abs() < 1e-6);

        for a in [0.3, 1.0, 7.0] {
            assert_eq!(second_order_params(a, a, 55.0).xi, 0.5);
        }
    }

    #[test]
    fn boundary_case() {
        let v = check_bandwidth_constraint(&PlantParams::nominal(0.004, 0.4).unwrap(), &obs(500.0, 1000.0));
        assert!(v.satisfied);
        assert_eq!(v.margin, 0.0);
        assert!((v.xi - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn near_ideal_velocity() {
        let v = check_bandwidth_constraint(&PlantParams::nominal(0.004, 0.4).unwrap(), &obs(100.0, 1e9));
        assert!(v.satisfied);
        assert!(v.xi > 100.0);
    }

    #[test]
    fn violated_case() {
        let plant = PlantParams::nominal(0.004, 0.4).unwrap().with_alpha(3.0).unwrap();
        let v = check_bandwidth_constraint(&plant, &obs(400.0, 1000.0));
        assert!(!v.satisfied);
        assert!((v.margin + 700.0).abs() < 1e-9);
        // κ = 2.5 here, so ξ = 0.5·√(2.5/3)
        assert!((v.xi - 0.456_435).abs() < 1e-6);
    }

    #[test]
    fn alpha_scale_invariance() {
        let p = PlantParams::new(0.004, 0.5, 0.006, 0.4).unwrap();
        let q = PlantParams::new(0.04, 0.5, 0.06, 0.4).unwrap();
        let r = PlantParams::new(0.004, 5.0, 0.006, 4.0).unwrap();
        assert!((p.alpha() - q.alpha()).abs() < 1e-12);
        assert!((p.alpha() - r.alpha()).abs() < 1e-12);
    }
}
