use num_complex::Complex64;

use super::interconnect::SignalSystem;
use super::{Environment, VelocityMeasurement};
use crate::error::{Error, Result};
use crate::observer::{ObserverConfig, PlantParams};
use crate::poly_tf::{Polynomial, TransferFunction};

/// Linearized RFOB force loop in permanent contact.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceLoopModel {
    /// Loop gain with `C_f` factored out: `F̂_l / q̈_des` with the loop open.
    pub open_loop: TransferFunction,
    /// `F̂_l / F_l_ref` at the given `C_f`.
    pub closed_loop: TransferFunction,
    /// `F_l / F_l_ref` at the given `C_f`.
    pub true_force_tf: TransferFunction,
    /// Zeros of `open_loop`.
    pub zeros: Vec<Complex64>,
    /// Closed-loop poles at the given `C_f`.
    pub poles: Vec<Complex64>,
}

impl ForceLoopModel {
    /// Closed-loop characteristic polynomial `den + C_f·num` of the loop gain.
    pub fn characteristic(&self, c_f: f64) -> Polynomial {
        self.open_loop.den() + &self.open_loop.num().scale(c_f)
    }

    pub fn max_zero_real(&self) -> f64 {
        self.zeros.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// RFOB partial maps `(F̂_l/I_m, F̂_l/v_meas)`:
/// `K̂·g/(s+g)` and `−Ĵ·g·s/(s+g)`.
pub fn rfob_estimator_tf(obs: &ObserverConfig) -> Result<(TransferFunction, TransferFunction)> {
    obs.validate()?;
    let den = Polynomial::linear(obs.g_rfob);
    Ok((
        TransferFunction::new(Polynomial::constant(obs.k_tau_hat * obs.g_rfob), den.clone())?,
        TransferFunction::new(Polynomial::monomial(-obs.j_hat * obs.g_rfob, 1), den)?,
    ))
}

const Q: usize = 0;
const FL: usize = 1;
const V: usize = 2;
const FD: usize = 3;
const FR: usize = 4;
const I: usize = 5;
const U: usize = 6;

/// Signal equations of the force loop. With `closed = None` the desired
/// acceleration is the external input; otherwise it is `C_f·(F_ref − F̂_l)`
/// and `F_ref` is the input.
fn force_system(
    plant: &PlantParams,
    obs: &ObserverConfig,
    env: &Environment,
    velocity: VelocityMeasurement,
    closed: Option<f64>,
) -> SignalSystem {
    let PlantParams { j_m, k_tau, j_mn, k_tau_n } = *plant;
    let (gd, gr) = (obs.g_dob, obs.g_rfob);
    let c = Polynomial::constant;
    let zero = Polynomial::zero;
    let mut sys = SignalSystem::new(if closed.is_some() { 7 } else { 6 });
    sys.equation(&[(Q, Polynomial::monomial(j_m, 2)), (FL, c(1.0)), (I, c(-k_tau))], zero())
        .equation(&[(FL, c(1.0)), (Q, -&env.impedance())], zero());
    match velocity {
        VelocityMeasurement::Ideal => sys.equation(&[(V, c(1.0)), (Q, Polynomial::monomial(-1.0, 1))], zero()),
        VelocityMeasurement::Filtered => sys.equation(
            &[(V, Polynomial::linear(obs.g_v)), (Q, Polynomial::monomial(-obs.g_v, 1))],
            zero(),
        ),
    };
    sys.equation(
        &[(FD, Polynomial::linear(gd)), (I, c(-gd * k_tau_n)), (V, Polynomial::monomial(gd * j_mn, 1))],
        zero(),
    )
    .equation(
        &[(FR, Polynomial::linear(gr)), (I, c(-gr * obs.k_tau_hat)), (V, Polynomial::monomial(gr * obs.j_hat, 1))],
        zero(),
    );
    match closed {
        None => sys.equation(&[(I, c(k_tau_n)), (FD, c(-1.0))], c(j_mn)),
        Some(c_f) => sys
            .equation(&[(I, c(k_tau_n)), (FD, c(-1.0)), (U, c(-j_mn))], zero())
            .equation(&[(U, c(1.0)), (FR, c(c_f))], c(c_f)),
    };
    sys
}

/// Composes the RFOB force loop around a spring–damper contact (surface at
/// the origin, friction ignored). The linear analysis uses
/// [`VelocityMeasurement::Ideal`] unless a filter is requested.
pub fn compose_force_loop(
    plant: &PlantParams,
    obs: &ObserverConfig,
    env: &Environment,
    c_f: f64,
    velocity: VelocityMeasurement,
) -> Result<ForceLoopModel> {
    plant.validate()?;
    obs.validate()?;
    env.require_contact()?;
    if !(c_f >= 0.0 && c_f.is_finite()) {
        return Err(Error::InvalidParameter(format!("C_f must be non-negative and finite, got {c_f}")));
    }
    let open_loop = force_system(plant, obs, env, velocity, None).transfer(FR)?;
    let closed = force_system(plant, obs, env, velocity, Some(c_f));
    let closed_loop = closed.transfer(FR)?;
    let true_force_tf = closed.transfer(FL)?;
    Ok(ForceLoopModel {
        zeros: open_loop.zeros()?,
        poles: closed_loop.poles()?,
        open_loop,
        closed_loop,
        true_force_tf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plant() -> PlantParams {
        PlantParams::nominal(0.004, 0.4).unwrap()
    }

    fn obs(g_rfob: f64, j_hat: f64) -> ObserverConfig {
        ObserverConfig::new(300.0, g_rfob, 1000.0, j_hat, 0.4).unwrap()
    }

    fn wall() -> Environment {
        Environment::new(2.0, 3000.0, 0.0, 0.0).unwrap()
    }

    /// Solves the closed-loop signal equations directly at one complex `s`.
    fn pointwise(plant: &PlantParams, o: &ObserverConfig, env: &Environment, c_f: f64, s: Complex64) -> (Complex64, Complex64) {
        // eliminate by hand: I from plant + contact, then close the loop on F_ref = 1
        let z = env.d_env * s + env.k_env;
        let v_per_q = s;
        let i_per_q = (plant.j_m * s * s + z) / plant.k_tau;
        let fd_per_q = o.g_dob / (s + o.g_dob) * (plant.k_tau_n * i_per_q - plant.j_mn * s * v_per_q);
        let fr_per_q = o.g_rfob / (s + o.g_rfob) * (o.k_tau_hat * i_per_q - o.j_hat * s * v_per_q);
        // K_n I − F̂_d = J_n C_f (1 − F̂_r)
        let q = plant.j_mn * c_f / (plant.k_tau_n * i_per_q - fd_per_q + plant.j_mn * c_f * fr_per_q);
        (fr_per_q * q, z * q)
    }

    #[test]
    fn composition_matches_pointwise_solution() {
        let p = PlantParams::new(0.004, 0.45, 0.005, 0.4).unwrap();
        let o = ObserverConfig::new(300.0, 700.0, 1000.0, 0.0045, 0.5).unwrap();
        let env = wall();
        let m = compose_force_loop(&p, &o, &env, 800.0, VelocityMeasurement::Ideal).unwrap();
        for s in [Complex64::new(0.3, 2.0), Complex64::new(-5.0, 50.0), Complex64::new(10.0, 700.0)] {
            let (fr, fl) = pointwise(&p, &o, &env, 800.0, s);
            assert!((m.closed_loop.eval_s(s).unwrap() - fr).norm() < 1e-9 * fr.norm().max(1.0));
            assert!((m.true_force_tf.eval_s(s).unwrap() - fl).norm() < 1e-9 * fl.norm().max(1.0));
        }
    }

    #[test]
    fn closed_loop_denominator_is_loop_characteristic() {
        let m = compose_force_loop(&plant(), &obs(900.0, 0.004), &wall(), 500.0, VelocityMeasurement::Filtered).unwrap();
        assert!(m.open_loop.is_proper());
        let ch = m.characteristic(500.0);
        assert!(m.closed_loop.den().relative_distance_normalized(&ch) < 1e-10);
    }

    #[test]
    fn integrator_gives_unit_dc_estimate() {
        for c_f in [10.0, 300.0, 1000.0] {
            let m = compose_force_loop(&plant(), &obs(300.0, 0.004), &wall(), c_f, VelocityMeasurement::Ideal).unwrap();
            assert!((m.closed_loop.dc_gain().unwrap() - 1.0).abs() < 1e-9);
            assert!((m.true_force_tf.dc_gain().unwrap() - 1.0).abs() < 1e-9);
            assert!(m.open_loop.dc_gain().is_none());
        }
    }

    #[test]
    fn low_frequency_estimate_tracks_true_force() {
        let m = compose_force_loop(&plant(), &obs(300.0, 0.004), &wall(), 400.0, VelocityMeasurement::Ideal).unwrap();
        let w = 1.0;
        let ratio = m.closed_loop.eval(w).unwrap() / m.true_force_tf.eval(w).unwrap();
        assert!((ratio.norm() - 1.0).abs() < 0.02);
    }

    #[test]
    fn rhp_zero_iff_inertia_overestimated() {
        for (ratio, rhp) in [(0.8, false), (1.0, false), (1.5, true)] {
            let m = compose_force_loop(&plant(), &obs(300.0, ratio * 0.004), &wall(), 100.0, VelocityMeasurement::Ideal).unwrap();
            assert_eq!(m.max_zero_real() > 0.0, rhp, "ratio {ratio}: {:?}", m.zeros);
        }
    }

    #[test]
    fn perfect_identification_zeros_in_lhp() {
        let m = compose_force_loop(&plant(), &obs(300.0, 0.004), &wall(), 100.0, VelocityMeasurement::Ideal).unwrap();
        assert!(m.max_zero_real() <= 1e-9);
        // with a filtered velocity the wall must be damped enough: D(D·g_v + K) > J·K·g_v
        let stiff = Environment::new(100.0, 1e5, 0.0, 0.0).unwrap();
        let m = compose_force_loop(&plant(), &obs(300.0, 0.004), &stiff, 100.0, VelocityMeasurement::Filtered).unwrap();
        assert!(m.max_zero_real() <= 1e-9);
        let m = compose_force_loop(&plant(), &obs(300.0, 0.004), &wall(), 100.0, VelocityMeasurement::Filtered).unwrap();
        assert!(m.max_zero_real() > 0.0);
    }

    #[test]
    fn faster_rfob_adds_phase_lead() {
        let slow = compose_force_loop(&plant(), &obs(300.0, 0.004), &wall(), 1.0, VelocityMeasurement::Ideal).unwrap();
        let fast = compose_force_loop(&plant(), &obs(900.0, 0.004), &wall(), 1.0, VelocityMeasurement::Ideal).unwrap();
        for w in [350.0, 500.0, 700.0, 850.0] {
            let a = slow.open_loop.eval(w).unwrap().arg();
            let b = fast.open_loop.eval(w).unwrap().arg();
            assert!(b > a, "w={w}: {b} <= {a}");
        }
    }

    #[test]
    fn estimator_partial_maps() {
        let (from_i, from_v) = rfob_estimator_tf(&obs(300.0, 0.004)).unwrap();
        assert!((from_i.dc_gain().unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(from_v.dc_gain().unwrap(), 0.0);
        let big = ObserverConfig::new(300.0, 1e9, 1000.0, 0.004, 0.4).unwrap();
        let (_, v) = rfob_estimator_tf(&big).unwrap();
        let h = v.eval(10.0).unwrap();
        assert!((h - Complex64::new(0.0, -0.04)).norm() < 1e-6);
    }

    #[test]
    fn no_contact_rejected() {
        let free = Environment::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let r = compose_force_loop(&plant(), &obs(300.0, 0.004), &free, 1.0, VelocityMeasurement::Ideal);
        assert_eq!(r.unwrap_err(), Error::NoContact);
    }
}
