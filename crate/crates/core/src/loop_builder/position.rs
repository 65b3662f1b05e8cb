use super::interconnect::SignalSystem;
use super::{check_positive, PositionGains, VelocityMeasurement};
use crate::error::Result;
use crate::observer::{ObserverConfig, PlantParams};
use crate::poly_tf::{Polynomial, TransferFunction};

/// Printed ideal-velocity position loop, `q̈/q̈_ref`.
///
/// The numerator carries a factor `s` that makes the ratio improper; it is
/// kept as printed. Use [`position_loop_ideal_denominator`] for stability work
/// and [`compose_position_loop`] for responses.
pub fn position_loop_ideal(alpha: f64, g_dob: f64, gains: &PositionGains) -> Result<TransferFunction> {
    let num = &(&Polynomial::s() * &Polynomial::linear(g_dob)) * &gains.characteristic();
    TransferFunction::new(num, position_loop_ideal_denominator(alpha, g_dob, gains)?)
}

/// `α⁻¹s³ + (g+K_D)s² + (K_p+g·K_D)s + g·K_p`, not normalized.
pub fn position_loop_ideal_denominator(alpha: f64, g_dob: f64, gains: &PositionGains) -> Result<Polynomial> {
    check_positive(&[("alpha", alpha), ("g_dob", g_dob)])?;
    let PositionGains { k_p, k_d } = *gains;
    Ok(Polynomial::new(vec![g_dob * k_p, k_p + g_dob * k_d, g_dob + k_d, 1.0 / alpha]))
}

/// Printed finite-velocity position loop.
pub fn position_loop_finite_gv(alpha: f64, g_dob: f64, g_v: f64, gains: &PositionGains) -> Result<TransferFunction> {
    check_positive(&[("alpha", alpha), ("g_dob", g_dob), ("g_v", g_v)])?;
    let num = (&(&Polynomial::linear(g_v) * &Polynomial::linear(g_dob)) * &gains.characteristic()).scale(alpha);
    let head = Polynomial::new(vec![0.0, 0.0, alpha * g_v * g_dob, g_v, 1.0]);
    TransferFunction::new(num.clone(), &head + &num)
}

const Q: usize = 0;
const V: usize = 1;
const FD: usize = 2;
const I: usize = 3;
const U: usize = 4;

fn position_system(plant: &PlantParams, obs: &ObserverConfig, gains: &PositionGains, velocity: VelocityMeasurement) -> Result<SignalSystem> {
    plant.validate()?;
    obs.validate()?;
    let PlantParams { j_m, k_tau, j_mn, k_tau_n } = *plant;
    let g = obs.g_dob;
    let c = Polynomial::constant;
    let mut sys = SignalSystem::new(5);
    sys.equation(&[(Q, Polynomial::monomial(j_m, 2)), (I, c(-k_tau))], Polynomial::zero());
    match velocity {
        VelocityMeasurement::Ideal => sys.equation(&[(V, c(1.0)), (Q, Polynomial::monomial(-1.0, 1))], Polynomial::zero()),
        VelocityMeasurement::Filtered => sys.equation(
            &[(V, Polynomial::linear(obs.g_v)), (Q, Polynomial::monomial(-obs.g_v, 1))],
            Polynomial::zero(),
        ),
    };
    sys.equation(
        &[(FD, Polynomial::linear(g)), (I, c(-g * k_tau_n)), (V, Polynomial::monomial(g * j_mn, 1))],
        Polynomial::zero(),
    )
    .equation(&[(I, c(k_tau_n)), (FD, c(-1.0)), (U, c(-j_mn))], Polynomial::zero())
    .equation(&[(U, c(1.0)), (V, c(gains.k_d)), (Q, c(gains.k_p))], gains.characteristic());
    Ok(sys)
}

/// Block-derived `q̈/q̈_ref` (equivalently `q/q_ref`): rigid plant driven by
/// `K_tau·I`, DOB on the nominal model, PD plus acceleration feedforward.
pub fn compose_position_loop(
    plant: &PlantParams,
    obs: &ObserverConfig,
    gains: &PositionGains,
    velocity: VelocityMeasurement,
) -> Result<TransferFunction> {
    position_system(plant, obs, gains, velocity)?.transfer(Q)
}

/// Characteristic polynomial of the composed position loop, normalized monic.
pub fn compose_position_characteristic(
    plant: &PlantParams,
    obs: &ObserverConfig,
    gains: &PositionGains,
    velocity: VelocityMeasurement,
) -> Result<Polynomial> {
    Ok(compose_position_loop(plant, obs, gains, velocity)?.den().clone())
}

/// Comparison of the printed finite-velocity formula with the composed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteVelocityDiscrepancy {
    pub printed_denominator: Polynomial,
    pub composed_denominator: Polynomial,
    /// Largest coefficient difference after monic normalization.
    pub relative_difference: f64,
    /// Leading coefficient of the printed denominator before normalization.
    pub printed_leading: f64,
    /// Distance of each form's large-`g_v` limit from the ideal denominator.
    pub printed_limit_distance: f64,
    pub composed_limit_distance: f64,
}

impl FiniteVelocityDiscrepancy {
    pub fn report(&self) -> String {
        format!(
            "printed denominator (monic): {}\ncomposed denominator (monic): {}\nmax relative coefficient difference: {:.3e}\n\
             printed s^4 coefficient: {}\nlarge-g_v limit vs ideal denominator: printed {:.3e}, composed {:.3e}\n",
            self.printed_denominator.scale(1.0 / self.printed_leading),
            self.composed_denominator,
            self.relative_difference,
            self.printed_leading,
            self.printed_limit_distance,
            self.composed_limit_distance,
        )
    }
}

/// Drops the vanishing top coefficient of `p(g_v)/g_v` for a very large `g_v`.
fn limit_part(p: &Polynomial, g_v: f64) -> Polynomial {
    let scaled = p.scale(1.0 / g_v);
    let cut = 1e-6 * scaled.max_abs_coeff();
    let mut c = scaled.coeffs().to_vec();
    while c.last().is_some_and(|x| x.abs() < cut) {
        c.pop();
    }
    Polynomial::new(c)
}

pub fn finite_velocity_discrepancy(
    plant: &PlantParams,
    obs: &ObserverConfig,
    gains: &PositionGains,
) -> Result<FiniteVelocityDiscrepancy> {
    let alpha = plant.alpha();
    let g = obs.g_dob;
    let printed_raw = {
        let num = (&(&Polynomial::linear(obs.g_v) * &Polynomial::linear(g)) * &gains.characteristic()).scale(alpha);
        &Polynomial::new(vec![0.0, 0.0, alpha * obs.g_v * g, obs.g_v, 1.0]) + &num
    };
    let composed = compose_position_characteristic(plant, obs, gains, VelocityMeasurement::Filtered)?;

    let big = 1e9;
    let far = ObserverConfig { g_v: big, ..*obs };
    let printed_far = position_loop_finite_gv(alpha, g, big, gains)?.den().scale(1.0 + alpha);
    let composed_far = compose_position_characteristic(plant, &far, gains, VelocityMeasurement::Filtered)?;
    let ideal = position_loop_ideal_denominator(alpha, g, gains)?;

    Ok(FiniteVelocityDiscrepancy {
        relative_difference: printed_raw.relative_distance_normalized(&composed),
        printed_leading: printed_raw.leading().unwrap_or(0.0),
        printed_denominator: printed_raw,
        composed_denominator: composed,
        printed_limit_distance: limit_part(&printed_far, big).relative_distance_normalized(&ideal),
        composed_limit_distance: limit_part(&composed_far, big).relative_distance_normalized(&ideal),
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn gains() -> PositionGains {
        PositionGains::new(400.0, 40.0).unwrap()
    }

    fn obs(g_dob: f64, g_v: f64) -> ObserverConfig {
        ObserverConfig::new(g_dob, g_dob, g_v, 0.004, 0.4).unwrap()
    }

    #[test]
    fn ideal_alpha_one_factorizes() {
        let d = position_loop_ideal_denominator(1.0, 300.0, &gains()).unwrap();
        let r = d.roots().unwrap();
        let expected = [-300.0, -20.0, -20.0];
        for (root, e) in r.iter().zip(expected) {
            assert!((root - Complex64::new(e, 0.0)).norm() < 1e-6, "{root}");
        }
        assert!(!position_loop_ideal(1.0, 300.0, &gains()).unwrap().is_proper());
    }

    #[test]
    fn ideal_alpha_two_coefficients() {
        let d = position_loop_ideal_denominator(2.0, 300.0, &gains()).unwrap();
        assert_eq!(d.coeffs(), &[120000.0, 12400.0, 340.0, 0.5]);
        assert!(d.roots().unwrap().iter().all(|r| r.re < 0.0));
    }

    #[test]
    fn small_alpha_loses_damping() {
        let damping = |alpha: f64| {
            position_loop_ideal_denominator(alpha, 300.0, &gains())
                .unwrap()
                .roots()
                .unwrap()
                .iter()
                .map(|r| -r.re / r.norm())
                .fold(f64::INFINITY, f64::min)
        };
        let max_re = position_loop_ideal_denominator(0.01, 300.0, &gains())
            .unwrap()
            .roots()
            .unwrap()
            .iter()
            .map(|r| r.re)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re > -1e-9 || damping(0.01) < damping(1.0));
    }

    #[test]
    fn finite_printed_structure() {
        let tf_raw_lead = 1.0 + 1.0;
        let d = position_loop_finite_gv(1.0, 300.0, 1000.0, &gains()).unwrap();
        // normalized by the s^4 coefficient 1 + α
        let constant = d.den().coeff(0) * tf_raw_lead;
        assert!((constant - 1000.0 * 300.0 * 400.0).abs() < 1e-6 * constant);
    }

    #[test]
    fn composed_ideal_matches_printed_denominator() {
        let plant = PlantParams::nominal(0.004, 0.4).unwrap().with_alpha(2.0).unwrap();
        let c = compose_position_characteristic(&plant, &obs(300.0, 1000.0), &gains(), VelocityMeasurement::Ideal).unwrap();
        let d = position_loop_ideal_denominator(2.0, 300.0, &gains()).unwrap();
        assert!(c.relative_distance_normalized(&d) < 1e-12);
    }

    #[test]
    fn composed_alpha_one_is_nominal() {
        let plant = PlantParams::nominal(0.004, 0.4).unwrap();
        let c = compose_position_characteristic(&plant, &obs(300.0, 1000.0), &gains(), VelocityMeasurement::Ideal).unwrap();
        let expected = &Polynomial::linear(300.0) * &gains().characteristic();
        assert!(c.relative_distance_normalized(&expected) < 1e-12);
        // unity at DC
        let tf = compose_position_loop(&plant, &obs(300.0, 1000.0), &gains(), VelocityMeasurement::Ideal).unwrap();
        assert!((tf.dc_gain().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composed_finite_closed_form() {
        // s²(s²+g_v s+α g g_v) + α(s+g)((K_p+K_D g_v)s + K_p g_v)
        let (alpha, g, gv) = (1.5, 300.0, 1000.0);
        let plant = PlantParams::nominal(0.004, 0.4).unwrap().with_alpha(alpha).unwrap();
        let c = compose_position_characteristic(&plant, &obs(g, gv), &gains(), VelocityMeasurement::Filtered).unwrap();
        let (kp, kd) = (400.0, 40.0);
        let expected = &Polynomial::new(vec![0.0, 0.0, alpha * g * gv, gv, 1.0])
            + &(&Polynomial::linear(g) * &Polynomial::new(vec![kp * gv, kp + kd * gv])).scale(alpha);
        assert!(c.relative_distance_normalized(&expected) < 1e-12);
    }

    #[test]
    fn discrepancy_is_reported() {
        let plant = PlantParams::nominal(0.004, 0.4).unwrap().with_alpha(2.0).unwrap();
        let d = finite_velocity_discrepancy(&plant, &obs(300.0, 1000.0), &gains()).unwrap();
        assert_eq!(d.printed_leading, 3.0);
        assert!(d.relative_difference > 1e-3);
        assert!(d.composed_limit_distance < 1e-5, "{}", d.composed_limit_distance);
        assert!(d.printed_limit_distance > 1e-3);
        assert!(d.report().contains("composed"));
    }
}
