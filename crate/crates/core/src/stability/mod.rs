//! Stability analyses: Routh–Hurwitz, root loci over a scalar gain, zero
//! scans, sensitivity peaks and one-parameter stability maps.

mod locus;
mod map;
mod routh;

pub use locus::{bisect_crossing, max_real_at, root_locus, Crossing, RootLocus, RootLocusBranch};
pub use map::{stability_map, StabilityMap, SweepParameter};
pub use routh::{routh_hurwitz, RouthReport};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loop_builder::{compose_force_loop, Environment, PositionGains, VelocityMeasurement};
use crate::observer::{ObserverConfig, PlantParams};
use crate::poly_tf::{log_grid, Polynomial, TransferFunction};

/// Relative distance from the imaginary axis below which a root is marginal.
pub const AXIS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClass {
    Stable,
    Marginal,
    Unstable,
}

/// Largest real part; `-inf` for an empty set.
pub fn spectral_abscissa(roots: &[Complex64]) -> f64 {
    roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn classify_roots(roots: &[Complex64]) -> RootClass {
    let mut class = RootClass::Stable;
    for r in roots {
        let tol = AXIS_TOLERANCE * r.norm();
        if r.re > tol {
            return RootClass::Unstable;
        }
        if r.re.abs() <= tol {
            class = RootClass::Marginal;
        }
    }
    class
}

/// Smallest α for which the ideal-velocity position loop is stable:
/// `g·K_p / ((g+K_D)(K_p+g·K_D))`.
pub fn third_order_alpha_condition(g_dob: f64, gains: &PositionGains) -> f64 {
    let PositionGains { k_p, k_d } = *gains;
    g_dob * k_p / ((g_dob + k_d) * (k_p + g_dob * k_d))
}

/// Peak of `|tf(jω)|` over `[omega_min, omega_max]`: a 100-per-decade log
/// grid followed by golden-section refinement around the best grid point.
/// Returns `(peak, omega)`.
pub fn sensitivity_peak(tf: &TransferFunction, omega_min: f64, omega_max: f64) -> Result<(f64, f64)> {
    let grid = log_grid(omega_min, omega_max, 100)?;
    let mags = grid.iter().map(|&w| Ok(tf.eval(w)?.norm())).collect::<Result<Vec<f64>>>()?;
    let (imax, _) = mags
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &m)| if m > best.1 { (i, m) } else { best });
    let (mut a, mut b) = (
        grid[imax.saturating_sub(1)].ln(),
        grid[(imax + 1).min(grid.len() - 1)].ln(),
    );
    let f = |x: f64| -> Result<f64> { Ok(tf.eval(x.exp())?.norm()) };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    let (mut peak, mut omega) = (mags[imax], grid[imax]);
    for x in [c, d] {
        let m = f(x)?;
        if m > peak {
            peak = m;
            omega = x.exp();
        }
    }
    Ok((peak, omega))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroScanEntry {
    /// `J_hat / J_m`
    pub ratio: f64,
    pub max_zero_real: f64,
    pub rhp_zero: bool,
}

/// Loop-gain zeros of the force loop as the identified inertia varies.
pub fn rhp_zero_scan(
    plant: &PlantParams,
    obs_base: &ObserverConfig,
    env: &Environment,
    j_hat_ratios: &[f64],
    velocity: VelocityMeasurement,
) -> Result<Vec<ZeroScanEntry>> {
    j_hat_ratios
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0 && ratio.is_finite()) {
                return Err(Error::InvalidParameter(format!("inertia ratio must be positive, got {ratio}")));
            }
            let obs = ObserverConfig { j_hat: ratio * plant.j_m, ..*obs_base };
            let model = compose_force_loop(plant, &obs, env, 1.0, velocity)?;
            let max_zero_real = model.max_zero_real();
            Ok(ZeroScanEntry { ratio, max_zero_real, rhp_zero: max_zero_real > 0.0 })
        })
        .collect()
}

/// Critical force gain of the composed force loop over a log grid, refined
/// by bisection.
pub fn force_critical_gain(
    plant: &PlantParams,
    obs: &ObserverConfig,
    env: &Environment,
    velocity: VelocityMeasurement,
    c_f_min: f64,
    c_f_max: f64,
) -> Result<Crossing> {
    let model = compose_force_loop(plant, obs, env, 0.0, velocity)?;
    let grid = log_grid(c_f_min, c_f_max, 40)?;
    Ok(root_locus(model.open_loop.num(), model.open_loop.den(), &grid)?.crossing)
}

/// Normalized characteristic polynomial helper for callers holding a loop gain.
pub fn closed_loop_characteristic(loop_gain: &TransferFunction, k: f64) -> Polynomial {
    loop_gain.den() + &loop_gain.num().scale(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_builder::{position_loop_ideal_denominator, sensitivity_tf};

    #[test]
    fn critical_alpha_reference() {
        let gains = PositionGains::new(400.0, 40.0).unwrap();
        let a = third_order_alpha_condition(300.0, &gains);
        assert!((a - 300.0 * 400.0 / (340.0 * 12400.0)).abs() < 1e-15);
        assert!((a - 0.028_46).abs() < 1e-5);
        let above = position_loop_ideal_denominator(a * (1.0 + 1e-6), 300.0, &gains).unwrap();
        let below = position_loop_ideal_denominator(a * (1.0 - 1e-6), 300.0, &gains).unwrap();
        assert!(routh_hurwitz(&above).unwrap().stable);
        assert!(!routh_hurwitz(&below).unwrap().stable);
        let stiff = PositionGains::new(400.0, 1e9).unwrap();
        assert!(third_order_alpha_condition(300.0, &stiff) < 1e-8);
    }

    #[test]
    fn classify() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        assert_eq!(classify_roots(&[c(-1.0, 0.0), c(-2.0, 3.0)]), RootClass::Stable);
        assert_eq!(classify_roots(&[c(-1.0, 0.0), c(0.0, 3.0)]), RootClass::Marginal);
        assert_eq!(classify_roots(&[c(0.0, 0.0)]), RootClass::Marginal);
        assert_eq!(classify_roots(&[c(1e-3, 3.0), c(0.0, 1.0)]), RootClass::Unstable);
    }

    #[test]
    fn first_order_peak_at_low_end() {
        let tf = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
        let (peak, w) = sensitivity_peak(&tf, 1e-3, 1e3).unwrap();
        assert!((peak - 1.0).abs() < 1e-6);
        assert!(w < 2e-3);
    }

    #[test]
    fn sensitivity_peak_grows_when_constraint_violated() {
        // g_v = 1000: ξ = 0.7071 at α·g = 500, ξ ≈ 0.35 at α·g = 2000
        let boundary = sensitivity_tf(1.0, 500.0, 1000.0).unwrap();
        let violated = sensitivity_tf(4.0, 500.0, 1000.0).unwrap();
        let (pb, _) = sensitivity_peak(&boundary, 1.0, 1e5).unwrap();
        let (pv, wv) = sensitivity_peak(&violated, 1.0, 1e5).unwrap();
        assert!(pb >= 1.0 - 1e-9);
        assert!(pv > pb);
        // analytic peak of s(s+a)/(s²+as+b) for this case sits near w_n
        assert!(wv > 500.0 && wv < 5000.0);
    }
}
