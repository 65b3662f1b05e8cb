use std::fmt;

use num_complex::Complex64;

use super::Polynomial;
use crate::error::{Error, Result};

/// Ratio of two real polynomials in `s`, stored with a monic denominator.
///
/// Construction never cancels common factors between numerator and
/// denominator; near pole/zero coincidences stay visible to analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

/// One point of a Bode sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    /// rad/s
    pub omega: f64,
    pub magnitude_db: f64,
    /// Unwrapped continuously along the sweep.
    pub phase_deg: f64,
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        let lead = den
            .leading()
            .ok_or_else(|| Error::DegenerateInput("transfer function with zero denominator".into()))?;
        Ok(Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn constant(k: f64) -> Self {
        Self { num: Polynomial::constant(k), den: Polynomial::one() }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == Some(0) {
            return Ok(Vec::new());
        }
        self.den.roots()
    }

    /// Finite zeros; empty for a constant or zero numerator.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        match self.num.degree() {
            None | Some(0) => Ok(Vec::new()),
            Some(_) => self.num.roots(),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree().unwrap_or(0) <= self.den.degree().unwrap_or(0)
    }

    /// Value at `s = 0`, or `None` when there is a pole at the origin.
    pub fn dc_gain(&self) -> Option<f64> {
        let d = self.den.coeff(0);
        (d != 0.0).then(|| self.num.coeff(0) / d)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { num: self.num.scale(k), den: self.den.clone() }
    }

    /// Cascade connection `self * other`.
    pub fn series(&self, other: &TransferFunction) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den).expect("product of nonzero denominators")
    }

    /// Parallel connection `self + other`.
    pub fn parallel(&self, other: &TransferFunction) -> Self {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den).expect("product of nonzero denominators")
    }

    /// Negative-feedback loop `forward / (1 + forward * feedback)`.
    pub fn feedback(&self, feedback: &TransferFunction) -> Result<Self> {
        let num = &self.num * &feedback.den;
        let den = &(&self.den * &feedback.den) + &(&self.num * &feedback.num);
        if den.is_zero() {
            return Err(Error::AlgebraicDegeneracy(
                "closed-loop denominator vanishes identically".into(),
            ));
        }
        Self::new(num, den)
    }

    /// Value at an arbitrary complex frequency.
    pub fn eval_s(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval_complex(s);
        let tol = 4.0 * f64::EPSILON * self.den.abs_eval(s.norm());
        if d.norm() <= tol {
            return Err(Error::PoleEvaluation { omega: s.im });
        }
        Ok(self.num.eval_complex(s) / d)
    }

    /// `num(jω) / den(jω)`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        self.eval_s(Complex64::new(0.0, omega))
    }

    /// Logarithmically spaced Bode data from `omega_min` to `omega_max`
    /// (both included) with `points_per_decade` resolution.
    pub fn frequency_sweep(
        &self,
        omega_min: f64,
        omega_max: f64,
        points_per_decade: usize,
    ) -> Result<Vec<FrequencyPoint>> {
        let grid = log_grid(omega_min, omega_max, points_per_decade)?;
        let mut out = Vec::with_capacity(grid.len());
        let mut prev_phase: Option<f64> = None;
        for omega in grid {
            let h = self.eval(omega)?;
            let mut phase = h.arg().to_degrees();
            if let Some(p) = prev_phase {
                phase += 360.0 * ((p - phase) / 360.0).round();
            }
            prev_phase = Some(phase);
            out.push(FrequencyPoint { omega, magnitude_db: 20.0 * h.norm().log10(), phase_deg: phase });
        }
        Ok(out)
    }
}

/// Logarithmic grid from `min` to `max`, endpoints included.
pub fn log_grid(min: f64, max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "log grid needs 0 < min < max, got [{min}, {max}]"
        )));
    }
    if points_per_decade == 0 {
        return Err(Error::InvalidParameter("points per decade must be positive".into()));
    }
    let decades = (max / min).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let (lmin, lmax) = (min.log10(), max.log10());
    Ok((0..=n)
        .map(|k| match k {
            0 => min,
            k if k == n => max,
            k => 10f64.powf(lmin + (lmax - lmin) * k as f64 / n as f64),
        })
        .collect())
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(num: &[f64], den: &[f64]) -> TransferFunction {
        TransferFunction::from_coeffs(num, den).unwrap()
    }

    #[test]
    fn canonical_monic_denominator() {
        let h = tf(&[4.0], &[2.0, 2.0]);
        assert_eq!(h.den().coeffs(), &[1.0, 1.0]);
        assert_eq!(h.num().coeffs(), &[2.0]);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(
            TransferFunction::from_coeffs(&[1.0], &[0.0]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn unity_feedback_first_order() {
        let k = 2.0 * 100.0;
        let fwd = tf(&[k], &[0.0, 1.0]);
        let cl = fwd.feedback(&TransferFunction::constant(1.0)).unwrap();
        assert_eq!(cl, tf(&[k], &[k, 1.0]));
    }

    #[test]
    fn zero_forward_path() {
        let cl = TransferFunction::constant(0.0)
            .feedback(&tf(&[1.0], &[1.0, 1.0]))
            .unwrap();
        assert!(cl.num().is_zero());
    }

    #[test]
    fn degenerate_feedback() {
        // forward = 1, feedback = -1 -> 1 + (1)(-1) = 0
        let r = TransferFunction::constant(1.0).feedback(&TransferFunction::constant(-1.0));
        assert!(matches!(r, Err(Error::AlgebraicDegeneracy(_))));
    }

    #[test]
    fn feedback_keeps_common_factors() {
        // (s+1)/(s(s+1)) in unity feedback: the (s+1) pair must survive
        let fwd = tf(&[1.0, 1.0], &[0.0, 1.0, 1.0]);
        let cl = fwd.feedback(&TransferFunction::constant(1.0)).unwrap();
        assert_eq!(cl.den().degree(), Some(2));
    }

    #[test]
    fn first_order_value() {
        let h = tf(&[1.0], &[1.0, 1.0]).eval(1.0).unwrap();
        assert!((h - Complex64::new(0.5, -0.5)).norm() < 1e-15);
        assert!((h.norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pole_on_axis() {
        let h = tf(&[1.0], &[1.0, 0.0, 1.0]);
        assert!(matches!(h.eval(1.0), Err(Error::PoleEvaluation { omega }) if omega == 1.0));
        let err = h.frequency_sweep(0.1, 10.0, 10).unwrap_err();
        assert_eq!(err, Error::PoleEvaluation { omega: 1.0 });
    }

    #[test]
    fn sweep_corner_frequency() {
        let pts = tf(&[1.0], &[1.0, 1.0]).frequency_sweep(0.01, 100.0, 20).unwrap();
        let at1 = pts.iter().find(|p| (p.omega - 1.0).abs() < 1e-9).unwrap();
        assert!((at1.magnitude_db + 3.0103).abs() < 0.05);
        assert!((at1.phase_deg + 45.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_constant() {
        let pts = TransferFunction::constant(2.0).frequency_sweep(0.1, 10.0, 5).unwrap();
        assert!(pts.iter().all(|p| (p.magnitude_db - 6.0206).abs() < 1e-3));
    }

    #[test]
    fn phase_unwraps_past_180() {
        // triple pole: phase runs to -270 deg
        let h = tf(&[1.0], &Polynomial::linear(1.0).pow(3).coeffs().to_vec());
        let pts = h.frequency_sweep(0.01, 1000.0, 20).unwrap();
        let last = pts.last().unwrap().phase_deg;
        assert!((last + 270.0).abs() < 1.0, "{last}");
        for w in pts.windows(2) {
            assert!((w[1].phase_deg - w[0].phase_deg).abs() < 90.0);
        }
    }

    #[test]
    fn sweep_rejects_bad_range() {
        let h = TransferFunction::constant(1.0);
        assert!(h.frequency_sweep(0.0, 1.0, 10).is_err());
        assert!(h.frequency_sweep(10.0, 1.0, 10).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(0.01, 100.0, 10).unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], 0.01);
        assert_eq!(*g.last().unwrap(), 100.0);
    }
}
