use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{routh_hurwitz, spectral_abscissa};
use crate::error::{Error, Result};
use crate::loop_builder::{
    compose_force_loop, compose_position_characteristic, position_loop_ideal_denominator, VelocityMeasurement,
};
use crate::params::ParameterSet;
use crate::poly_tf::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Position loop, α varied through the nominal inertia.
    Alpha,
    /// Position loop.
    GDob,
    /// Position loop with filtered velocity.
    GV,
    /// Force loop.
    CF,
    /// Force loop, `J_hat / J_m`.
    JHatRatio,
    /// Force loop, `K_tau_hat / K_tau`.
    KTauHatRatio,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 6] = [
        SweepParameter::Alpha,
        SweepParameter::GDob,
        SweepParameter::GV,
        SweepParameter::CF,
        SweepParameter::JHatRatio,
        SweepParameter::KTauHatRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::GDob => "g_dob",
            SweepParameter::GV => "g_v",
            SweepParameter::CF => "C_f",
            SweepParameter::JHatRatio => "j_hat_ratio",
            SweepParameter::KTauHatRatio => "k_tau_hat_ratio",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!("unknown sweep parameter '{s}' (expected one of {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMap {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub stable: Vec<bool>,
    /// Rightmost characteristic root per grid point.
    pub abscissa: Vec<f64>,
    /// Verdict changes, linearly interpolated on the rightmost root.
    pub boundaries: Vec<f64>,
}

fn characteristic(param: SweepParameter, value: f64, base: &ParameterSet, velocity: VelocityMeasurement) -> Result<Polynomial> {
    let mut p = *base;
    match param {
        SweepParameter::Alpha => {
            let plant = base.plant()?.with_alpha(value)?;
            p.j_mn = plant.j_mn;
        }
        SweepParameter::GDob => p.g_dob = value,
        SweepParameter::GV => p.g_v = value,
        SweepParameter::CF => p.c_f = value,
        SweepParameter::JHatRatio => p.j_hat = value * base.j_m,
        SweepParameter::KTauHatRatio => p.k_tau_hat = value * base.k_tau,
    }
    match param {
        SweepParameter::Alpha | SweepParameter::GDob if velocity == VelocityMeasurement::Ideal => {
            position_loop_ideal_denominator(p.plant()?.alpha(), p.g_dob, &p.gains()?)
        }
        SweepParameter::Alpha | SweepParameter::GDob | SweepParameter::GV => compose_position_characteristic(
            &p.plant()?,
            &p.observer()?,
            &p.gains()?,
            if param == SweepParameter::GV { VelocityMeasurement::Filtered } else { velocity },
        ),
        _ => {
            let env = p.environment()?;
            let model = compose_force_loop(&p.plant()?, &p.observer()?, &env, p.c_f, velocity)?;
            Ok(model.characteristic(p.c_f))
        }
    }
}

/// Routh verdict of the relevant characteristic polynomial at every grid
/// value of one parameter, the others fixed at `base`. Grid points are
/// evaluated in parallel and returned in grid order.
pub fn stability_map(
    param: SweepParameter,
    grid: &[f64],
    base: &ParameterSet,
    velocity: VelocityMeasurement,
) -> Result<StabilityMap> {
    if grid.is_empty() {
        return Err(Error::Config("empty sweep grid".into()));
    }
    let rows: Vec<(bool, f64)> = grid
        .par_iter()
        .map(|&v| {
            let ch = characteristic(param, v, base, velocity)?;
            let verdict = routh_hurwitz(&ch)?;
            Ok((verdict.stable, spectral_abscissa(&ch.roots()?)))
        })
        .collect::<Result<_>>()?;
    let (stable, abscissa): (Vec<bool>, Vec<f64>) = rows.into_iter().unzip();

    let boundaries = (1..grid.len())
        .filter(|&i| stable[i] != stable[i - 1])
        .map(|i| {
            let (a0, a1) = (abscissa[i - 1], abscissa[i]);
            if a1 != a0 {
                let t = (-a0 / (a1 - a0)).clamp(0.0, 1.0);
                grid[i - 1] + t * (grid[i] - grid[i - 1])
            } else {
                0.5 * (grid[i - 1] + grid[i])
            }
        })
        .collect();
    Ok(StabilityMap { parameter: param, grid: grid.to_vec(), stable, abscissa, boundaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_tf::log_grid;
    use crate::stability::third_order_alpha_condition;

    #[test]
    fn names_round_trip() {
        for p in SweepParameter::ALL {
            assert_eq!(p.name().parse::<SweepParameter>().unwrap(), p);
        }
        assert!(matches!("beta".parse::<SweepParameter>(), Err(Error::Config(_))));
    }

    #[test]
    fn alpha_boundary_matches_closed_form() {
        let base = ParameterSet::default();
        let grid = log_grid(0.01, 10.0, 50).unwrap();
        let map = stability_map(SweepParameter::Alpha, &grid, &base, VelocityMeasurement::Ideal).unwrap();
        assert_eq!(map.boundaries.len(), 1);
        let star = third_order_alpha_condition(base.g_dob, &base.gains().unwrap());
        let cell = grid.iter().position(|&a| a > star).unwrap();
        assert!(map.boundaries[0] >= grid[cell - 1] && map.boundaries[0] <= grid[cell]);
        assert!(!map.stable[0] && *map.stable.last().unwrap());
    }

    #[test]
    fn tame_configuration_uniformly_stable() {
        let base = ParameterSet::default();
        let grid = [10.0, 50.0, 100.0, 200.0];
        let map = stability_map(SweepParameter::KTauHatRatio, &[1.0, 1.5, 2.0], &base, VelocityMeasurement::Ideal).unwrap();
        assert!(map.stable.iter().all(|&s| s));
        let map = stability_map(SweepParameter::CF, &grid, &base, VelocityMeasurement::Ideal).unwrap();
        assert!(map.stable.iter().all(|&s| s));
        assert!(map.boundaries.is_empty());
    }
}
