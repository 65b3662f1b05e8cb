//! The two experiment set-ups: sinusoidal position tracking with two
//! nominal inertias, and a force step against a wall with three observer
//! designs.

use rayon::prelude::*;

use super::metrics::{compute_metrics, paired_noise_rms, ResponseMetrics, Tracked, Window};
use super::reference::{ForceReference, PositionReference};
use super::{simulate_force, simulate_position, FrictionModel, InitialState, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::params::ParameterSet;

#[derive(Debug, Clone, PartialEq)]
pub struct PositionExperiment {
    pub params: ParameterSet,
    /// Nominal inertias to compare, as multiples of `J_m`.
    pub nominal_ratios: Vec<f64>,
    pub reference: PositionReference,
    pub friction: FrictionModel,
    pub sim: SimConfig,
    pub window: Window,
}

impl Default for PositionExperiment {
    fn default() -> Self {
        Self {
            params: ParameterSet::default(),
            nominal_ratios: vec![1.0, 3.0],
            reference: PositionReference::default(),
            // without friction the two designs differ only by velocity-filter lag
            friction: FrictionModel { coulomb: 0.05, viscous: 0.002, smoothing_velocity: 1e-3 },
            sim: SimConfig { dt: 1e-4, duration: 11.0, seed: 7, noise_std: 0.05, integrator: Default::default() },
            window: Window::new(2.0, 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionRun {
    pub nominal_ratio: f64,
    pub noisy: Trajectory,
    pub clean: Trajectory,
    /// RMS current deviation caused by the measurement noise, A.
    pub current_noise_rms: f64,
    /// Tracking metrics of the noise-free run.
    pub tracking: ResponseMetrics,
}

impl PositionExperiment {
    /// Runs every nominal inertia twice (with and without noise, same seed)
    /// so that tracking and noise effects can be separated.
    pub fn run(&self) -> Result<Vec<PositionRun>> {
        self.nominal_ratios
            .par_iter()
            .map(|&ratio| {
                let mut p = self.params;
                p.j_mn = ratio * p.j_m;
                let (plant, obs, gains) = (p.plant()?, p.observer()?, p.gains()?);
                let noisy = simulate_position(&plant, &obs, &gains, &self.reference, &self.friction, &self.sim)?;
                let clean_cfg = SimConfig { noise_std: 0.0, ..self.sim };
                let clean = simulate_position(&plant, &obs, &gains, &self.reference, &self.friction, &clean_cfg)?;
                let current_noise_rms = paired_noise_rms(&noisy, &clean, |s| s.i_m, &self.window)?;
                let tracking = compute_metrics(&clean, &self.reference, Tracked::Position, &self.window)?;
                Ok(PositionRun { nominal_ratio: ratio, noisy, clean, current_noise_rms, tracking })
            })
            .collect()
    }
}

/// One observer design for the wall experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceCase {
    pub label: String,
    /// `J_hat / J_m`
    pub j_hat_ratio: f64,
    /// `g_rfob / g_dob`
    pub rfob_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceExperiment {
    pub params: ParameterSet,
    pub cases: Vec<ForceCase>,
    pub reference: ForceReference,
    pub friction: FrictionModel,
    pub sim: SimConfig,
    pub window: Window,
}

impl Default for ForceExperiment {
    fn default() -> Self {
        let case = |label: &str, j_hat_ratio, rfob_ratio| ForceCase { label: label.into(), j_hat_ratio, rfob_ratio };
        Self {
            params: ParameterSet::default(),
            cases: vec![case("a", 1.0, 1.0), case("b", 0.8, 3.0), case("c", 1.5, 3.0)],
            reference: ForceReference::step(1.0, 1.0),
            friction: FrictionModel::none(),
            sim: SimConfig { dt: 1e-4, duration: 3.0, seed: 11, noise_std: 0.0, integrator: Default::default() },
            // from the step on, so the contact transient is part of the index
            window: Window::new(1.0, 3.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceRun {
    pub case: ForceCase,
    /// `Err(Divergence)` when the run blew up.
    pub trajectory: Result<Trajectory>,
    /// Oscillation index of the force estimate, infinite after divergence.
    pub oscillation_index: f64,
    pub metrics: Option<ResponseMetrics>,
}

impl ForceExperiment {
    pub fn run(&self) -> Result<Vec<ForceRun>> {
        self.cases
            .par_iter()
            .map(|case| {
                let mut p = self.params;
                p.j_hat = case.j_hat_ratio * p.j_m;
                p.g_rfob = case.rfob_ratio * p.g_dob;
                let (plant, obs, env) = (p.plant()?, p.observer()?, p.environment()?);
                let traj = simulate_force(
                    &plant,
                    &obs,
                    p.c_f,
                    &self.reference,
                    &env,
                    &self.friction,
                    &self.sim,
                    InitialState::Rest { q: 0.0 },
                );
                match traj {
                    Ok(t) => {
                        let m = compute_metrics(&t, &self.reference, Tracked::ForceEstimate, &self.window)?;
                        Ok(ForceRun { case: case.clone(), oscillation_index: m.oscillation_index, metrics: Some(m), trajectory: Ok(t) })
                    }
                    Err(e @ Error::Divergence { .. }) => Ok(ForceRun {
                        case: case.clone(),
                        oscillation_index: f64::INFINITY,
                        metrics: None,
                        trajectory: Err(e),
                    }),
                    Err(e) => Err(e),
                }
            })
            .collect()
    }
}
