use super::reference::Reference;
use super::{Sample, Trajectory};
use crate::error::{Error, Result};

/// Which recorded signal is compared with the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracked {
    Position,
    ForceEstimate,
    ForceTrue,
}

impl Tracked {
    fn pick(&self, s: &Sample) -> f64 {
        match self {
            Tracked::Position => s.q_m,
            Tracked::ForceEstimate => s.f_l_hat,
            Tracked::ForceTrue => s.f_l_true,
        }
    }
}

/// Closed time interval `[start, end]`, s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseMetrics {
    /// Peak excursion past the final reference, as a fraction of the
    /// transition size.
    pub overshoot: f64,
    /// Time from the window start until the signal stays within 2% of the
    /// final reference value; infinite when it never does.
    pub settling_time: f64,
    /// |mean error| over the last tenth of the window.
    pub steady_state_error: f64,
    /// `var(y − r) / max|r|²` over the window.
    pub oscillation_index: f64,
    /// RMS of `v_meas − q̇` over the window.
    pub velocity_noise_rms: f64,
    /// RMS of `y − r` over the window.
    pub rms_error: f64,
}

fn window_samples<'a>(traj: &'a Trajectory, w: &Window) -> Result<Vec<&'a Sample>> {
    let picked: Vec<&Sample> = traj.samples.iter().filter(|s| s.t >= w.start - 1e-12 && s.t <= w.end + 1e-12).collect();
    if picked.is_empty() {
        return Err(Error::Config(format!("metric window [{}, {}] contains no samples", w.start, w.end)));
    }
    Ok(picked)
}

fn rms(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

pub fn compute_metrics(traj: &Trajectory, reference: &dyn Reference, tracked: Tracked, window: &Window) -> Result<ResponseMetrics> {
    let samples = window_samples(traj, window)?;
    let y: Vec<f64> = samples.iter().map(|s| tracked.pick(s)).collect();
    let r: Vec<f64> = samples.iter().map(|s| reference.value(s.t)).collect();
    let e: Vec<f64> = y.iter().zip(&r).map(|(a, b)| a - b).collect();
    let n = y.len();

    let r_final = r[n - 1];
    let y0 = y[0];
    let span = if (r_final - y0).abs() > 0.0 { (r_final - y0).abs() } else { r_final.abs() };
    let overshoot = if span > 0.0 {
        let excess = if r_final >= y0 {
            y.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - r_final
        } else {
            r_final - y.iter().fold(f64::INFINITY, |m, &v| m.min(v))
        };
        (excess / span).max(0.0)
    } else {
        0.0
    };

    let r_scale = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let band = 0.02 * if r_final != 0.0 { r_final.abs() } else { r_scale };
    let settling_time = match y.iter().rposition(|v| (v - r_final).abs() > band) {
        None => 0.0,
        Some(i) if i + 1 < n => samples[i + 1].t - window.start,
        Some(_) => f64::INFINITY,
    };

    let tail = (n / 10).max(1);
    let steady_state_error = (e[n - tail..].iter().sum::<f64>() / tail as f64).abs();

    let mean = e.iter().sum::<f64>() / n as f64;
    let var = e.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = if r_scale > 0.0 { r_scale } else { 1.0 };
    let oscillation_index = var / (scale * scale);

    Ok(ResponseMetrics {
        overshoot,
        settling_time,
        steady_state_error,
        oscillation_index,
        velocity_noise_rms: rms(samples.iter().map(|s| s.v_meas - s.qdot_m)),
        rms_error: rms(e.iter().copied()),
    })
}

/// RMS of `signal(noisy) − signal(clean)` over a window, for two runs that
/// differ only in measurement noise.
pub fn paired_noise_rms(noisy: &Trajectory, clean: &Trajectory, signal: impl Fn(&Sample) -> f64, window: &Window) -> Result<f64> {
    if noisy.len() != clean.len() || noisy.dt != clean.dt {
        return Err(Error::Config("paired trajectories must share the time grid".into()));
    }
    let a = window_samples(noisy, window)?;
    let b = window_samples(clean, window)?;
    Ok(rms(a.iter().zip(&b).map(|(x, y)| signal(x) - signal(y))))
}
