use std::f64::consts::TAU;

/// A scalar reference signal.
pub trait Reference {
    fn value(&self, t: f64) -> f64;
}

/// Position reference with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositionReference {
    Zero,
    /// `A·sin(2πf(t − start))` on `[start, stop]`, zero elsewhere.
    Sinusoid { amplitude: f64, frequency_hz: f64, start: f64, stop: f64 },
}

impl Default for PositionReference {
    /// 0.1 rad at 1 Hz between 1 s and 10 s.
    fn default() -> Self {
        Self::Sinusoid { amplitude: 0.1, frequency_hz: 1.0, start: 1.0, stop: 10.0 }
    }
}

impl PositionReference {
    /// `(q_ref, q̇_ref, q̈_ref)`
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            Self::Zero => (0.0, 0.0, 0.0),
            Self::Sinusoid { amplitude, frequency_hz, start, stop } => {
                if t < start || t > stop {
                    return (0.0, 0.0, 0.0);
                }
                let w = TAU * frequency_hz;
                let (s, c) = (w * (t - start)).sin_cos();
                (amplitude * s, amplitude * w * c, -amplitude * w * w * s)
            }
        }
    }
}

impl Reference for PositionReference {
    fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

/// Force reference: `initial` before `at`, `initial + magnitude` after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceReference {
    pub initial: f64,
    pub magnitude: f64,
    pub at: f64,
}

impl ForceReference {
    pub fn step(magnitude: f64, at: f64) -> Self {
        Self { initial: 0.0, magnitude, at }
    }

    pub fn zero() -> Self {
        Self::step(0.0, 0.0)
    }
}

impl Reference for ForceReference {
    fn value(&self, t: f64) -> f64 {
        if t >= self.at {
            self.initial + self.magnitude
        } else {
            self.initial
        }
    }
}
