use crate::error::{Error, Result};
use crate::poly_tf::TransferFunction;

/// Step response of a proper transfer function, integrated with RK4 in
/// controllable canonical form. The input steps from 0 to `magnitude` at
/// `step_time`. Returns `(t, y)` at `floor(duration/dt) + 1` instants.
pub fn simulate_tf_step(
    tf: &TransferFunction,
    dt: f64,
    duration: f64,
    step_time: f64,
    magnitude: f64,
) -> Result<Vec<(f64, f64)>> {
    if !tf.is_proper() {
        return Err(Error::DegenerateInput("step response of an improper transfer function".into()));
    }
    if !(dt > 0.0 && duration >= dt) {
        return Err(Error::Config("step simulation needs 0 < dt <= duration".into()));
    }
    let den = tf.den();
    let n = den.degree().unwrap_or(0);
    let d = if tf.num().degree() == Some(n) { tf.num().coeff(n) } else { 0.0 };
    // strictly proper remainder b − d·a
    let c: Vec<f64> = (0..n).map(|k| tf.num().coeff(k) - d * den.coeff(k)).collect();
    let a: Vec<f64> = (0..n).map(|k| den.coeff(k)).collect();

    let u = |t: f64| if t >= step_time { magnitude } else { 0.0 };
    let f = |x: &[f64], u: f64| -> Vec<f64> {
        let mut dx = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            dx[k] = x[k + 1];
        }
        if n > 0 {
            dx[n - 1] = u - a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>();
        }
        dx
    };
    let y = |x: &[f64], u: f64| c.iter().zip(x).map(|(ci, xi)| ci * xi).sum::<f64>() + d * u;

    let steps = (duration / dt * (1.0 + 1e-12)).floor() as usize;
    let mut x = vec![0.0; n];
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        out.push((t, y(&x, u(t))));
        if k == steps {
            break;
        }
        let add = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };
        let k1 = f(&x, u(t));
        let k2 = f(&add(&x, &k1, 0.5 * dt), u(t + 0.5 * dt));
        let k3 = f(&add(&x, &k2, 0.5 * dt), u(t + 0.5 * dt));
        let k4 = f(&add(&x, &k3, dt), u(t + dt));
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t });
        }
    }
    Ok(out)
}
