use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::reference::{ForceReference, PositionReference, Reference};
use super::{FrictionModel, Sample, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::loop_builder::{Environment, PositionGains};
use crate::observer::{ObserverConfig, PlantParams};

type State = [f64; 5];

const Q: usize = 0;
const QD: usize = 1;
const VF: usize = 2;
const ZD: usize = 3;
const ZR: usize = 4;

/// Where a run starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// At rest at position `q`, observers settled on zero force.
    Rest { q: f64 },
    /// At rest inside the wall, pressing with the force that makes the RFOB
    /// read `f_hat`, so the controller holds this state for `F_ref = f_hat`.
    ContactEquilibrium { f_hat: f64 },
}

#[derive(Debug, Clone, Copy)]
enum Law<'a> {
    Position { gains: PositionGains, reference: &'a PositionReference },
    Force { c_f: f64, reference: &'a ForceReference },
    Current(f64),
}

struct Model<'a> {
    plant: PlantParams,
    obs: ObserverConfig,
    env: Option<Environment>,
    friction: FrictionModel,
    law: Law<'a>,
}

struct Outputs {
    v: f64,
    i: f64,
    f_dis: f64,
    f_l_hat: f64,
    f_l: f64,
    contact: bool,
}

impl Model<'_> {
    fn contact_force(&self, q: f64, qd: f64) -> (f64, bool) {
        match self.env {
            Some(env) if q > env.q_e => {
                let f = env.k_env * (q - env.q_e) + env.d_env * (qd - env.qdot_e);
                (f.max(0.0), true)
            }
            _ => (0.0, false),
        }
    }

    fn outputs(&self, t: f64, x: &State) -> Outputs {
        let PlantParams { j_mn, k_tau_n, .. } = self.plant;
        let o = &self.obs;
        let v = x[VF];
        let f_dis = x[ZD] - o.g_dob * j_mn * v;
        let f_l_hat = x[ZR] - o.g_rfob * o.j_hat * v;
        let i = match self.law {
            Law::Current(i) => i,
            Law::Position { gains, reference } => {
                let (q_ref, qd_ref, qdd_ref) = reference.eval(t);
                let acc = qdd_ref + gains.k_d * (qd_ref - v) + gains.k_p * (q_ref - x[Q]);
                (j_mn * acc + f_dis) / k_tau_n
            }
            Law::Force { c_f, reference } => {
                let acc = c_f * (reference.value(t) - f_l_hat);
                (j_mn * acc + f_dis) / k_tau_n
            }
        };
        let (f_l, contact) = self.contact_force(x[Q], x[QD]);
        Outputs { v, i, f_dis, f_l_hat, f_l, contact }
    }

    fn deriv(&self, t: f64, x: &State, noise: f64) -> State {
        let PlantParams { j_m, k_tau, j_mn, k_tau_n } = self.plant;
        let o = &self.obs;
        let out = self.outputs(t, x);
        let qdd = (k_tau * out.i - out.f_l - self.friction.force(x[QD])) / j_m;
        [
            x[QD],
            qdd,
            o.g_v * (x[QD] + noise - x[VF]),
            o.g_dob * (k_tau_n * out.i - x[ZD] + o.g_dob * j_mn * out.v),
            o.g_rfob * (o.k_tau_hat * out.i - x[ZR] + o.g_rfob * o.j_hat * out.v),
        ]
    }

    fn initial(&self, init: InitialState) -> Result<State> {
        match init {
            InitialState::Rest { q } => Ok([q, 0.0, 0.0, 0.0, 0.0]),
            InitialState::ContactEquilibrium { f_hat } => {
                let env = self
                    .env
                    .filter(|e| e.k_env > 0.0)
                    .ok_or_else(|| Error::Config("contact equilibrium needs a wall with stiffness".into()))?;
                let i = f_hat / self.obs.k_tau_hat;
                let f_l = self.plant.k_tau * i;
                if f_l <= 0.0 {
                    return Err(Error::Config("contact equilibrium needs a positive pressing force".into()));
                }
                Ok([env.q_e + f_l / env.k_env, 0.0, 0.0, self.plant.k_tau_n * i, self.obs.k_tau_hat * i])
            }
        }
    }

    fn sample(&self, t: f64, x: &State) -> Sample {
        let out = self.outputs(t, x);
        Sample {
            t,
            q_m: x[Q],
            qdot_m: x[QD],
            v_meas: out.v,
            i_m: out.i,
            f_dis_hat: out.f_dis,
            f_l_hat: out.f_l_hat,
            f_l_true: out.f_l,
            contact: out.contact,
        }
    }
}

fn axpy(x: &State, k: &State, h: f64) -> State {
    std::array::from_fn(|n| x[n] + h * k[n])
}

fn run(model: &Model<'_>, sim: &SimConfig, init: InitialState) -> Result<Trajectory> {
    model.plant.validate()?;
    model.obs.validate()?;
    if let Some(env) = model.env {
        env.validate()?;
    }
    sim.validate(model.obs.g_dob.max(model.obs.g_rfob).max(model.obs.g_v))?;
    let x0 = model.initial(init)?;
    integrate(model, sim, x0)
}

fn integrate(model: &Model<'_>, sim: &SimConfig, x0: State) -> Result<Trajectory> {
    let steps = sim.steps();
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    let normal = Normal::new(0.0, sim.noise_std).map_err(|e| Error::Config(format!("noise model: {e}")))?;
    let mut draw = || if sim.noise_std > 0.0 { normal.sample(&mut rng) } else { 0.0 };

    let dt = sim.dt;
    let mut x = x0;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        if x.iter().any(|v| !v.is_finite() || v.abs() > 1e12) {
            return Err(Error::Divergence { t });
        }
        samples.push(model.sample(t, &x));
        if k == steps {
            break;
        }
        // measurement noise is held over the step
        let n = draw();
        let k1 = model.deriv(t, &x, n);
        let k2 = model.deriv(t + 0.5 * dt, &axpy(&x, &k1, 0.5 * dt), n);
        let k3 = model.deriv(t + 0.5 * dt, &axpy(&x, &k2, 0.5 * dt), n);
        let k4 = model.deriv(t + dt, &axpy(&x, &k3, dt), n);
        x = std::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    Ok(Trajectory { dt, samples })
}

/// Position loop: PD with acceleration feedforward over the DOB, free motion.
pub fn simulate_position(
    plant: &PlantParams,
    obs: &ObserverConfig,
    gains: &PositionGains,
    reference: &PositionReference,
    friction: &FrictionModel,
    sim: &SimConfig,
) -> Result<Trajectory> {
    let model = Model {
        plant: *plant,
        obs: *obs,
        env: None,
        friction: *friction,
        law: Law::Position { gains: *gains, reference },
    };
    run(&model, sim, InitialState::Rest { q: 0.0 })
}

/// Force loop: `q̈_des = C_f·(F_ref − F̂_l)` over the DOB, against a
/// unilateral wall.
#[allow(clippy::too_many_arguments)]
pub fn simulate_force(
    plant: &PlantParams,
    obs: &ObserverConfig,
    c_f: f64,
    reference: &ForceReference,
    env: &Environment,
    friction: &FrictionModel,
    sim: &SimConfig,
    init: InitialState,
) -> Result<Trajectory> {
    if !(c_f >= 0.0 && c_f.is_finite()) {
        return Err(Error::Config(format!("C_f must be non-negative, got {c_f}")));
    }
    let model = Model {
        plant: *plant,
        obs: *obs,
        env: Some(*env),
        friction: *friction,
        law: Law::Force { c_f, reference },
    };
    run(&model, sim, init)
}

/// Plant driven by a fixed current from `(q0, qd0)`, observers running open loop.
#[allow(clippy::too_many_arguments)]
pub fn simulate_constant_current(
    plant: &PlantParams,
    obs: &ObserverConfig,
    current: f64,
    env: Option<&Environment>,
    friction: &FrictionModel,
    sim: &SimConfig,
    q0: f64,
    qd0: f64,
) -> Result<Trajectory> {
    let model = Model { plant: *plant, obs: *obs, env: env.copied(), friction: *friction, law: Law::Current(current) };
    plant.validate()?;
    obs.validate()?;
    sim.validate(obs.g_dob.max(obs.g_rfob).max(obs.g_v))?;
    integrate(&model, sim, [q0, qd0, qd0, 0.0, 0.0])
}
