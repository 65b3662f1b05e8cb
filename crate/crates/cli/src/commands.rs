use std::fmt::Write as _;

use num_complex::Complex64;

use dob_lab::loop_builder::{
    compose_force_loop, compose_position_loop, dob_open_loop, finite_velocity_discrepancy, position_loop_ideal,
    position_loop_ideal_denominator, sensitivity_tf, VelocityMeasurement,
};
use dob_lab::poly_tf::log_grid;
use dob_lab::stability::{root_locus, routh_hurwitz, stability_map, Crossing, RootLocus};
use dob_lab::time_sim::{
    compute_metrics, simulate_force, simulate_position, ForceReference, FrictionModel, InitialState,
    PositionReference, Reference, ResponseMetrics, Sample, SimConfig, Tracked, Trajectory, Window,
};
use dob_lab::{check_bandwidth_constraint, FrequencyPoint, Polynomial, TransferFunction};

use crate::error::{CliError, Stage};
use crate::figures;
use crate::output::{bode_csv, locus_csv, map_csv, OutDir};
use crate::scenario::{Kind, Scenario};
use crate::svg::{self, Panel, Series};

/// Most points drawn per trajectory curve.
pub(crate) const PLOT_POINTS: usize = 2000;

/// Printed summary and written files of one run.
#[derive(Debug)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub out: OutDir,
}

pub fn run(scenario: &Scenario, out: OutDir) -> Result<Outcome, CliError> {
    let mut o = Outcome { lines: Vec::new(), out };
    match scenario.kind {
        Kind::ConstraintCheck => constraint_check(scenario, &mut o)?,
        Kind::Bode => bode(scenario, &mut o)?,
        Kind::PositionTf => position_tf(scenario, &mut o)?,
        Kind::ForceTf => force_tf(scenario, &mut o)?,
        Kind::Routh => routh(scenario, &mut o)?,
        Kind::Locus => locus(scenario, &mut o)?,
        Kind::Map => map(scenario, &mut o)?,
        Kind::SimulatePosition => sim_position(scenario, &mut o)?,
        Kind::SimulateForce => sim_force(scenario, &mut o)?,
        Kind::ReproduceFigure => figures::reproduce(scenario, &mut o)?,
    }
    Ok(o)
}

fn velocity(s: &Scenario) -> VelocityMeasurement {
    VelocityMeasurement::from_ideal_flag(s.choice("velocity") == "ideal")
}

fn constraint_check(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let v = check_bandwidth_constraint(&p.plant().stage("plant")?, &p.observer().stage("observer")?);
    let verdict = if v.satisfied { "SATISFIED" } else { "VIOLATED" };
    let line = format!("{verdict} margin={:.3e} rad/s xi={:.5}", v.margin, v.xi);
    let detail = format!(
        "{line}\nalpha = {}\nkappa = {}\nw_n = {} rad/s\nalpha*g_dob = {} rad/s\ng_v/2 = {} rad/s\n",
        v.alpha, v.kappa, v.w_n, v.constraint_lhs, v.constraint_rhs
    );
    o.out.write("constraint.txt", &detail)?;
    o.lines.push(line);
    Ok(())
}

pub(crate) fn bode_panels(title: &str, sweeps: &[(String, Vec<FrequencyPoint>)]) -> Vec<Panel> {
    let mag = sweeps.iter().map(|(n, pts)| Series::new(n.clone(), pts.iter().map(|p| (p.omega, p.magnitude_db)).collect()));
    let phase = sweeps.iter().map(|(n, pts)| Series::new(n.clone(), pts.iter().map(|p| (p.omega, p.phase_deg)).collect()));
    vec![
        Panel::new(&format!("{title}: magnitude"), "omega [rad/s]", "magnitude [dB]", true, mag.collect()),
        Panel::new(&format!("{title}: phase"), "omega [rad/s]", "phase [deg]", true, phase.collect()),
    ]
}

fn bode(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let (plant, obs) = (p.plant().stage("plant")?, p.observer().stage("observer")?);
    let target = s.choice("bode.target");
    let tf: TransferFunction = match target {
        "sensitivity" => sensitivity_tf(plant.alpha(), p.g_dob, p.g_v),
        "dob_open_loop" => dob_open_loop(plant.alpha(), p.g_dob, p.g_v, velocity(s)),
        "position" => compose_position_loop(&plant, &obs, &p.gains().stage("gains")?, velocity(s)),
        _ => {
            let env = p.environment().stage("environment")?;
            compose_force_loop(&plant, &obs, &env, p.c_f, velocity(s))
                .map(|m| if target == "force_open" { m.open_loop } else { m.closed_loop })
        }
    }
    .stage("transfer function")?;
    let pts = tf
        .frequency_sweep(s.real("omega.min"), s.real("omega.max"), s.count("omega.points_per_decade"))
        .stage("frequency sweep")?;
    let peak = pts.iter().fold(&pts[0], |a, b| if b.magnitude_db > a.magnitude_db { b } else { a });
    o.lines.push(format!("{target}: {tf}"));
    o.lines.push(format!("peak {:.4} dB at omega={:.4e} rad/s", peak.magnitude_db, peak.omega));
    o.out.write("bode.csv", &bode_csv(&pts))?;
    let svg = svg::render(&bode_panels(target, &[(target.to_string(), pts)])).stage("bode")?;
    o.out.write("bode.svg", &svg)
}

fn roots_text(roots: &[Complex64]) -> String {
    let parts: Vec<String> = roots.iter().map(|z| format!("{:.6}{:+.6}j", z.re, z.im)).collect();
    format!("[{}]", parts.join(", "))
}

fn routh_line(p: &Polynomial) -> Result<String, CliError> {
    let r = routh_hurwitz(p).stage("routh")?;
    let mut line = format!("{} rhp={}", if r.stable { "STABLE" } else { "UNSTABLE" }, r.rhp_count);
    if r.degenerate {
        line.push_str(" degenerate");
    }
    Ok(line)
}

fn position_tf(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let (plant, obs, gains) = (p.plant().stage("plant")?, p.observer().stage("observer")?, p.gains().stage("gains")?);
    let vel = velocity(s);
    let composed = compose_position_loop(&plant, &obs, &gains, vel).stage("position loop")?;
    let mut text = String::new();
    let _ = writeln!(text, "velocity = {}", s.choice("velocity"));
    let _ = writeln!(text, "composed = {composed}");
    let _ = writeln!(text, "poles = {}", roots_text(&composed.poles().stage("poles")?));
    let _ = writeln!(text, "verdict = {}", routh_line(composed.den())?);
    let closed = position_loop_ideal(plant.alpha(), p.g_dob, &gains).stage("closed form")?;
    let _ = writeln!(text, "closed form (ideal velocity) = {closed}");
    if vel == VelocityMeasurement::Filtered {
        let d = finite_velocity_discrepancy(&plant, &obs, &gains).stage("finite-g_v comparison")?;
        text.push_str(&d.report());
    } else {
        let printed = position_loop_ideal_denominator(plant.alpha(), p.g_dob, &gains).stage("closed form")?;
        let _ = writeln!(
            text,
            "denominator distance to closed form = {:.3e}",
            composed.den().relative_distance_normalized(&printed)
        );
    }
    o.lines.extend(text.lines().map(String::from));
    o.out.write("position_tf.txt", &text)
}

fn force_tf(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let model = compose_force_loop(
        &p.plant().stage("plant")?,
        &p.observer().stage("observer")?,
        &p.environment().stage("environment")?,
        p.c_f,
        velocity(s),
    )
    .stage("force loop")?;
    let mut text = String::new();
    let _ = writeln!(text, "velocity = {}", s.choice("velocity"));
    let _ = writeln!(text, "open loop (per unit C_f) = {}", model.open_loop);
    let _ = writeln!(text, "zeros = {}", roots_text(&model.zeros));
    let _ = writeln!(text, "closed loop F_hat/F_ref = {}", model.closed_loop);
    let _ = writeln!(text, "poles = {}", roots_text(&model.poles));
    let _ = writeln!(text, "verdict = {}", routh_line(&model.characteristic(p.c_f))?);
    let dc = |tf: &TransferFunction| tf.dc_gain().map_or("undefined".to_string(), |g| format!("{g}"));
    let _ = writeln!(text, "dc F_hat/F_ref = {}", dc(&model.closed_loop));
    let _ = writeln!(text, "dc F_l/F_ref = {}", dc(&model.true_force_tf));
    o.lines.extend(text.lines().map(String::from));
    o.out.write("force_tf.txt", &text)
}

fn routh(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let poly = s.polynomial("polynomial");
    let r = routh_hurwitz(&poly).stage("routh")?;
    let mut text = String::new();
    let deg = r.array.len().saturating_sub(1);
    for (i, row) in r.array.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "s^{}: {}", deg - i, cells.join(", "));
    }
    let line = routh_line(&poly)?;
    let _ = writeln!(text, "{line}");
    o.out.write("routh.txt", &text)?;
    o.lines.push(line);
    Ok(())
}

pub(crate) fn crossing_text(c: &Crossing) -> String {
    match c {
        Crossing::At(k) => format!("critical gain {k:.6e}"),
        Crossing::AtGridStart => "unstable at the first grid gain".into(),
        Crossing::NoneInGrid => "stable over the whole grid".into(),
    }
}

pub(crate) fn locus_panel(title: &str, locus: &RootLocus) -> Panel {
    let series = locus
        .branches
        .iter()
        .enumerate()
        .map(|(b, br)| Series::new(format!("branch {b}"), br.points.iter().map(|z| (z.re, z.im)).collect()))
        .collect();
    Panel::new(title, "Re", "Im", false, series)
}

fn locus(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let grid = log_grid(s.real("grid.min"), s.real("grid.max"), s.count("grid.points_per_decade")).stage("grid")?;
    let gain = s.choice("locus.gain");
    let (num, den) = if gain == "C_f" {
        let m = compose_force_loop(
            &p.plant().stage("plant")?,
            &p.observer().stage("observer")?,
            &p.environment().stage("environment")?,
            0.0,
            velocity(s),
        )
        .stage("force loop")?;
        (m.open_loop.num().clone(), m.open_loop.den().clone())
    } else {
        if velocity(s) != VelocityMeasurement::Ideal {
            return Err(CliError::Config("an alpha locus needs velocity = ideal".into()));
        }
        // α·(g K_p + (K_p + g K_D)s + (g + K_D)s²) + s³
        let d = position_loop_ideal_denominator(1.0, p.g_dob, &p.gains().stage("gains")?).stage("closed form")?;
        (Polynomial::new(d.coeffs()[..3].to_vec()), Polynomial::monomial(1.0, 3))
    };
    let l = root_locus(&num, &den, &grid).stage("root locus")?;
    o.lines.push(format!("{gain}: {}", crossing_text(&l.crossing)));
    o.out.write("locus.csv", &locus_csv(&l))?;
    let svg = svg::plot(locus_panel(&format!("root locus over {gain}"), &l)).stage("locus")?;
    o.out.write("locus.svg", &svg)
}

fn map(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let param = s.sweep("map.param");
    let grid = log_grid(s.real("grid.min"), s.real("grid.max"), s.count("grid.points_per_decade")).stage("grid")?;
    let m = stability_map(param, &grid, &s.params, velocity(s)).stage("stability map")?;
    let bounds: Vec<String> = m.boundaries.iter().map(|b| format!("{b:.6e}")).collect();
    o.lines.push(format!(
        "{param}: {} of {} grid points stable; boundaries [{}]",
        m.stable.iter().filter(|&&v| v).count(),
        m.grid.len(),
        bounds.join(", ")
    ));
    o.out.write("map.csv", &map_csv(&m))?;
    let panel = Panel::new(
        &format!("stability over {param}"),
        param.name(),
        "rightmost pole real part [1/s]",
        true,
        vec![Series::new("spectral abscissa", m.grid.iter().copied().zip(m.abscissa.iter().copied()).collect())],
    );
    o.out.write("map.svg", &svg::plot(panel).stage("map")?)
}

fn sim_config(s: &Scenario) -> Result<SimConfig, CliError> {
    SimConfig::new(s.real("sim.dt"), s.real("sim.duration"), s.seed("sim.seed"), s.real("sim.noise_std"))
        .stage("sim config")
}

fn friction(s: &Scenario) -> Result<FrictionModel, CliError> {
    FrictionModel::new(s.real("friction.coulomb"), s.real("friction.viscous"), s.real("friction.smoothing_velocity"))
        .stage("friction")
}

fn window(s: &Scenario) -> Window {
    Window::new(s.real("window.start"), s.real("window.end"))
}

pub(crate) fn metrics_text(m: &ResponseMetrics) -> String {
    format!(
        "overshoot = {}\nsettling_time = {}\nsteady_state_error = {}\noscillation_index = {}\nvelocity_noise_rms = {}\nrms_error = {}\n",
        m.overshoot, m.settling_time, m.steady_state_error, m.oscillation_index, m.velocity_noise_rms, m.rms_error
    )
}

pub(crate) fn curve(traj: &Trajectory, name: &str, f: impl Fn(&Sample) -> f64) -> Series {
    let pts: Vec<(f64, f64)> = traj.samples.iter().map(|s| (s.t, f(s))).collect();
    Series::decimated(name, &pts, PLOT_POINTS)
}

fn sim_position(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let reference = PositionReference::Sinusoid {
        amplitude: s.real("reference.amplitude"),
        frequency_hz: s.real("reference.frequency_hz"),
        start: s.real("reference.start"),
        stop: s.real("reference.stop"),
    };
    let traj = simulate_position(
        &p.plant().stage("plant")?,
        &p.observer().stage("observer")?,
        &p.gains().stage("gains")?,
        &reference,
        &friction(s)?,
        &sim_config(s)?,
    )
    .stage("position simulation")?;
    let m = compute_metrics(&traj, &reference, Tracked::Position, &window(s)).stage("metrics")?;
    o.out.write("trajectory.csv", &traj.to_csv())?;
    let text = metrics_text(&m);
    o.out.write("metrics.txt", &text)?;
    let panels = [
        Panel::new(
            "position",
            "t [s]",
            "q [rad]",
            false,
            vec![curve(&traj, "q_ref", |x| reference.eval(x.t).0), curve(&traj, "q_m", |x| x.q_m)],
        ),
        Panel::new("current", "t [s]", "I [A]", false, vec![curve(&traj, "I_m", |x| x.i_m)]),
    ];
    o.out.write("trajectory.svg", &svg::render(&panels).stage("trajectory")?)?;
    o.lines.extend(text.lines().map(String::from));
    Ok(())
}

fn sim_force(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let p = &s.params;
    let reference = ForceReference {
        initial: s.real("reference.initial"),
        magnitude: s.real("reference.magnitude"),
        at: s.real("reference.at"),
    };
    let init = match s.choice("init") {
        "contact" => InitialState::ContactEquilibrium { f_hat: reference.initial },
        _ => InitialState::Rest { q: s.real("init.q") },
    };
    let traj = simulate_force(
        &p.plant().stage("plant")?,
        &p.observer().stage("observer")?,
        p.c_f,
        &reference,
        &p.environment().stage("environment")?,
        &friction(s)?,
        &sim_config(s)?,
        init,
    )
    .stage("force simulation")?;
    let m = compute_metrics(&traj, &reference, Tracked::ForceEstimate, &window(s)).stage("metrics")?;
    o.out.write("trajectory.csv", &traj.to_csv())?;
    let text = metrics_text(&m);
    o.out.write("metrics.txt", &text)?;
    let panels = [
        Panel::new(
            "force",
            "t [s]",
            "F [N]",
            false,
            vec![
                curve(&traj, "F_ref", |x| reference.value(x.t)),
                curve(&traj, "F_l_hat", |x| x.f_l_hat),
                curve(&traj, "F_l", |x| x.f_l_true),
            ],
        ),
        Panel::new("position", "t [s]", "q [m]", false, vec![curve(&traj, "q_m", |x| x.q_m)]),
    ];
    o.out.write("trajectory.svg", &svg::render(&panels).stage("trajectory")?)?;
    o.lines.extend(text.lines().map(String::from));
    Ok(())
}
