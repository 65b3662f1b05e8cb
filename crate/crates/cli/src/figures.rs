//! Figure bundles: each writes its data as CSV, one SVG and a short summary.

use std::fmt::Write as _;

use dob_lab::loop_builder::{compose_force_loop, sensitivity_tf, VelocityMeasurement};
use dob_lab::poly_tf::log_grid;
use dob_lab::stability::{root_locus, sensitivity_peak, stability_map, third_order_alpha_condition, SweepParameter};
use dob_lab::time_sim::scenarios::{ForceExperiment, PositionExperiment};
use dob_lab::time_sim::{Reference, SimConfig, Trajectory};
use dob_lab::{check_bandwidth_constraint, ObserverConfig};

use crate::commands::{bode_panels, crossing_text, curve, locus_panel, Outcome};
use crate::error::{CliError, Stage};
use crate::output::{bode_csv, locus_csv, map_csv};
use crate::scenario::Scenario;
use crate::svg::{self, Panel, Series};

pub fn reproduce(s: &Scenario, o: &mut Outcome) -> Result<(), CliError> {
    let summary = match s.choice("figure") {
        "fig3" => fig3(s, o)?,
        "fig7" => fig7(s, o)?,
        "fig8" => fig8(s, o)?,
        "fig9" => fig9(s, o)?,
        _ => fig10(s, o)?,
    };
    let name = format!("{}_summary.txt", s.choice("figure"));
    o.out.write(&name, &summary)?;
    o.lines.extend(summary.lines().map(String::from));
    Ok(())
}

/// Compact, file-name-safe rendering of a grid value.
fn tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

/// Sensitivity magnitude for several α at fixed `g_dob`, `g_v`.
fn fig3(s: &Scenario, o: &mut Outcome) -> Result<String, CliError> {
    let p = &s.params;
    let (wmin, wmax) = (s.real("fig3.omega_min"), s.real("fig3.omega_max"));
    let obs = p.observer().stage("observer")?;
    let plant = p.plant().stage("plant")?;
    let mut summary = String::new();
    let mut sweeps = Vec::new();
    for alpha in s.list("fig3.alphas") {
        let tf = sensitivity_tf(alpha, p.g_dob, p.g_v).stage("sensitivity")?;
        let pts = tf.frequency_sweep(wmin, wmax, 50).stage("frequency sweep")?;
        let (peak, at) = sensitivity_peak(&tf, wmin, wmax).stage("sensitivity peak")?;
        let verdict = check_bandwidth_constraint(&plant.with_alpha(alpha).stage("plant")?, &obs);
        let _ = writeln!(
            summary,
            "alpha={alpha} peak={peak:.6} at omega={at:.4e} rad/s xi={:.5} constraint={}",
            verdict.xi,
            if verdict.satisfied { "satisfied" } else { "violated" }
        );
        o.out.write(&format!("fig3_sensitivity_alpha{}.csv", tag(alpha)), &bode_csv(&pts))?;
        sweeps.push((format!("alpha = {alpha}"), pts));
    }
    let mut panels = bode_panels("sensitivity", &sweeps);
    panels.truncate(1);
    o.out.write("fig3.svg", &svg::render(&panels).stage("fig3")?)?;
    Ok(summary)
}

/// Stability of the ideal-velocity position loop over α.
fn fig7(s: &Scenario, o: &mut Outcome) -> Result<String, CliError> {
    let p = &s.params;
    let grid = log_grid(s.real("fig7.alpha_min"), s.real("fig7.alpha_max"), s.count("fig7.points_per_decade"))
        .stage("grid")?;
    let m = stability_map(SweepParameter::Alpha, &grid, p, VelocityMeasurement::Ideal).stage("alpha map")?;
    let star = third_order_alpha_condition(p.g_dob, &p.gains().stage("gains")?);
    o.out.write("fig7_alpha_map.csv", &map_csv(&m))?;
    let panel = Panel::new(
        "position loop stability over alpha",
        "alpha",
        "rightmost pole real part [1/s]",
        true,
        vec![Series::new("spectral abscissa", m.grid.iter().copied().zip(m.abscissa.iter().copied()).collect())],
    );
    o.out.write("fig7.svg", &svg::plot(panel).stage("fig7")?)?;
    let bounds: Vec<String> = m.boundaries.iter().map(|b| format!("{b:.6e}")).collect();
    Ok(format!("closed-form alpha* = {star:.6e}\nmap boundaries = [{}]\n", bounds.join(", ")))
}

/// Force-loop root loci over `C_f` for several RFOB cutoffs.
fn fig8(s: &Scenario, o: &mut Outcome) -> Result<String, CliError> {
    let p = &s.params;
    let (plant, env) = (p.plant().stage("plant")?, p.environment().stage("environment")?);
    let grid = log_grid(s.real("fig8.c_f_min"), s.real("fig8.c_f_max"), 40).stage("grid")?;
    let mut summary = String::new();
    let mut panels = Vec::new();
    for ratio in s.list("fig8.rfob_ratios") {
        let obs = ObserverConfig { g_rfob: ratio * p.g_dob, ..p.observer().stage("observer")? };
        let model = compose_force_loop(&plant, &obs, &env, 0.0, VelocityMeasurement::Ideal).stage("force loop")?;
        let l = root_locus(model.open_loop.num(), model.open_loop.den(), &grid).stage("root locus")?;
        let _ = writeln!(summary, "g_rfob = {ratio} g_dob: {}", crossing_text(&l.crossing));
        o.out.write(&format!("fig8_locus_rfob{}.csv", tag(ratio)), &locus_csv(&l))?;
        panels.push(locus_panel(&format!("root locus over C_f, g_rfob = {ratio} g_dob"), &l));
    }
    o.out.write("fig8.svg", &svg::render(&panels).stage("fig8")?)?;
    Ok(summary)
}

/// Sinusoidal tracking with two nominal inertias.
fn fig9(s: &Scenario, o: &mut Outcome) -> Result<String, CliError> {
    let base = PositionExperiment::default();
    let exp = PositionExperiment {
        params: s.params,
        sim: SimConfig { seed: s.seed("fig9.seed"), noise_std: s.real("fig9.noise_std"), ..base.sim },
        ..base
    };
    let runs = exp.run().stage("fig9 simulation")?;
    let mut summary = String::new();
    let (mut pos, mut cur) = (Vec::new(), Vec::new());
    for r in &runs {
        let _ = writeln!(
            summary,
            "J_mn = {} J_m: current noise rms = {:.6e} A, tracking rms = {:.6e} rad",
            r.nominal_ratio, r.current_noise_rms, r.tracking.rms_error
        );
        o.out.write(&format!("fig9_jmn{}.csv", tag(r.nominal_ratio)), &r.noisy.to_csv())?;
        pos.push(curve(&r.noisy, &format!("J_mn = {} J_m", r.nominal_ratio), |x| x.q_m));
        cur.push(curve(&r.noisy, &format!("J_mn = {} J_m", r.nominal_ratio), |x| x.i_m));
    }
    if let Some(first) = runs.first() {
        pos.insert(0, curve(&first.noisy, "q_ref", |x| exp.reference.value(x.t)));
    }
    let panels = [
        Panel::new("position", "t [s]", "q [rad]", false, pos),
        Panel::new("motor current", "t [s]", "I [A]", false, cur),
    ];
    o.out.write("fig9.svg", &svg::render(&panels).stage("fig9")?)?;
    Ok(summary)
}

/// Force step against the wall for three observer designs.
fn fig10(s: &Scenario, o: &mut Outcome) -> Result<String, CliError> {
    let exp = ForceExperiment { params: s.params, ..ForceExperiment::default() };
    let runs = exp.run().stage("fig10 simulation")?;
    let mut summary = String::new();
    let mut panels = Vec::new();
    for r in &runs {
        let c = &r.case;
        let title = format!("case {}: J_hat = {} J_m, g_rfob = {} g_dob", c.label, c.j_hat_ratio, c.rfob_ratio);
        match &r.trajectory {
            Ok(t) => {
                let _ = writeln!(summary, "case {}: oscillation_index = {:.6e}", c.label, r.oscillation_index);
                o.out.write(&format!("fig10_{}.csv", c.label), &t.to_csv())?;
                panels.push(force_panel(&title, t, &exp));
            }
            Err(e) => {
                let _ = writeln!(summary, "case {}: oscillation_index = inf ({e})", c.label);
            }
        }
    }
    o.out.write("fig10.svg", &svg::render(&panels).stage("fig10")?)?;
    Ok(summary)
}

fn force_panel(title: &str, t: &Trajectory, exp: &ForceExperiment) -> Panel {
    Panel::new(
        title,
        "t [s]",
        "F [N]",
        false,
        vec![
            curve(t, "F_ref", |x| exp.reference.value(x.t)),
            curve(t, "F_l_hat", |x| x.f_l_hat),
            curve(t, "F_l", |x| x.f_l_true),
        ],
    )
}
