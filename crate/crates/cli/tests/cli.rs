use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dob_lab_cli::{Kind, Scenario};

fn dob_lab(args: &[&str], config: &str, dir: &Path) -> Output {
    let cfg = dir.join("scenario.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_dob-lab"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn constraint_boundary_line() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["constraint-check"], "g_dob = 500\ng_v = 1000\n", tmp.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("SATISFIED margin=0.000e0 rad/s xi=0.70711"));
}

#[test]
fn routh_line() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["routh"], "polynomial = 1,3,2,1\n", tmp.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("STABLE rhp=0"));
    let o = dob_lab(&["routh"], "polynomial = -2,1,1\n", tmp.path());
    assert_eq!(stdout(&o).lines().next(), Some("UNSTABLE rhp=1"));
}

#[test]
fn config_errors_exit_2_and_list_everything() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["locus"], "J_m = 0\nextra = 1\ngrid.points_per_decade = 2.5\n", tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in ["J_m", "unknown key 'extra'", "grid.points_per_decade", "missing required key 'locus.gain'"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }
}

#[test]
fn numeric_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["force-tf"], "D_env = 0\nK_env = 0\n", tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("force loop"));
}

#[test]
fn io_failure_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("out");
    fs::write(&blocker, "a file where the output directory should go").unwrap();
    let o = dob_lab(&["routh"], "polynomial = 1,1\n", tmp.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn thread_variable_is_checked() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("m.cfg");
    fs::write(&cfg, "map.param = g_dob\ngrid.points_per_decade = 5\n").unwrap();
    let run = |threads: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_dob-lab"))
            .args(["map", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join(out))
            .env("DOB_LAB_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("zero", "x").status.code(), Some(2));
    assert!(run("1", "one").status.success());
    assert!(run("4", "four").status.success());
    let a = fs::read(tmp.path().join("one/map.csv")).unwrap();
    let b = fs::read(tmp.path().join("four/map.csv")).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("param,value,stable\ng_dob,"));
}

#[test]
fn csv_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["bode"], "bode.target = position\n", tmp.path());
    assert!(o.status.success());
    let bode = fs::read_to_string(tmp.path().join("out/bode.csv")).unwrap();
    assert!(bode.starts_with("omega,mag_db,phase_deg\n"));
    let o = dob_lab(&["locus"], "locus.gain = C_f\ngrid.points_per_decade = 5\n", tmp.path());
    assert!(o.status.success());
    let locus = fs::read_to_string(tmp.path().join("out/locus.csv")).unwrap();
    assert!(locus.starts_with("gain,branch,re,im\n"));
    let o = dob_lab(&["simulate-force"], "sim.duration = 0.2\nreference.at = 0.05\nwindow.start = 0\nwindow.end = 0.2\n", tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let traj = fs::read_to_string(tmp.path().join("out/trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,q_m,qdot_m,v_meas,I_m,F_dis_hat,F_l_hat,F_l_true,contact\n"));
    assert_eq!(traj.lines().count(), 2001 + 1);
}

#[test]
fn figure_positional_and_file_must_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["reproduce-figure", "fig7"], "fig7.points_per_decade = 5\n", tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("out/fig7_alpha_map.csv").exists());
    let o = dob_lab(&["reproduce-figure", "fig7"], "figure = fig8\n", tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = dob_lab(&["routh", "fig7"], "polynomial = 1,1\n", tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig3_legend_follows_config_order() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["reproduce-figure"], "figure = fig3\nfig3.alphas = 4, 0.5, 2\n", tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(tmp.path().join("out/fig3.svg")).unwrap();
    let pos: Vec<usize> = ["alpha = 4<", "alpha = 0.5<", "alpha = 2<"].iter().map(|n| svg.find(n).unwrap()).collect();
    assert!(pos[0] < pos[1] && pos[1] < pos[2]);
}

#[test]
fn fig10_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dob_lab(&["reproduce-figure", "fig10"], "", tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["fig10_a.csv", "fig10_b.csv", "fig10_c.csv", "fig10.svg"] {
        assert!(tmp.path().join("out").join(f).exists(), "{f}");
    }
    let summary = fs::read_to_string(tmp.path().join("out/fig10_summary.txt")).unwrap();
    let index = |label: &str| -> f64 {
        let line = summary.lines().find(|l| l.starts_with(&format!("case {label}:"))).unwrap();
        let v = line.split("= ").nth(1).unwrap().split_whitespace().next().unwrap();
        v.parse().unwrap()
    };
    assert!(index("b") < index("a"));
    assert!(index("a") <= index("c"));
}

#[test]
fn scenario_round_trip_through_file() {
    let text = "K_p = 250\nsim.seed = 99\nfriction.coulomb = 0.1\nreference.amplitude = -0.2\n";
    let s = Scenario::parse(Kind::SimulatePosition, text).unwrap();
    let again = Scenario::parse(Kind::SimulatePosition, &s.to_config_text()).unwrap();
    assert_eq!(s, again);
    assert_eq!(again.params.k_p, 250.0);
    assert_eq!(again.seed("sim.seed"), 99);
}
