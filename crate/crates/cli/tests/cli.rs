//! End-to-end tests of the `submanifold` binary: exit codes, report shape,
//! determinism, and the format/output flags.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_submanifold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn list_reports_the_whole_catalog() {
    let out = run(&["list"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    assert_eq!(doc["schema"], "1");
    assert_eq!(doc["command"], "list");
    assert_eq!(doc["pass"], true);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 14);
    let ids: Vec<&str> = results.iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids[0], "cylinder-parabola");
    assert!(ids.contains(&"clifford-torus"));
    assert!(ids.contains(&"hyperbolic-equidistant"));
    let clifford = results.iter().find(|e| e["id"] == "clifford-torus").unwrap();
    assert_eq!(clifford["curvature"], 1.0);
    // Dimension of the curved model space itself, not its linear hull.
    assert_eq!(clifford["ambient_dim"], 3);
}

#[test]
fn identities_pass_on_the_flagship_entry() {
    let out = run(&["identities", "--entry", "cylinder-parabola"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    assert_eq!(doc["pass"], true);
    let r = &doc["results"][0];
    assert!(r["max_gauss"].as_f64().unwrap() <= 1e-3);
    assert!(r["max_codazzi"].as_f64().unwrap() <= 1e-3);
    assert!(r["max_ricci"].as_f64().unwrap() <= 1e-3);
    // The report names the worst residual and where it happened.
    assert!(r["worst"]["u"].as_array().unwrap().len() == 2);
    assert!(["gauss", "codazzi", "ricci"]
        .contains(&r["worst"]["equation"].as_str().unwrap()));
}

#[test]
fn identities_on_the_plane_are_exact() {
    let out = run(&["identities", "--entry", "plane"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    let worst = doc["results"][0]["worst"]["residual"].as_f64().unwrap();
    assert!(worst <= 1e-8, "plane worst residual {worst}");
}

#[test]
fn classify_matches_expectations_per_point() {
    let out = run(&["classify", "--entry", "ellipsoid"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    let r = &doc["results"][0];
    assert_eq!(r["expected_status"], "not_recurrent");
    for pc in r["per_point"].as_array().unwrap() {
        assert_eq!(pc["status"], "not_recurrent");
    }
    assert_eq!(r["summary"]["status_counts"]["not_recurrent"], 25);
}

#[test]
fn classify_emits_mu_and_codim_rank_for_the_flagship() {
    let out = run(&["classify", "--entry", "cylinder-parabola-e5"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    let r = &doc["results"][0];
    // Rotated into 5-space, the surface still spans only a 3-dimensional slice.
    assert_eq!(r["summary"]["codim_rank"], 3);
    let pc = &r["per_point"][0];
    assert_eq!(pc["status"], "recurrent_nonparallel");
    assert_eq!(pc["mu"].as_array().unwrap().len(), 2);
    assert_eq!(pc["dim_first_normal"], 1);
}

#[test]
fn strict_tolerance_turns_pass_into_check_failure() {
    // The round sphere is parallel at 1e-4 but its finite-difference noise
    // sits far above 1e-12, so the status flips and no longer matches.
    let out = run(&[
        "classify",
        "--entry",
        "sphere-round",
        "--tol",
        "parallel=1e-12",
    ]);
    assert_eq!(code(&out), 1);
    let doc = json_stdout(&out);
    assert_eq!(doc["pass"], false);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["classify", "--entry", "nosuch"][..],
        &["identities", "--entry", "all", "--grid", "2,5"][..],
        &["identities", "--entry", "sphere-round", "--grid", "4"][..],
        &["classify", "--entry", "sphere-round", "--tol", "bogus=1"][..],
        &["classify", "--entry", "sphere-round", "--tol", "parallel=-1"][..],
        &["classify", "--entry", "all", "--param", "radius=0.5"][..],
        &["classify", "--entry", "sphere-round", "--param", "radius=9"][..],
        &["classify", "--entry", "sphere-round", "--param", "radius"][..],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?} said nothing");
    }
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    assert_eq!(code(&run(&["--badflag"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["classify", "--help"])), 0);
}

#[test]
fn param_overrides_are_recorded_and_informational() {
    let out = run(&["classify", "--entry", "sphere-round", "--param", "radius=0.8"]);
    assert_eq!(code(&out), 0);
    let doc = json_stdout(&out);
    let r = &doc["results"][0];
    assert_eq!(r["params"]["radius"], 0.8);
    assert_eq!(r["pass"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = run(&["classify", "--entry", "cylinder-parabola"]);
    let b = run(&["classify", "--entry", "cylinder-parabola"]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let c = run(&["identities", "--entry", "clifford-torus", "--format", "csv"]);
    let d = run(&["identities", "--entry", "clifford-torus", "--format", "csv"]);
    assert_eq!(code(&c), 0);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "classify",
        "--entry",
        "plane",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["results"][0]["summary"]["status_counts"]["b_zero"], 25);

    let unwritable = run(&["list", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(code(&unwritable), 2);
}

#[test]
fn csv_is_a_flat_per_point_table() {
    let out = run(&["classify", "--entry", "cylinder-parabola", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("entry,u0,u1,mu0,mu1,status,"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 25);
    let width = header.split(',').count();
    for row in &rows {
        assert_eq!(row.split(',').count(), width);
        assert!(row.starts_with("cylinder-parabola,"));
    }

    let out = run(&["identities", "--entry", "plane", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "entry,u0,u1,gauss,codazzi,ricci");
    assert_eq!(text.lines().count(), 26);
}
