use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graspkit::cli::{ReportFile, SceneFile};
use serde_json::Value;
use tempfile::TempDir;

const SCENE: &str = r#"{
  "object": {"kind": "sphere", "center": [0, 0, 0], "radius": 1},
  "torque_origin": [0, 0, 0],
  "grasps": [
    {"name": "b-soft", "contacts": [
      {"position": [1, 0, 0], "normal": [-1, 0, 0], "model": "soft", "mu": 0.5, "gamma": 0.1},
      {"position": [-1, 0, 0], "normal": [1, 0, 0], "model": "soft", "mu": 0.5, "gamma": 0.1}]},
    {"name": "c-hard", "contacts": [
      {"position": [1, 0, 0], "normal": [-1, 0, 0], "model": "hard", "mu": 0.5},
      {"position": [-1, 0, 0], "normal": [1, 0, 0], "model": "hard", "mu": 0.5}]},
    {"name": "a-single", "contacts": [
      {"position": [0, 0, 1], "normal": [0, 0, -1], "model": "hard", "mu": 0.5}]},
    {"name": "d-ring", "contacts": [
      {"position": [1, 0, 0], "normal": [-1, 0, 0], "model": "hard", "mu": 0.5},
      {"position": [-0.5, 0.8660254037844386, 0], "normal": [0.5, -0.8660254037844386, 0], "model": "hard", "mu": 0.5},
      {"position": [-0.5, -0.8660254037844386, 0], "normal": [0.5, 0.8660254037844386, 0], "model": "hard", "mu": 0.5}]}
  ]
}"#;

const CUBE_OFF: &str = "OFF\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n\
4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn graspkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graspkit"))
        .args(args)
        .current_dir(cwd)
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
fn analyze_reports_closure_in_input_order() {
    let d = Dir::new();
    let scene = d.file("scene.json", SCENE);
    let o = graspkit(&["analyze", scene.to_str().unwrap()], d.0.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: ReportFile = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = report.grasps.iter().map(|g| g.name.as_str()).collect();
    assert_eq!(names, ["b-soft", "c-hard", "a-single", "d-ring"]);
    let closed: Vec<bool> = report
        .grasps
        .iter()
        .map(|g| g.report.force_closure)
        .collect();
    assert_eq!(closed, [true, false, false, true]);
    assert_eq!(report.cone_edges, 8);
    assert!(!stdout(&o).contains("timing_ms"));
}

#[test]
fn cone_edges_flag_overrides_and_is_recorded() {
    let d = Dir::new();
    let scene = d.file("scene.json", SCENE);
    let o = graspkit(
        &[
            "analyze",
            scene.to_str().unwrap(),
            "--cone-edges",
            "16",
            "--moment-scale",
            "0.5",
        ],
        d.0.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cone_edges"], 16);
    assert_eq!(v["moment_scale"], 0.5);
}

#[test]
fn timing_is_opt_in() {
    let d = Dir::new();
    let scene = d.file("scene.json", SCENE);
    let o = graspkit(
        &["analyze", scene.to_str().unwrap(), "--timing"],
        d.0.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn malformed_scene_exits_2_naming_the_field() {
    let d = Dir::new();
    let bad = d.file(
        "bad.json",
        &SCENE.replacen(r#""mu": 0.5, "gamma""#, r#""mu": "slippery", "gamma""#, 1),
    );
    let o = graspkit(&["analyze", bad.to_str().unwrap()], d.0.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("grasps[0].contacts[0].mu"),
        "{}",
        stderr(&o)
    );

    let truncated = d.file("cut.json", &SCENE[..200]);
    assert_eq!(
        graspkit(&["analyze", truncated.to_str().unwrap()], d.0.path())
            .status
            .code(),
        Some(2)
    );
    let zero = d.file("zero.json", &SCENE.replacen("[-1, 0, 0]", "[0, 0, 0]", 1));
    let o = graspkit(&["analyze", zero.to_str().unwrap()], d.0.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("b-soft"), "{}", stderr(&o));
    assert_eq!(
        graspkit(&["analyze", "missing.json"], d.0.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        graspkit(&["analyze", "--seed", "x", "s.json"], d.0.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn rank_orders_by_metric_then_name() {
    let d = Dir::new();
    let scene = d.file("scene.json", SCENE);
    let o = graspkit(
        &["rank", scene.to_str().unwrap(), "--metric", "q1", "--json"],
        d.0.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let order: Vec<&str> = v["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    let values: Vec<f64> = v["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    assert!(values[0] > values[1] && values[1] > 0.0);
    assert_eq!(order[2..], ["a-single", "c-hard"]);

    let o = graspkit(
        &["rank", scene.to_str().unwrap(), "--metric", "delta"],
        d.0.path(),
    );
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    // both rank-deficient grasps score 0 and trail, in name order
    assert!(
        lines[2].contains("a-single") && lines[3].contains("c-hard"),
        "{text}"
    );
    assert!(
        lines[2..].iter().all(|l| l.trim_end().ends_with(" 0")),
        "{text}"
    );
}

#[test]
fn rank_ties_fall_back_to_names() {
    let d = Dir::new();
    let scene: SceneFile = serde_json::from_str(SCENE).unwrap();
    let mut open = scene.clone();
    open.grasps
        .retain(|g| !g.name.contains("soft") && !g.name.contains("ring"));
    open.grasps.reverse();
    let p = d.file("open.json", &open.to_json());
    let o = graspkit(
        &["rank", p.to_str().unwrap(), "--metric", "qinf", "--json"],
        d.0.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ranking"][0]["name"], "a-single");
    assert_eq!(v["ranking"][1]["name"], "c-hard");
}

#[test]
fn synthesize_is_deterministic_and_round_trips() {
    let d = Dir::new();
    let run = |trace: &str| {
        graspkit(
            &[
                "synthesize",
                "--object",
                "sphere:1.0",
                "--fingers",
                "3",
                "--mu",
                "0.5",
                "--seed",
                "7",
                "--trace",
                trace,
            ],
            d.0.path(),
        )
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        std::fs::read(d.path("a.csv")).unwrap(),
        std::fs::read(d.path("b.csv")).unwrap()
    );
    assert!(stderr(&a).contains("force closure yes"));

    let scene = d.file("synth.json", &stdout(&a));
    let o = graspkit(&["analyze", scene.to_str().unwrap()], d.0.path());
    let report: ReportFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report.grasps[0].report.force_closure);
}

#[test]
fn local_optimum_trace_is_longer() {
    let d = Dir::new();
    let rows = |mode: &str, trace: &str| {
        let o = graspkit(
            &[
                "synthesize",
                "--object",
                "sphere:1.0",
                "--seed",
                "1",
                "--mode",
                mode,
                "--trace",
                trace,
            ],
            d.0.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read_to_string(d.path(trace))
            .unwrap()
            .lines()
            .count()
    };
    assert!(rows("local-optimum", "l.csv") > rows("stop-at-closure", "s.csv"));
}

#[test]
fn hostile_mesh_exits_4_with_best_iterate() {
    let d = Dir::new();
    let mesh = d.file("cube.off", CUBE_OFF);
    let obj = format!("off:{}", mesh.display());
    let o = graspkit(
        &[
            "synthesize",
            "--object",
            &obj,
            "--fingers",
            "2",
            "--mu",
            "0.01",
            "--seed",
            "2",
            "-o",
            "best.json",
        ],
        d.0.path(),
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let best =
        SceneFile::from_json(&std::fs::read_to_string(d.path("best.json")).unwrap()).unwrap();
    assert_eq!(best.grasps[0].contacts.len(), 2);
    let header = std::fs::read_to_string(d.path("trace.csv")).unwrap();
    assert!(header.starts_with("iter,measure,c0_tri,c0_b1,c0_b2,c1_tri"));
}

#[test]
fn bad_object_specs_exit_2() {
    let d = Dir::new();
    for spec in ["sphere:0", "torus:1", "off:nothing.off"] {
        let o = graspkit(&["synthesize", "--object", spec], d.0.path());
        assert_eq!(o.status.code(), Some(2), "{spec}");
    }
}

#[test]
fn bench_commands() {
    let d = Dir::new();
    let hand = [
        "--l1", "0.06", "--l2", "0.04", "--l0", "0.025", "--torque", "0.5",
    ];
    let o = graspkit(
        &[&["bench", "qgrasp", "--delta-d", "0"][..], &hand].concat(),
        d.0.path(),
    );
    assert_eq!(stdout(&o), "q_grasp 0\n");
    let o = graspkit(
        &[&["bench", "qgrasp", "--delta-d", "0.08"][..], &hand].concat(),
        d.0.path(),
    );
    assert_eq!(stdout(&o), "q_grasp 0.502655\n");

    let pulls = d.file("pull.csv", "phi,disp,force\n0,0,0\n0,0.001,10\n0,0.002,4\n");
    let o = graspkit(
        &[
            &["bench", "qhold", "--csv", pulls.to_str().unwrap(), "--json"][..],
            &hand,
        ]
        .concat(),
        d.0.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q_hold"], 2.0);
    assert!(v["force_rule"].as_str().unwrap().contains("minimum"));

    let mut csv = String::from("dx,dy,dz,fx,fy,fz\n");
    for (i, d3) in [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
    ]
    .iter()
    .enumerate()
    {
        let s = 1e-3 * (1.0 + i as f64 / 10.0);
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            d3[0] * s,
            d3[1] * s,
            d3[2] * s,
            100.0 * d3[0] * s,
            200.0 * d3[1] * s,
            300.0 * d3[2] * s
        ));
    }
    let stiff = d.file("k.csv", &csv);
    let o = graspkit(
        &["bench", "stiffness", "--csv", stiff.to_str().unwrap()],
        d.0.path(),
    );
    let text = stdout(&o);
    assert!(
        text.contains("100.000") && text.contains("200.000") && text.contains("300.000"),
        "{text}"
    );

    let broken = d.file("broken.csv", "dx,dy,dz,fx,fy,fz\n1,2,x,4,5,6\n");
    let o = graspkit(
        &["bench", "stiffness", "--csv", broken.to_str().unwrap()],
        d.0.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let empty = d.file("empty.csv", "phi,disp,force\n");
    let o = graspkit(
        &[
            &["bench", "qhold", "--csv", empty.to_str().unwrap()][..],
            &hand,
        ]
        .concat(),
        d.0.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}
