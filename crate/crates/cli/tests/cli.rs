use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cnrrt::gridworld::{extract_convex_corners, inflate, load_map, save_map, save_mask};
use cnrrt::guidance::{oracle_guidance, ORACLE_RADIUS};
use cnrrt::{GridMap, GuidanceMask, Point, RunRecord};

fn cnrrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnrrt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn free_map(dir: &Path) -> std::path::PathBuf {
    let map = GridMap::new(40, 30).with_query(Point::new(3.5, 4.5), Point::new(35.5, 25.5));
    let p = dir.join("free.ppm");
    save_map(&map, &p).unwrap();
    p
}

/// A wall with a gap at the bottom forces a detour.
fn wall_map(dir: &Path) -> std::path::PathBuf {
    let mut map = GridMap::new(60, 60).with_query(Point::new(8.5, 10.5), Point::new(52.5, 10.5));
    for r in 0..45 {
        for c in 29..32 {
            map.set_occupied(r, c, true);
        }
    }
    let p = dir.join("wall.ppm");
    save_map(&map, &p).unwrap();
    p
}

fn record(out: &Output) -> RunRecord {
    serde_json::from_slice(&out.stdout).expect("record JSON on stdout")
}

#[test]
fn help_lists_subcommands_and_defaults() {
    let out = cnrrt(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["genmaps", "corners", "inflate", "plan", "dataset", "bench"] {
        assert!(text.contains(sub), "{sub} missing");
    }
    let plan = String::from_utf8_lossy(&cnrrt(&["plan", "--help"]).stdout).into_owned();
    for d in [
        "--step <STEP>",
        "[default: 5]",
        "[default: 7]",
        "[default: 1000]",
        "[default: 0.5]",
        "[default: 0.2]",
    ] {
        assert!(plan.contains(d), "{d} missing from plan help");
    }
    let bench = String::from_utf8_lossy(&cnrrt(&["bench", "--help"]).stdout).into_owned();
    for sub in ["run", "sweep", "converge", "noise"] {
        assert!(bench.contains(sub));
    }
}

#[test]
fn visibility_on_free_map_is_straight() {
    let dir = tempfile::tempdir().unwrap();
    let map = free_map(dir.path());
    let out = cnrrt(&["plan", "--map", path_str(&map), "--planner", "visibility"]);
    assert_eq!(code(&out), 0);
    let rec = record(&out);
    let want = Point::new(3.5, 4.5).dist(Point::new(35.5, 25.5));
    assert!((rec.length.unwrap() - want).abs() < 1e-9);
}

#[test]
fn convex_plan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_map(dir.path());
    let args = ["plan", "--map", path_str(&map), "--planner", "convex_neural", "--oracle", "--seed", "7"];
    let a = cnrrt(&args);
    let b = cnrrt(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(record(&a).without_time(), record(&b).without_time());
}

#[test]
fn guided_planner_without_mask_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_map(dir.path());
    for planner in ["convex_neural", "neural", "neural_informed"] {
        let out = cnrrt(&["plan", "--map", path_str(&map), "--planner", planner]);
        assert_eq!(code(&out), 2, "{planner}");
    }
    assert_eq!(code(&cnrrt(&["plan", "--map", path_str(&map), "--planner", "bogus"])), 2);
    assert_eq!(code(&cnrrt(&["plan"])), 2);
}

#[test]
fn mask_file_is_used_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_map(dir.path());
    let good = dir.path().join("good.pgm");
    let inflated = inflate(&load_map(&map).unwrap(), 2.0);
    save_mask(&oracle_guidance(&inflated, ORACLE_RADIUS).unwrap(), &good).unwrap();
    let base = ["plan", "--map", path_str(&map), "--planner", "convex_neural", "--seed", "7"];
    let mut with_file = base.to_vec();
    with_file.extend(["--mask", path_str(&good)]);
    let mut with_oracle = base.to_vec();
    with_oracle.push("--oracle");
    let a = cnrrt(&with_file);
    assert_eq!(code(&a), 0);
    assert!(!record(&a).degraded_guidance);
    assert_eq!(record(&a).without_time(), record(&cnrrt(&with_oracle)).without_time());

    let bad = dir.path().join("bad.pgm");
    save_mask(&GuidanceMask::empty(20, 20), &bad).unwrap();
    let out = cnrrt(&["plan", "--map", path_str(&map), "--planner", "neural", "--mask", path_str(&bad)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.ppm");
    assert_eq!(code(&cnrrt(&["plan", "--map", path_str(&missing), "--planner", "visibility"])), 3);
    let junk = dir.path().join("junk.ppm");
    fs::write(&junk, b"P9 not an image").unwrap();
    assert_eq!(code(&cnrrt(&["inflate", "--map", path_str(&junk), "--out", "x.ppm"])), 3);
}

#[test]
fn unreachable_goal_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut map = GridMap::new(40, 40).with_query(Point::new(5.5, 5.5), Point::new(34.5, 34.5));
    for i in 0..40 {
        map.set_occupied(20, i, true);
    }
    let p = dir.path().join("sealed.ppm");
    save_map(&map, &p).unwrap();
    let out = cnrrt(&["plan", "--map", path_str(&p), "--planner", "visibility"]);
    assert_eq!(code(&out), 1);
    assert!(!record(&out).success);
    let out = cnrrt(&["plan", "--map", path_str(&p), "--planner", "rrt_star", "--max-iters", "200"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_map(dir.path());
    let cfg = dir.path().join("plan.cfg");
    fs::write(&cfg, "max_iters = 1\nseed = 3\n").unwrap();
    let base = ["plan", "--map", path_str(&map), "--planner", "rrt_star", "--config", path_str(&cfg)];
    let out = cnrrt(&base);
    assert_eq!(code(&out), 1);
    assert_eq!(record(&out).iterations_used, 1);

    let mut args = base.to_vec();
    args.extend(["--max-iters", "1000"]);
    let out = cnrrt(&args);
    assert_eq!(code(&out), 0);
    assert!(record(&out).iterations_used > 1);

    let json = dir.path().join("plan.json");
    fs::write(&json, r#"{"max_iters": 1}"#).unwrap();
    let out = cnrrt(&["plan", "--map", path_str(&map), "--planner", "rrt_star", "--config", path_str(&json)]);
    assert_eq!(record(&out).iterations_used, 1);

    fs::write(&cfg, "max_itres = 5\n").unwrap();
    assert_eq!(code(&cnrrt(&base)), 2);
    fs::write(&cfg, "alpha = 3\n").unwrap();
    assert_eq!(code(&cnrrt(&base)), 2);
}

#[test]
fn svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let map = free_map(dir.path());
    let svg = dir.path().join("out/p.svg");
    let json = dir.path().join("r.json");
    let out = cnrrt(&[
        "plan", "--map", path_str(&map), "--planner", "visibility", "--svg", path_str(&svg), "--out", path_str(&json),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(svg).unwrap();
    assert_eq!(text.matches("<line").count(), 1);
    let rec: RunRecord = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert!(rec.success);
}

#[test]
fn genmaps_corners_inflate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("maps");
    let args = ["genmaps", "--seed", "4", "--difficulty", "sparse", "--count", "2", "--width", "64", "--height", "64"];
    let mut a = args.to_vec();
    a.extend(["--out", path_str(&out_dir)]);
    assert_eq!(code(&cnrrt(&a)), 0);
    let first = out_dir.join("sparse_0.ppm");
    assert!(out_dir.join("sparse_1.ppm").exists());
    let bytes = fs::read(&first).unwrap();
    assert_eq!(code(&cnrrt(&a)), 0);
    assert_eq!(fs::read(&first).unwrap(), bytes);

    let raw = load_map(&first).unwrap();
    let out = cnrrt(&["corners", "--map", path_str(&first), "--rc", "1.5"]);
    assert_eq!(code(&out), 0);
    let mut want = String::from("row,col\n");
    for (r, c) in extract_convex_corners(&inflate(&raw, 1.5)).iter() {
        want.push_str(&format!("{r},{c}\n"));
    }
    assert_eq!(String::from_utf8(out.stdout).unwrap(), want);

    let inflated = dir.path().join("inflated.ppm");
    assert_eq!(code(&cnrrt(&["inflate", "--map", path_str(&first), "--out", path_str(&inflated)])), 0);
    assert_eq!(load_map(&inflated).unwrap(), inflate(&raw, 2.0));
}

#[test]
fn dataset_export_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = cnrrt(&[
            "dataset", "export", "--seed", "2", "--count", "2", "--pairs", "2", "--difficulty", "sparse", "--width", "48",
            "--height", "48", "--out", path_str(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a");
    let b = run("b");
    let manifest = fs::read_to_string(a.join("manifest.jsonl")).unwrap();
    assert_eq!(manifest.lines().count(), 4);
    assert_eq!(manifest, fs::read_to_string(b.join("manifest.jsonl")).unwrap());
    for line in manifest.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let input = v["input"].as_str().unwrap();
        assert_eq!(fs::read(a.join(input)).unwrap(), fs::read(b.join(input)).unwrap());
        assert!(a.join(v["label"].as_str().unwrap()).exists());
    }
}

#[test]
fn bench_subcommands_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.cfg");
    fs::write(
        &suite,
        "seed = 1\ndifficulties = sparse\nmaps_per_difficulty = 2\nwidth = 64\nheight = 64\ntrials = 2\n\
         planners = rrt_star, visibility, convex_neural\nplanner.max_iters = 300\nconverge_seeds = 2\n\
         sweep_alpha_pred = 0, 0.5\nsweep_alpha_explore = 0.2\nnoise = delete:0.3\n",
    )
    .unwrap();
    let bench = |sub: &str| {
        let out = dir.path().join(sub);
        let o = cnrrt(&["bench", sub, "--suite", path_str(&suite), "--out", path_str(&out), "--jobs", "2"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let run = bench("run");
    let csv = fs::read_to_string(run.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 2);
    assert!(run.join("paths/sparse_0.svg").exists());
    assert_eq!(fs::read_to_string(bench("sweep").join("sweep.csv")).unwrap().lines().count(), 3);
    let conv = bench("converge");
    assert!(conv.join("curves/sparse_1.svg").exists());
    assert_eq!(fs::read_to_string(conv.join("converge_summary.csv")).unwrap().lines().count(), 1 + 2 * 2);
    assert_eq!(fs::read_to_string(bench("noise").join("robustness.csv")).unwrap().lines().count(), 2);

    fs::write(&suite, "trials = 0\n").unwrap();
    let o = cnrrt(&["bench", "run", "--suite", path_str(&suite), "--out", path_str(dir.path())]);
    assert_eq!(code(&o), 2);
}
