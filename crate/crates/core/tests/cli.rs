use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn swk(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("swk runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn total(records: &Value) -> u64 {
    records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["multiplicity"].as_u64().unwrap())
        .sum()
}

fn data_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_owned)
        .collect()
}

#[test]
fn spectrum_of_cycle_five() {
    let dir = TempDir::new().unwrap();
    let out = swk(dir.path(), &["spectrum", "--graph", "cycle:5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("spectrum.json"));
    for key in ["config", "results", "verdict", "meta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(total(&v["results"]["evolution"]), 10);
    assert_eq!(total(&v["results"]["discriminant"]), 5);
    assert_eq!(v["results"]["dims"]["dim_h"], 10);
    let rows = data_rows(&dir.path().join("spectrum.csv"));
    let count = |op: &str| -> u64 {
        rows.iter()
            .filter(|r| r.starts_with(&format!("{op},")))
            .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
            .sum()
    };
    assert_eq!((count("U"), count("T")), (10, 5));
}

#[test]
fn spectrum_output_follows_the_schema() {
    let dir = TempDir::new().unwrap();
    let out = swk(
        dir.path(),
        &["spectrum", "--graph", "sierpinski-pre:d=2,level=2", "--plot"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("spectrum.json"));
    assert_eq!(v["config"]["command"], "spectrum");
    assert_eq!(v["meta"]["tool"], "swk");
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["meta"]["timestamp_unix"].as_u64().is_some());
    assert!(v["config"].get("out_dir").is_none());
    for r in v["results"]["evolution"].as_array().unwrap() {
        let (re, im) = (r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap());
        assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-10);
    }
    let dims = &v["results"]["dims"];
    let sum = ["M_plus", "M_minus", "dim_l1", "m_plus", "m_minus"]
        .iter()
        .map(|k| dims[k].as_u64().unwrap())
        .sum::<u64>();
    assert_eq!(sum, dims["dim_h"].as_u64().unwrap());
    assert!(dir.path().join("spectrum.svg").exists());
}

#[test]
fn malformed_graph_file_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.graph");
    std::fs::write(
        &file,
        "sawg 1\nvertices 2 arcs 2\narc 0 0 1 1 1.0 0.0 0.0\narc 1 1 0 zero 1.0 0.0 0.0\n",
    )
    .unwrap();
    let spec = format!("file:{}", file.display());
    let out = swk(dir.path(), &["spectrum", "--graph", &spec]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn verify_passes_on_random_and_torus() {
    for graph in ["random:v=8,p=0.6,seed=3,complex,theta", "torus:d=2,side=3"] {
        let dir = TempDir::new().unwrap();
        let out = swk(dir.path(), &["verify", "--graph", graph]);
        assert_eq!(out.status.code(), Some(0), "{graph}");
        let v = json(&dir.path().join("verdict.json"));
        assert_eq!(v["verdict"]["pass"], true);
        let r = &v["results"][0];
        assert_eq!(r["identities"]["checks"].as_array().unwrap().len(), 13);
        assert!(r["mapping"]["transfer"].as_array().is_some());
        assert!(r["mapping"]["set_level"]["pass"].as_bool().unwrap());
    }
}

#[test]
fn injected_corruption_fails_verification() {
    let dir = TempDir::new().unwrap();
    let out = swk(
        dir.path(),
        &["verify", "--graph", "torus:d=2,side=3", "--inject-corruption"],
    );
    assert_eq!(out.status.code(), Some(3));
    let v = json(&dir.path().join("verdict.json"));
    assert_eq!(v["verdict"]["pass"], false);
    assert_eq!(v["results"][0]["corrupted"], true);
}

#[test]
fn verify_results_do_not_depend_on_jobs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(swk(a.path(), &["verify", "--battery", "small"]).status.code(), Some(0));
    assert_eq!(
        swk(b.path(), &["verify", "--battery", "small", "--jobs", "3"])
            .status
            .code(),
        Some(0)
    );
    let (va, vb) = (
        json(&a.path().join("verdict.json")),
        json(&b.path().join("verdict.json")),
    );
    assert_eq!(va["results"], vb["results"]);
    assert_eq!(va["verdict"], vb["verdict"]);
}

#[test]
fn sierpinski_depth_zero() {
    let dir = TempDir::new().unwrap();
    let out = swk(dir.path(), &["sierpinski", "--d", "2", "--depth", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = data_rows(&dir.path().join("sierpinski_set.csv"))
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, vec![-0.5, -0.25, 0.25]);
    assert_eq!(data_rows(&dir.path().join("sierpinski_unitary.csv")).len(), 8);
}

#[test]
fn sierpinski_coverage_report() {
    let dir = TempDir::new().unwrap();
    let out = swk(
        dir.path(),
        &[
            "sierpinski",
            "--d",
            "2",
            "--depth",
            "6",
            "--compare-level",
            "3",
            "--epsilon",
            "0.05",
            "--plot",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("coverage.json"));
    assert!(v["verdict"]["covered_fraction"].as_f64().unwrap() >= 0.8);
    assert!(!data_rows(&dir.path().join("coverage.csv")).is_empty());
    assert!(dir.path().join("sierpinski.svg").exists());
}

#[test]
fn sierpinski_rejects_dimension_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(swk(dir.path(), &["sierpinski", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn cycle_return_average_trends_down() {
    let dir = TempDir::new().unwrap();
    let out = swk(
        dir.path(),
        &["dynamics", "--graph", "cycle:400", "--steps", "200", "--start-arc", "0"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("dynamics.json"));
    assert_eq!(v["results"]["window_averages_non_increasing"], true);
    assert_eq!(v["verdict"]["localization"], "no");
    assert_eq!(v["verdict"]["norm_conserved"], true);
    let avg: Vec<f64> = data_rows(&dir.path().join("dynamics_return.csv"))
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(avg.len(), 200);
    assert!(avg.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    let traj = data_rows(&dir.path().join("dynamics_trajectory.csv"));
    assert_eq!(traj.len(), 201 * 400);
}

#[test]
fn sierpinski_lattice_localizes() {
    let dir = TempDir::new().unwrap();
    let out = swk(
        dir.path(),
        &["dynamics", "--graph", "sierpinski-double:d=2,level=3", "--steps", "500"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("localization: yes"));
    let v = json(&dir.path().join("dynamics.json"));
    assert_eq!(v["verdict"]["localization"], "yes");
    assert_eq!(v["verdict"]["floor_is_heuristic"], true);
}

#[test]
fn negative_steps_are_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        swk(dir.path(), &["dynamics", "--graph", "cycle:5", "--steps", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dense_cap_is_a_resource_limit() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_swk"))
        .args(["spectrum", "--graph", "cycle:40", "--out"])
        .arg(dir.path())
        .env("SWK_MAX_DIM", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "graphs = [\"cycle:9\"]\nseed = 5\n[dynamics]\nsteps = 12\nthin = 4\n",
    )
    .unwrap();
    let out = swk(
        dir.path(),
        &["dynamics", "--config", cfg.to_str().unwrap(), "--steps", "8"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("dynamics.json"));
    assert_eq!(v["config"]["graphs"][0], "cycle:n=9");
    assert_eq!(v["config"]["dynamics"]["steps"], 8);
    assert_eq!(v["config"]["dynamics"]["thin"], 4);
    assert_eq!(v["config"]["seed"], 5);

    std::fs::write(&cfg, "seed = 1\nbogus = true\n").unwrap();
    let out = swk(
        dir.path(),
        &["spectrum", "--config", cfg.to_str().unwrap(), "--graph", "cycle:5"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn identical_runs_are_byte_identical_outside_meta() {
    let strip = |p: &Path| {
        let text = std::fs::read_to_string(p).unwrap();
        text[..text.find("\n  \"meta\": {").unwrap()].to_string()
    };
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "dynamics",
        "--graph",
        "random:v=9,p=0.5,seed=2,complex",
        "--steps",
        "30",
        "--seed",
        "11",
    ];
    assert_eq!(swk(a.path(), &args).status.code(), Some(0));
    assert_eq!(swk(b.path(), &args).status.code(), Some(0));
    assert_eq!(
        strip(&a.path().join("dynamics.json")),
        strip(&b.path().join("dynamics.json"))
    );
    for csv in ["dynamics_trajectory.csv", "dynamics_return.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(csv)).unwrap(),
            std::fs::read(b.path().join(csv)).unwrap()
        );
    }
}

#[test]
fn export_writes_matrix_market_files() {
    let dir = TempDir::new().unwrap();
    let out = swk(dir.path(), &["export", "--graph", "complete:4", "--name", "k4"]);
    assert_eq!(out.status.code(), Some(0));
    for op in ["dA", "dB", "S", "C", "U", "T"] {
        let text = std::fs::read_to_string(dir.path().join(format!("k4.{op}.mtx"))).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate complex general"));
        let m = swk_core::operators::parse_matrix_market(&text).unwrap();
        assert!(m.rows() > 0);
    }
    let g = swk_core::graph::load_graph(dir.path().join("k4.graph")).unwrap();
    assert_eq!(g.vertex_count(), 4);
}
