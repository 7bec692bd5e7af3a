use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eagga_cli::export;
use eagga_core::groupstruct::GroupStructure;

fn synthetic_csv() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic.csv")
}

fn eagga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eagga")).args(args).output().expect("spawn eagga")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn run_small(dir: &Path, out: &str, evals: usize, seed: u64) -> PathBuf {
    let cfg = write_config(dir, &format!(r#"{{"mu": 10, "nu": 4, "max_evals": {evals}}}"#));
    let out = dir.join(out);
    let seed = seed.to_string();
    let o = eagga(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--data",
        synthetic_csv().to_str().unwrap(),
        "--target",
        "y",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        &seed,
    ]);
    assert!(o.status.success(), "run failed: {}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn run_writes_all_exports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_small(tmp.path(), "out", 50, 0);
    for f in ["manifest.json", "pareto_front.csv", "test_front.csv", "hv_trace.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let models: Vec<_> = fs::read_dir(out.join("models")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(models.iter().any(|m| m == "featureless.json"));
    let front_rows = fs::read_to_string(out.join("pareto_front.csv")).unwrap().lines().count() - 1;
    assert_eq!(models.len(), front_rows);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "complete");
    assert_eq!(manifest["n_evals"], 50);
    assert_eq!(manifest["data"]["rows"], 500);
    assert_eq!(manifest["data"]["cols"], 11);
    assert_eq!(manifest["config"]["max_evals"], 50);

    let trace = fs::read_to_string(out.join("hv_trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("eval_index,hypervolume"));
    let hv: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(hv.len(), 50);
    assert!(hv[0] >= 0.5);
    assert!(hv.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn front_header_and_anchor_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_small(tmp.path(), "out", 20, 1);
    let text = fs::read_to_string(out.join("pareto_front.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eval_index,auc,nf,ni,nnm,group_structure,hp_json"));
    assert!(lines.next().unwrap().starts_with("_,0.5,0,0,0,"));
    let aucs: Vec<f64> = export::read_front(&out.join("pareto_front.csv")).unwrap().iter().map(|o| o.auc()).collect();
    assert!(aucs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn hv_of_single_featureless_point() {
    let tmp = tempfile::tempdir().unwrap();
    let front = tmp.path().join("front.csv");
    fs::write(&front, "(\u{2212}0.5,0,0,0)\n").unwrap();
    let o = eagga(&["hv", "--front", front.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0.5");
}

#[test]
fn hv_round_trip_matches_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_small(tmp.path(), "out", 40, 2);
    let o = eagga(&["hv", "--front", out.join("pareto_front.csv").to_str().unwrap()]);
    assert!(o.status.success());
    let hv: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    let trace = fs::read_to_string(out.join("hv_trace.csv")).unwrap();
    let last: f64 = trace.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((hv - last).abs() <= 1e-12, "{hv} vs {last}");
}

#[test]
fn exported_structures_parse_back() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_small(tmp.path(), "out", 40, 3);
    for file in ["pareto_front.csv", "test_front.csv"] {
        let structures = export::read_structures(&out.join(file)).unwrap();
        assert!(!structures.is_empty());
        for s in structures {
            let g: GroupStructure = s.parse().unwrap();
            assert!(g.is_valid(10), "{s}");
            assert_eq!(g.to_string(), s);
        }
    }
}

#[test]
fn seed_identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_small(tmp.path(), "a", 40, 7);
    let b = run_small(tmp.path(), "b", 40, 7);
    for f in ["pareto_front.csv", "test_front.csv", "hv_trace.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    for entry in fs::read_dir(a.join("models")).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join("models").join(&name)).unwrap(), fs::read(b.join("models").join(&name)).unwrap());
    }
}

#[test]
fn measures_on_exported_model() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_small(tmp.path(), "out", 20, 4);
    let groups = tmp.path().join("groups.txt");
    fs::write(&groups, "unselected:[0,1,2,3,4,5,6,7,8,9]\n").unwrap();
    let model = out.join("models/featureless.json");
    let o = eagga(&["measures", "--model", model.to_str().unwrap(), "--groups", groups.to_str().unwrap(), "--p", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "nf,ni,nnm\n0,0,0\n");

    let o = eagga(&["measures", "--model", model.to_str().unwrap(), "--groups", "group:[0,1]:INC", "--p", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn detect_dumps_every_feature() {
    let o = eagga(&["detect", "--data", synthetic_csv().to_str().unwrap(), "--target", "y"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let (features, matrix) = text.split_once("\n\n").unwrap();
    assert_eq!(features.lines().count(), 11);
    assert_eq!(matrix.lines().count(), 11);
    assert!(features.starts_with("feature,info_gain,mono_signed,mono_probability,sign"));
}

#[test]
fn usage_errors_exit_1() {
    let o = eagga(&["run", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let o = eagga(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mu": 10, "max_evals": 5, "mystery": 1}"#);
    let data = synthetic_csv();
    let out = tmp.path().join("out");
    let args = ["run", "--config", cfg.to_str().unwrap(), "--data", data.to_str().unwrap(), "--target", "y", "--out", out.to_str().unwrap()];
    let o = eagga(&args);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);

    let cfg = write_config(tmp.path(), r#"{"mu": 10, "max_evals": 5}"#);
    let mut with_flavor = args.to_vec();
    with_flavor[2] = cfg.to_str().unwrap();
    with_flavor.extend(["--flavor", "no_such_flavor"]);
    assert_eq!(eagga(&with_flavor).status.code(), Some(1));
}

#[test]
fn data_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"mu": 10, "max_evals": 5}"#);
    let out = tmp.path().join("out");
    let data = synthetic_csv();
    let o = eagga(&[
        "run", "--config", cfg.to_str().unwrap(), "--data", data.to_str().unwrap(), "--target", "nope", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.starts_with("eagga: "));

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "a,b,y\n1,2,0\n3,x,1\n").unwrap();
    let o = eagga(&["detect", "--data", bad.to_str().unwrap(), "--target", "y"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let o = eagga(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("run"));
}
