use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use barvinok::matrix::IntMatrix;

fn barvinok(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barvinok")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn rank_of(dir: &Path, name: &str, csv: &str) -> Output {
    let path = dir.join(name);
    std::fs::write(&path, csv).unwrap();
    barvinok(&["rank", path.to_str().unwrap()])
}

#[test]
fn rank_reports_pair_and_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = rank_of(
        dir.path(),
        "m.csv",
        "6,1,4,6,3\n2,-3,-1,2,-1\n5,-2,0,4,2\n5,-2,0,4,2\n0,-5,-1,0,-3\n6,-2,0,4,4\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "rank <= 2");
    assert_eq!(v["generators"], serde_json::json!([3, 5]));
    assert_eq!(v["canonical"]["normsq"], 97);
    assert_eq!(v["tree"], "[p5 q3 | p1 | p2 q2 | q4 | p3 p4 | q1 | p6 q5]");
}

#[test]
fn rank_three_configurations() {
    let dir = tempfile::tempdir().unwrap();
    for (name, csv) in [("left.csv", "0,0,0\n0,3,2\n1,2,4\n"), ("right.csv", "0,0,0\n0,3,1\n1,2,4\n")] {
        let out = rank_of(dir.path(), name, csv);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["verdict"], "rank > 2");
        assert_eq!(v["rank_le_2"], false);
        assert!(v["tree"].is_null());
    }
}

#[test]
fn rank_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rank_of(dir.path(), "zero.csv", "1,1\n5,5\n").status.code(), Some(3));
    assert_eq!(rank_of(dir.path(), "bad.csv", "1,x\n2,3\n").status.code(), Some(2));
    assert_eq!(rank_of(dir.path(), "ragged.csv", "1,2\n3\n").status.code(), Some(2));
    assert_eq!(barvinok(&["rank", dir.path().join("missing.csv").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn homology_all_methods_agree() {
    let out = barvinok(&["homology", "-d", "4", "-n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
    assert_eq!(v["results"][0]["homology"]["1"]["torsion"], serde_json::json!([2]));
    assert!(v["results"][0].get("millis").is_none());
}

#[test]
fn homology_method_subsets_and_options() {
    let out = barvinok(&["homology", "-d", "7", "-n", "5", "--methods", "cellular,morse,formula"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["agree"], true);

    let out = barvinok(&["homology", "-d", "3", "-n", "3", "--methods", "simplicial,formula", "--reduced", "--timings"]);
    let v = json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["inputs"]["reduced"], true);
    assert!(v["results"][0]["millis"].is_u64());

    let out = barvinok(&["homology", "-d", "5", "-n", "4", "--coeff", "z3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["inputs"]["coefficients"], "Z3");
}

#[test]
fn homology_error_codes() {
    assert_eq!(barvinok(&["homology", "-d", "2", "-n", "5"]).status.code(), Some(2));
    assert_eq!(barvinok(&["homology", "-d", "4", "-n", "4", "--coeff", "z4"]).status.code(), Some(2));
    assert_eq!(barvinok(&["homology", "-d", "4", "-n", "4", "--methods", "magic"]).status.code(), Some(2));
    let out = barvinok(&["homology", "-d", "5", "-n", "5", "--methods", "simplicial", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn export_boundaries_compose_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = barvinok(&["export", "-d", "3", "-n", "3", "--what", "boundaries", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("boundaries.json")).unwrap()).unwrap();
    assert_eq!(manifest["ranks"], serde_json::json!([18, 54, 36]));
    let maps: Vec<IntMatrix> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(dir.path().join(f["path"].as_str().unwrap())).unwrap();
            let (r, c) = (f["rows"].as_u64().unwrap() as usize, f["cols"].as_u64().unwrap() as usize);
            IntMatrix::from_triplet_csv(r, c, &text).unwrap()
        })
        .collect();
    assert_eq!(maps.len(), 2);
    assert!(maps[0].mul(&maps[1]).is_zero());
}

#[test]
fn export_complex() {
    let dir = tempfile::tempdir().unwrap();
    let read = |d: &str, n: &str| {
        let sub = dir.path().join(format!("{d}{n}"));
        let out = barvinok(&["export", "-d", d, "-n", n, "--what", "complex", "--out", sub.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_str::<Value>(&std::fs::read_to_string(sub.join("complex.json")).unwrap()).unwrap()
    };
    let v = read("3", "3");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 18);
    let v = read("3", "4");
    assert_eq!(v["simplices_by_dim"].as_array().unwrap().len(), 4);
}
