use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cubical::complex::catalog;
use cubical::opcalc::Flavor;
use serde_json::{json, Value};
use tempfile::TempDir;

fn cubical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubical")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = cubical(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json_of(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn save(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn degeneracy_then_face_is_the_identity() {
    assert_eq!(ok(&["normalize", "--dim", "1", "s(1),d(1,0)"]), "id\n");
    assert_eq!(ok(&["compose", "--dim", "1", "s(1)", "d(1,0)"]), "id\n");
    // both faces of a degenerate edge are the vertex
    assert_eq!(ok(&["normalize", "--dim", "0", "s(1),d(1,1)"]), "id\n");
}

#[test]
fn words_print_faces_first() {
    // on a 2-cube, degenerate then take a face in the new direction: the degeneracy is undone
    assert_eq!(ok(&["normalize", "--dim", "2", "s(3),d(3,0)"]), "id\n");
    let w = ok(&["normalize", "--dim", "2", "s(1),d(3,1)"]);
    assert_eq!(w, "d(2,1),s(1)\n");
}

#[test]
fn comical_cube_from_the_catalog() {
    let doc = json_of(&ok(&["catalog", "comical-cube", "--n", "2", "--face", "1,0"]));
    let cubes = doc["cubes"].as_array().unwrap();
    let top = cubes.iter().find(|c| c["dim"] == 2).unwrap();
    assert_eq!(top["marked"], true);
    let face = top["faces"]["(2,1)"].clone();
    assert_eq!(face[0], "id");
    let k = face[1].as_u64().unwrap() as usize;
    assert_eq!(cubes[k]["marked"], true);
    let marked: Vec<&Value> = cubes.iter().filter(|c| c["marked"] == true).collect();
    assert_eq!(marked.len(), 2);
    let lib = catalog::comical_cube(2, 1, 0, Flavor::NONE).unwrap();
    assert_eq!(cubes.len(), lib.len());
    assert_eq!(lib.marked_counts().iter().sum::<usize>(), 2);
}

fn terminal_map_document(dir: &TempDir) -> PathBuf {
    let c1 = json_of(&ok(&["catalog", "standard-cube", "--n", "1"]));
    let mut pt = json_of(&ok(&["catalog", "standard-cube", "--n", "0"]));
    pt["maps"] = json!([{
        "name": "p",
        "domain": c1,
        "codomain": "self",
        "assignment": [["id", 0], ["id", 0], ["s(1)", 0]],
    }]);
    save(dir, "p.json", &pt.to_string())
}

#[test]
fn an_edge_lifts_against_one_dimensional_boxes() {
    let dir = TempDir::new().unwrap();
    let p = terminal_map_document(&dir);
    let o = cubical(&["rlp", "--map", arg(&p), "--gen", "comical-box", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&stdout(&o))["verdict"], true);
    // but not against two-dimensional ones: a corner of the square has no filler in □^1
    let o = cubical(&["rlp", "--map", arg(&p), "--gen", "comical-box", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&stdout(&o));
    assert_eq!(v["verdict"], false);
    assert!(v["square"]["top"].is_array());
}

#[test]
fn canonicalization_round_trip() {
    let dir = TempDir::new().unwrap();
    let canon = ok(&["catalog", "comical-cube", "--n", "2", "--face", "2,1", "--flavor", "0"]);
    // printing the parsed document changes nothing
    let c = save(&dir, "c.json", &canon);
    assert_eq!(ok(&["trivialize", "--n", "9", arg(&c)]), canon);
    // a scrambled, compact copy with redundant words canonicalizes back
    let mut doc = json_of(&canon);
    for cube in doc["cubes"].as_array_mut().unwrap() {
        let edge = cube["dim"] == 1;
        for (_, f) in cube["faces"].as_object_mut().unwrap() {
            if f[0] == "id" && edge {
                f[0] = json!("s(1),d(1,1)");
            }
        }
    }
    doc["cubes"].as_array_mut().unwrap().reverse();
    let messy = save(&dir, "m.json", &doc.to_string());
    assert_eq!(ok(&["trivialize", "--n", "9", arg(&messy)]), canon);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let c = save(&dir, "c.json", &ok(&["catalog", "standard-cube", "--n", "1"]));
    let run = || ok(&["wcs-synthesize", "--flavor", "01", "--cap", "2", arg(&c)]);
    assert_eq!(run(), run());
    let rnd = || ok(&["catalog", "random", "--seed", "11", "--n", "2", "--flavor", "1"]);
    assert_eq!(rnd(), rnd());
    let other = ok(&["catalog", "random", "--seed", "12", "--n", "2", "--flavor", "1", "--steps", "9"]);
    assert!(json_of(&other)["cubes"].is_array());
}

#[test]
fn synthesized_structures_validate() {
    let dir = TempDir::new().unwrap();
    let c = save(&dir, "c.json", &ok(&["catalog", "standard-cube", "--n", "1"]));
    let w = save(&dir, "w.json", &ok(&["wcs-synthesize", "--flavor", "0", "--cap", "2", arg(&c)]));
    let v = json_of(&ok(&["wcs-validate", arg(&w)]));
    assert_eq!(v["verdict"], true);
    // break one value: the verdict flips and the exit code says so
    let mut doc = json_of(&fs::read_to_string(&w).unwrap());
    let values = doc["values"].as_array_mut().unwrap();
    let i = values.iter().position(|v| v["word"] != "id").unwrap();
    let j = values.iter().position(|v| v["word"] == "id" && v["cube"] == 2).unwrap();
    values[i]["value"] = values[j]["value"].clone();
    let broken = save(&dir, "b.json", &doc.to_string());
    let o = cubical(&["wcs-validate", arg(&broken)]);
    match o.status.code() {
        Some(1) => assert_eq!(json_of(&stdout(&o))["verdict"], false),
        // a value of the wrong dimension is already rejected on input
        code => assert_eq!(code, Some(2)),
    }
}

#[test]
fn strong_structures_promote_through_the_pipeline() {
    let dir = TempDir::new().unwrap();
    let c = save(&dir, "c.json", &ok(&["catalog", "standard-cube", "--n", "1"]));
    let s = save(&dir, "s.json", &ok(&["scs-extend", "--flavor", "0", "--cap", "3", arg(&c)]));
    assert_eq!(json_of(&ok(&["wcs-validate", "--strong", arg(&s)]))["strong"], true);
    let p = json_of(&ok(&["promote", arg(&s)]));
    let expected = json_of(&ok(&["catalog", "standard-cube", "--n", "1", "--flavor", "0"]));
    assert_eq!(p, expected);
}

#[test]
fn collapsing_a_square() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &ok(&["catalog", "standard-cube", "--n", "1"]));
    let b = save(&dir, "b.json", &ok(&["catalog", "marked-cube", "--n", "1"]));
    let mut sq = json_of(&ok(&["tensor", arg(&a), arg(&b)]));
    let n = sq["cubes"].as_array().unwrap().len();
    let assignment: Vec<Value> = (0..n).map(|c| json!(["id", c])).collect();
    sq["maps"] = json!([{ "name": "x", "domain": "self", "codomain": "self", "assignment": assignment }]);
    let x = save(&dir, "x.json", &sq.to_string());
    let q = json_of(&ok(&["quotient-collapse", arg(&x)]));
    let images: Vec<Value> = q["maps"][0]["assignment"].as_array().unwrap().clone();
    let mut distinct = images.clone();
    distinct.sort_by_key(|v| v.to_string());
    distinct.dedup();
    // two vertices and an edge; the square and the marked edges become degenerate
    assert_eq!(q["cubes"].as_array().unwrap().len(), 3);
    assert_eq!(distinct.iter().filter(|v| v[0] == "id").count(), 3);
    assert_eq!(distinct.len(), 6);
}

#[test]
fn pushout_of_two_edges_at_a_vertex() {
    let dir = TempDir::new().unwrap();
    let c1 = json_of(&ok(&["catalog", "standard-cube", "--n", "1"]));
    let pt = json_of(&ok(&["catalog", "standard-cube", "--n", "0"]));
    let leg = |v: usize| {
        let mut d = c1.clone();
        d["maps"] = json!([{ "name": "v", "domain": pt, "codomain": "self", "assignment": [["id", v]] }]);
        d.to_string()
    };
    let f = save(&dir, "f.json", &leg(1));
    let g = save(&dir, "g.json", &leg(0));
    let po = json_of(&ok(&["pushout", arg(&f), arg(&g)]));
    let dims: Vec<u64> = po["cubes"].as_array().unwrap().iter().map(|c| c["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 3);
    assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 2);
    assert_eq!(po["maps"].as_array().unwrap().len(), 2);
}

#[test]
fn other_transforms_run() {
    let dir = TempDir::new().unwrap();
    let c = save(&dir, "c.json", &ok(&["catalog", "standard-cube", "--n", "2"]));
    let t = json_of(&ok(&["triangulate", arg(&c)]));
    let tops = t["simplices"].as_array().unwrap().iter().filter(|s| s["dim"] == 2).count();
    assert_eq!(tops, 2);
    let f = json_of(&ok(&["ifree", "--flavor", "01", arg(&c)]));
    assert_eq!(f["flavor"], "01");
    let back = save(&dir, "f.json", &f.to_string());
    let g = json_of(&ok(&["iforget", "--cap", "2", arg(&back)]));
    assert_eq!(g["flavor"], "none");
    for how in ["core", "forget"] {
        ok(&["mark", how, arg(&c)]);
    }
    let e = save(&dir, "e.json", &ok(&["catalog", "standard-cube", "--n", "2", "--regime", "edge"]));
    let sharp = json_of(&ok(&["mark", "sharp", arg(&e)]));
    assert_eq!(sharp["regime"], "full");
    assert!(sharp["cubes"].as_array().unwrap().iter().any(|c| c["dim"] == 2 && c["marked"] == true));
    let flat = json_of(&ok(&["mark", "flat", arg(&e)]));
    assert!(flat["cubes"].as_array().unwrap().iter().all(|c| c["dim"] != 2 || c["marked"] == false));
    // no regime above the full one
    assert_eq!(cubical(&["mark", "flat", arg(&c)]).status.code(), Some(2));
    ok(&["icofree", "--flavor", "0", "--top", "1", "--cap", "2", arg(&c)]);
    ok(&["fibrant-approx", "--cap", "1", arg(&c)]);
    let tf = json_of(&ok(&["tailform", "--dim", "1", "g(1,0),g(1,0)"]));
    // a run of equal connections is a single tail of length two
    assert_eq!((tf["head"].as_str(), tf["j"].as_u64(), tf["q"].as_u64()), (Some("id"), Some(1), Some(2)));
    assert_eq!(tf["tail"], ok(&["normalize", "--dim", "1", "g(1,0),g(1,0)"]).trim());
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = save(&dir, "bad.json", "{\"version\": 1,\n  \"flavor\": }");
    let o = cubical(&["triangulate", arg(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    let o = cubical(&["normalize", "--dim", "1", "d(3,0)"]);
    assert_eq!(o.status.code(), Some(2));
    let c = save(&dir, "c.json", &ok(&["catalog", "standard-cube", "--n", "1"]));
    let o = cubical(&["icofree", "--flavor", "0", "--top", "3", "--cap", "2", arg(&c)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("dimension 3"));
    assert_eq!(cubical(&["catalog", "no-such-family"]).status.code(), Some(2));
}

#[test]
fn output_can_go_to_a_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.json");
    let printed = ok(&["catalog", "boundary", "--n", "2"]);
    assert_eq!(ok(&["catalog", "boundary", "--n", "2", "--out", arg(&out)]), "");
    assert_eq!(fs::read_to_string(out).unwrap(), printed);
}
