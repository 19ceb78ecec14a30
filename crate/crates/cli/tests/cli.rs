use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn coamoeba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coamoeba")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn spec_json(n: usize, terms: &[(&[i64], &str)]) -> String {
    let terms: Vec<Value> = terms
        .iter()
        .map(|(e, c)| serde_json::json!({ "exponent": e, "coefficient": c }))
        .collect();
    serde_json::json!({ "n": n, "terms": terms }).to_string()
}

fn pants() -> String {
    spec_json(2, &[(&[0, 0], "1"), (&[1, 0], "1"), (&[0, 1], "1")])
}

fn squares() -> String {
    spec_json(2, &[(&[2, 0], "1"), (&[0, 2], "1"), (&[0, 0], "1")])
}

fn disc() -> String {
    spec_json(2, &[(&[0, 0], "1"), (&[2, 0], "-1"), (&[0, 2], "-1")])
}

fn mixed() -> String {
    spec_json(2, &[(&[1, 0], "1"), (&[0, 2], "1"), (&[0, 0], "1")])
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, content).unwrap();
    p
}

fn analyze(dir: &TempDir, content: &str) -> Value {
    let p = write(dir, "spec.json", content);
    let out = coamoeba(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_worked_examples() {
    let dir = TempDir::new().unwrap();
    let r = analyze(&dir, &pants());
    assert_eq!(r["homology"]["betti"], serde_json::json!([1, 2, 0]));
    assert_eq!(r["defect"], 0);
    assert_eq!(r["galois_maximal_coamoeba"], true);
    assert_eq!(r["galois_maximal_CX"]["condition"], "conditional-on-conjecture-1.1");

    let r = analyze(&dir, &squares());
    assert_eq!(r["defect"], 2);
    assert_eq!(r["galois_maximal_coamoeba"], false);
    assert_eq!(r["real_part"]["component_count"], 0);

    let r = analyze(&dir, &mixed());
    assert_eq!(r["defect"], 0);
    assert_eq!(r["n_minus_rank2_A"], 1);

    let p = write(&dir, "disc.json", &disc());
    let text = stdout(&coamoeba(&["analyze", "--text", path(&p)]));
    assert!(text.lines().any(|l| l.starts_with("real components") && l.ends_with(" 4")), "{text}");
}

#[test]
fn invalid_input_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let degenerate = write(&dir, "bad.json", &spec_json(2, &[(&[0, 0], "1"), (&[1, 1], "1"), (&[2, 2], "1")]));
    let out = coamoeba(&["analyze", path(&degenerate)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n-simplex"));

    let garbage = write(&dir, "garbage.json", "{ not json");
    assert_eq!(coamoeba(&["analyze", path(&garbage)]).status.code(), Some(2));
    assert_eq!(coamoeba(&["analyze", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(coamoeba(&["analyze", "--bogus", path(&garbage)]).status.code(), Some(2));
    assert_eq!(coamoeba(&["snf", "[[1,2],[2,4]]"]).status.code(), Some(2));
}

#[test]
fn verify_agrees_with_analyze() {
    let dir = TempDir::new().unwrap();
    let shear = write(&dir, "shear.json", &spec_json(2, &[(&[0, 0], "1"), (&[2, 1], "1"), (&[1, 2], "1")]));
    let out = coamoeba(&["verify", path(&shear)]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rec["closed_betti"], serde_json::json!([1, 4, 0]));
    assert_eq!(rec["cubical"]["betti"], rec["closed_betti"]);
    assert_eq!(rec["doubled"]["betti"], rec["closed_betti"]);
    assert_eq!(rec["resolution_stable"], true);
    assert_eq!(rec["membership"]["disagreements"], 0);

    let report = analyze(&dir, &fs::read_to_string(&shear).unwrap());
    assert_eq!(report["homology"]["betti"], rec["closed_betti"]);
    assert_eq!(report["rank_closed"], rec["rank_closed"]);
    assert_eq!(report["snf"]["d"], rec["d"]);
}

#[test]
fn verify_reports_a_too_coarse_grid() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "pants.json", &pants());
    let out = coamoeba(&["verify", path(&p), "--resolution", "2", "--no-doubling"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cubical betti"));
    let rec: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rec["all_agree"], false);
}

#[test]
fn verify_skip_cubical_in_four_variables() {
    let dir = TempDir::new().unwrap();
    let four = write(
        &dir,
        "four.json",
        &spec_json(
            4,
            &[(&[0, 0, 0, 0], "1"), (&[1, 0, 0, 0], "1"), (&[0, 1, 0, 0], "1"), (&[0, 0, 1, 0], "1"), (&[0, 0, 0, 2], "-3/2")],
        ),
    );
    let out = coamoeba(&["verify", path(&four), "--skip-cubical"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rec["cubical"].is_null());
    assert_eq!(rec["rank_closed"], rec["rank_assembled"]);
    assert_eq!(coamoeba(&["verify", path(&four)]).status.code(), Some(2));
}

#[test]
fn verify_dumps_the_complex() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "pants.json", &pants());
    let dump = dir.path().join("cells.txt");
    let out = coamoeba(&["verify", path(&p), "--no-doubling", "--dump-complex", path(&dump)]);
    assert_eq!(out.status.code(), Some(0));
    let cells = fs::read_to_string(&dump).unwrap();
    assert!(cells.starts_with('#'));
    assert!(cells.lines().filter(|l| !l.starts_with('#')).count() > 100);
}

#[test]
fn render_is_self_contained_xml() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (pants(), 1),
        (spec_json(2, &[(&[0, 0], "1"), (&[2, 0], "-1"), (&[0, 2], "-1")]), 4),
        (spec_json(2, &[(&[0, 0], "1"), (&[2, 1], "1"), (&[1, 2], "1")]), 3),
    ];
    for (k, (spec, holes)) in cases.iter().enumerate() {
        let p = write(&dir, &format!("r{k}.json"), spec);
        let svg_path = dir.path().join(format!("r{k}.svg"));
        let out = coamoeba(&["render", path(&p), "-o", path(&svg_path), "--show-centers", "--show-conjugation"]);
        assert_eq!(out.status.code(), Some(0));
        let svg = fs::read_to_string(&svg_path).unwrap();
        let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("version"), Some("1.1"));
        for node in doc.descendants().filter(|n| n.is_element()) {
            for a in node.attributes() {
                assert!(!a.value().contains("://"), "{}", a.value());
                assert_ne!(a.name(), "href");
            }
            assert_ne!(node.tag_name().name(), "image");
        }
        let mut alphas: Vec<&str> = doc
            .descendants()
            .filter(|n| n.has_tag_name("polygon"))
            .filter_map(|n| n.attribute("data-alpha"))
            .collect();
        alphas.sort();
        alphas.dedup();
        assert_eq!(alphas.len(), *holes, "case {k}");
    }
    let three = write(&dir, "three.json", &spec_json(3, &[(&[0, 0, 0], "1"), (&[1, 0, 0], "1"), (&[0, 1, 0], "1"), (&[0, 0, 1], "1")]));
    assert_eq!(coamoeba(&["render", path(&three)]).status.code(), Some(2));
}

#[test]
fn batch_table() {
    let dir = TempDir::new().unwrap();
    let corpus = format!("{}\n{}\n{}\n", pants(), squares(), disc());
    let p = write(&dir, "c.jsonl", &corpus);
    let out = coamoeba(&["batch", path(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let tsv = stdout(&out);
    let rows: Vec<Vec<&str>> = tsv.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], "id");
    assert_eq!(rows[0].len(), 10);
    // defect column, in input order
    let defect = rows[0].iter().position(|&c| c == "defect").unwrap();
    assert_eq!(rows[1..].iter().map(|r| r[defect]).collect::<Vec<_>>(), ["0", "2", "0"]);

    let empty = write(&dir, "empty.jsonl", "");
    let out = coamoeba(&["batch", path(&empty)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);

    let broken = write(&dir, "broken.jsonl", &format!("{}\nnot json\n", pants()));
    let tsv = stdout(&coamoeba(&["batch", path(&broken)]));
    let last: Vec<&str> = tsv.lines().last().unwrap().split('\t').collect();
    assert!(!last[9].is_empty());

    let all_bad = write(&dir, "all_bad.jsonl", "nope\n{}\n");
    assert_eq!(coamoeba(&["batch", path(&all_bad)]).status.code(), Some(2));
}

#[test]
fn snf_subcommand() {
    let out = coamoeba(&["snf", "[[2,1],[1,2]]"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["D"], serde_json::json!([1, 3]));
    assert!(v["G"].is_array() && v["H"].is_array());
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "s.json", &squares());
    let corpus = write(&dir, "c.jsonl", &format!("{}\n{}\n{}\n{}\n", pants(), squares(), disc(), mixed()));
    let runs: [&[&str]; 5] = [
        &["analyze", path(&p)],
        &["verify", path(&p)],
        &["render", path(&p)],
        &["batch", path(&corpus)],
        &["snf", "[[4,6],[2,-8]]"],
    ];
    for args in runs {
        let (a, b) = (coamoeba(args), coamoeba(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
