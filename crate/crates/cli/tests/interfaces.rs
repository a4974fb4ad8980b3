//! File-format surfaces of the binary: detour path files, symbol-chain
//! files, sweep reports, and classification output.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_framecert"))
}

fn temp_file(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("framecert-interfaces");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> (serde_json::Value, i32) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("no signal");
    let stdout = String::from_utf8(out.stdout).expect("utf-8");
    let value = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("bad JSON from {args:?}: {e}\n{stdout}"));
    (value, code)
}

#[test]
fn detour_verify_reads_path_files() {
    let good = temp_file(
        "detour_m2.json",
        r#"{
  "r1": {"x": "0", "y": "1"},
  "r2": {"x": "0", "y": "0"},
  "path": [
    {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]},
    {"coords": [{"x": "1", "y": "0"}, {"x": "0", "y": "-1"}]},
    {"coords": [{"x": "0", "y": "0"}, {"x": "1", "y": "0"}]}
  ]
}"#,
    );
    let (cert, code) = run(&["detour", "verify", "-d", "-2", "--path", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(cert["valid"], true);
    assert_eq!(cert["type"], "detour");
    assert_eq!(cert["ring"], "d=-2");

    // a primitive middle vertex off the unit-determinant edges turns the
    // verdict around with exit code 1
    let broken = temp_file(
        "detour_m2_broken.json",
        r#"{
  "r1": {"x": "0", "y": "1"},
  "r2": {"x": "0", "y": "0"},
  "path": [
    {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]},
    {"coords": [{"x": "3", "y": "0"}, {"x": "1", "y": "0"}]},
    {"coords": [{"x": "0", "y": "0"}, {"x": "1", "y": "0"}]}
  ]
}"#,
    );
    let (cert, code) = run(&["detour", "verify", "-d", "-2", "--path", broken.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(cert["valid"], false);
    assert_eq!(cert["checks"]["edges_unit_determinant"], false);

    // an imprimitive vertex is a malformed path, which is a usage error
    let malformed = temp_file(
        "detour_m2_malformed.json",
        r#"{
  "r1": {"x": "0", "y": "1"},
  "r2": {"x": "0", "y": "0"},
  "path": [
    {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]},
    {"coords": [{"x": "2", "y": "1"}, {"x": "0", "y": "-1"}]},
    {"coords": [{"x": "0", "y": "0"}, {"x": "1", "y": "0"}]}
  ]
}"#,
    );
    let out =
        bin().args(["detour", "verify", "-d", "-2", "--path", malformed.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unreadable file is a usage error
    let out = bin().args(["detour", "verify", "-d", "-2", "--path", "/no/such/file"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn byk_check_reads_chain_files() {
    // the closed four-symbol chain telescopes to the zero line sum
    let chain = temp_file(
        "chain7.json",
        r#"{
  "ring": "d=7",
  "terms": [
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "1", "y": "0"}, {"x": "0", "y": "0"}]},
      {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]}
    ]},
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]},
      {"coords": [{"x": "8", "y": "0"}, {"x": "-3", "y": "0"}]}
    ]},
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "8", "y": "0"}, {"x": "-3", "y": "0"}]},
      {"coords": [{"x": "-3", "y": "0"}, {"x": "1", "y": "0"}]}
    ]},
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "-3", "y": "0"}, {"x": "1", "y": "0"}]},
      {"coords": [{"x": "1", "y": "0"}, {"x": "0", "y": "0"}]}
    ]}
  ]
}"#,
    );
    let (report, code) = run(&["byk", "check", "--in", chain.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["image_is_zero"], true);
    assert_eq!(report["apartment_image"].as_array().unwrap().len(), 0);
    assert_eq!(report["normalized"]["terms"].as_array().unwrap().len(), 4);

    // an open chain has a nonzero image
    let open_chain = temp_file(
        "chain7_open.json",
        r#"{
  "ring": "d=7",
  "terms": [
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "1", "y": "0"}, {"x": "0", "y": "0"}]},
      {"coords": [{"x": "0", "y": "1"}, {"x": "1", "y": "0"}]}
    ]}
  ]
}"#,
    );
    let (report, code) = run(&["byk", "check", "--in", open_chain.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["image_is_zero"], false);
    assert_eq!(report["apartment_image"].as_array().unwrap().len(), 2);

    // a non-basis symbol is a mathematical failure, exit 1
    let bad = temp_file(
        "chain_bad.json",
        r#"{
  "ring": "d=-1",
  "terms": [
    {"coeff": "1", "vectors": [
      {"coords": [{"x": "1", "y": "0"}, {"x": "0", "y": "0"}]},
      {"coords": [{"x": "2", "y": "0"}, {"x": "0", "y": "0"}]}
    ]}
  ]
}"#,
    );
    let out = bin().args(["byk", "check", "--in", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn detour_construct_covers_both_routes() {
    // one-step completion route
    let (cert, code) = run(&["detour", "construct", "-d", "6"]);
    assert_eq!(code, 0);
    assert_eq!(cert["valid"], true);
    assert_eq!(cert["path"].as_array().unwrap().len(), 3);
    // rational Farey fallback route (no one-step completion exists)
    let (cert, code) = run(&["detour", "construct", "-d", "19"]);
    assert_eq!(code, 0);
    assert_eq!(cert["valid"], true);
    assert!(cert["path"].as_array().unwrap().len() > 3);
    // unit-generated rings refuse with a usage error
    let out = bin().args(["detour", "construct", "-d", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_rows_cover_the_range() {
    let (report, code) = run(&["classify", "--from", "-11", "--to", "-1"]);
    assert_eq!(code, 0);
    let rows = report["rows"].as_array().unwrap();
    let euclidean: Vec<i64> = rows
        .iter()
        .filter(|r| r["norm_euclidean"] == true)
        .map(|r| r["d"].as_i64().unwrap())
        .collect();
    assert_eq!(euclidean, vec![-11, -7, -3, -2, -1]);
    let unit_generated: Vec<i64> = rows
        .iter()
        .filter(|r| r["norm_euclidean"] == true && r["generated_by_units"] == true)
        .map(|r| r["d"].as_i64().unwrap())
        .collect();
    assert_eq!(unit_generated, vec![-3, -1]);
    // 4 is not squarefree: no row at all
    let (report, _) = run(&["classify", "--from", "4", "--to", "4"]);
    assert!(report["rows"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_reports_record_failures_as_data() {
    let out = bin().args(["verify", "lem1", "-d", "-7", "--grid", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["ring"], "d=-7");
    assert_eq!(report["lemma"], "LEM1");
    let failures = report["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    // each failure carries the offending grid point
    assert!(failures[0]["z"]["x"].is_string());
}

#[test]
fn complex_dump_to_stdout_loads_back() {
    let out = bin()
        .args(["complex", "build", "--kind", "B", "-d", "-3", "-n", "1", "-m", "1", "--bound", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let cx = framecert::complexes::load_json(&text).unwrap();
    assert_eq!(cx.ring.d, -3);
    assert_eq!((cx.n, cx.m), (1, 1));
    assert_eq!(framecert::complexes::dump_json(&cx), text.trim_end());
}
